#pragma once

#include "fimsar/common.hpp"

namespace fimsar::fft {

// Unnormalized DFTs. forward uses exp(-j2πkn/N), backward exp(+j2πkn/N).
// Plans are cached per length; execution is safe from several threads.
void forward(const Complex* in, Complex* out, std::size_t n);
void backward(const Complex* in, Complex* out, std::size_t n);

CVector forward(const CVector& in);
CVector backward(const CVector& in);

/** Smallest n >= min_n that is a multiple of `multiple` and has only factors 2, 3, 5, 7. */
std::size_t smooth_size(std::size_t min_n, std::size_t multiple = 1);

}  // namespace fimsar::fft
