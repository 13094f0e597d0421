#pragma once

#include "fimsar/common.hpp"
#include "fimsar/waveform.hpp"

#include <string>
#include <utility>

namespace fimsar {

/** |χ(τ, ξ)| sampled on a delay/Doppler grid; values are stored one row per Doppler bin. */
struct AmbiguityGrid {
    std::vector<double> tau;   ///< s
    std::vector<double> xi;    ///< Hz
    std::vector<double> values;
    double at(std::size_t ixi, std::size_t itau) const { return values[ixi * tau.size() + itau]; }
};

struct AmbiguityGridSpec {
    std::vector<double> tau;
    std::vector<double> xi;
};

/** 1-D magnitude profile on a uniform axis. */
struct ProfileCut {
    std::vector<double> axis;
    std::vector<double> magnitude;
    std::size_t peak_index = 0;
    std::string units;
    double nominal_resolution = 0;   ///< optional, same units as axis; 0 when unknown

    double step() const { return axis.size() > 1 ? axis[1] - axis[0] : 0.0; }
};

ProfileCut make_cut(std::vector<double> axis, std::vector<double> magnitude, std::string units);

/** Uniform grid of n points from `start` with spacing `step`. */
std::vector<double> linspace_step(double start, double step, std::size_t n);
/** Symmetric grid -half..half (inclusive) with the given step; contains 0. */
std::vector<double> symmetric_grid(double step, std::size_t half_count);

/**
 * Numeric ambiguity of one sampled pulse. Delays must be integer multiples of 1/fs.
 * Each sample is held over its cell and the Doppler exponential is integrated exactly
 * across the cell, so the zero-delay cut is exact for a constant-envelope pulse.
 */
AmbiguityGrid ambiguity_numeric(const CVector& pulse, const DerivedParams& p, const AmbiguityGridSpec& spec,
                                unsigned threads = 1);

double ambiguity_principal_closed_form(const DerivedParams& p, const std::vector<int>& indices, double tau,
                                       double xi);
AmbiguityGrid ambiguity_closed_form_grid(const DerivedParams& p, const std::vector<int>& indices,
                                         const AmbiguityGridSpec& spec, unsigned threads = 1);

ProfileCut doppler_cut_closed_form(const DerivedParams& p, const std::vector<double>& xi);
ProfileCut range_cut_closed_form(const DerivedParams& p, const std::vector<int>& indices,
                                 const std::vector<double>& tau);

/** Width between the −3 dB crossings around the global peak, linearly interpolated. */
double measure_cut_resolution(const ProfileCut& cut);
/** Energy-equivalent width Σ|x|²·Δ / max|x|². */
double equivalent_width(const ProfileCut& cut);

/** (c/(2Bw), c/(2Bs)): finest and coarsest achievable range resolution. */
std::pair<double, double> resolution_bounds(const DerivedParams& p);

}  // namespace fimsar
