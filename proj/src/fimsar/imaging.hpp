#pragma once

#include "fimsar/common.hpp"
#include "fimsar/echo.hpp"
#include "fimsar/waveform.hpp"

#include <string>

namespace fimsar {

/** Range-compressed data, one row per pulse. Row time axis: t0 + n/fs (s, two-way). */
struct RangeCompressedMatrix {
    CMatrix data;
    double fs = 0;               ///< output sample rate
    double t0 = 0;               ///< time of sample 0
    double PRF = 0;
    double band_center = 0;      ///< center of the occupied range band (Hz)
    double bandwidth = 0;        ///< occupied range bandwidth (Hz)
    bool doppler_domain = false; ///< rows are Doppler bins after rcmc
    std::vector<std::string> steps;
};

/** Focused image: rows are range bins, columns azimuth bins. */
struct SarImage {
    CMatrix data;
    Axis range;     ///< slant range (m)
    Axis azimuth;   ///< along-track position (m)
    double fc = 0;
    double range_bandwidth = 0;
    double doppler_bandwidth = 0;   ///< processed azimuth bandwidth (Hz)
    double v = 0;
    std::vector<std::string> steps;
};

/**
 * Sub-band compression filter shared by all sub-pulses: brick-wall over the Nb bins of the
 * base sub-band, inverse of the sampled base sub-chirp spectrum inside it.
 */
struct CompensationFilter {
    std::size_t Nw = 0;     ///< DFT length
    std::size_t Nb = 0;     ///< bins per sub-band
    double fs = 0;
    CVector response;       ///< Nb values for local bins 0..Nb-1
};

CompensationFilter make_compensation_filter(const DerivedParams& p, std::size_t Nw);

EchoCube remove_qam(const EchoCube& cube, const FimFrame& frame);

/**
 * Per sub-pulse: DFT, sub-band filter with time alignment, shift by a·Bs on the full-band
 * grid, accumulate over the pulse and inverse DFT. Output is zero-padded by `pad`.
 */
RangeCompressedMatrix subpulse_compensate(const EchoCube& cube, const FimFrame& frame, const DerivedParams& p,
                                          std::size_t pad = 1, unsigned threads = 1);

/** Conventional receiver: reassemble each pulse and inverse-filter it against the un-hopped chirp. */
RangeCompressedMatrix conventional_range_compress(const EchoCube& cube, const DerivedParams& p,
                                                  std::size_t pad = 1, unsigned threads = 1);

/** Samples x at fractional position u with an 8-tap Hann-windowed sinc; zero outside. */
Complex interpolate_8tap(const Complex* x, std::size_t n, double u);

/** Azimuth DFT of every range bin. */
RangeCompressedMatrix to_doppler(const RangeCompressedMatrix& m, unsigned threads = 1);
/** Doppler frequency of row i for K rows at the given PRF. */
double doppler_of_row(std::size_t i, std::size_t K, double PRF);
/**
 * Shifts the envelope of each pulse by the exact migration of a target at closest range
 * `reference_range`, so pulses with different range responses are aligned before the azimuth
 * DFT mixes them. The phase at the occupied band center is left unchanged.
 */
RangeCompressedMatrix align_pulses(const RangeCompressedMatrix& m, const Geometry& g, double reference_range,
                                   unsigned threads = 1);
/**
 * Range cell migration correction on a Doppler-domain matrix. With a nonzero reference range
 * the envelope moves only by the migration left after align_pulses at that range; the phase
 * correction always covers the full migration.
 */
RangeCompressedMatrix rcmc_doppler(const RangeCompressedMatrix& m, const Geometry& g, double fc,
                                   unsigned threads = 1, double reference_range = 0);
/** Pulse alignment at the scene-center range, then the residual correction in the Doppler domain. */
RangeCompressedMatrix rcmc(const RangeCompressedMatrix& m, const Geometry& g, double fc, unsigned threads = 1);

struct AzimuthOptions {
    bool flip_rate_sign = false;   ///< regression hook: deliberately wrong matched filter
    unsigned threads = 1;
};

double azimuth_fm_rate(const Geometry& g, double fc, double R0);

SarImage azimuth_compress(const RangeCompressedMatrix& m, const Geometry& g, double fc_eff,
                          const AzimuthOptions& opt = {});

struct FocusOptions {
    bool skip_qam_removal = false;
    bool skip_compensation = false;
    std::size_t range_upsample = 2;
    unsigned threads = 1;
};

SarImage focus_rda(const EchoCube& cube, const FimFrame& frame, const Geometry& g, const WaveformConfig& cfg,
                   const DerivedParams& p, const FocusOptions& opt = {});

}  // namespace fimsar
