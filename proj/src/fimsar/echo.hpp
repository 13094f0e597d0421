#pragma once

#include "fimsar/common.hpp"
#include "fimsar/waveform.hpp"

#include <limits>
#include <string>

namespace fimsar {

/** Straight-line platform at (0, v·s, h) looking down at the scene center. */
struct Geometry {
    double h = 20e3;
    double v = 100.0;
    double depression_deg = 60.0;
    double antenna_len = 2.0;

    double R0() const { return h / std::sin(depression_deg * kPi / 180.0); }
    double scene_center_x() const { return h / std::tan(depression_deg * kPi / 180.0); }
};

void validate(const Geometry& g);

struct PointTarget {
    std::string id;
    double x = 0;          ///< ground range (m)
    double y = 0;          ///< azimuth (m)
    Complex sigma = 1.0;
};

/** Rectangle in (ground range, azimuth) that every target must lie in. */
struct SceneExtent {
    double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
    bool contains(double x, double y) const { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }
};

/** Extent of width_range x width_azimuth centered on the geometry's scene center. */
SceneExtent centered_extent(const Geometry& g, double width_range, double width_azimuth);

enum class EchoLayout { Separated, Gated };

struct Acquisition {
    double PRF = 400.0;
    std::size_t K = 256;
    double window_start = 0;     ///< s, relative to sub-pulse emission
    std::size_t window_samples = 0;
    std::uint64_t seed = 1;
    double noise_snr_db = std::numeric_limits<double>::infinity();
    EchoLayout layout = EchoLayout::Separated;

    double slow_time(std::size_t k) const {
        return (static_cast<double>(k) - static_cast<double>(K) / 2.0) / PRF;
    }
};

/** Default PRF: four times the azimuth Doppler bandwidth 2v/antenna_len. */
double default_prf(const Geometry& g);

/**
 * Sizes the receive window: from the earliest scene delay minus a guard to the latest
 * scene delay plus Ts plus a guard, rounded to an FFT-friendly multiple of q samples.
 */
void plan_fast_window(Acquisition& acq, const DerivedParams& p, const Geometry& g, const SceneExtent& scene,
                      double guard_s = 1e-6);

struct SlantRange {
    double exact;
    double taylor;
};

SlantRange slant_range(const Geometry& g, const PointTarget& t, double s);
/** Two-way Doppler of sub-band a at slow time s. */
double instantaneous_doppler(const Geometry& g, const PointTarget& t, const WaveformConfig& cfg,
                             const DerivedParams& p, int a, double s);

/** Echo samples, one row per (pulse k, sub-pulse m) at row k*M + m. */
struct EchoCube {
    CMatrix data;
    double fs = 0;
    double window_start = 0;
    double PRF = 0;
    std::size_t K = 0;
    int M = 0;
    std::vector<double> gate_offset;   ///< start of row m's gate relative to pulse emission, minus window_start
    EchoLayout layout = EchoLayout::Separated;
    FimFrame frame;
};

EchoCube simulate_echo(const WaveformConfig& cfg, const DerivedParams& p, const Geometry& g,
                       const Acquisition& acq, const FimFrame& frame, const std::vector<PointTarget>& targets,
                       unsigned threads = 1);

}  // namespace fimsar
