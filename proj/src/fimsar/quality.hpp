#pragma once

#include "fimsar/ambiguity.hpp"
#include "fimsar/echo.hpp"
#include "fimsar/imaging.hpp"

#include <string>
#include <utility>

namespace fimsar {

struct TargetReport {
    std::string id;
    double range_resolution = 0;     ///< m, −3 dB width
    double azimuth_resolution = 0;   ///< m, −3 dB width
    double range_pslr = 0;           ///< dB
    double azimuth_pslr = 0;
    double range_islr = 0;
    double azimuth_islr = 0;
    double peak_range_bin = 0;       ///< fractional bins
    double peak_azimuth_bin = 0;
    double peak_range_m = 0;
    double peak_azimuth_m = 0;
    double peak_magnitude = 0;
    double range_equivalent_width = 0;     ///< m, energy-equivalent width
    double azimuth_equivalent_width = 0;
};

struct PeakHint {
    double range_m = 0;
    double azimuth_m = 0;
    double range_radius_m = 10;
    double azimuth_radius_m = 10;
};

struct ProfileOptions {
    std::size_t interp_factor = 16;
    double range_half_extent_m = 0;     ///< crop; 0 keeps the whole line
    double azimuth_half_extent_m = 0;
    double range_nominal_m = 0;         ///< fallback null spacing
    double azimuth_nominal_m = 0;
};

/** Cut axes are offsets (m) from the refined peak. */
struct Profiles {
    ProfileCut range;
    ProfileCut azimuth;
    double range_bin = 0;     ///< fractional peak position
    double azimuth_bin = 0;
    double peak_magnitude = 0;
};

/**
 * Band-limited interpolation of a periodic line by zero padding its spectrum. The zeros are
 * inserted where the spectrum has the least energy so band-pass lines interpolate correctly.
 */
CVector interpolate_line(const CVector& x, std::size_t factor);
/** Bin at which zero padding is inserted for a spectrum (center of its quietest eighth). */
std::size_t spectral_gap(const CVector& spectrum);
std::size_t spectral_gap_of_energy(const std::vector<double>& energy);

Profiles extract_profiles(const SarImage& img, const PeakHint& hint, const ProfileOptions& opt = {});

/** Indices of the first nulls left/right of the peak. */
std::pair<std::size_t, std::size_t> mainlobe_nulls(const ProfileCut& cut);
double pslr(const ProfileCut& cut);
double islr(const ProfileCut& cut);

inline constexpr double kMetricFloorDb = -60.0;
/** Half-width of the cuts used for PSLR/ISLR, in nominal resolution cells. */
inline constexpr double kSidelobeExtentCells = 10.0;

TargetReport report_target(const SarImage& img, const PointTarget& target, const Geometry& g,
                           const DerivedParams& p, std::size_t interp_factor = 16);

}  // namespace fimsar
