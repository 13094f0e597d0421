#pragma once

#include "fimsar/comm.hpp"
#include "fimsar/echo.hpp"
#include "fimsar/imaging.hpp"
#include "fimsar/waveform.hpp"

#include <string>

namespace fimsar {

struct AmbiguitySettings {
    std::size_t max_delay_samples = 200;
    std::size_t delay_step_samples = 1;
    double max_doppler = 200e3;
    double doppler_step = 1e3;
};

struct BerSettings {
    std::vector<double> snr_db{0, 5, 10, 15, 20, 25, 30};
    std::uint64_t trials = 1000;
    BerEngine engine = BerEngine::Waveform;
};

/** Everything a command needs; targets hold absolute coordinates. */
struct RunConfig {
    WaveformConfig waveform;
    Geometry geometry;
    double scene_range_extent = 1000;
    double scene_azimuth_extent = 300;
    std::vector<PointTarget> targets;
    Acquisition acquisition;
    double window_guard = 1e-6;
    std::vector<int> index_pattern;   ///< empty: random indices
    ChannelConfig channel;
    FocusOptions pipeline;
    AmbiguitySettings ambiguity;
    BerSettings ber;
    std::string output_dir = "out";
    double db_floor = -60;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    SceneExtent scene() const { return centered_extent(geometry, scene_range_extent, scene_azimuth_extent); }
};

/** Parses `key = value` lines. Unknown, duplicate or malformed keys raise ConfigError naming the key. */
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/** Applies one override with the same typing rules, then re-validates. */
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
void validate(RunConfig& cfg);

/** Documented keys with their default values, in file order. */
std::string config_reference();

/** Frame used by the SAR and waveform commands: K pulses from the config seed. */
FimFrame make_frame(const RunConfig& cfg);
/** Acquisition with the fast window planned for the configured scene. */
Acquisition planned_acquisition(const RunConfig& cfg, const DerivedParams& p);

}  // namespace fimsar
