#include "fimsar/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace fimsar {
namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    if (v == "-inf") return -std::numeric_limits<double>::infinity();
    double out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError(key, "expected a number, got '" + v + "'");
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError(key, "expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    long long x = to_int(key, v);
    if (x < 0) throw ConfigError(key, "must be non-negative");
    return static_cast<std::uint64_t>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<double> to_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    for (const auto& s : split(v, ',')) out.push_back(to_double(key, s));
    return out;
}

const std::string kRequired = "<required>";

struct KeySpec {
    std::string key;
    std::string default_text;   // "<required>" for keys without a default
    std::string doc;
    std::function<void(RunConfig&, const std::string&)> apply;
};

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = [] {
        std::vector<KeySpec> t;
        auto num = [&t](std::string k, std::string def, std::string doc, std::function<double&(RunConfig&)> ref) {
            t.push_back({k, def, doc, [k, ref](RunConfig& c, const std::string& v) { ref(c) = to_double(k, v); }});
        };
        num("waveform.fc", kRequired, "carrier frequency, Hz", [](RunConfig& c) -> double& { return c.waveform.fc; });
        num("waveform.Bw", kRequired, "total bandwidth, Hz", [](RunConfig& c) -> double& { return c.waveform.Bw; });
        num("waveform.Tw", kRequired, "pulse width, s", [](RunConfig& c) -> double& { return c.waveform.Tw; });
        t.push_back({"waveform.M", "4", "sub-pulses per pulse", [](RunConfig& c, const std::string& v) {
                         c.waveform.M = static_cast<int>(to_int("waveform.M", v));
                     }});
        t.push_back({"waveform.J", "4", "QAM order (4, 16, 64)", [](RunConfig& c, const std::string& v) {
                         c.waveform.J = static_cast<int>(to_int("waveform.J", v));
                     }});
        num("waveform.P", "1", "transmit power scale", [](RunConfig& c) -> double& { return c.waveform.P; });
        num("waveform.osf", "1.25", "oversampling factor; fs = ceil(osf*M)*Bs",
            [](RunConfig& c) -> double& { return c.waveform.osf; });
        num("geometry.h", "20000", "platform altitude, m", [](RunConfig& c) -> double& { return c.geometry.h; });
        num("geometry.v", "100", "platform speed, m/s", [](RunConfig& c) -> double& { return c.geometry.v; });
        num("geometry.depression_deg", "60", "depression angle to scene center, deg",
            [](RunConfig& c) -> double& { return c.geometry.depression_deg; });
        num("geometry.antenna_len", "2", "azimuth antenna length, m",
            [](RunConfig& c) -> double& { return c.geometry.antenna_len; });
        num("scene.range_extent", "1000", "ground-range extent of the scene, m",
            [](RunConfig& c) -> double& { return c.scene_range_extent; });
        num("scene.azimuth_extent", "300", "azimuth extent of the scene, m",
            [](RunConfig& c) -> double& { return c.scene_azimuth_extent; });
        num("acquisition.PRF", "0", "pulse repetition frequency, Hz; 0 selects 8*v/antenna_len",
            [](RunConfig& c) -> double& { return c.acquisition.PRF; });
        t.push_back({"acquisition.K", "256", "pulse count", [](RunConfig& c, const std::string& v) {
                         c.acquisition.K = to_uint("acquisition.K", v);
                     }});
        num("acquisition.noise_snr_db", "inf", "echo SNR per sample, dB; inf for noiseless",
            [](RunConfig& c) -> double& { return c.acquisition.noise_snr_db; });
        t.push_back({"acquisition.layout", "separated", "separated | gated", [](RunConfig& c, const std::string& v) {
                         if (v == "separated")
                             c.acquisition.layout = EchoLayout::Separated;
                         else if (v == "gated")
                             c.acquisition.layout = EchoLayout::Gated;
                         else
                             throw ConfigError("acquisition.layout", "expected separated or gated, got '" + v + "'");
                     }});
        num("acquisition.guard", "1e-6", "receive-window guard on each side, s",
            [](RunConfig& c) -> double& { return c.window_guard; });
        t.push_back({"frame.pattern", "", "comma list of M indices used on every pulse; empty for random",
                     [](RunConfig& c, const std::string& v) {
                         c.index_pattern.clear();
                         if (trim(v).empty()) return;
                         for (const auto& s : split(v, ','))
                             c.index_pattern.push_back(static_cast<int>(to_int("frame.pattern", s)));
                     }});
        num("channel.sigma2", "1", "fading variance", [](RunConfig& c) -> double& { return c.channel.sigma2; });
        num("channel.snr_db", "inf", "SNR 10*log10(P^2/N0), dB",
            [](RunConfig& c) -> double& { return c.channel.snr_db; });
        t.push_back({"channel.csi", "true", "receiver knows h (only true is supported)",
                     [](RunConfig& c, const std::string& v) { c.channel.csi = to_bool("channel.csi", v); }});
        t.push_back({"pipeline.skip_qam_removal", "false", "focus without removing QAM symbols",
                     [](RunConfig& c, const std::string& v) {
                         c.pipeline.skip_qam_removal = to_bool("pipeline.skip_qam_removal", v);
                     }});
        t.push_back({"pipeline.skip_compensation", "false", "focus with a conventional range compression",
                     [](RunConfig& c, const std::string& v) {
                         c.pipeline.skip_compensation = to_bool("pipeline.skip_compensation", v);
                     }});
        t.push_back({"pipeline.range_upsample", "2", "range zero-padding factor before RCMC",
                     [](RunConfig& c, const std::string& v) {
                         c.pipeline.range_upsample = to_uint("pipeline.range_upsample", v);
                     }});
        t.push_back({"ambiguity.max_delay_samples", "200", "delay grid half-width, samples",
                     [](RunConfig& c, const std::string& v) {
                         c.ambiguity.max_delay_samples = to_uint("ambiguity.max_delay_samples", v);
                     }});
        t.push_back({"ambiguity.delay_step_samples", "1", "delay grid step, samples",
                     [](RunConfig& c, const std::string& v) {
                         c.ambiguity.delay_step_samples = to_uint("ambiguity.delay_step_samples", v);
                     }});
        num("ambiguity.max_doppler", "200e3", "Doppler grid half-width, Hz",
            [](RunConfig& c) -> double& { return c.ambiguity.max_doppler; });
        num("ambiguity.doppler_step", "1e3", "Doppler grid step, Hz",
            [](RunConfig& c) -> double& { return c.ambiguity.doppler_step; });
        t.push_back({"ber.snr_db", "0,5,10,15,20,25,30", "SNR points, dB", [](RunConfig& c, const std::string& v) {
                         c.ber.snr_db = to_double_list("ber.snr_db", v);
                     }});
        t.push_back({"ber.trials", "1000", "one-pulse trials per SNR point", [](RunConfig& c, const std::string& v) {
                         c.ber.trials = to_uint("ber.trials", v);
                     }});
        t.push_back({"ber.engine", "waveform", "waveform | correlator", [](RunConfig& c, const std::string& v) {
                         if (v == "waveform")
                             c.ber.engine = BerEngine::Waveform;
                         else if (v == "correlator")
                             c.ber.engine = BerEngine::Correlator;
                         else
                             throw ConfigError("ber.engine", "expected waveform or correlator, got '" + v + "'");
                     }});
        t.push_back({"output.dir", "out", "output directory", [](RunConfig& c, const std::string& v) {
                         if (v.empty()) throw ConfigError("output.dir", "must not be empty");
                         c.output_dir = v;
                     }});
        num("output.db_floor", "-60", "image dB floor", [](RunConfig& c) -> double& { return c.db_floor; });
        t.push_back({"run.seed", "1", "master seed", [](RunConfig& c, const std::string& v) {
                         c.seed = to_uint("run.seed", v);
                     }});
        t.push_back({"run.threads", "1", "worker threads; 0 uses all cores", [](RunConfig& c, const std::string& v) {
                         c.threads = static_cast<unsigned>(to_uint("run.threads", v));
                     }});
        return t;
    }();
    return table;
}

const std::string kTargetPrefix = "scene.target.";

void apply_target(RunConfig& c, const std::string& key, const std::string& v) {
    std::string id = key.substr(kTargetPrefix.size());
    if (id.empty()) throw ConfigError(key, "target id is empty");
    auto parts = split(v, ',');
    if (parts.size() < 2 || parts.size() > 4)
        throw ConfigError(key, "expected 'range_offset, azimuth_offset[, sigma_re[, sigma_im]]'");
    PointTarget t;
    t.id = id;
    t.x = to_double(key, parts[0]);   // relative for now; made absolute in validate()
    t.y = to_double(key, parts[1]);
    double re = parts.size() > 2 ? to_double(key, parts[2]) : 1.0;
    double im = parts.size() > 3 ? to_double(key, parts[3]) : 0.0;
    t.sigma = {re, im};
    for (auto& existing : c.targets)
        if (existing.id == id) {
            existing = t;
            return;
        }
    c.targets.push_back(t);
}

void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
    if (key.rfind(kTargetPrefix, 0) == 0) {
        apply_target(c, key, value);
        return;
    }
    for (const auto& k : key_table())
        if (k.key == key) {
            k.apply(c, value);
            return;
        }
    throw ConfigError(key, "unknown key");
}

template <class F>
void as_config_error(const std::string& key, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(key, e.what());
    }
}

// Target coordinates come out relative to the scene center.
RunConfig parse_lines(const std::string& text) {
    RunConfig c;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
        if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
        apply_key(c, key, value);
    }
    for (const auto& k : key_table())
        if (k.default_text == kRequired && !seen.count(k.key)) throw ConfigError(k.key, "required key is missing");
    return c;
}

}  // namespace

void validate(RunConfig& c) {
    const WaveformConfig& w = c.waveform;
    if (!(w.fc > 0) || !std::isfinite(w.fc)) throw ConfigError("waveform.fc", "must be positive");
    if (!(w.Bw > 0) || !std::isfinite(w.Bw)) throw ConfigError("waveform.Bw", "must be positive");
    if (!(w.Tw > 0) || !std::isfinite(w.Tw)) throw ConfigError("waveform.Tw", "must be positive");
    if (w.M < 1) throw ConfigError("waveform.M", "must be >= 1");
    if (w.J != 4 && w.J != 16 && w.J != 64) throw ConfigError("waveform.J", "must be 4, 16 or 64");
    if (!(w.P > 0) || !std::isfinite(w.P)) throw ConfigError("waveform.P", "must be positive");
    if (!(w.osf >= 1) || !std::isfinite(w.osf)) throw ConfigError("waveform.osf", "must be >= 1");
    as_config_error("waveform.M", [&] { derive_params(c.waveform); });
    if (!(c.geometry.h > 0)) throw ConfigError("geometry.h", "must be positive");
    if (!(c.geometry.v > 0)) throw ConfigError("geometry.v", "must be positive");
    if (!(c.geometry.depression_deg > 0 && c.geometry.depression_deg < 90))
        throw ConfigError("geometry.depression_deg", "must be in (0, 90)");
    if (!(c.geometry.antenna_len > 0)) throw ConfigError("geometry.antenna_len", "must be positive");
    if (!(c.scene_range_extent > 0)) throw ConfigError("scene.range_extent", "must be positive");
    if (!(c.scene_azimuth_extent > 0)) throw ConfigError("scene.azimuth_extent", "must be positive");
    if (c.acquisition.PRF == 0) c.acquisition.PRF = default_prf(c.geometry);
    if (!(c.acquisition.PRF > 0)) throw ConfigError("acquisition.PRF", "must be positive");
    if (!(c.acquisition.PRF * c.waveform.Tw < 1)) throw ConfigError("acquisition.PRF", "PRF*Tw must be < 1");
    if (c.acquisition.K == 0) throw ConfigError("acquisition.K", "must be >= 1");
    if (!(c.window_guard >= 0)) throw ConfigError("acquisition.guard", "must be >= 0");
    if (!c.index_pattern.empty()) {
        if (c.index_pattern.size() != static_cast<std::size_t>(c.waveform.M))
            throw ConfigError("frame.pattern", "needs exactly M indices");
        for (int a : c.index_pattern)
            if (a < 0 || a >= c.waveform.M) throw ConfigError("frame.pattern", "index out of range");
    }
    if (!(c.channel.sigma2 > 0)) throw ConfigError("channel.sigma2", "must be positive");
    if (!c.channel.csi) throw ConfigError("channel.csi", "only receivers with channel knowledge are supported");
    if (c.pipeline.range_upsample < 1 || c.pipeline.range_upsample > 16)
        throw ConfigError("pipeline.range_upsample", "must be in [1, 16]");
    if (c.ambiguity.delay_step_samples < 1) throw ConfigError("ambiguity.delay_step_samples", "must be >= 1");
    if (!(c.ambiguity.doppler_step > 0)) throw ConfigError("ambiguity.doppler_step", "must be positive");
    if (!(c.ambiguity.max_doppler >= 0)) throw ConfigError("ambiguity.max_doppler", "must be >= 0");
    {
        DerivedParams p = derive_params(c.waveform);
        if (static_cast<double>(c.ambiguity.max_delay_samples) >= p.Ts * p.fs)
            throw ConfigError("ambiguity.max_delay_samples", "delay grid must stay inside |tau| < Ts");
    }
    if (c.ber.snr_db.empty()) throw ConfigError("ber.snr_db", "needs at least one SNR point");
    for (double s : c.ber.snr_db)
        if (std::isnan(s)) throw ConfigError("ber.snr_db", "NaN SNR");
    if (c.ber.trials < 1) throw ConfigError("ber.trials", "must be >= 1");
    if (!(c.db_floor < 0)) throw ConfigError("output.db_floor", "must be negative");
    SceneExtent ext = c.scene();
    for (const auto& t : c.targets) {
        if (!std::isfinite(t.x) || !std::isfinite(t.y) || !ext.contains(t.x, t.y))
            throw ConfigError(kTargetPrefix + t.id, "target lies outside the scene extent");
    }
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig c = parse_lines(text);
    double xc = c.geometry.scene_center_x();
    for (auto& t : c.targets) t.x += xc;
    validate(c);
    return c;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key.rfind(kTargetPrefix, 0) == 0) {
        apply_target(cfg, key, value);
        std::string id = key.substr(kTargetPrefix.size());
        for (auto& t : cfg.targets)
            if (t.id == id) t.x += cfg.geometry.scene_center_x();
    } else {
        double xc_before = cfg.geometry.scene_center_x();
        bool prf_auto = cfg.acquisition.PRF == default_prf(cfg.geometry);
        apply_key(cfg, key, value);
        if (key.rfind("geometry.", 0) == 0) {
            double shift = cfg.geometry.scene_center_x() - xc_before;
            for (auto& t : cfg.targets) t.x += shift;
            if (prf_auto) cfg.acquisition.PRF = 0;
        }
    }
    validate(cfg);
}

std::string config_reference() {
    std::ostringstream out;
    for (const auto& k : key_table())
        out << k.key << " = " << k.default_text << "  # " << k.doc << "\n";
    out << "# scene.target.<id> = range_offset, azimuth_offset[, sigma_re[, sigma_im]]  # offsets from scene center, m\n";
    return out.str();
}

FimFrame make_frame(const RunConfig& cfg) {
    if (!cfg.index_pattern.empty())
        return patterned_frame(cfg.waveform, cfg.acquisition.K, cfg.index_pattern, cfg.seed);
    return random_frame(cfg.waveform, cfg.acquisition.K, cfg.seed);
}

Acquisition planned_acquisition(const RunConfig& cfg, const DerivedParams& p) {
    Acquisition acq = cfg.acquisition;
    acq.seed = cfg.seed;
    plan_fast_window(acq, p, cfg.geometry, cfg.scene(), cfg.window_guard);
    return acq;
}

}  // namespace fimsar
