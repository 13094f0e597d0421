#include "fimsar/commands.hpp"

#include "fimsar/ambiguity.hpp"
#include "fimsar/io.hpp"
#include "fimsar/quality.hpp"

#include <filesystem>

namespace fimsar {
namespace fs = std::filesystem;
namespace {

using io::format_double;

/** Removes registered files unless the command completes. */
class OutputGuard {
public:
    ~OutputGuard() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : files_) fs::remove(p, ec);
    }
    std::string add(const std::string& p) {
        files_.push_back(p);
        return files_.back();
    }
    void add_all(const std::vector<std::string>& ps) { files_.insert(files_.end(), ps.begin(), ps.end()); }
    std::vector<std::string> commit() {
        committed_ = true;
        return files_;
    }

private:
    std::vector<std::string> files_;
    bool committed_ = false;
};

std::string prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) fail_runtime("cannot create output directory '" + dir + "'");
    return dir;
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void prepare_parent(const std::string& file) {
    fs::path parent = fs::path(file).parent_path();
    if (!parent.empty()) prepare_dir(parent.string());
}

std::vector<double> magnitudes(const CMatrix& m) {
    std::vector<double> out(m.data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(m.data[i]);
    return out;
}

std::string steps_text(const std::vector<std::string>& steps) {
    std::string s;
    for (const auto& x : steps) s += (s.empty() ? "" : ",") + x;
    return s.empty() ? "none" : s;
}

void write_frame_csv(const std::string& path, const FimFrame& f) {
    io::CsvWriter w(path, {"pulse", "subpulse", "index", "qam_re", "qam_im"});
    for (std::size_t k = 0; k < f.K; ++k)
        for (int m = 0; m < f.M; ++m) {
            std::size_t s = k * static_cast<std::size_t>(f.M) + static_cast<std::size_t>(m);
            w.row({std::to_string(k), std::to_string(m), std::to_string(f.indices[s]), format_double(f.qam[s].real()),
                   format_double(f.qam[s].imag())});
        }
    w.close();
}

FimFrame read_frame_csv(const std::string& path, std::size_t K, int M) {
    auto rows = io::read_csv(path);
    if (rows.size() != K * static_cast<std::size_t>(M) + 1) fail_runtime("frame file '" + path + "' has the wrong length");
    FimFrame f;
    f.K = K;
    f.M = M;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 5) fail_runtime("malformed frame row in '" + path + "'");
        f.indices.push_back(std::stoi(rows[i][2]));
        f.qam.emplace_back(std::stod(rows[i][3]), std::stod(rows[i][4]));
    }
    return f;
}

}  // namespace

std::vector<std::string> save_echo(const std::string& path, const EchoCube& cube) {
    OutputGuard g;
    io::write_matrix(g.add(path), cube.data);
    io::Metadata meta{{"kind", "echo_cube"},
                      {"rows", "pulse*M+subpulse"},
                      {"fs_hz", format_double(cube.fs)},
                      {"window_start_s", format_double(cube.window_start)},
                      {"prf_hz", format_double(cube.PRF)},
                      {"pulses", std::to_string(cube.K)},
                      {"subpulses", std::to_string(cube.M)},
                      {"samples", std::to_string(cube.data.cols)},
                      {"layout", cube.layout == EchoLayout::Gated ? "gated" : "separated"}};
    for (std::size_t m = 0; m < cube.gate_offset.size(); ++m)
        meta["gate_offset_s." + std::to_string(m)] = format_double(cube.gate_offset[m]);
    io::write_metadata(g.add(path + ".meta"), meta);
    write_frame_csv(g.add(path + ".frame.csv"), cube.frame);
    return g.commit();
}

EchoCube load_echo(const std::string& path) {
    EchoCube c;
    c.data = io::read_matrix(path);
    auto meta = io::read_metadata(path + ".meta");
    if (io::meta_string(meta, "kind") != "echo_cube") fail_runtime("'" + path + "' is not an echo cube");
    c.fs = io::meta_double(meta, "fs_hz");
    c.window_start = io::meta_double(meta, "window_start_s");
    c.PRF = io::meta_double(meta, "prf_hz");
    c.K = static_cast<std::size_t>(io::meta_double(meta, "pulses"));
    c.M = static_cast<int>(io::meta_double(meta, "subpulses"));
    c.layout = io::meta_string(meta, "layout") == "gated" ? EchoLayout::Gated : EchoLayout::Separated;
    if (c.data.rows != c.K * static_cast<std::size_t>(c.M)) fail_runtime("echo cube dimensions do not match metadata");
    for (int m = 0; m < c.M; ++m) c.gate_offset.push_back(io::meta_double(meta, "gate_offset_s." + std::to_string(m)));
    c.frame = read_frame_csv(path + ".frame.csv", c.K, c.M);
    return c;
}

std::vector<std::string> save_image(const std::string& path, const SarImage& img) {
    OutputGuard g;
    io::write_matrix(g.add(path), img.data);
    io::Metadata meta{{"kind", "sar_image"},
                      {"rows", "range"},
                      {"cols", "azimuth"},
                      {"range_start_m", format_double(img.range.start)},
                      {"range_step_m", format_double(img.range.step)},
                      {"azimuth_start_m", format_double(img.azimuth.start)},
                      {"azimuth_step_m", format_double(img.azimuth.step)},
                      {"fc_hz", format_double(img.fc)},
                      {"range_bandwidth_hz", format_double(img.range_bandwidth)},
                      {"doppler_bandwidth_hz", format_double(img.doppler_bandwidth)},
                      {"platform_speed_mps", format_double(img.v)},
                      {"steps", steps_text(img.steps)}};
    io::write_metadata(g.add(path + ".meta"), meta);
    return g.commit();
}

SarImage load_image(const std::string& path) {
    SarImage img;
    img.data = io::read_matrix(path);
    auto meta = io::read_metadata(path + ".meta");
    if (io::meta_string(meta, "kind") != "sar_image") fail_runtime("'" + path + "' is not a SAR image");
    img.range = Axis{io::meta_double(meta, "range_start_m"), io::meta_double(meta, "range_step_m"), img.data.rows};
    img.azimuth = Axis{io::meta_double(meta, "azimuth_start_m"), io::meta_double(meta, "azimuth_step_m"), img.data.cols};
    img.fc = io::meta_double(meta, "fc_hz");
    img.range_bandwidth = io::meta_double(meta, "range_bandwidth_hz");
    img.doppler_bandwidth = io::meta_double(meta, "doppler_bandwidth_hz");
    img.v = io::meta_double(meta, "platform_speed_mps");
    return img;
}

std::vector<std::string> cmd_waveform(const RunConfig& cfg, const std::string& out_dir) {
    OutputGuard g;
    prepare_dir(out_dir);
    const DerivedParams p = derive_params(cfg.waveform);
    const FimFrame frame = make_frame(cfg);
    PulseTrain train = synthesize_train(cfg.waveform, p, frame, 1.0 / cfg.acquisition.PRF, cfg.threads);
    CMatrix samples(frame.K, p.Npulse);
    for (std::size_t k = 0; k < frame.K; ++k) std::copy(train.pulses[k].begin(), train.pulses[k].end(), samples.row(k));
    const std::string bin = join(out_dir, "waveform.cfm");
    io::write_matrix(g.add(bin), samples);
    io::write_metadata(g.add(bin + ".meta"), {{"kind", "pulse_train"},
                                              {"rows", "pulse"},
                                              {"fs_hz", format_double(p.fs)},
                                              {"pri_s", format_double(train.PRI)},
                                              {"pulses", std::to_string(frame.K)},
                                              {"samples", std::to_string(p.Npulse)},
                                              {"bs_hz", format_double(p.Bs)},
                                              {"ts_s", format_double(p.Ts)},
                                              {"chirp_rate_hz_per_s", format_double(p.Kc)}});
    write_frame_csv(g.add(join(out_dir, "frame.csv")), frame);
    std::size_t window = std::min<std::size_t>(128, p.Ns);
    auto spec = spectrogram(train.pulses[0], window, std::max<std::size_t>(1, window / 8));
    std::vector<double> flat;
    // Highest frequency on the top row.
    for (std::size_t b = spec.size(); b-- > 0;) flat.insert(flat.end(), spec[b].begin(), spec[b].end());
    io::write_pgm(g.add(join(out_dir, "spectrogram.pgm")), flat, spec.size(), spec[0].size(), cfg.db_floor);
    return g.commit();
}

std::vector<std::string> cmd_ambiguity(const RunConfig& cfg, const std::string& out_dir, AmbiguityMethod method,
                                       AmbiguityCut cut) {
    OutputGuard g;
    prepare_dir(out_dir);
    const DerivedParams p = derive_params(cfg.waveform);
    FimFrame frame = make_frame(cfg);
    frame.K = 1;
    frame.indices.resize(static_cast<std::size_t>(cfg.waveform.M));
    frame.qam.assign(frame.indices.size(), Complex(1.0));   // the ambiguity excludes QAM symbols
    WaveformConfig unit = cfg.waveform;
    unit.P = 1.0;
    const CVector pulse = synthesize_pulse(unit, p, frame, 0);
    const auto& A = cfg.ambiguity;
    std::vector<double> tau;
    for (long long d = -static_cast<long long>(A.max_delay_samples / A.delay_step_samples * A.delay_step_samples);
         d <= static_cast<long long>(A.max_delay_samples); d += static_cast<long long>(A.delay_step_samples))
        tau.push_back(static_cast<double>(d) / p.fs);
    std::vector<double> xi = symmetric_grid(A.doppler_step, static_cast<std::size_t>(std::floor(A.max_doppler / A.doppler_step + 1e-9)));
    const std::string tag = method == AmbiguityMethod::Numeric ? "numeric" : "closed_form";

    if (cut == AmbiguityCut::Tau0) {
        ProfileCut c = method == AmbiguityMethod::Numeric
                           ? make_cut(xi, ambiguity_numeric(pulse, p, {{0.0}, xi}, cfg.threads).values, "Hz")
                           : doppler_cut_closed_form(p, xi);
        io::CsvWriter w(g.add(join(out_dir, "cut_tau0_" + tag + ".csv")), {"xi_hz", "magnitude"});
        for (std::size_t i = 0; i < c.axis.size(); ++i) w.row({format_double(c.axis[i]), format_double(c.magnitude[i])});
        w.close();
        return g.commit();
    }
    if (cut == AmbiguityCut::Xi0) {
        ProfileCut c = method == AmbiguityMethod::Numeric
                           ? make_cut(tau, ambiguity_numeric(pulse, p, {tau, {0.0}}, cfg.threads).values, "s")
                           : range_cut_closed_form(p, frame.indices, tau);
        io::CsvWriter w(g.add(join(out_dir, "cut_xi0_" + tag + ".csv")), {"tau_s", "range_m", "magnitude"});
        for (std::size_t i = 0; i < c.axis.size(); ++i)
            w.row({format_double(c.axis[i]), format_double(kSpeedOfLight * c.axis[i] / 2.0), format_double(c.magnitude[i])});
        w.close();
        return g.commit();
    }
    AmbiguityGrid grid = method == AmbiguityMethod::Numeric
                             ? ambiguity_numeric(pulse, p, {tau, xi}, cfg.threads)
                             : ambiguity_closed_form_grid(p, frame.indices, {tau, xi}, cfg.threads);
    io::CsvWriter w(g.add(join(out_dir, "ambiguity_" + tag + ".csv")), {"xi_hz", "tau_s", "magnitude"});
    for (std::size_t i = 0; i < xi.size(); ++i)
        for (std::size_t j = 0; j < tau.size(); ++j)
            w.row({format_double(xi[i]), format_double(tau[j]), format_double(grid.at(i, j))});
    w.close();
    io::write_pgm(g.add(join(out_dir, "ambiguity_" + tag + ".pgm")), grid.values, xi.size(), tau.size(), cfg.db_floor);
    return g.commit();
}

std::vector<std::string> cmd_sar_sim(const RunConfig& cfg, const std::string& out_dir) {
    OutputGuard g;
    prepare_dir(out_dir);
    const DerivedParams p = derive_params(cfg.waveform);
    const Acquisition acq = planned_acquisition(cfg, p);
    EchoCube cube = simulate_echo(cfg.waveform, p, cfg.geometry, acq, make_frame(cfg), cfg.targets, cfg.threads);
    g.add_all(save_echo(join(out_dir, "echo.cfm"), cube));
    return g.commit();
}

std::vector<std::string> cmd_sar_focus(const RunConfig& cfg, const std::string& echo_path, const std::string& out_dir) {
    OutputGuard g;
    prepare_dir(out_dir);
    const DerivedParams p = derive_params(cfg.waveform);
    EchoCube cube;
    if (!echo_path.empty()) {
        cube = load_echo(echo_path);
        if (cube.M != cfg.waveform.M || std::abs(cube.fs - p.fs) > 1e-6 * p.fs)
            fail_runtime("echo cube was recorded with a different waveform");
    } else {
        cube = simulate_echo(cfg.waveform, p, cfg.geometry, planned_acquisition(cfg, p), make_frame(cfg), cfg.targets,
                             cfg.threads);
    }
    FocusOptions opt = cfg.pipeline;
    opt.threads = cfg.threads;
    SarImage img = focus_rda(cube, cube.frame, cfg.geometry, cfg.waveform, p, opt);
    g.add_all(save_image(join(out_dir, "image.cfm"), img));
    io::write_pgm(g.add(join(out_dir, "image.pgm")), magnitudes(img.data), img.data.rows, img.data.cols, cfg.db_floor);
    return g.commit();
}

std::vector<std::string> cmd_metrics(const RunConfig& cfg, const std::string& image_path, const std::string& out_csv) {
    OutputGuard g;
    prepare_parent(out_csv);
    const DerivedParams p = derive_params(cfg.waveform);
    SarImage img = load_image(image_path);
    if (cfg.targets.empty()) fail_runtime("config defines no targets");
    io::CsvWriter w(g.add(out_csv),
                    {"target", "range_resolution_m", "azimuth_resolution_m", "range_pslr_db", "azimuth_pslr_db",
                     "range_islr_db", "azimuth_islr_db", "peak_range_bin", "peak_azimuth_bin", "peak_range_m",
                     "peak_azimuth_m", "range_equivalent_width_m", "azimuth_equivalent_width_m"});
    for (const auto& t : cfg.targets) {
        TargetReport r = report_target(img, t, cfg.geometry, p);
        w.row({r.id, format_double(r.range_resolution), format_double(r.azimuth_resolution), format_double(r.range_pslr),
               format_double(r.azimuth_pslr), format_double(r.range_islr), format_double(r.azimuth_islr),
               format_double(r.peak_range_bin), format_double(r.peak_azimuth_bin), format_double(r.peak_range_m),
               format_double(r.peak_azimuth_m), format_double(r.range_equivalent_width),
               format_double(r.azimuth_equivalent_width)});
    }
    w.close();
    auto bounds = resolution_bounds(p);
    io::write_metadata(g.add(out_csv + ".meta"),
                       {{"resolution_convention", "-3dB mainlobe width, linear interpolation on 16x interpolated cuts"},
                        {"equivalent_width_convention", "energy / peak^2 (rectangle of equal energy)"},
                        {"sidelobe_extent", "+-10 cells of c/(2 range bandwidth) in range and of v/Ba in azimuth"},
                        {"range_bound_fine_m", format_double(bounds.first)},
                        {"range_bound_coarse_m", format_double(bounds.second)},
                        {"image", std::filesystem::path(image_path).filename().string()}});
    return g.commit();
}

std::vector<std::string> cmd_comm_ber(const RunConfig& cfg, const std::string& out_csv) {
    OutputGuard g;
    prepare_parent(out_csv);
    BerReport rep = run_ber(cfg.waveform, cfg.ber.snr_db, cfg.ber.trials, cfg.seed, cfg.channel.sigma2, cfg.ber.engine,
                            cfg.threads);
    io::CsvWriter w(g.add(out_csv), {"snr_db", "trials", "index_ber", "qam_ber", "total_ber"});
    for (const auto& pt : rep.points)
        w.row({format_double(pt.snr_db), std::to_string(pt.trials), format_double(pt.index_ber()),
               format_double(pt.qam_ber()), format_double(pt.total_ber())});
    w.close();
    io::Metadata meta{{"engine", to_string(rep.engine)},
                      {"seed", std::to_string(rep.seed)},
                      {"M", std::to_string(cfg.waveform.M)},
                      {"J", std::to_string(cfg.waveform.J)},
                      {"sigma2", format_double(rep.sigma2)},
                      {"snr_definition", "10*log10(P^2/N0), N0 per complex sample"}};
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const auto& pt = rep.points[i];
        std::string k = "point." + std::to_string(i) + ".";
        meta[k + "index_errors"] = std::to_string(pt.index_errors);
        meta[k + "index_bits"] = std::to_string(pt.index_bits);
        meta[k + "qam_errors"] = std::to_string(pt.qam_errors);
        meta[k + "qam_bits"] = std::to_string(pt.qam_bits);
    }
    io::write_metadata(g.add(out_csv + ".meta"), meta);
    return g.commit();
}

}  // namespace fimsar
