// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "fimsar/ambiguity.hpp"
#include "fimsar/comm.hpp"
#include "fimsar/commands.hpp"
#include "fimsar/config.hpp"
#include "fimsar/imaging.hpp"
#include "fimsar/quality.hpp"
#include "fimsar/rng.hpp"

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

using namespace fimsar;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double db20(double x) { return 20 * std::log10(x); }

WaveformConfig reference_waveform(int M = 4, int J = 4) {
    WaveformConfig c;
    c.fc = 3.2e9;
    c.Bw = 80e6;
    c.Tw = 40e-6;
    c.M = M;
    c.J = J;
    return c;
}

std::vector<int> random_indices(int M, std::uint64_t seed) {
    RandomStream rs(seed, {77});
    std::vector<int> a(static_cast<std::size_t>(M));
    for (auto& x : a) x = static_cast<int>(rs.uniform_int(static_cast<std::uint64_t>(M)));
    return a;
}

FimFrame single_pulse(int M, std::vector<int> a) {
    FimFrame f;
    f.M = M;
    f.K = 1;
    f.indices = std::move(a);
    f.qam.assign(f.indices.size(), Complex(1, 0));
    return f;
}

// Single-pulse scene at the reference geometry.
struct Bench {
    WaveformConfig cfg;
    DerivedParams p;
    Geometry g;
    Acquisition acq;

    explicit Bench(int M, std::size_t K = 1, double PRF = 100) : cfg(reference_waveform(M)) {
        p = derive_params(cfg);
        acq.PRF = PRF;
        acq.K = K;
        plan_fast_window(acq, p, g, centered_extent(g, 1000, 300));
    }
    PointTarget at(double dx, double dy) const { return {"t", g.scene_center_x() + dx, dy, Complex(1, 0)}; }
};

// ---------------------------------------------------------------------------------------------

Outcome doppler_resolution() {
    WaveformConfig cfg = reference_waveform();
    DerivedParams p = derive_params(cfg);
    const double step = 1e3;
    std::vector<double> xi = linspace_step(0, step, 61);
    int worst_off = 0;
    std::string nulls;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        CVector x = synthesize_pulse(cfg, p, single_pulse(4, random_indices(4, seed)), 0);
        AmbiguityGrid g = ambiguity_numeric(x, p, {{0.0}, xi});
        std::size_t i = 0;
        while (i + 1 < xi.size() && g.values[i + 1] < g.values[i]) ++i;
        double off = std::abs(xi[i] - 1.0 / cfg.Tw);
        worst_off = std::max(worst_off, static_cast<int>(std::lround(off / step)));
        if (seed == 1) nulls = fmt("%.1f kHz", xi[i] / 1e3);
    }
    return {worst_off <= 1, fmt("first null %s (1/Tw = 25 kHz), worst offset %d grid steps of 1 kHz over 5 pulses",
                                nulls.c_str(), worst_off)};
}

Outcome zero_delay_exactness() {
    double worst = 0;
    int runs = 0;
    for (int M : {2, 4, 8}) {
        WaveformConfig cfg = reference_waveform(M);
        DerivedParams p = derive_params(cfg);
        std::vector<double> xi = symmetric_grid(997.0, static_cast<std::size_t>(2 / p.Ts / 997.0));
        ProfileCut ref = doppler_cut_closed_form(p, xi);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            CVector x = synthesize_pulse(cfg, p, single_pulse(M, random_indices(M, 100 * M + seed)), 0);
            AmbiguityGrid g = ambiguity_numeric(x, p, {{0.0}, xi});
            for (std::size_t i = 0; i < xi.size(); ++i)
                worst = std::max(worst, std::abs(g.values[i] - ref.magnitude[i]) / ref.magnitude[i]);
            ++runs;
        }
    }
    return {worst < 1e-6, fmt("max relative error %.2e over |xi| <= 2/Ts, %d sequences, M in {2,4,8}", worst, runs)};
}

// -3 dB width (m) of the compensated range profile of one pulse, sampled 16x finer than fs.
double compensated_width(const Bench& b, const std::vector<int>& a) {
    FimFrame f = single_pulse(b.cfg.M, a);
    EchoCube cube = remove_qam(simulate_echo(b.cfg, b.p, b.g, b.acq, f, {b.at(0, 0)}), f);
    RangeCompressedMatrix rc = subpulse_compensate(cube, f, b.p, 16);
    std::vector<double> axis(rc.data.cols), mag(rc.data.cols);
    for (std::size_t n = 0; n < rc.data.cols; ++n) {
        axis[n] = static_cast<double>(n) / rc.fs * kSpeedOfLight / 2;
        mag[n] = std::abs(rc.data(0, n));
    }
    return measure_cut_resolution(make_cut(axis, mag, "m"));
}

Outcome range_resolution_bounds() {
    Bench b(4);
    auto [lo, hi] = resolution_bounds(b.p);
    double constant = compensated_width(b, {2, 2, 2, 2});
    double contiguous = compensated_width(b, {0, 1, 2, 3});
    int inside = 0, below = 0, above = 0, below_relaxed = 0;
    double wmin = 1e9, wmax = 0;
    std::vector<int> narrowest;
    for (std::uint64_t s = 1; s <= 100; ++s) {
        auto a = random_indices(4, 1000 + s);
        double w = compensated_width(b, a);
        if (w < wmin) {
            wmin = w;
            narrowest = a;
        }
        wmax = std::max(wmax, w);
        if (w < lo) ++below;
        else if (w > hi) ++above;
        else ++inside;
        if (w < 0.85 * lo) ++below_relaxed;
    }
    bool upper_ok = std::abs(constant - hi) <= 0.15 * hi;
    bool lower_ok = std::abs(contiguous - lo) <= 0.15 * lo;
    std::string seq;
    for (int x : narrowest) seq += std::to_string(x);
    return {inside == 100 && upper_ok && lower_ok,
            fmt("%d/100 in [%.3f, %.3f] m (%d below, %d above, %d below 0.85x the fine bound), widths %.3f..%.3f m, "
                "narrowest [%s]; constant %.3f m, contiguous %.3f m",
                inside, lo, hi, below, above, below_relaxed, wmin, wmax, seq.c_str(), constant, contiguous)};
}

// Compensated profile against a sum of per-sub-band periodic sincs placed at absolute bins a*Nb.
double synthesis_error_db(const Bench& b, const std::vector<int>& a, const PointTarget& t) {
    FimFrame f = single_pulse(b.cfg.M, a);
    EchoCube cube = remove_qam(simulate_echo(b.cfg, b.p, b.g, b.acq, f, {t}), f);
    RangeCompressedMatrix rc = subpulse_compensate(cube, f, b.p, 2);
    const std::size_t Nw = cube.data.cols, Nb = Nw / static_cast<std::size_t>(b.p.q);
    const double df = b.p.fs / static_cast<double>(Nw);
    const double tau = 2 * slant_range(b.g, t, b.acq.slow_time(0)).exact / kSpeedOfLight;
    const Complex gain = t.sigma * cis_cycles(-b.cfg.fc * tau);
    double worst = 0, peak = 0;
    for (std::size_t n = 0; n < rc.data.cols; ++n) {
        double x = rc.t0 + static_cast<double>(n) / rc.fs - tau;
        Complex want = 0;
        for (int ai : a) {
            double f0 = static_cast<double>(ai) * static_cast<double>(Nb) * df;
            for (std::size_t j = 0; j < Nb; ++j) want += df * cis_cycles((f0 + static_cast<double>(j) * df) * x);
        }
        want *= gain;
        worst = std::max(worst, std::abs(rc.data(0, n) - want));
        peak = std::max(peak, std::abs(want));
    }
    return db20(worst / peak);
}

Outcome bandwidth_synthesis() {
    Bench b(4);
    double worst = -400;
    for (const auto& t : {b.at(0, 0), b.at(-250, 30), b.at(310, -60)}) {
        worst = std::max(worst, synthesis_error_db(b, {1, 1, 1, 1}, t));
        worst = std::max(worst, synthesis_error_db(b, {0, 1, 2, 3}, t));
    }
    return {worst <= -50, fmt("worst normalized error %.1f dB (single sub-band and full band, 3 target positions)", worst)};
}

struct SceneRun {
    RunConfig cfg;
    DerivedParams p;
    Acquisition acq;
    FimFrame frame;
    EchoCube cube;
};

SceneRun simulate_scene(const RunConfig& base, int M) {
    SceneRun s;
    s.cfg = base;
    set_config_value(s.cfg, "waveform.M", std::to_string(M));
    s.p = derive_params(s.cfg.waveform);
    s.acq = planned_acquisition(s.cfg, s.p);
    s.frame = make_frame(s.cfg);
    s.cube = simulate_echo(s.cfg.waveform, s.p, s.cfg.geometry, s.acq, s.frame, s.cfg.targets);
    return s;
}

Outcome table_analogue(const RunConfig& base) {
    SceneRun lfm = simulate_scene(base, 1);
    SceneRun fim = simulate_scene(base, 4);
    SarImage il = focus_rda(lfm.cube, lfm.frame, lfm.cfg.geometry, lfm.cfg.waveform, lfm.p, lfm.cfg.pipeline);
    SarImage ifm = focus_rda(fim.cube, fim.frame, fim.cfg.geometry, fim.cfg.waveform, fim.p, fim.cfg.pipeline);
    bool ok = true;
    double rmin = 1e9, rmax = 0, pmin = 0, pmax = -1e9, imin = 0, imax = -1e9, dev = 0;
    double az_l = 0, az_f = 0;
    pmin = imin = 1e9;
    for (std::size_t i = 0; i < base.targets.size(); ++i) {
        TargetReport l = report_target(il, lfm.cfg.targets[i], lfm.cfg.geometry, lfm.p);
        TargetReport f = report_target(ifm, fim.cfg.targets[i], fim.cfg.geometry, fim.p);
        ok = ok && std::abs(l.range_resolution - 1.875) <= 0.15 * 1.875;
        ok = ok && std::abs(l.range_pslr + 13.26) <= 1.0;
        ok = ok && std::abs(l.range_islr + 10.3) <= 1.5;
        double d = std::abs(f.azimuth_resolution - l.azimuth_resolution) / l.azimuth_resolution;
        ok = ok && d <= 0.05;
        rmin = std::min(rmin, l.range_resolution);
        rmax = std::max(rmax, l.range_resolution);
        pmin = std::min(pmin, l.range_pslr);
        pmax = std::max(pmax, l.range_pslr);
        imin = std::min(imin, l.range_islr);
        imax = std::max(imax, l.range_islr);
        dev = std::max(dev, d);
        az_l += l.azimuth_resolution / 5;
        az_f += f.azimuth_resolution / 5;
    }
    return {ok, fmt("LFM range res %.3f..%.3f m, PSLR %.2f..%.2f dB, ISLR %.2f..%.2f dB; azimuth res LFM %.3f m, "
                    "FIM %.3f m (mean), worst per-target deviation %.1f%%",
                    rmin, rmax, pmin, pmax, imin, imax, az_l, az_f, 100 * dev)};
}

// Largest magnitude within +-radius metres of a target's focused position.
double local_peak(const SarImage& img, double range_m, double azimuth_m, double radius) {
    double best = 0;
    for (std::size_t r = 0; r < img.data.rows; ++r) {
        if (std::abs(img.range.at(static_cast<double>(r)) - range_m) > radius) continue;
        for (std::size_t c = 0; c < img.data.cols; ++c) {
            if (std::abs(img.azimuth.at(static_cast<double>(c)) - azimuth_m) > radius) continue;
            best = std::max(best, std::abs(img.data(r, c)));
        }
    }
    return best;
}

double global_peak(const SarImage& img) {
    double best = 0;
    for (const auto& v : img.data.data) best = std::max(best, std::abs(v));
    return best;
}

Outcome ablation_ordering(const RunConfig& base) {
    SceneRun s = simulate_scene(base, 4);
    FocusOptions full = s.cfg.pipeline, comp_only = full, neither = full;
    comp_only.skip_qam_removal = true;
    neither.skip_qam_removal = true;
    neither.skip_compensation = true;
    const Geometry& g = s.cfg.geometry;
    SarImage a = focus_rda(s.cube, s.frame, g, s.cfg.waveform, s.p, full);
    SarImage b = focus_rda(s.cube, s.frame, g, s.cfg.waveform, s.p, comp_only);
    SarImage c = focus_rda(s.cube, s.frame, g, s.cfg.waveform, s.p, neither);
    const double ref = global_peak(a);
    auto detected = [&](const SarImage& img, double& weakest) {
        int n = 0;
        weakest = 0;
        for (const auto& t : s.cfg.targets) {
            double level = db20(local_peak(img, std::hypot(t.x, g.h), t.y, 3.0) / ref);
            weakest = std::min(weakest, level);
            if (level >= -20) ++n;
        }
        return n;
    };
    double wa, wb, wc;
    int na = detected(a, wa), nb = detected(b, wb), nc = detected(c, wc);
    double pa = global_peak(a), pb = global_peak(b), pc = global_peak(c);
    bool ok = pa > pb && pb > pc && na == 5 && nb < 5 && nc < 5;
    return {ok, fmt("peaks full %.1f dB > compensation only %.1f dB > neither %.1f dB (rel. full); targets above "
                    "-20 dB: %d / %d / %d (weakest %.1f / %.1f / %.1f dB)",
                    0.0, db20(pb / pa), db20(pc / pa), na, nb, nc, wa, wb, wc)};
}

Outcome tone_orthogonality() {
    WaveformConfig cfg = reference_waveform();
    DerivedParams p = derive_params(cfg);
    QamConstellation qam(cfg.J);
    double worst = 0;
    bool all_right = true;
    for (int a = 0; a < cfg.M; ++a)
        for (int label = 0; label < cfg.J; ++label) {
            CVector s = subchirp(p, a);
            for (auto& v : s) v *= qam.point(label);
            ChannelConfig ch;
            ch.seed = static_cast<std::uint64_t>(10 * a + label + 1);
            RxSubpulse rx = apply_channel(s, ch, cfg.P, 0, 0);
            IndexDecision d = detect_index(dechirp(rx, p), p);
            all_right = all_right && d.index == a;
            double right = d.statistics[static_cast<std::size_t>(a)];
            for (int l = 0; l < cfg.M; ++l)
                if (l != a) worst = std::max(worst, d.statistics[static_cast<std::size_t>(l)] / right);
        }
    return {all_right && worst < 1e-20,
            fmt("Bs*Ts = %.0f, worst wrong/right statistic ratio %.2e over all %d indices x %d symbols",
                p.Bs * p.Ts, worst, cfg.M, cfg.J)};
}

Outcome ber_trends() {
    std::vector<double> snr{0, 5, 10, 15, 20, 25, 30};
    const std::uint64_t trials = 100000;
    auto curve = [&](int M, int J) {
        return run_ber(reference_waveform(M, J), snr, trials, 1, 1.0, BerEngine::Correlator);
    };
    BerReport j4 = curve(4, 4), j16 = curve(4, 16), m2 = curve(2, 4), m5 = curve(5, 4);
    int inversions = 0;
    bool ok = true;
    for (const BerReport* r : {&j4, &j16, &m2, &m5}) {
        int inv = 0;
        for (std::size_t i = 1; i < snr.size(); ++i) {
            double prev = r->points[i - 1].total_ber(), cur = r->points[i].total_ber();
            if (cur > prev) {
                ++inv;
                double sigma = std::sqrt(cur * (1 - cur) / static_cast<double>(r->points[i].total_bits()));
                ok = ok && cur - prev <= 2 * sigma;
            }
        }
        ok = ok && inv <= 1;
        inversions += inv;
    }
    for (std::size_t i = 0; i < snr.size(); ++i) {
        ok = ok && j16.points[i].total_ber() >= j4.points[i].total_ber();
        ok = ok && m5.points[i].total_ber() >= m2.points[i].total_ber();
    }
    // waveform-level receiver cross-check at the lowest SNR
    BerReport wf = run_ber(reference_waveform(4, 4), {0.0}, 20000, 1, 1.0, BerEngine::Waveform);
    double bw = wf.points[0].total_ber(), bc = j4.points[0].total_ber();
    double sig = std::sqrt(std::max(bc, 1e-7) / static_cast<double>(wf.points[0].total_bits()) +
                           std::max(bc, 1e-7) / static_cast<double>(j4.points[0].total_bits()));
    bool agree = std::abs(bw - bc) <= 4 * sig;
    ok = ok && agree;
    std::string curve0;
    for (std::size_t i = 0; i < snr.size(); ++i) curve0 += fmt("%s%.2e", i ? "," : "", j4.points[i].total_ber());
    return {ok, fmt("1e5 trials/point, %d inversions; M=4 J=4 BER [%s]; at 0 dB J=16 %.2e >= J=4 %.2e, M=5 %.2e >= M=2 "
                    "%.2e; waveform receiver at 0 dB %.2e (%s)",
                    inversions, curve0.c_str(), j16.points[0].total_ber(), j4.points[0].total_ber(),
                    m5.points[0].total_ber(), m2.points[0].total_ber(), bw, agree ? "agrees" : "disagrees")};
}

Outcome bit_accounting() {
    int p2 = bits_per_pulse(reference_waveform(2, 4));
    int p5 = bits_per_pulse(reference_waveform(5, 4));
    std::uint64_t errors = 0, bits = 0;
    for (int M : {2, 4, 5}) {
        WaveformConfig cfg = reference_waveform(M, 4);
        DerivedParams p = derive_params(cfg);
        BitStream tx = random_bits(cfg, 1000, 7);
        FimFrame f = map_bits_to_frame(tx, cfg, 1000);
        ChannelConfig ch;
        ch.seed = 3;
        std::vector<RxSubpulse> rx;
        for (std::size_t k = 0; k < f.K; ++k) {
            CVector pulse = synthesize_pulse(cfg, p, f, k);
            for (std::size_t m = 0; m < static_cast<std::size_t>(M); ++m) {
                CVector sub(pulse.begin() + static_cast<std::ptrdiff_t>(m * p.Ns),
                            pulse.begin() + static_cast<std::ptrdiff_t>((m + 1) * p.Ns));
                rx.push_back(apply_channel(sub, ch, cfg.P, k, m));
            }
        }
        auto got = demodulate_frame(rx, cfg, p).bits;
        for (std::size_t i = 0; i < tx.bits.size(); ++i) errors += (i >= got.size() || got[i] != tx.bits[i]);
        bits += tx.bits.size();
    }
    return {p2 == 6 && p5 == 20 && errors == 0,
            fmt("p(M=2,J=4) = %d, p(M=5,J=4) = %d; noiseless loopback %llu errors in %llu bits (1000 pulses each at "
                "M=2,4,5)",
                p2, p5, static_cast<unsigned long long>(errors), static_cast<unsigned long long>(bits))};
}

std::string slurp(const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Every output file, keyed by its path relative to the run directory.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

void run_all_commands(RunConfig cfg, unsigned threads, const fs::path& dir) {
    cfg.threads = threads;
    cmd_waveform(cfg, (dir / "waveform").string());
    cmd_ambiguity(cfg, (dir / "ambiguity").string(), AmbiguityMethod::Numeric, AmbiguityCut::None);
    cmd_ambiguity(cfg, (dir / "ambiguity").string(), AmbiguityMethod::ClosedForm, AmbiguityCut::None);
    cmd_sar_sim(cfg, (dir / "sar").string());
    cmd_sar_focus(cfg, (dir / "sar" / "echo.cfm").string(), (dir / "sar").string());
    RunConfig abl = cfg;
    abl.pipeline.skip_qam_removal = abl.pipeline.skip_compensation = true;
    cmd_sar_focus(abl, "", (dir / "ablation").string());
    cmd_metrics(cfg, (dir / "sar" / "image.cfm").string(), (dir / "sar" / "metrics.csv").string());
    cmd_comm_ber(cfg, (dir / "ber.csv").string());
    RunConfig corr = cfg;
    corr.ber.engine = BerEngine::Correlator;
    cmd_comm_ber(corr, (dir / "ber_correlator.csv").string());
}

Outcome determinism(const RunConfig& base) {
    fs::path root = fs::temp_directory_path() / fmt("fimsar_acceptance_%llu",
                                                     static_cast<unsigned long long>(
                                                         std::chrono::steady_clock::now().time_since_epoch().count()));
    RunConfig cfg = base;
    cfg.ber.trials = 300;
    run_all_commands(cfg, 1, root / "a");
    run_all_commands(cfg, 1, root / "b");
    run_all_commands(cfg, 4, root / "c");
    auto a = snapshot(root / "a"), b = snapshot(root / "b"), c = snapshot(root / "c");
    fs::remove_all(root);
    std::size_t diff_rerun = 0, diff_threads = 0;
    for (const auto& [k, v] : a) {
        diff_rerun += !b.count(k) || b.at(k) != v;
        diff_threads += !c.count(k) || c.at(k) != v;
    }
    bool ok = !a.empty() && a.size() == b.size() && a.size() == c.size() && diff_rerun == 0 && diff_threads == 0;
    return {ok, fmt("%zu output files from all six commands; %zu differ on rerun, %zu differ with 4 threads",
                    a.size(), diff_rerun, diff_threads)};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <reference config>\n");
        return 2;
    }
    RunConfig base;
    try {
        base = parse_config(argv[1]);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: %s\n", e.what());
        return 2;
    }
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "Doppler resolution", 10, doppler_resolution},
        {2, "zero-delay exactness", 30, zero_delay_exactness},
        {3, "range-resolution bounds", 120, range_resolution_bounds},
        {4, "bandwidth-synthesis oracle", 30, bandwidth_synthesis},
        {5, "LFM/FIM image quality", 300, [&] { return table_analogue(base); }},
        {6, "ablation ordering", 300, [&] { return ablation_ordering(base); }},
        {7, "tone orthogonality", 5, tone_orthogonality},
        {8, "BER trends", 600, ber_trends},
        {9, "bit accounting", 60, bit_accounting},
        {10, "determinism", 120, [&] { return determinism(base); }},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = o.pass && dt < c.budget_s;
        if (!pass) ++failed;
        std::printf("%s criterion %d (%s): %s [%.1f s, budget %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), dt, c.budget_s);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
