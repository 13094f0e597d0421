#include "fimsar/echo.hpp"

#include "fimsar/fft.hpp"
#include "fimsar/parallel.hpp"
#include "fimsar/rng.hpp"

#include <algorithm>

namespace fimsar {

void validate(const Geometry& g) {
    if (!(g.h > 0)) fail_invalid("altitude must be positive");
    if (!(g.v > 0)) fail_invalid("platform speed must be positive");
    if (!(g.depression_deg > 0 && g.depression_deg < 90)) fail_invalid("depression must be in (0, 90) degrees");
    if (!(g.antenna_len > 0)) fail_invalid("antenna length must be positive");
}

SceneExtent centered_extent(const Geometry& g, double width_range, double width_azimuth) {
    double xc = g.scene_center_x();
    return {xc - width_range / 2, xc + width_range / 2, -width_azimuth / 2, width_azimuth / 2};
}

double default_prf(const Geometry& g) { return 4.0 * 2.0 * g.v / g.antenna_len; }

SlantRange slant_range(const Geometry& g, const PointTarget& t, double s) {
    double dy = t.y - g.v * s;
    double r0 = std::sqrt(t.x * t.x + g.h * g.h);
    return {std::sqrt(t.x * t.x + dy * dy + g.h * g.h), r0 + dy * dy / (2 * r0)};
}

double instantaneous_doppler(const Geometry& g, const PointTarget& t, const WaveformConfig& cfg,
                             const DerivedParams& p, int a, double s) {
    double r0 = std::sqrt(t.x * t.x + g.h * g.h);
    return 2.0 * (cfg.fc + a * p.Bs) * (t.y - g.v * s) * g.v / (kSpeedOfLight * r0);
}

void plan_fast_window(Acquisition& acq, const DerivedParams& p, const Geometry& g, const SceneExtent& scene,
                      double guard_s) {
    if (!(acq.PRF > 0) || acq.K == 0) fail_invalid("PRF and K must be positive");
    double s_first = acq.slow_time(0), s_last = acq.slow_time(acq.K - 1);
    double xmin = std::max(0.0, scene.x_min);
    double r_min = std::sqrt(xmin * xmin + g.h * g.h);
    double dy = std::max({std::abs(scene.y_min - g.v * s_first), std::abs(scene.y_min - g.v * s_last),
                          std::abs(scene.y_max - g.v * s_first), std::abs(scene.y_max - g.v * s_last)});
    double r_max = std::sqrt(scene.x_max * scene.x_max + dy * dy + g.h * g.h);
    double t0 = 2 * r_min / kSpeedOfLight - guard_s;
    double t1 = 2 * r_max / kSpeedOfLight + p.Ts + guard_s;
    // Start on the sample grid so window times are exact multiples of 1/fs.
    acq.window_start = std::floor(t0 * p.fs) / p.fs;
    auto need = static_cast<std::size_t>(std::ceil((t1 - acq.window_start) * p.fs));
    acq.window_samples = fft::smooth_size(need, static_cast<std::size_t>(p.q));
}

EchoCube simulate_echo(const WaveformConfig& cfg, const DerivedParams& p, const Geometry& g,
                       const Acquisition& acq, const FimFrame& frame, const std::vector<PointTarget>& targets,
                       unsigned threads) {
    check_frame(frame, cfg);
    if (frame.K != acq.K) fail_invalid("frame pulse count does not match acquisition K");
    if (acq.window_samples == 0) fail_invalid("fast window not planned");
    if (!(acq.PRF * cfg.Tw < 1.0)) fail_invalid("PRF*Tw must be < 1");
    const std::size_t M = static_cast<std::size_t>(cfg.M);
    const std::size_t Nw = acq.window_samples;
    const bool gated = acq.layout == EchoLayout::Gated;
    // Gated layout records one merged trace per pulse and cuts M gates out of it.
    const std::size_t trace_len = gated ? Nw + (M - 1) * p.Ns : Nw;
    const double window_end = acq.window_start + static_cast<double>(Nw) / p.fs;

    EchoCube cube;
    cube.data = CMatrix(acq.K * M, Nw);
    cube.fs = p.fs;
    cube.window_start = acq.window_start;
    cube.PRF = acq.PRF;
    cube.K = acq.K;
    cube.M = cfg.M;
    cube.layout = acq.layout;
    cube.frame = frame;
    cube.gate_offset.resize(M);
    for (std::size_t m = 0; m < M; ++m) cube.gate_offset[m] = static_cast<double>(m) * p.Ts;

    const double amp = std::sqrt(cfg.P);
    const double n0 = std::isfinite(acq.noise_snr_db) ? cfg.P * cfg.P / std::pow(10.0, acq.noise_snr_db / 10.0) : 0.0;

    parallel_for(acq.K, threads, [&](std::size_t k) {
        const double s = acq.slow_time(k);
        CVector trace(gated ? trace_len : 0);
        for (const auto& t : targets) {
            double tau = 2.0 * slant_range(g, t, s).exact / kSpeedOfLight;
            if (tau < acq.window_start || tau + p.Ts > window_end)
                fail_invalid("target " + t.id + " delay outside fast window");
            Complex carrier = t.sigma * amp * cis_cycles(-cfg.fc * tau);
            for (std::size_t m = 0; m < M; ++m) {
                std::size_t idx = k * M + m;
                int a = frame.indices[idx];
                Complex gain = carrier * frame.qam[idx];
                // Row time axis: window_start + n/fs after the sub-pulse (or pulse, if gated) emission.
                double delay = tau + (gated ? cube.gate_offset[m] : 0.0);
                double first = (delay - acq.window_start) * p.fs;
                auto n0i = static_cast<std::size_t>(std::max(0.0, std::ceil(first)));
                Complex* out = gated ? trace.data() : cube.data.row(idx);
                std::size_t limit = gated ? trace_len : Nw;
                for (std::size_t n = n0i; n < limit; ++n) {
                    double tt = acq.window_start + static_cast<double>(n) / p.fs - delay;
                    if (tt >= p.Ts) break;
                    if (tt < 0) continue;
                    out[n] += gain * cis_cycles(a * p.Bs * tt + 0.5 * p.Kc * tt * tt);
                }
            }
        }
        if (gated) {
            for (std::size_t m = 0; m < M; ++m)
                std::copy_n(trace.begin() + static_cast<std::ptrdiff_t>(m * p.Ns), Nw, cube.data.row(k * M + m));
        }
        if (n0 > 0) {
            RandomStream rs(acq.seed, {static_cast<std::uint64_t>(StreamTag::EchoNoise), k});
            for (std::size_t m = 0; m < M; ++m) {
                Complex* row = cube.data.row(k * M + m);
                for (std::size_t n = 0; n < Nw; ++n) row[n] += rs.complex_normal(n0);
            }
        }
    });
    return cube;
}

}  // namespace fimsar
