#include "fimsar/imaging.hpp"

#include "fimsar/fft.hpp"
#include "fimsar/parallel.hpp"

#include <algorithm>

namespace fimsar {

CompensationFilter make_compensation_filter(const DerivedParams& p, std::size_t Nw) {
    if (Nw % static_cast<std::size_t>(p.q) != 0 || Nw < p.Ns)
        fail_invalid("sub-band width is not an integer number of bins for DFT length " + std::to_string(Nw));
    CompensationFilter f;
    f.Nw = Nw;
    f.Nb = Nw / static_cast<std::size_t>(p.q);
    f.fs = p.fs;
    CVector ref(Nw);
    CVector base = subchirp(p, 0);
    std::copy(base.begin(), base.end(), ref.begin());
    CVector spec = fft::forward(ref);
    f.response.resize(f.Nb);
    for (std::size_t j = 0; j < f.Nb; ++j) {
        if (std::abs(spec[j]) == 0.0) fail_runtime("sub-chirp spectrum vanishes inside its band");
        f.response[j] = 1.0 / spec[j];
    }
    return f;
}

EchoCube remove_qam(const EchoCube& cube, const FimFrame& frame) {
    if (frame.qam.size() != cube.data.rows) fail_invalid("frame does not match echo cube");
    EchoCube out = cube;
    for (std::size_t r = 0; r < cube.data.rows; ++r) {
        Complex c = frame.qam[r];
        if (std::abs(c) == 0.0) fail_invalid("zero-magnitude QAM symbol");
        Complex w = std::conj(c) / std::norm(c);
        Complex* row = out.data.row(r);
        for (std::size_t n = 0; n < cube.data.cols; ++n) row[n] *= w;
    }
    return out;
}

RangeCompressedMatrix subpulse_compensate(const EchoCube& cube, const FimFrame& frame, const DerivedParams& p,
                                          std::size_t pad, unsigned threads) {
    if (pad == 0) fail_invalid("pad must be >= 1");
    const std::size_t M = static_cast<std::size_t>(cube.M);
    if (frame.indices.size() != cube.data.rows || cube.K * M != cube.data.rows)
        fail_invalid("frame does not match echo cube");
    const std::size_t Nw = cube.data.cols;
    const CompensationFilter H = make_compensation_filter(p, Nw);
    const std::size_t Ng = pad * Nw;
    const double df = p.fs / static_cast<double>(Nw);

    RangeCompressedMatrix out;
    out.data = CMatrix(cube.K, Ng);
    out.fs = p.fs * static_cast<double>(pad);
    out.t0 = cube.window_start;
    out.PRF = cube.PRF;
    out.bandwidth = static_cast<double>(M * H.Nb) * df;
    out.band_center = 0.5 * static_cast<double>(M * H.Nb - 1) * df;

    parallel_for(cube.K, threads, [&](std::size_t k) {
        CVector spec(Nw), acc(Ng, Complex(0.0));
        for (std::size_t m = 0; m < M; ++m) {
            const std::size_t r = k * M + m;
            const int a = frame.indices[r];
            fft::forward(cube.data.row(r), spec.data(), Nw);
            const double sub_emission = static_cast<double>(m) * p.Ts;   // Δt of this sub-pulse
            const double gate = cube.gate_offset[m];
            const std::size_t base = static_cast<std::size_t>(a) * H.Nb;
            for (std::size_t j = 0; j < H.Nb; ++j) {
                const std::size_t bin = base + j;
                const double f = static_cast<double>(bin) * df;
                // Pulse compression plus time alignment of this sub-pulse onto the common origin.
                Complex align = cis_cycles(f * (sub_emission - gate));
                acc[bin] += spec[bin] * H.response[j] * align;
            }
        }
        fft::backward(acc.data(), out.data.row(k), Ng);
        Complex* row = out.data.row(k);
        for (std::size_t n = 0; n < Ng; ++n) row[n] *= df;
    });
    out.steps.push_back("subpulse_compensation");
    return out;
}

RangeCompressedMatrix conventional_range_compress(const EchoCube& cube, const DerivedParams& p, std::size_t pad,
                                                  unsigned threads) {
    if (pad == 0) fail_invalid("pad must be >= 1");
    const std::size_t M = static_cast<std::size_t>(cube.M);
    const std::size_t Nw = cube.data.cols;
    const std::size_t Nm = Nw + (M - 1) * p.Ns;
    if (Nm % static_cast<std::size_t>(p.q) != 0) fail_invalid("merged record length is not a multiple of q");
    const std::size_t band = M * (Nm / static_cast<std::size_t>(p.q));
    const double df = p.fs / static_cast<double>(Nm);

    // Reference: the nominal chirp with sub-bands in natural order.
    CVector ref(Nm);
    for (std::size_t m = 0; m < M; ++m) {
        CVector sc = subchirp(p, static_cast<int>(m));
        std::copy(sc.begin(), sc.end(), ref.begin() + static_cast<std::ptrdiff_t>(m * p.Ns));
    }
    CVector R = fft::forward(ref);
    double mean_power = 0;
    for (std::size_t b = 0; b < band; ++b) mean_power += std::norm(R[b]);
    mean_power /= static_cast<double>(band);
    CVector Hf(band);
    for (std::size_t b = 0; b < band; ++b) Hf[b] = std::conj(R[b]) / (std::norm(R[b]) + 1e-3 * mean_power);

    RangeCompressedMatrix out;
    out.data = CMatrix(cube.K, pad * Nw);
    out.fs = p.fs * static_cast<double>(pad);
    out.t0 = cube.window_start;
    out.PRF = cube.PRF;
    out.bandwidth = static_cast<double>(band) * df;
    out.band_center = 0.5 * static_cast<double>(band - 1) * df;

    parallel_for(cube.K, threads, [&](std::size_t k) {
        CVector trace(Nm), spec(Nm), full(pad * Nm, Complex(0.0)), time(pad * Nm);
        for (std::size_t m = 0; m < M; ++m) {
            auto off = static_cast<std::size_t>(std::llround(cube.gate_offset[m] * p.fs));
            const Complex* row = cube.data.row(k * M + m);
            for (std::size_t n = 0; n < Nw && off + n < Nm; ++n) trace[off + n] += row[n];
        }
        fft::forward(trace.data(), spec.data(), Nm);
        for (std::size_t b = 0; b < band; ++b) full[b] = spec[b] * Hf[b];
        fft::backward(full.data(), time.data(), pad * Nm);
        Complex* dst = out.data.row(k);
        for (std::size_t n = 0; n < pad * Nw; ++n) dst[n] = time[n] * df;
    });
    out.steps.push_back("conventional_range_compression");
    return out;
}

Complex interpolate_8tap(const Complex* x, std::size_t n, double u) {
    double fl = std::floor(u);
    auto base = static_cast<long long>(fl);
    double frac = u - fl;
    if (frac == 0.0) {
        return (base >= 0 && base < static_cast<long long>(n)) ? x[base] : Complex(0.0);
    }
    Complex acc = 0.0;
    double wsum = 0.0;
    for (int i = -3; i <= 4; ++i) {
        double d = frac - i;
        double w = std::sin(kPi * d) / (kPi * d) * 0.5 * (1.0 + std::cos(kPi * d / 4.0));
        wsum += w;
        long long idx = base + i;
        if (idx >= 0 && idx < static_cast<long long>(n)) acc += w * x[idx];
    }
    return acc / wsum;
}

double doppler_of_row(std::size_t i, std::size_t K, double PRF) {
    long long s = static_cast<long long>(i);
    if (2 * i >= K) s -= static_cast<long long>(K);
    return static_cast<double>(s) * PRF / static_cast<double>(K);
}

namespace {

void column_transform(CMatrix& data, bool forward_dir, double scale, unsigned threads) {
    const std::size_t K = data.rows;
    parallel_for(data.cols, threads, [&](std::size_t n) {
        CVector col(K), spec(K);
        for (std::size_t i = 0; i < K; ++i) col[i] = data(i, n);
        if (forward_dir)
            fft::forward(col.data(), spec.data(), K);
        else
            fft::backward(col.data(), spec.data(), K);
        for (std::size_t i = 0; i < K; ++i) data(i, n) = spec[i] * scale;
    });
}

}  // namespace

RangeCompressedMatrix to_doppler(const RangeCompressedMatrix& m, unsigned threads) {
    if (m.doppler_domain) return m;
    RangeCompressedMatrix out = m;
    column_transform(out.data, true, 1.0, threads);
    out.doppler_domain = true;
    return out;
}

RangeCompressedMatrix align_pulses(const RangeCompressedMatrix& m, const Geometry& g, double reference_range,
                                   unsigned threads) {
    if (m.doppler_domain) fail_invalid("align_pulses expects slow-time rows");
    const std::size_t K = m.data.rows, N = m.data.cols;
    const double df = m.fs / static_cast<double>(N);
    RangeCompressedMatrix out = m;
    parallel_for(K, threads, [&](std::size_t k) {
        const double s = (static_cast<double>(k) - static_cast<double>(K) / 2.0) / m.PRF;
        const double vs = g.v * s;
        const double dR = vs * vs / (std::sqrt(reference_range * reference_range + vs * vs) + reference_range);
        const double dt = 2.0 * dR / kSpeedOfLight;
        CVector spec = fft::forward(CVector(m.data.row(k), m.data.row(k) + N));
        for (std::size_t j = 0; j < N; ++j) {
            // bin frequency taken as the alias nearest the occupied band
            double f = static_cast<double>(j) * df;
            f += std::round((m.band_center - f) / m.fs) * m.fs;
            spec[j] *= cis_cycles((f - m.band_center) * dt) / static_cast<double>(N);
        }
        CVector row = fft::backward(spec);
        std::copy(row.begin(), row.end(), out.data.row(k));
    });
    return out;
}

RangeCompressedMatrix rcmc_doppler(const RangeCompressedMatrix& m, const Geometry& g, double fc, unsigned threads,
                                   double reference_range) {
    if (!m.doppler_domain) fail_invalid("rcmc_doppler expects Doppler-domain rows");
    const double lambda = kSpeedOfLight / fc;
    const std::size_t K = m.data.rows, N = m.data.cols;
    RangeCompressedMatrix out = m;
    parallel_for(K, threads, [&](std::size_t i) {
        const double f = doppler_of_row(i, K, m.PRF);
        if (f == 0.0) return;
        const Complex* src = m.data.row(i);
        CVector base(N);
        for (std::size_t n = 0; n < N; ++n)
            base[n] = src[n] * cis_cycles(-m.band_center * (m.t0 + static_cast<double>(n) / m.fs));
        Complex* dst = out.data.row(i);
        for (std::size_t n = 0; n < N; ++n) {
            double t = m.t0 + static_cast<double>(n) / m.fs;
            double R0 = kSpeedOfLight * t / 2.0;
            double dR = lambda * lambda * R0 * f * f / (8.0 * g.v * g.v);
            double dt = 2.0 * dR / kSpeedOfLight;
            // after alignment at Rref the slow-time residual v^2 s^2 (1/R0 - 1/Rref)/2 maps to this
            double dt_env = reference_range > 0 ? dt * (1.0 - R0 / reference_range) : dt;
            Complex v = interpolate_8tap(base.data(), N, static_cast<double>(n) + dt_env * m.fs);
            dst[n] = v * cis_cycles(m.band_center * (t + dt));
        }
    });
    out.steps.push_back("rcmc");
    return out;
}

RangeCompressedMatrix rcmc(const RangeCompressedMatrix& m, const Geometry& g, double fc, unsigned threads) {
    const double Rref = g.R0();
    return rcmc_doppler(to_doppler(align_pulses(m, g, Rref, threads), threads), g, fc, threads, Rref);
}

double azimuth_fm_rate(const Geometry& g, double fc, double R0) {
    double lambda = kSpeedOfLight / fc;
    return 2.0 * g.v * g.v / (lambda * R0);
}

SarImage azimuth_compress(const RangeCompressedMatrix& m, const Geometry& g, double fc_eff,
                          const AzimuthOptions& opt) {
    RangeCompressedMatrix dm = m.doppler_domain ? m : to_doppler(m, opt.threads);
    const std::size_t K = dm.data.rows, N = dm.data.cols;
    const double t_mid = dm.t0 + 0.5 * static_cast<double>(N) / dm.fs;
    const double Ka_mid = azimuth_fm_rate(g, fc_eff, kSpeedOfLight * t_mid / 2.0);
    const double Ba = Ka_mid * static_cast<double>(K) / dm.PRF;
    if (dm.PRF < Ba)
        fail_invalid("PRF " + std::to_string(dm.PRF) + " Hz is below the processed Doppler bandwidth " +
                     std::to_string(Ba) + " Hz");
    SarImage img;
    img.data = CMatrix(N, K);
    img.fc = fc_eff;
    img.range_bandwidth = dm.bandwidth;
    img.doppler_bandwidth = Ba;
    img.v = g.v;
    img.range = Axis{kSpeedOfLight * dm.t0 / 2.0, kSpeedOfLight / (2.0 * dm.fs), N};
    img.azimuth = Axis{g.v * (-static_cast<double>(K) / 2.0) / dm.PRF, g.v / dm.PRF, K};
    const double sign = opt.flip_rate_sign ? 1.0 : -1.0;
    parallel_for(N, opt.threads, [&](std::size_t n) {
        const double R0 = kSpeedOfLight * (dm.t0 + static_cast<double>(n) / dm.fs) / 2.0;
        const double Ka = azimuth_fm_rate(g, fc_eff, R0);
        CVector col(K), out(K);
        for (std::size_t i = 0; i < K; ++i) {
            double f = doppler_of_row(i, K, dm.PRF);
            col[i] = dm.data(i, n) * std::polar(1.0, sign * kPi * f * f / Ka);
        }
        fft::backward(col.data(), out.data(), K);
        Complex* row = img.data.row(n);
        for (std::size_t i = 0; i < K; ++i) row[i] = out[i] / static_cast<double>(K);
    });
    img.steps = dm.steps;
    img.steps.push_back("azimuth_compression");
    return img;
}

SarImage focus_rda(const EchoCube& cube, const FimFrame& frame, const Geometry& g, const WaveformConfig& cfg,
                   const DerivedParams& p, const FocusOptions& opt) {
    std::vector<std::string> pre;
    const EchoCube* src = &cube;
    EchoCube stripped;
    if (!opt.skip_qam_removal) {
        stripped = remove_qam(cube, frame);
        src = &stripped;
        pre.push_back("qam_removal");
    }
    RangeCompressedMatrix rc = opt.skip_compensation
                                   ? conventional_range_compress(*src, p, opt.range_upsample, opt.threads)
                                   : subpulse_compensate(*src, frame, p, opt.range_upsample, opt.threads);
    rc.steps.insert(rc.steps.begin(), pre.begin(), pre.end());
    RangeCompressedMatrix mig = rcmc(rc, g, cfg.fc, opt.threads);
    AzimuthOptions az;
    az.threads = opt.threads;
    return azimuth_compress(mig, g, cfg.fc, az);
}

}  // namespace fimsar
