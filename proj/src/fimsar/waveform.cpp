#include "fimsar/waveform.hpp"

#include "fimsar/fft.hpp"
#include "fimsar/parallel.hpp"
#include "fimsar/rng.hpp"

#include <bit>
#include <limits>

namespace fimsar {

void validate(const WaveformConfig& cfg) {
    if (!(cfg.fc > 0) || !std::isfinite(cfg.fc)) fail_invalid("fc must be positive");
    if (!(cfg.Bw > 0) || !std::isfinite(cfg.Bw)) fail_invalid("Bw must be positive");
    if (!(cfg.Tw > 0) || !std::isfinite(cfg.Tw)) fail_invalid("Tw must be positive");
    if (cfg.M < 1) fail_invalid("M must be >= 1");
    if (cfg.J != 4 && cfg.J != 16 && cfg.J != 64) fail_invalid("J must be 4, 16 or 64");
    if (!(cfg.P > 0) || !std::isfinite(cfg.P)) fail_invalid("P must be positive");
    if (!(cfg.osf >= 1) || !std::isfinite(cfg.osf)) fail_invalid("osf must be >= 1");
}

DerivedParams derive_params(const WaveformConfig& cfg) {
    validate(cfg);
    DerivedParams p;
    p.M = cfg.M;
    p.Bs = cfg.Bw / cfg.M;
    p.Ts = cfg.Tw / cfg.M;
    p.Kc = p.Bs / p.Ts;
    double bt = p.Bs * p.Ts;
    if (bt < 1.0 - 1e-9)
        fail_invalid("M=" + std::to_string(cfg.M) + " gives Bs*Ts=" + std::to_string(bt) +
                     " < 1; sub-band tones are not orthogonal");
    double bt_round = std::round(bt);
    if (std::abs(bt - bt_round) > 1e-6 * bt)
        fail_invalid("M=" + std::to_string(cfg.M) + " gives non-integer Bs*Ts=" + std::to_string(bt) +
                     "; sub-band tones are not orthogonal");
    p.bs_ts = static_cast<std::int64_t>(bt_round);
    p.q = static_cast<int>(std::ceil(cfg.osf * cfg.M - 1e-12));
    p.fs = p.q * p.Bs;
    p.Ns = static_cast<std::size_t>(p.q) * static_cast<std::size_t>(p.bs_ts);
    p.Npulse = p.Ns * static_cast<std::size_t>(cfg.M);
    return p;
}

int index_bits(int M) {
    int b = 0;
    while ((2 << b) <= M) ++b;
    return M >= 1 ? b : 0;
}

int qam_bits(int J) { return std::countr_zero(static_cast<unsigned>(J)); }

int bits_per_pulse(const WaveformConfig& cfg) { return cfg.M * (index_bits(cfg.M) + qam_bits(cfg.J)); }

QamConstellation::QamConstellation(int J, double rotation_rad) : bits_(qam_bits(J)) {
    if (J != 4 && J != 16 && J != 64) fail_invalid("QAM order must be 4, 16 or 64");
    int half = bits_ / 2;
    int L = 1 << half;
    double norm = std::sqrt(2.0 * (J - 1) / 3.0);
    Complex rot = std::polar(1.0, rotation_rad);
    auto level = [&](int gray) {
        int idx = 0;
        for (int g = gray; g; g >>= 1) idx ^= g;
        return 2.0 * idx - (L - 1);
    };
    points_.resize(static_cast<std::size_t>(J));
    for (int label = 0; label < J; ++label) {
        int gi = label >> half;
        int gq = label & (L - 1);
        points_[static_cast<std::size_t>(label)] = rot * Complex(level(gi), level(gq)) / norm;
    }
}

int QamConstellation::nearest(Complex z, Complex gain) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int l = 0; l < order(); ++l) {
        double d = std::norm(z - gain * points_[static_cast<std::size_t>(l)]);
        if (d < best_d) {
            best_d = d;
            best = l;
        }
    }
    return best;
}

FimFrame map_bits_to_frame(const BitStream& bits, const WaveformConfig& cfg, std::size_t K) {
    validate(cfg);
    const int bf = index_bits(cfg.M);
    const int bq = qam_bits(cfg.J);
    const std::size_t p = static_cast<std::size_t>(bits_per_pulse(cfg));
    if (bits.bits.size() != K * p)
        fail_invalid("bit stream length " + std::to_string(bits.bits.size()) + " != K*p = " +
                     std::to_string(K * p));
    QamConstellation qam(cfg.J);
    FimFrame f;
    f.M = cfg.M;
    f.K = K;
    f.indices.resize(K * static_cast<std::size_t>(cfg.M));
    f.qam.resize(f.indices.size());
    std::size_t pos = 0;
    for (std::size_t s = 0; s < f.indices.size(); ++s) {
        int a = 0;
        for (int b = 0; b < bf; ++b) a = (a << 1) | (bits.bits[pos++] & 1);
        int label = 0;
        for (int b = 0; b < bq; ++b) label = (label << 1) | (bits.bits[pos++] & 1);
        f.indices[s] = a;
        f.qam[s] = qam.point(label);
    }
    return f;
}

void check_frame(const FimFrame& frame, const WaveformConfig& cfg) {
    if (frame.M != cfg.M) fail_invalid("frame M does not match waveform M");
    std::size_t n = frame.K * static_cast<std::size_t>(frame.M);
    if (frame.indices.size() != n || frame.qam.size() != n) fail_invalid("frame size does not match K*M");
    for (int a : frame.indices)
        if (a < 0 || a >= cfg.M) fail_invalid("frame index " + std::to_string(a) + " out of range");
}

BitStream frame_to_bits(const FimFrame& frame, const WaveformConfig& cfg) {
    check_frame(frame, cfg);
    const int bf = index_bits(cfg.M);
    const int bq = qam_bits(cfg.J);
    QamConstellation qam(cfg.J);
    BitStream out;
    out.bits_per_pulse = bits_per_pulse(cfg);
    out.bits.reserve(frame.K * static_cast<std::size_t>(out.bits_per_pulse));
    for (std::size_t s = 0; s < frame.indices.size(); ++s) {
        int a = frame.indices[s];
        if (a >= (1 << bf))
            fail_invalid("index " + std::to_string(a) + " is not representable with " + std::to_string(bf) +
                         " index bits");
        for (int b = bf - 1; b >= 0; --b) out.bits.push_back(static_cast<std::uint8_t>((a >> b) & 1));
        int label = qam.nearest(frame.qam[s]);
        for (int b = bq - 1; b >= 0; --b) out.bits.push_back(static_cast<std::uint8_t>((label >> b) & 1));
    }
    return out;
}

BitStream random_bits(const WaveformConfig& cfg, std::size_t K, std::uint64_t seed) {
    BitStream b;
    b.bits_per_pulse = bits_per_pulse(cfg);
    b.bits.resize(K * static_cast<std::size_t>(b.bits_per_pulse));
    RandomStream rs(seed, {static_cast<std::uint64_t>(StreamTag::Bits)});
    for (auto& x : b.bits) x = static_cast<std::uint8_t>(rs.bit());
    return b;
}

FimFrame random_frame(const WaveformConfig& cfg, std::size_t K, std::uint64_t seed) {
    return map_bits_to_frame(random_bits(cfg, K, seed), cfg, K);
}

FimFrame patterned_frame(const WaveformConfig& cfg, std::size_t K, const std::vector<int>& pattern,
                         std::uint64_t seed) {
    if (pattern.size() != static_cast<std::size_t>(cfg.M))
        fail_invalid("index pattern length must equal M");
    FimFrame f = random_frame(cfg, K, seed);
    for (std::size_t s = 0; s < f.indices.size(); ++s) f.indices[s] = pattern[s % pattern.size()];
    check_frame(f, cfg);
    return f;
}

CVector subchirp(const DerivedParams& p, int a) {
    // Phase in cycles: a*n/q + n^2/(2 q Ns), reduced with integer arithmetic so that
    // tones stay exactly orthogonal.
    const std::uint64_t q = static_cast<std::uint64_t>(p.q);
    const std::uint64_t mod2 = 2 * q * p.Ns;
    const std::uint64_t ua = static_cast<std::uint64_t>(a);
    CVector s(p.Ns);
    for (std::size_t n = 0; n < p.Ns; ++n) {
        std::uint64_t un = n;
        double tone = static_cast<double>((ua * un) % q) / static_cast<double>(q);
        double chirp = static_cast<double>((un * un) % mod2) / static_cast<double>(mod2);
        s[n] = cis_cycles(tone + chirp);
    }
    return s;
}

CVector chirp_term(const DerivedParams& p) { return subchirp(p, 0); }

CVector synthesize_pulse(const WaveformConfig& cfg, const DerivedParams& p, const FimFrame& frame,
                         std::size_t k) {
    if (k >= frame.K) fail_invalid("pulse index out of range");
    check_frame(frame, cfg);
    CVector out(p.Npulse);
    const double amp = std::sqrt(cfg.P);
    for (int m = 0; m < cfg.M; ++m) {
        std::size_t s = k * static_cast<std::size_t>(cfg.M) + static_cast<std::size_t>(m);
        CVector sc = subchirp(p, frame.indices[s]);
        Complex g = amp * frame.qam[s];
        for (std::size_t n = 0; n < p.Ns; ++n) out[static_cast<std::size_t>(m) * p.Ns + n] = g * sc[n];
    }
    return out;
}

PulseTrain synthesize_train(const WaveformConfig& cfg, const DerivedParams& p, const FimFrame& frame,
                            double PRI, unsigned threads) {
    if (frame.K == 0) fail_invalid("empty frame");
    if (!(PRI >= cfg.Tw)) fail_invalid("PRI shorter than the pulse width");
    PulseTrain t;
    t.PRI = PRI;
    t.pulses.resize(frame.K);
    t.timestamps.resize(frame.K);
    parallel_for(frame.K, threads, [&](std::size_t k) {
        t.pulses[k] = synthesize_pulse(cfg, p, frame, k);
        t.timestamps[k] = static_cast<double>(k) * PRI;
    });
    return t;
}

std::vector<std::vector<double>> spectrogram(const CVector& x, std::size_t window, std::size_t hop) {
    if (window == 0 || hop == 0 || x.size() < window) fail_invalid("spectrogram window does not fit");
    std::size_t frames = (x.size() - window) / hop + 1;
    std::vector<std::vector<double>> out(window, std::vector<double>(frames));
    CVector buf(window), spec(window);
    for (std::size_t f = 0; f < frames; ++f) {
        for (std::size_t i = 0; i < window; ++i) {
            double w = 0.5 - 0.5 * std::cos(2 * kPi * static_cast<double>(i) / static_cast<double>(window));
            buf[i] = w * x[f * hop + i];
        }
        fft::forward(buf.data(), spec.data(), window);
        for (std::size_t b = 0; b < window; ++b) out[b][f] = std::abs(spec[b]);
    }
    return out;
}

}  // namespace fimsar
