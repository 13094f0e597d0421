#include "fimsar/comm.hpp"
#include "fimsar/fft.hpp"
#include "fimsar/rng.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace fimsar;

namespace {

WaveformConfig wf(int M, int J = 4) {
    WaveformConfig c;
    c.M = M;
    c.J = J;
    return c;
}

RxSubpulse clean(const DerivedParams& p, int a, Complex c, Complex h, double P = 1.0) {
    RxSubpulse rx;
    rx.h = h;
    CVector s = subchirp(p, a);
    rx.samples.resize(p.Ns);
    for (std::size_t n = 0; n < p.Ns; ++n) rx.samples[n] = h * c * std::sqrt(P) * s[n];
    return rx;
}

double binomial_sigma(double ber, double bits) { return std::sqrt(std::max(ber * (1 - ber), 1e-12) / bits); }

}  // namespace

TEST_CASE("noise-free channel applies the fading gain only") {
    DerivedParams p = derive_params(wf(4));
    CVector tx = subchirp(p, 1);
    ChannelConfig ch;
    ch.seed = 5;
    RxSubpulse rx = apply_channel(tx, ch, 1.0, 3, 2);
    for (std::size_t n = 0; n < tx.size(); ++n) CHECK(rx.samples[n] == rx.h * tx[n]);
    RxSubpulse again = apply_channel(tx, ch, 1.0, 3, 2);
    CHECK(again.h == rx.h);
    RxSubpulse other = apply_channel(tx, ch, 1.0, 3, 1);
    CHECK(other.h != rx.h);
}

TEST_CASE("fading has the configured mean power") {
    ChannelConfig ch;
    ch.seed = 11;
    CVector tx{Complex(1, 0)};
    double acc = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) acc += std::norm(apply_channel(tx, ch, 1.0, static_cast<std::size_t>(k), 0).h);
    CHECK(acc / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("noise variance follows 10 log10(P^2/N0)") {
    CHECK(noise_variance(10, 1.0) == doctest::Approx(0.1));
    CHECK(noise_variance(0, 2.0) == doctest::Approx(4.0));
    CHECK(noise_variance(std::numeric_limits<double>::infinity(), 1.0) == 0.0);
    DerivedParams p = derive_params(wf(4));
    ChannelConfig ch;
    ch.snr_db = 3;
    CVector zero(p.Ns, Complex(0, 0));
    double e = 0;
    for (std::size_t k = 0; k < 50; ++k) e += testing::energy(apply_channel(zero, ch, 1.0, k, 0).samples);
    CHECK(e / (50.0 * static_cast<double>(p.Ns)) == doctest::Approx(std::pow(10.0, -0.3)).epsilon(0.02));
}

TEST_CASE("de-chirp of index 0 leaves a constant") {
    DerivedParams p = derive_params(wf(4));
    CVector y = dechirp(clean(p, 0, 1.0, 1.0), p);
    for (const auto& v : y) CHECK(std::abs(v - Complex(1, 0)) < 1e-12);
}

TEST_CASE("de-chirp of index 2 leaves a tone at bin 2*Bs*Ns/fs") {
    DerivedParams p = derive_params(wf(4));
    CVector Y = fft::forward(dechirp(clean(p, 2, 1.0, 1.0), p));
    std::size_t best = 0;
    for (std::size_t k = 1; k < Y.size(); ++k)
        if (std::abs(Y[k]) > std::abs(Y[best])) best = k;
    CHECK(best == 400);
    CHECK(std::abs(Y[best]) == doctest::Approx(1000.0));
    CHECK(std::abs(testing::dft_bin(dechirp(clean(p, 2, 1.0, 1.0), p), 400)) == doctest::Approx(1000.0));
}

TEST_CASE("chirp term cancels exactly") {
    DerivedParams p = derive_params(wf(4));
    CVector y = dechirp(clean(p, 3, Complex(0.3, -0.4), std::polar(1.2, 2.0)), p);
    double step0 = std::arg(y[1] / y[0]);
    for (std::size_t n = 2; n < y.size(); ++n) CHECK(std::abs(std::arg(y[n] / y[n - 1]) - step0) < 1e-9);
    CHECK(std::abs(std::remainder(step0 - 2 * kPi * 3 * p.Bs / p.fs, 2 * kPi)) < 1e-9);
}

TEST_CASE("detection statistics are one-hot for a noiseless sub-pulse") {
    for (int M : {2, 4, 5, 8}) {
        DerivedParams p = derive_params(wf(M));
        for (int a = 0; a < M; ++a) {
            Complex h = std::polar(0.8, 0.3 * a), c = std::polar(1.0, -0.7);
            IndexDecision d = detect_index(dechirp(clean(p, a, c, h), p), p);
            CHECK(d.index == a);
            CHECK(d.statistics[static_cast<std::size_t>(a)] == doctest::Approx(std::norm(h) * std::norm(c)));
            for (int l = 0; l < M; ++l)
                if (l != a) CHECK(d.statistics[static_cast<std::size_t>(l)] < 1e-20 * d.statistics[static_cast<std::size_t>(a)]);
        }
    }
}

TEST_CASE("all-zero input picks index 0") {
    DerivedParams p = derive_params(wf(4));
    IndexDecision d = detect_index(CVector(p.Ns, Complex(0, 0)), p);
    CHECK(d.index == 0);
    for (double s : d.statistics) CHECK(s == 0.0);
}

TEST_CASE("index statistic ignores the QAM phase") {
    DerivedParams p = derive_params(wf(4));
    auto a = detect_index(dechirp(clean(p, 1, std::polar(1.0, 0.1), 1.0), p), p).statistics;
    auto b = detect_index(dechirp(clean(p, 1, std::polar(1.0, 2.9), 1.0), p), p).statistics;
    for (std::size_t l = 0; l < a.size(); ++l) CHECK(a[l] == doctest::Approx(b[l]).epsilon(1e-12));
}

TEST_CASE("QAM detection with channel knowledge recovers the symbol") {
    DerivedParams p = derive_params(wf(4));
    for (int J : {4, 16, 64}) {
        QamConstellation qam(J);
        for (int label = 0; label < J; ++label) {
            Complex h = std::polar(0.37, 1.0 + label);
            CVector y = dechirp(clean(p, 3, qam.point(label), h, 2.0), p);
            CHECK(detect_qam(y, 3, h, qam, 2.0, p) == label);
        }
    }
}

TEST_CASE("QAM decision on the boundary picks the lower label") {
    DerivedParams p = derive_params(wf(4));
    QamConstellation qam(4);
    Complex mid = 0.5 * (qam.point(2) + qam.point(3));
    RxSubpulse rx = clean(p, 0, mid, 1.0);
    CHECK(detect_qam(dechirp(rx, p), 0, 1.0, qam, 1.0, p) == 2);
}

TEST_CASE("noiseless loopback recovers every bit") {
    for (int M : {1, 2, 4, 5, 8}) {
        WaveformConfig cfg = wf(M, 16);
        DerivedParams p = derive_params(cfg);
        const std::size_t K = 20;
        BitStream bits = random_bits(cfg, K, 17);
        FimFrame f = map_bits_to_frame(bits, cfg, K);
        ChannelConfig ch;
        ch.seed = 4;
        std::vector<RxSubpulse> rx;
        for (std::size_t k = 0; k < K; ++k) {
            CVector pulse = synthesize_pulse(cfg, p, f, k);
            for (std::size_t m = 0; m < static_cast<std::size_t>(M); ++m) {
                CVector sub(pulse.begin() + static_cast<std::ptrdiff_t>(m * p.Ns),
                            pulse.begin() + static_cast<std::ptrdiff_t>((m + 1) * p.Ns));
                rx.push_back(apply_channel(sub, ch, cfg.P, k, m));
            }
        }
        CHECK(demodulate_frame(rx, cfg, p).bits == bits.bits);
    }
    WaveformConfig cfg = wf(4);
    DerivedParams p = derive_params(cfg);
    std::vector<RxSubpulse> four;
    for (int m = 0; m < 4; ++m) four.push_back(clean(p, m, 1.0, 1.0));
    CHECK(demodulate_frame(four, cfg, p).bits.size() == 16);
}

TEST_CASE("a wrong index leaves the QAM decision to noise") {
    // Reading the symbol off an empty tone bin gives coin-flip QAM bits.
    WaveformConfig cfg = wf(4);
    DerivedParams p = derive_params(cfg);
    QamConstellation qam(4);
    ChannelConfig ch;
    ch.snr_db = 0;
    int errors = 0, bits = 0;
    for (std::size_t t = 0; t < 2000; ++t) {
        RandomStream rs(3, {t});
        int label = static_cast<int>(rs.uniform_int(4));
        CVector sub = subchirp(p, 1);
        for (auto& s : sub) s *= qam.point(label);
        RxSubpulse rx = apply_channel(sub, ch, 1.0, t, 0);
        int got = detect_qam(dechirp(rx, p), 2, rx.h, qam, 1.0, p);
        errors += std::popcount(static_cast<unsigned>(got ^ label));
        bits += 2;
    }
    CHECK(static_cast<double>(errors) / bits == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("noise-free BER is exactly zero and counts add up") {
    BerReport r = run_ber(wf(4), {std::numeric_limits<double>::infinity()}, 200, 1);
    CHECK(r.points[0].total_errors() == 0);
    CHECK(r.points[0].index_bits == 200 * 8);
    CHECK(r.points[0].qam_bits == 200 * 8);
    BerReport n = run_ber(wf(4, 16), {-20}, 300, 2, 1.0, BerEngine::Correlator);
    const BerPoint& pt = n.points[0];
    CHECK(pt.total_errors() == pt.index_errors + pt.qam_errors);
    CHECK(pt.total_bits() == pt.index_bits + pt.qam_bits);
    CHECK(pt.total_ber() == doctest::Approx(double(pt.index_errors + pt.qam_errors) / double(pt.total_bits())));
}

TEST_CASE("BER runs are reproducible across thread counts") {
    std::vector<double> snr{-25, -15, -5};
    for (BerEngine e : {BerEngine::Waveform, BerEngine::Correlator}) {
        BerReport a = run_ber(wf(4), snr, 300, 9, 1.0, e, 1);
        BerReport b = run_ber(wf(4), snr, 300, 9, 1.0, e, 3);
        for (std::size_t i = 0; i < snr.size(); ++i) {
            CHECK(a.points[i].index_errors == b.points[i].index_errors);
            CHECK(a.points[i].qam_errors == b.points[i].qam_errors);
        }
    }
}

TEST_CASE("correlator engine agrees with the waveform engine") {
    std::vector<double> snr{-30, -24, -18};
    BerReport w = run_ber(wf(4), snr, 3000, 21, 1.0, BerEngine::Waveform);
    BerReport c = run_ber(wf(4), snr, 3000, 21, 1.0, BerEngine::Correlator);
    for (std::size_t i = 0; i < snr.size(); ++i) {
        double bits = double(w.points[i].total_bits());
        double a = w.points[i].total_ber(), b = c.points[i].total_ber();
        CHECK(std::abs(a - b) < 4 * std::sqrt(2.0) * binomial_sigma(0.5 * (a + b), bits));
    }
}

TEST_CASE("BER falls with SNR and rises with modulation order and sub-pulse count") {
    std::vector<double> snr;
    for (double s = -30; s <= 0; s += 5) snr.push_back(s);
    auto run = [&](int M, int J) { return run_ber(wf(M, J), snr, 10000, 5, 1.0, BerEngine::Correlator); };
    BerReport j4 = run(4, 4), j16 = run(4, 16), m2 = run(2, 4), m5 = run(5, 4);
    int inversions = 0;
    for (std::size_t i = 1; i < snr.size(); ++i) {
        double prev = j4.points[i - 1].total_ber(), cur = j4.points[i].total_ber();
        if (cur > prev) {
            ++inversions;
            CHECK(cur - prev <= 2 * binomial_sigma(cur, double(j4.points[i].total_bits())));
        }
    }
    CHECK(inversions <= 1);
    for (std::size_t i = 0; i < snr.size(); ++i) {
        CHECK(j16.points[i].total_ber() >= j4.points[i].total_ber());
        CHECK(m5.points[i].total_ber() >= m2.points[i].total_ber());
    }
}

TEST_CASE("rotating the constellation at both ends leaves the BER unchanged") {
    WaveformConfig cfg = wf(4, 16);
    DerivedParams p = derive_params(cfg);
    ChannelConfig ch;
    ch.snr_db = -22;
    ch.seed = 8;
    auto ber = [&](double rot) {
        QamConstellation qam(16, rot);
        int errors = 0, bits = 0;
        for (std::size_t t = 0; t < 3000; ++t) {
            RandomStream rs(6, {t});
            int label = static_cast<int>(rs.uniform_int(16));
            CVector sub = subchirp(p, 2);
            for (auto& s : sub) s *= qam.point(label);
            RxSubpulse rx = apply_channel(sub, ch, 1.0, t, 0);
            errors += std::popcount(static_cast<unsigned>(detect_qam(dechirp(rx, p), 2, rx.h, qam, 1.0, p) ^ label));
            bits += 4;
        }
        return std::pair<double, double>{double(errors) / bits, double(bits)};
    };
    auto [b0, n] = ber(0.0);
    auto [b1, n1] = ber(0.6);
    CHECK(std::abs(b0 - b1) < 4 * std::sqrt(2.0) * binomial_sigma(0.5 * (b0 + b1), n));
}
