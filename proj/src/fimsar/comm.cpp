#include "fimsar/comm.hpp"

#include "fimsar/parallel.hpp"
#include "fimsar/rng.hpp"

#include <algorithm>
#include <bit>

namespace fimsar {

void validate(const ChannelConfig& c) {
    if (!(c.sigma2 > 0)) fail_invalid("sigma2 must be positive");
    if (std::isnan(c.snr_db)) fail_invalid("snr_db is NaN");
}

double noise_variance(double snr_db, double P) {
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    return P * P / std::pow(10.0, snr_db / 10.0);
}

namespace {

Complex draw_fading(std::uint64_t seed, double sigma2, std::size_t k, std::size_t m) {
    RandomStream rs(seed, {static_cast<std::uint64_t>(StreamTag::Fading), k, m});
    return rs.complex_normal(sigma2);
}

}  // namespace

RxSubpulse apply_channel(const CVector& tx, const ChannelConfig& chan, double P, std::size_t k, std::size_t m) {
    RxSubpulse rx;
    rx.k = k;
    rx.m = m;
    rx.h = draw_fading(chan.seed, chan.sigma2, k, m);
    rx.samples.resize(tx.size());
    const double n0 = noise_variance(chan.snr_db, P);
    if (n0 > 0) {
        RandomStream rs(chan.seed, {static_cast<std::uint64_t>(StreamTag::Noise), k, m});
        for (std::size_t n = 0; n < tx.size(); ++n) rx.samples[n] = rx.h * tx[n] + rs.complex_normal(n0);
    } else {
        for (std::size_t n = 0; n < tx.size(); ++n) rx.samples[n] = rx.h * tx[n];
    }
    return rx;
}

CVector dechirp(const RxSubpulse& rx, const DerivedParams& p) {
    if (rx.samples.size() != p.Ns) fail_invalid("received sub-pulse length != Ns");
    CVector ref = chirp_term(p);
    CVector out(p.Ns);
    for (std::size_t n = 0; n < p.Ns; ++n) out[n] = rx.samples[n] * std::conj(ref[n]);
    return out;
}

CVector correlate_tones(const CVector& x, const DerivedParams& p, int count) {
    const std::uint64_t q = static_cast<std::uint64_t>(p.q);
    // Tone l at sample n has phase l*n/q cycles; tabulate the q distinct values once.
    CVector rot(p.q);
    for (int r = 0; r < p.q; ++r) rot[static_cast<std::size_t>(r)] = std::polar(1.0, -2 * kPi * r / p.q);
    CVector z(static_cast<std::size_t>(count));
    for (int l = 0; l < count; ++l) {
        // Accumulate per residue class first, then rotate: exact cancellation for off-index tones.
        CVector bucket(p.q, Complex(0.0));
        for (std::size_t n = 0; n < x.size(); ++n)
            bucket[(static_cast<std::uint64_t>(l) * n) % q] += x[n];
        Complex acc = 0.0;
        for (int r = 0; r < p.q; ++r) acc += bucket[static_cast<std::size_t>(r)] * rot[static_cast<std::size_t>(r)];
        z[static_cast<std::size_t>(l)] = acc / static_cast<double>(x.size());
    }
    return z;
}

IndexDecision pick_index(const CVector& z) {
    IndexDecision d;
    d.statistics.resize(z.size());
    double best = -1;
    for (std::size_t l = 0; l < z.size(); ++l) {
        d.statistics[l] = std::norm(z[l]);
        if (d.statistics[l] > best) {
            best = d.statistics[l];
            d.index = static_cast<int>(l);
        }
    }
    return d;
}

IndexDecision detect_index(const CVector& dechirped, const DerivedParams& p, int candidates) {
    if (candidates <= 0) candidates = p.M;
    return pick_index(correlate_tones(dechirped, p, candidates));
}

int detect_qam(const CVector& dechirped, int a_hat, Complex h, const QamConstellation& qam, double P,
               const DerivedParams& p) {
    Complex z = correlate_tones(dechirped, p, a_hat + 1)[static_cast<std::size_t>(a_hat)];
    return qam.nearest(z, h * std::sqrt(P));
}

BitStream demodulate_frame(const std::vector<RxSubpulse>& rx, const WaveformConfig& cfg, const DerivedParams& p) {
    const int bf = index_bits(cfg.M);
    const int bq = qam_bits(cfg.J);
    const int candidates = 1 << bf;
    QamConstellation qam(cfg.J);
    BitStream out;
    out.bits_per_pulse = bits_per_pulse(cfg);
    for (const auto& r : rx) {
        CVector y = dechirp(r, p);
        CVector z = correlate_tones(y, p, candidates);
        int a = pick_index(z).index;
        int label = qam.nearest(z[static_cast<std::size_t>(a)], r.h * std::sqrt(cfg.P));
        for (int b = bf - 1; b >= 0; --b) out.bits.push_back(static_cast<std::uint8_t>((a >> b) & 1));
        for (int b = bq - 1; b >= 0; --b) out.bits.push_back(static_cast<std::uint8_t>((label >> b) & 1));
    }
    return out;
}

const char* to_string(BerEngine e) { return e == BerEngine::Waveform ? "waveform" : "correlator"; }

BerReport run_ber(const WaveformConfig& cfg, const std::vector<double>& snr_db, std::uint64_t trials,
                  std::uint64_t seed, double sigma2, BerEngine engine, unsigned threads) {
    if (trials < 1) fail_invalid("trials must be >= 1");
    const DerivedParams p = derive_params(cfg);
    ChannelConfig chan;
    chan.sigma2 = sigma2;
    chan.seed = seed;
    validate(chan);
    const int M = cfg.M;
    const int bf = index_bits(M);
    const int bq = qam_bits(cfg.J);
    const int candidates = 1 << bf;
    const double sqrtP = std::sqrt(cfg.P);
    QamConstellation qam(cfg.J);
    std::vector<CVector> chirps;
    if (engine == BerEngine::Waveform)
        for (int a = 0; a < candidates; ++a) chirps.push_back(subchirp(p, a));

    BerReport rep;
    rep.cfg = cfg;
    rep.sigma2 = sigma2;
    rep.seed = seed;
    rep.engine = engine;
    const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(trials, 256));
    for (double snr : snr_db) {
        const double n0 = noise_variance(snr, cfg.P);
        ChannelConfig c = chan;
        c.snr_db = snr;
        std::vector<std::uint64_t> ierr(chunks, 0), qerr(chunks, 0);
        parallel_for(chunks, threads, [&](std::size_t chunk) {
            std::uint64_t t0 = trials * chunk / chunks, t1 = trials * (chunk + 1) / chunks;
            CVector y;
            for (std::uint64_t t = t0; t < t1; ++t) {
                for (int m = 0; m < M; ++m) {
                    auto um = static_cast<std::uint64_t>(m);
                    RandomStream ib(seed, {static_cast<std::uint64_t>(StreamTag::IndexBits), t, um});
                    RandomStream qb(seed, {static_cast<std::uint64_t>(StreamTag::QamBits), t, um});
                    int a = 0, label = 0;
                    for (int b = 0; b < bf; ++b) a = (a << 1) | ib.bit();
                    for (int b = 0; b < bq; ++b) label = (label << 1) | qb.bit();
                    const Complex sym = qam.point(label);
                    CVector z;
                    Complex h;
                    if (engine == BerEngine::Waveform) {
                        const CVector& sc = chirps[static_cast<std::size_t>(a)];
                        CVector tx(p.Ns);
                        for (std::size_t n = 0; n < p.Ns; ++n) tx[n] = sym * sqrtP * sc[n];
                        RxSubpulse rx = apply_channel(tx, c, cfg.P, t, um);
                        h = rx.h;
                        z = correlate_tones(dechirp(rx, p), p, candidates);
                    } else {
                        h = draw_fading(seed, sigma2, t, um);
                        z.assign(static_cast<std::size_t>(candidates), Complex(0.0));
                        if (n0 > 0) {
                            RandomStream ns(seed, {static_cast<std::uint64_t>(StreamTag::Correlator), t, um});
                            for (auto& v : z) v = ns.complex_normal(n0 / static_cast<double>(p.Ns));
                        }
                        z[static_cast<std::size_t>(a)] += h * sym * sqrtP;
                    }
                    int a_hat = pick_index(z).index;
                    int l_hat = qam.nearest(z[static_cast<std::size_t>(a_hat)], h * sqrtP);
                    ierr[chunk] += static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(a ^ a_hat)));
                    qerr[chunk] += static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(label ^ l_hat)));
                }
            }
        });
        BerPoint pt;
        pt.snr_db = snr;
        pt.trials = trials;
        pt.index_bits = trials * static_cast<std::uint64_t>(M * bf);
        pt.qam_bits = trials * static_cast<std::uint64_t>(M * bq);
        for (std::size_t i = 0; i < chunks; ++i) {
            pt.index_errors += ierr[i];
            pt.qam_errors += qerr[i];
        }
        rep.points.push_back(pt);
    }
    return rep;
}

}  // namespace fimsar
