#pragma once

#include "fimsar/common.hpp"
#include "fimsar/waveform.hpp"

#include <limits>
#include <string>

namespace fimsar {

struct ChannelConfig {
    double sigma2 = 1.0;
    double snr_db = std::numeric_limits<double>::infinity();   ///< 10·log10(P²/N0); inf disables noise
    bool csi = true;
    std::uint64_t seed = 1;
};

void validate(const ChannelConfig& c);
/** Per-sample complex noise variance for the given SNR (0 when the SNR is infinite). */
double noise_variance(double snr_db, double P);

struct RxSubpulse {
    CVector samples;
    Complex h;
    std::size_t k = 0;
    std::size_t m = 0;
};

/** Block fading h ~ CN(0, σ²) plus white noise; draws come from the (seed, k, m) substreams. */
RxSubpulse apply_channel(const CVector& tx, const ChannelConfig& chan, double P, std::size_t k, std::size_t m);

CVector dechirp(const RxSubpulse& rx, const DerivedParams& p);

/** z_l = (1/Ns) Σ x[n] exp(−j2π l Bs n/fs) for l < count. */
CVector correlate_tones(const CVector& dechirped, const DerivedParams& p, int count);

struct IndexDecision {
    int index = 0;
    std::vector<double> statistics;   ///< D(a_l) = |z_l|²
};

/** argmax of |z_l|², ties to the smallest index. */
IndexDecision pick_index(const CVector& z);
IndexDecision detect_index(const CVector& dechirped, const DerivedParams& p, int candidates = 0);

/** Constellation label minimizing |z − h·c·√P|². */
int detect_qam(const CVector& dechirped, int a_hat, Complex h, const QamConstellation& qam, double P,
               const DerivedParams& p);

/** Two-step detection of every sub-pulse; index candidates are the transmit alphabet 0..2^b_f−1. */
BitStream demodulate_frame(const std::vector<RxSubpulse>& rx, const WaveformConfig& cfg, const DerivedParams& p);

enum class BerEngine {
    Waveform,     ///< synthesize, pass through the channel, dechirp and correlate every sample
    Correlator,   ///< draw the tone-correlator outputs directly from their exact distribution
};

struct BerPoint {
    double snr_db = 0;
    std::uint64_t trials = 0;
    std::uint64_t index_bits = 0, qam_bits = 0;
    std::uint64_t index_errors = 0, qam_errors = 0;

    std::uint64_t total_bits() const { return index_bits + qam_bits; }
    std::uint64_t total_errors() const { return index_errors + qam_errors; }
    double index_ber() const { return index_bits ? double(index_errors) / double(index_bits) : 0.0; }
    double qam_ber() const { return qam_bits ? double(qam_errors) / double(qam_bits) : 0.0; }
    double total_ber() const { return total_bits() ? double(total_errors()) / double(total_bits()) : 0.0; }
};

struct BerReport {
    std::vector<BerPoint> points;
    WaveformConfig cfg;
    double sigma2 = 1.0;
    std::uint64_t seed = 0;
    BerEngine engine = BerEngine::Waveform;
};

/**
 * Monte Carlo over one-pulse trials. Every random draw is addressed by (seed, trial, sub-pulse),
 * independent of the SNR point and of the thread count.
 */
BerReport run_ber(const WaveformConfig& cfg, const std::vector<double>& snr_db, std::uint64_t trials,
                  std::uint64_t seed, double sigma2 = 1.0, BerEngine engine = BerEngine::Waveform,
                  unsigned threads = 1);

const char* to_string(BerEngine e);

}  // namespace fimsar
