#pragma once

#include "fimsar/common.hpp"

namespace fimsar {

/** Transmit waveform parameters. */
struct WaveformConfig {
    double fc = 3.2e9;   ///< carrier (Hz)
    double Bw = 80e6;    ///< total bandwidth (Hz)
    double Tw = 40e-6;   ///< pulse width (s)
    int M = 4;           ///< sub-pulses per pulse
    int J = 4;           ///< QAM order
    double P = 1.0;      ///< transmit power scale
    double osf = 1.25;   ///< fast-time oversampling factor
};

/** Sampling quantities derived from a WaveformConfig. */
struct DerivedParams {
    double Bs = 0;            ///< sub-band width (Hz)
    double Ts = 0;            ///< sub-pulse duration (s)
    double Kc = 0;            ///< chirp rate (Hz/s)
    int q = 0;                ///< fs / Bs
    double fs = 0;            ///< complex sample rate (Hz)
    std::size_t Ns = 0;       ///< samples per sub-pulse
    std::size_t Npulse = 0;   ///< samples per pulse
    int M = 0;
    std::int64_t bs_ts = 0;   ///< Bs*Ts, an integer
};

void validate(const WaveformConfig& cfg);
DerivedParams derive_params(const WaveformConfig& cfg);

int index_bits(int M);   ///< floor(log2 M)
int qam_bits(int J);     ///< log2 J
int bits_per_pulse(const WaveformConfig& cfg);

/**
 * Square Gray-coded QAM with unit average power, optionally rotated.
 * The first half of a label's bits selects the in-phase level, the second half quadrature.
 */
class QamConstellation {
public:
    explicit QamConstellation(int J, double rotation_rad = 0.0);

    int order() const { return static_cast<int>(points_.size()); }
    int bits() const { return bits_; }
    const Complex& point(int label) const { return points_.at(static_cast<std::size_t>(label)); }
    const std::vector<Complex>& points() const { return points_; }
    /** Label minimizing |z - gain*point|; ties go to the lower label. */
    int nearest(Complex z, Complex gain = 1.0) const;

private:
    int bits_;
    std::vector<Complex> points_;
};

/** One FIM index and one QAM symbol per sub-pulse, K pulses of M sub-pulses. */
struct FimFrame {
    int M = 0;
    std::size_t K = 0;
    std::vector<int> indices;   ///< a[k*M + m]
    CVector qam;                ///< c[k*M + m]
};

struct BitStream {
    std::vector<std::uint8_t> bits;
    int bits_per_pulse = 0;
};

FimFrame map_bits_to_frame(const BitStream& bits, const WaveformConfig& cfg, std::size_t K);
BitStream frame_to_bits(const FimFrame& frame, const WaveformConfig& cfg);

/** K pulses of uniformly random bits drawn from `seed`. */
BitStream random_bits(const WaveformConfig& cfg, std::size_t K, std::uint64_t seed);
FimFrame random_frame(const WaveformConfig& cfg, std::size_t K, std::uint64_t seed);
/** Random QAM symbols with the same index pattern on every pulse. */
FimFrame patterned_frame(const WaveformConfig& cfg, std::size_t K, const std::vector<int>& pattern,
                         std::uint64_t seed);
void check_frame(const FimFrame& frame, const WaveformConfig& cfg);

/** Unit-amplitude sub-chirp in sub-band a: exp(j2π[a Bs t + Kc t²/2]), Ns samples. */
CVector subchirp(const DerivedParams& p, int a);
/** Baseband chirp term exp(jπ Kc t²) of one sub-pulse. */
CVector chirp_term(const DerivedParams& p);

CVector synthesize_pulse(const WaveformConfig& cfg, const DerivedParams& p, const FimFrame& frame,
                         std::size_t k);

struct PulseTrain {
    std::vector<CVector> pulses;
    std::vector<double> timestamps;   ///< k*PRI
    double PRI = 0;
};

PulseTrain synthesize_train(const WaveformConfig& cfg, const DerivedParams& p, const FimFrame& frame,
                            double PRI, unsigned threads = 1);

/** |STFT| with a Hann window; rows are frequency bins (0..fs), columns frames. */
std::vector<std::vector<double>> spectrogram(const CVector& x, std::size_t window, std::size_t hop);

}  // namespace fimsar
