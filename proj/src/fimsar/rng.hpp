#pragma once

#include "fimsar/common.hpp"

#include <initializer_list>
#include <random>

namespace fimsar {

/** SplitMix64 finalizer. */
std::uint64_t splitmix64(std::uint64_t x);

/** Seed of the substream addressed by (master seed, keys...). Order of keys matters. */
std::uint64_t substream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

// Tags that keep independent random quantities in separate substreams.
enum class StreamTag : std::uint64_t {
    Bits = 1,
    IndexBits = 2,
    QamBits = 3,
    Fading = 4,
    Noise = 5,
    Correlator = 6,
    EchoNoise = 7,
};

/** Random stream addressed by a master seed and a counter tuple. */
class RandomStream {
public:
    RandomStream(std::uint64_t master, std::initializer_list<std::uint64_t> keys)
        : engine_(substream_seed(master, keys)) {}

    double normal() { return normal_(engine_); }
    /** Circularly-symmetric complex Gaussian with E|z|^2 = variance. */
    Complex complex_normal(double variance) {
        double s = std::sqrt(0.5 * variance);
        double re = normal_(engine_);
        double im = normal_(engine_);
        return {s * re, s * im};
    }
    int bit() {
        if (bits_left_ == 0) {
            word_ = engine_();
            bits_left_ = 64;
        }
        --bits_left_;
        return static_cast<int>((word_ >> bits_left_) & 1u);
    }
    std::uint64_t uniform_int(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
    std::uint64_t word_ = 0;
    int bits_left_ = 0;
};

}  // namespace fimsar
