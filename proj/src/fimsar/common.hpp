#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fimsar {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

enum class ErrorKind { Config, Invalid, Runtime };

/** Library error. The kind decides the process exit code at the CLI boundary. */
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/** Configuration error; the message starts with the offending key path. */
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : Error(ErrorKind::Config, key.empty() ? what : key + ": " + what), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

[[noreturn]] inline void fail_invalid(const std::string& what) { throw Error(ErrorKind::Invalid, what); }
[[noreturn]] inline void fail_runtime(const std::string& what) { throw Error(ErrorKind::Runtime, what); }

/** Dense row-major complex matrix. */
struct CMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    CVector data;

    CMatrix() = default;
    CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    Complex& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    Complex* row(std::size_t r) { return data.data() + r * cols; }
    const Complex* row(std::size_t r) const { return data.data() + r * cols; }
};

/** Uniform axis: value(i) = start + i * step. */
struct Axis {
    double start = 0.0;
    double step = 1.0;
    std::size_t size = 0;
    double at(double i) const { return start + i * step; }
};

/** exp(j*2*pi*cycles) with the cycle count reduced first. */
inline Complex cis_cycles(double cycles) {
    double frac = cycles - std::floor(cycles);
    return std::polar(1.0, 2.0 * kPi * frac);
}

}  // namespace fimsar
