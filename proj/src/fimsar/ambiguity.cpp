#include "fimsar/ambiguity.hpp"

#include "fimsar/parallel.hpp"

#include <algorithm>

namespace fimsar {
namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

void check_increasing(const std::vector<double>& v, const char* name) {
    if (v.empty()) fail_invalid(std::string(name) + " axis is empty");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) fail_invalid(std::string(name) + " axis is not strictly increasing");
}

}  // namespace

ProfileCut make_cut(std::vector<double> axis, std::vector<double> magnitude, std::string units) {
    if (axis.size() != magnitude.size() || axis.empty()) fail_invalid("cut axis/value size mismatch");
    ProfileCut c;
    c.axis = std::move(axis);
    c.magnitude = std::move(magnitude);
    c.units = std::move(units);
    c.peak_index = static_cast<std::size_t>(
        std::max_element(c.magnitude.begin(), c.magnitude.end()) - c.magnitude.begin());
    return c;
}

std::vector<double> linspace_step(double start, double step, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = start + static_cast<double>(i) * step;
    return v;
}

std::vector<double> symmetric_grid(double step, std::size_t half_count) {
    std::vector<double> v(2 * half_count + 1);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = (static_cast<double>(i) - static_cast<double>(half_count)) * step;
    return v;
}

AmbiguityGrid ambiguity_numeric(const CVector& pulse, const DerivedParams& p, const AmbiguityGridSpec& spec,
                                unsigned threads) {
    check_increasing(spec.tau, "delay");
    check_increasing(spec.xi, "Doppler");
    std::vector<long long> shift(spec.tau.size());
    for (std::size_t i = 0; i < spec.tau.size(); ++i) {
        double d = spec.tau[i] * p.fs;
        double r = std::round(d);
        if (std::abs(d - r) > 1e-6) fail_invalid("delay grid not sample-aligned");
        if (std::abs(spec.tau[i]) >= p.Ts) fail_invalid("delay grid exceeds |tau| < Ts");
        shift[i] = static_cast<long long>(r);
    }
    const long long N = static_cast<long long>(pulse.size());
    AmbiguityGrid g;
    g.tau = spec.tau;
    g.xi = spec.xi;
    g.values.assign(spec.tau.size() * spec.xi.size(), 0.0);
    parallel_for(spec.xi.size(), threads, [&](std::size_t ix) {
        const double xi = spec.xi[ix];
        const double cyc = xi / p.fs;
        CVector ph(pulse.size());
        for (long long n = 0; n < N; ++n) ph[static_cast<std::size_t>(n)] = cis_cycles(cyc * static_cast<double>(n));
        // Exact integral of exp(j2πξt) over one sample cell.
        double wmag = (xi == 0.0) ? 1.0 / p.fs : std::abs(std::sin(kPi * cyc) / (kPi * xi));
        for (std::size_t it = 0; it < shift.size(); ++it) {
            long long d = shift[it];
            long long lo = std::max(0LL, -d);
            long long hi = std::min(N, N - d);
            Complex acc = 0.0;
            for (long long n = lo; n < hi; ++n) {
                auto un = static_cast<std::size_t>(n);
                acc += pulse[un] * std::conj(pulse[static_cast<std::size_t>(n + d)]) * ph[un];
            }
            g.values[ix * shift.size() + it] = std::abs(acc) * wmag;
        }
    });
    return g;
}

double ambiguity_principal_closed_form(const DerivedParams& p, const std::vector<int>& indices, double tau,
                                       double xi) {
    if (std::abs(tau) >= p.Ts) fail_invalid("|tau| must be < Ts");
    if (indices.size() != static_cast<std::size_t>(p.M)) fail_invalid("index sequence length must equal M");
    double len = p.Ts - std::abs(tau);
    double env = len * sinc(kPi * (xi - p.Kc * tau) * len);
    Complex sum = 0.0;
    for (std::size_t m = 0; m < indices.size(); ++m)
        sum += std::polar(1.0, 2 * kPi * (xi * static_cast<double>(m) * p.Ts - indices[m] * p.Bs * tau));
    return std::abs(env * sum);
}

AmbiguityGrid ambiguity_closed_form_grid(const DerivedParams& p, const std::vector<int>& indices,
                                         const AmbiguityGridSpec& spec, unsigned threads) {
    check_increasing(spec.tau, "delay");
    check_increasing(spec.xi, "Doppler");
    AmbiguityGrid g;
    g.tau = spec.tau;
    g.xi = spec.xi;
    g.values.assign(spec.tau.size() * spec.xi.size(), 0.0);
    parallel_for(spec.xi.size(), threads, [&](std::size_t ix) {
        for (std::size_t it = 0; it < spec.tau.size(); ++it)
            g.values[ix * spec.tau.size() + it] = ambiguity_principal_closed_form(p, indices, spec.tau[it], spec.xi[ix]);
    });
    return g;
}

ProfileCut doppler_cut_closed_form(const DerivedParams& p, const std::vector<double>& xi) {
    std::vector<double> v(xi.size());
    const double Tw = p.M * p.Ts;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        // Ts·sinc(πξTs)·sin(πMξTs)/sin(πξTs) simplifies to sin(πξTw)/(πξ).
        v[i] = xi[i] == 0.0 ? Tw : std::abs(std::sin(kPi * xi[i] * Tw) / (kPi * xi[i]));
    }
    return make_cut(xi, std::move(v), "Hz");
}

ProfileCut range_cut_closed_form(const DerivedParams& p, const std::vector<int>& indices,
                                 const std::vector<double>& tau) {
    std::vector<double> v(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) v[i] = ambiguity_principal_closed_form(p, indices, tau[i], 0.0);
    return make_cut(tau, std::move(v), "s");
}

double measure_cut_resolution(const ProfileCut& cut) {
    const auto& y = cut.magnitude;
    if (y.size() < 3) fail_invalid("cut too short");
    std::size_t pk = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    double peak = y[pk];
    if (!(peak > 0)) fail_invalid("cut has no positive peak");
    double level = peak / std::sqrt(2.0);
    auto crossing = [&](std::size_t i0, std::size_t i1) {
        double t = (y[i0] - level) / (y[i0] - y[i1]);
        return cut.axis[i0] + t * (cut.axis[i1] - cut.axis[i0]);
    };
    std::size_t i = pk;
    while (i > 0 && y[i - 1] >= level) --i;
    if (i == 0) fail_invalid("no -3 dB crossing below the peak within the grid");
    double left = crossing(i, i - 1);
    std::size_t j = pk;
    while (j + 1 < y.size() && y[j + 1] >= level) ++j;
    if (j + 1 == y.size()) fail_invalid("no -3 dB crossing above the peak within the grid");
    double right = crossing(j, j + 1);
    return right - left;
}

double equivalent_width(const ProfileCut& cut) {
    double peak = 0, energy = 0;
    for (double v : cut.magnitude) {
        peak = std::max(peak, v);
        energy += v * v;
    }
    if (!(peak > 0)) fail_invalid("cut has no positive peak");
    return energy * std::abs(cut.step()) / (peak * peak);
}

std::pair<double, double> resolution_bounds(const DerivedParams& p) {
    return {kSpeedOfLight / (2.0 * p.M * p.Bs), kSpeedOfLight / (2.0 * p.Bs)};
}

}  // namespace fimsar
