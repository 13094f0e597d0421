#include "fimsar/quality.hpp"

#include "fimsar/fft.hpp"

#include <algorithm>

namespace fimsar {

std::size_t spectral_gap_of_energy(const std::vector<double>& e) {
    const std::size_t N = e.size();
    if (N == 0) return 0;
    std::size_t w = std::max<std::size_t>(1, N / 8);
    double run = 0;
    for (std::size_t k = 0; k < w; ++k) run += e[k];
    double best = run;
    std::size_t best_start = 0;
    for (std::size_t s = 1; s < N; ++s) {
        run += e[(s + w - 1) % N] - e[s - 1];
        if (run < best - 1e-12 * std::abs(best)) {
            best = run;
            best_start = s;
        }
    }
    return (best_start + w / 2) % N;
}

std::size_t spectral_gap(const CVector& spectrum) {
    std::vector<double> e(spectrum.size());
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = std::norm(spectrum[k]);
    return spectral_gap_of_energy(e);
}

namespace {

// Zero-pad a spectrum by `factor`, splitting it at `gap`; result is length N*factor.
CVector pad_spectrum(const CVector& spec, std::size_t gap, std::size_t factor) {
    const std::size_t N = spec.size();
    CVector out(N * factor, Complex(0.0));
    for (std::size_t k = 0; k < gap; ++k) out[k] = spec[k];
    for (std::size_t k = gap; k < N; ++k) out[N * factor - (N - k)] = spec[k];
    return out;
}

// Signed frequency index of bin k for a spectrum split at gap.
double signed_bin(std::size_t k, std::size_t N, std::size_t gap) {
    return k < gap ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(N);
}

struct Spectrum2D {
    std::size_t R = 0, A = 0;   // rows (range), cols (azimuth)
    CVector F;                  // row-major
    std::size_t gap_r = 0, gap_a = 0;
};

Spectrum2D spectrum_of(const CMatrix& img) {
    Spectrum2D s;
    s.R = img.rows;
    s.A = img.cols;
    s.F = img.data;
    CVector tmp(std::max(s.R, s.A)), out(std::max(s.R, s.A));
    for (std::size_t r = 0; r < s.R; ++r) {
        fft::forward(&s.F[r * s.A], out.data(), s.A);
        std::copy_n(out.begin(), s.A, s.F.begin() + static_cast<std::ptrdiff_t>(r * s.A));
    }
    for (std::size_t c = 0; c < s.A; ++c) {
        for (std::size_t r = 0; r < s.R; ++r) tmp[r] = s.F[r * s.A + c];
        fft::forward(tmp.data(), out.data(), s.R);
        for (std::size_t r = 0; r < s.R; ++r) s.F[r * s.A + c] = out[r];
    }
    std::vector<double> er(s.R, 0.0), ea(s.A, 0.0);
    for (std::size_t r = 0; r < s.R; ++r)
        for (std::size_t c = 0; c < s.A; ++c) {
            double e = std::norm(s.F[r * s.A + c]);
            er[r] += e;
            ea[c] += e;
        }
    s.gap_r = spectral_gap_of_energy(er);
    s.gap_a = spectral_gap_of_energy(ea);
    return s;
}

// Range line (along rows) at fractional azimuth position a0, returned as its range spectrum.
CVector range_line_spectrum(const Spectrum2D& s, double a0) {
    CVector phase(s.A);
    for (std::size_t c = 0; c < s.A; ++c)
        phase[c] = cis_cycles(signed_bin(c, s.A, s.gap_a) * a0 / static_cast<double>(s.A)) / static_cast<double>(s.A);
    CVector out(s.R, Complex(0.0));
    for (std::size_t r = 0; r < s.R; ++r) {
        Complex acc = 0.0;
        const Complex* row = &s.F[r * s.A];
        for (std::size_t c = 0; c < s.A; ++c) acc += row[c] * phase[c];
        out[r] = acc;
    }
    return out;
}

CVector azimuth_line_spectrum(const Spectrum2D& s, double r0) {
    CVector out(s.A, Complex(0.0));
    for (std::size_t r = 0; r < s.R; ++r) {
        Complex ph = cis_cycles(signed_bin(r, s.R, s.gap_r) * r0 / static_cast<double>(s.R)) / static_cast<double>(s.R);
        const Complex* row = &s.F[r * s.A];
        for (std::size_t c = 0; c < s.A; ++c) out[c] += row[c] * ph;
    }
    return out;
}

// Fine line from its spectrum; fine sample j sits at original position j/factor.
std::vector<double> fine_magnitude(const CVector& spec, std::size_t gap, std::size_t factor) {
    const std::size_t N = spec.size();
    CVector padded = pad_spectrum(spec, gap, factor);
    CVector t = fft::backward(padded);
    std::vector<double> mag(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) mag[j] = std::abs(t[j]) / static_cast<double>(N);
    return mag;
}

// Fractional position of the maximum nearest to `near` (within +-radius original bins).
double fine_peak(const std::vector<double>& mag, std::size_t factor, double near, double radius) {
    const long long L = static_cast<long long>(mag.size());
    long long c = std::llround(near * static_cast<double>(factor));
    long long r = std::llround(radius * static_cast<double>(factor));
    long long best = c;
    double bv = -1;
    for (long long j = c - r; j <= c + r; ++j) {
        long long w = ((j % L) + L) % L;
        if (mag[static_cast<std::size_t>(w)] > bv) {
            bv = mag[static_cast<std::size_t>(w)];
            best = j;
        }
    }
    return static_cast<double>(best) / static_cast<double>(factor);
}

ProfileCut make_centered_cut(const std::vector<double>& mag, std::size_t factor, double peak_pos,
                             double bin_m, double half_extent_m, double nominal) {
    const long long L = static_cast<long long>(mag.size());
    long long center = std::llround(peak_pos * static_cast<double>(factor));
    long long half = L / 2 - 1;
    if (half_extent_m > 0)
        half = std::min<long long>(half, std::llround(half_extent_m / bin_m * static_cast<double>(factor)));
    std::vector<double> axis, vals;
    axis.reserve(static_cast<std::size_t>(2 * half + 1));
    vals.reserve(axis.capacity());
    for (long long j = center - half; j <= center + half; ++j) {
        long long w = ((j % L) + L) % L;
        axis.push_back((static_cast<double>(j) / static_cast<double>(factor) - peak_pos) * bin_m);
        vals.push_back(mag[static_cast<std::size_t>(w)]);
    }
    ProfileCut cut = make_cut(std::move(axis), std::move(vals), "m");
    cut.nominal_resolution = nominal;
    return cut;
}

}  // namespace

CVector interpolate_line(const CVector& x, std::size_t factor) {
    CVector spec = fft::forward(x);
    CVector t = fft::backward(pad_spectrum(spec, spectral_gap(spec), factor));
    for (auto& v : t) v /= static_cast<double>(x.size());
    return t;
}

Profiles extract_profiles(const SarImage& img, const PeakHint& hint, const ProfileOptions& opt) {
    const CMatrix& d = img.data;
    if (d.rows < 4 || d.cols < 4) fail_invalid("image too small");
    const std::size_t L = std::max<std::size_t>(1, opt.interp_factor);
    // Coarse search inside the hint window.
    auto to_bin = [](const Axis& ax, double v) { return (v - ax.start) / ax.step; };
    long long rc = std::llround(to_bin(img.range, hint.range_m));
    long long ac = std::llround(to_bin(img.azimuth, hint.azimuth_m));
    long long rr = std::max<long long>(1, std::llround(hint.range_radius_m / std::abs(img.range.step)));
    long long ar = std::max<long long>(1, std::llround(hint.azimuth_radius_m / std::abs(img.azimuth.step)));
    long long r_lo = std::max<long long>(0, rc - rr), r_hi = std::min<long long>(static_cast<long long>(d.rows) - 1, rc + rr);
    long long a_lo = std::max<long long>(0, ac - ar), a_hi = std::min<long long>(static_cast<long long>(d.cols) - 1, ac + ar);
    if (r_lo > r_hi || a_lo > a_hi) fail_invalid("peak hint lies outside the image");
    double best = 0;
    long long br = -1, ba = -1;
    for (long long r = r_lo; r <= r_hi; ++r)
        for (long long a = a_lo; a <= a_hi; ++a) {
            double v = std::abs(d(static_cast<std::size_t>(r), static_cast<std::size_t>(a)));
            if (v > best) {
                best = v;
                br = r;
                ba = a;
            }
        }
    if (br < 0 || !(best > 0)) fail_invalid("no peak found near the hint");
    bool on_border = (br == r_lo && r_lo > 0) || (br == r_hi && r_hi < static_cast<long long>(d.rows) - 1) ||
                     (ba == a_lo && a_lo > 0) || (ba == a_hi && a_hi < static_cast<long long>(d.cols) - 1);
    if (on_border) fail_invalid("no local peak within the hint neighborhood");

    Spectrum2D s = spectrum_of(d);
    double r0 = static_cast<double>(br), a0 = static_cast<double>(ba);
    std::vector<double> rmag, amag;
    for (int pass = 0; pass < 2; ++pass) {
        rmag = fine_magnitude(range_line_spectrum(s, a0), s.gap_r, L);
        r0 = fine_peak(rmag, L, r0, 1.0);
        amag = fine_magnitude(azimuth_line_spectrum(s, r0), s.gap_a, L);
        a0 = fine_peak(amag, L, a0, 1.0);
    }
    rmag = fine_magnitude(range_line_spectrum(s, a0), s.gap_r, L);
    r0 = fine_peak(rmag, L, r0, 0.5);

    Profiles out;
    out.range_bin = r0;
    out.azimuth_bin = a0;
    out.range = make_centered_cut(rmag, L, r0, std::abs(img.range.step), opt.range_half_extent_m, opt.range_nominal_m);
    out.azimuth = make_centered_cut(amag, L, a0, std::abs(img.azimuth.step), opt.azimuth_half_extent_m,
                                    opt.azimuth_nominal_m);
    out.peak_magnitude = out.range.magnitude[out.range.peak_index];
    return out;
}

std::pair<std::size_t, std::size_t> mainlobe_nulls(const ProfileCut& cut) {
    const auto& y = cut.magnitude;
    const std::size_t pk = cut.peak_index;
    const double peak = y[pk];
    if (!(peak > 0)) fail_invalid("cut has no positive peak");
    const double thresh = peak * 0.1;   // -20 dB
    auto is_null = [&](std::size_t j) { return y[j] < thresh && y[j] <= y[j - 1] && y[j] <= y[j + 1]; };
    std::size_t left = 0, right = 0;
    bool lf = false, rf = false;
    for (std::size_t j = pk; j-- > 1;)
        if (is_null(j)) {
            left = j;
            lf = true;
            break;
        }
    for (std::size_t j = pk + 1; j + 1 < y.size(); ++j)
        if (is_null(j)) {
            right = j;
            rf = true;
            break;
        }
    if (!lf || !rf) {
        if (!(cut.nominal_resolution > 0)) fail_invalid("mainlobe nulls not found");
        double half = 1.4 * cut.nominal_resolution;
        double step = cut.step();
        auto off = static_cast<std::size_t>(std::llround(half / step));
        if (!lf) {
            if (off > pk) fail_invalid("mainlobe nulls not found");
            left = pk - off;
        }
        if (!rf) {
            if (pk + off >= y.size()) fail_invalid("mainlobe nulls not found");
            right = pk + off;
        }
    }
    return {left, right};
}

double pslr(const ProfileCut& cut) {
    auto [l, r] = mainlobe_nulls(cut);
    const auto& y = cut.magnitude;
    double side = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (i <= l || i >= r) side = std::max(side, y[i]);
    double v = side > 0 ? 20.0 * std::log10(side / y[cut.peak_index]) : kMetricFloorDb;
    return std::max(v, kMetricFloorDb);
}

double islr(const ProfileCut& cut) {
    auto [l, r] = mainlobe_nulls(cut);
    const auto& y = cut.magnitude;
    double side = 0, main = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double e = y[i] * y[i];
        if (i > l && i < r)
            main += e;
        else
            side += e;
    }
    double v = side > 0 ? 10.0 * std::log10(side / main) : kMetricFloorDb;
    return std::max(v, kMetricFloorDb);
}

TargetReport report_target(const SarImage& img, const PointTarget& target, const Geometry& g,
                           const DerivedParams& p, std::size_t interp_factor) {
    const double r_nom = kSpeedOfLight / (2.0 * img.range_bandwidth);
    const double a_nom = img.doppler_bandwidth > 0 ? g.v / img.doppler_bandwidth : 0.0;
    const double coarse = kSpeedOfLight / (2.0 * p.Bs);
    PeakHint hint;
    hint.range_m = slant_range(g, target, target.y / g.v).exact;
    hint.azimuth_m = target.y;
    hint.range_radius_m = std::max(2.0 * coarse, 3.0 * std::abs(img.range.step));
    hint.azimuth_radius_m = std::max(3.0 * a_nom, 3.0 * std::abs(img.azimuth.step));
    ProfileOptions opt;
    opt.interp_factor = interp_factor;
    // Sidelobe metrics are taken over +-10 nominal resolution cells on each axis.
    opt.range_half_extent_m = kSidelobeExtentCells * r_nom;
    opt.azimuth_half_extent_m = a_nom > 0 ? kSidelobeExtentCells * a_nom : 0.0;
    opt.range_nominal_m = r_nom;
    opt.azimuth_nominal_m = a_nom;
    Profiles pr = extract_profiles(img, hint, opt);
    TargetReport rep;
    rep.id = target.id;
    rep.range_resolution = measure_cut_resolution(pr.range);
    rep.azimuth_resolution = measure_cut_resolution(pr.azimuth);
    rep.range_pslr = pslr(pr.range);
    rep.azimuth_pslr = pslr(pr.azimuth);
    rep.range_islr = islr(pr.range);
    rep.azimuth_islr = islr(pr.azimuth);
    rep.peak_range_bin = pr.range_bin;
    rep.peak_azimuth_bin = pr.azimuth_bin;
    rep.peak_range_m = img.range.at(pr.range_bin);
    rep.peak_azimuth_m = img.azimuth.at(pr.azimuth_bin);
    rep.peak_magnitude = pr.peak_magnitude;
    rep.range_equivalent_width = equivalent_width(pr.range);
    rep.azimuth_equivalent_width = equivalent_width(pr.azimuth);
    return rep;
}

}  // namespace fimsar
