#pragma once

// Scaling exponents of a random IFS and the renewal-theorem limits
//   C_k^frac = (1/η) ∫_0^L r^{D−k−1} R_{k,L}(r) dr.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "fcl/error.hpp"
#include "fcl/ifs_core.hpp"
#include "fcl/piecewise.hpp"
#include "fcl/quadrature.hpp"

namespace fcl {

struct ScalingData {
    double D = 0.0;
    double D_H = 0.0;
    double eta = 0.0;
    std::optional<double> lattice_span;
};

namespace detail {

// Root of a strictly decreasing f on [lo, hi].
template <class F>
double bisect_decreasing(F&& f, double lo, double hi, const char* what) {
    double flo = f(lo), fhi = f(hi);
    require(flo >= 0.0 && fhi <= 0.0, ErrorKind::numeric, std::string("no sign change bracketing the ") + what);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        (fm > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// φ(s) = E Σ r_i^s − 1.
inline double moran_residual(const RandomIfsModel& model, double s) {
    double v = 0.0;
    for (const auto& wa : model.atoms()) {
        double inner = 0.0;
        for (const auto& m : wa.atom.maps) inner += std::pow(m.scale, s);
        v += wa.prob * inner;
    }
    return v - 1.0;
}

inline double solve_dimension(const RandomIfsModel& model) {
    return detail::bisect_decreasing([&](double s) { return moran_residual(model, s); }, 0.0, 40.0, "dimension");
}

inline double hausdorff_dimension(const RandomIfsModel& model) {
    auto psi = [&](double s) {
        double v = 0.0;
        for (const auto& wa : model.atoms()) {
            double inner = 0.0;
            for (const auto& m : wa.atom.maps) inner += std::pow(m.scale, s);
            v += wa.prob * std::log(inner);
        }
        return v;
    };
    return detail::bisect_decreasing(psi, 0.0, 40.0, "Hausdorff dimension");
}

inline double compute_eta(const RandomIfsModel& model, double D) {
    double v = 0.0;
    for (const auto& wa : model.atoms())
        for (const auto& m : wa.atom.maps) v += wa.prob * std::abs(std::log(m.scale)) * std::pow(m.scale, D);
    return v;
}

/// Largest c with every |ln r_i| an integer multiple of c (to 1e−9 in the
/// multiplier), searching c = min|ln r| / q for q = 1 … 10⁶.
inline std::optional<double> lattice_span(const RandomIfsModel& model) {
    std::vector<double> v;
    for (const auto& wa : model.atoms())
        for (const auto& m : wa.atom.maps) {
            const double x = std::abs(std::log(m.scale));
            bool seen = false;
            for (double y : v) seen = seen || std::abs(x - y) <= 1e-12 * std::max(x, y);
            if (!seen) v.push_back(x);
        }
    const double vmin = *std::min_element(v.begin(), v.end());
    for (int q = 1; q <= 1'000'000; ++q) {
        const double c = vmin / q;
        bool ok = true;
        for (double x : v) {
            const double mult = x / c;
            if (std::abs(mult - std::round(mult)) > 1e-9) {
                ok = false;
                break;
            }
        }
        if (ok) return c;
    }
    return std::nullopt;
}

inline ScalingData compute_scaling(const RandomIfsModel& model) {
    ScalingData s;
    s.D = solve_dimension(model);
    s.D_H = hausdorff_dimension(model);
    s.eta = compute_eta(model, s.D);
    s.lattice_span = lattice_span(model);
    return s;
}

// ---------------------------------------------------------------------------
// Limits

/// ∫_0^L r^{D−k−1} R(r) dr / η for a piecewise polynomial, by exact antiderivatives.
inline double frac_limit(const PiecewiseCurve& curve, const ScalingData& s, int k) {
    require(s.eta > 0.0, ErrorKind::domain, "eta must be positive");
    const auto& b = curve.breakpoints();
    double total = 0.0;
    for (std::size_t i = 0; i < curve.pieces(); ++i) {
        const auto& a = curve.coefficients()[i];
        for (std::size_t m = 0; m < a.size(); ++m) {
            if (a[m] == 0.0) continue;
            const double e = s.D - k + static_cast<double>(m);
            if (b[i] == 0.0)
                require(e > 0.0, ErrorKind::numeric, "divergent integrand at r = 0");
            if (std::abs(e) < 1e-14)
                total += a[m] * (std::log(b[i + 1]) - std::log(b[i]));
            else
                total += a[m] * (std::pow(b[i + 1], e) - std::pow(b[i], e)) / e;
        }
    }
    return total / s.eta;
}

/// Same limit for a callable curve on (0, L], via t = −ln r. Breakpoints of R
/// (if known) keep the quadrature away from jumps.
inline double frac_limit(const std::function<double(double)>& R, const ScalingData& s, int k, double L,
                         std::vector<double> breakpoints = {}, double rel_tol = 1e-8) {
    require(s.eta > 0.0, ErrorKind::domain, "eta must be positive");
    require(L > 0.0, ErrorKind::domain, "L must be positive");
    const double a = s.D - k;
    require(a > 0.0, ErrorKind::numeric, "divergent integrand at r = 0");
    const double t0 = -std::log(L);
    const double t_end = t0 + 40.0 / a;
    std::vector<double> ts{t0};
    std::sort(breakpoints.begin(), breakpoints.end(), std::greater<>());
    for (double r : breakpoints)
        if (r > 0.0 && r < L && -std::log(r) < t_end) ts.push_back(-std::log(r));
    ts.push_back(t_end);
    auto f = [&](double t) { return std::exp(-a * t) * R(std::exp(-t)); };
    return integrate(f, std::span<const double>(ts), rel_tol, 0.0).value / s.eta;
}

/// R sampled at increasing radii; linear in t = −ln r between samples, held
/// constant below the smallest radius and above the largest (up to L).
struct SampledCurve {
    std::vector<double> r;
    std::vector<double> value;
};

/// ∫_0^L r^{D−k−1} R(r) dr of a sampled curve (not divided by η).
inline double weighted_integral(const SampledCurve& c, double D, int k, double L) {
    require(!c.r.empty() && c.r.size() == c.value.size(), ErrorKind::domain, "sampled curve is empty");
    const double a = D - k;
    require(a > 0.0, ErrorKind::numeric, "divergent integrand at r = 0");
    for (std::size_t i = 1; i < c.r.size(); ++i)
        require(c.r[i] > c.r[i - 1], ErrorKind::domain, "sample radii must increase");
    require(c.r.back() <= L, ErrorKind::domain, "samples beyond L");
    double total = c.value.front() * std::pow(c.r.front(), a) / a;
    total += c.value.back() * (std::pow(L, a) - std::pow(c.r.back(), a)) / a;
    // ∫ e^{−a t}(α + β t) dt on each segment, in closed form
    for (std::size_t i = 0; i + 1 < c.r.size(); ++i) {
        const double t1 = -std::log(c.r[i + 1]), t2 = -std::log(c.r[i]);
        const double v1 = c.value[i + 1], v2 = c.value[i];
        const double beta = (v2 - v1) / (t2 - t1);
        auto anti = [&](double t, double v) { return -std::exp(-a * t) * (v / a + beta / (a * a)); };
        total += anti(t2, v2) - anti(t1, v1);
    }
    return total;
}

/// Samples R on [r_lo, r_hi] at `initial` log-spaced radii, then bisects (in
/// ln r) every interval whose endpoint values differ by more than `jump`,
/// until the interval ratio drops below 1 + min_rel_width.
inline SampledCurve sample_adaptive(const std::function<double(double)>& R, double r_lo, double r_hi, int initial,
                                    double jump, double min_rel_width = 1e-3, int max_samples = 4000) {
    require(r_lo > 0.0 && r_hi > r_lo && initial >= 2, ErrorKind::domain, "invalid sampling range");
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < initial; ++i) {
        const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (initial - 1));
        pts.emplace_back(r, R(r));
    }
    bool changed = true;
    while (changed && static_cast<int>(pts.size()) < max_samples) {
        changed = false;
        std::vector<std::pair<double, double>> next{pts.front()};
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const auto [ra, va] = pts[i];
            const auto [rb, vb] = pts[i + 1];
            if (std::abs(vb - va) > jump && rb / ra > 1.0 + min_rel_width) {
                const double rm = std::sqrt(ra * rb);
                next.emplace_back(rm, R(rm));
                changed = true;
            }
            next.push_back(pts[i + 1]);
        }
        pts = std::move(next);
    }
    SampledCurve c;
    for (const auto& [r, v] : pts) {
        c.r.push_back(r);
        c.value.push_back(v);
    }
    return c;
}

/// Lattice-case limit along ε = L e^{−(s + n c)}:
///   (c/η) Σ_{m≥0} r_m^{D−k} R(r_m),  r_m = L e^{−(s + m c)}.
/// Its average over s ∈ [0, c) is frac_limit.
inline double lattice_series(const PiecewiseCurve& curve, const ScalingData& s, int k, double shift) {
    require(s.lattice_span.has_value(), ErrorKind::domain, "lattice_series needs a lattice model");
    require(k != 2, ErrorKind::unsupported, "the k = 2 lattice series is unsupported");
    require(k < s.D, ErrorKind::numeric, "non-summable series for k >= D");
    const double c = *s.lattice_span;
    require(shift >= 0.0 && shift < c, ErrorKind::domain, "shift must lie in [0, c)");
    const double L = curve.L();
    const double q = std::exp((k - s.D) * c);
    const double sup = curve.sup_abs();
    double total = 0.0;
    for (int m = 0; m < 100000; ++m) {
        const double rm = L * std::exp(-(shift + m * c));
        const double w = std::pow(rm, s.D - k);
        total += w * curve(rm);
        if (w * q * sup / (1.0 - q) < 1e-14 * std::max(1.0, std::abs(total))) break;
    }
    return c * total / s.eta;
}

/// The two integrals ∫_0^{L_i} r^{D−k−1} R_{k,L_i}(r) dr, which agree in theory.
inline std::pair<double, double> check_L_invariance(double D, int k, double L1, const SampledCurve& R1, double L2,
                                                    const SampledCurve& R2) {
    require(L1 > 0.0 && L2 > 0.0, ErrorKind::domain, "L must be positive");
    return {weighted_integral(R1, D, k, L1), weighted_integral(R2, D, k, L2)};
}

/// Variant with the first curve known analytically.
inline std::pair<double, double> check_L_invariance(const ScalingData& s, int k, const PiecewiseCurve& R1, double L2,
                                                    const SampledCurve& R2) {
    require(L2 > 0.0, ErrorKind::domain, "L must be positive");
    return {frac_limit(R1, s, k) * s.eta, weighted_integral(R2, s.D, k, L2)};
}

}  // namespace fcl
