#pragma once

// Adaptive Gauss–Kronrod (7, 15) quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include "fcl/error.hpp"

namespace fcl {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780, 0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
QuadratureResult gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double x = h * kKronrodNodes[i];
        const double s = f(c - x) + f(c + x);
        kron += kKronrodWeights[i] * s;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * s;
    }
    return {kron * h, std::abs((kron - gauss) * h), 15};
}

}  // namespace detail

/// ∫_a^b f with target |error| ≤ max(abs_tol, rel_tol·|estimate|). Global
/// adaptive bisection: the panel with the largest error estimate is split next.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 1e-14,
                           int max_panels = 2000) {
    require(std::isfinite(a) && std::isfinite(b), ErrorKind::domain, "integration limits must be finite");
    if (a == b) return {};
    struct Panel {
        double a, b;
        QuadratureResult q;
        bool operator<(const Panel& o) const { return q.error < o.q.error; }
    };
    auto eval = [&](double lo, double hi) {
        const QuadratureResult q = detail::gk15(f, lo, hi);
        require(std::isfinite(q.value) && std::isfinite(q.error), ErrorKind::numeric,
                "integrand produced a non-finite value");
        return Panel{lo, hi, q};
    };
    std::priority_queue<Panel> heap;
    heap.push(eval(a, b));
    double value = heap.top().q.value, error = heap.top().q.error;
    int evaluations = 15;
    while (error > std::max(abs_tol, rel_tol * std::abs(value)) && static_cast<int>(heap.size()) < max_panels) {
        const Panel worst = heap.top();
        const double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b)) break;
        heap.pop();
        const Panel l = eval(worst.a, m), r = eval(m, worst.b);
        value += l.q.value + r.q.value - worst.q.value;
        error += l.q.error + r.q.error - worst.q.error;
        evaluations += 30;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to drop the drift of the running totals
    QuadratureResult out{0.0, 0.0, evaluations};
    std::vector<Panel> panels;
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const auto& p : panels) {
        out.value += p.q.value;
        out.error += p.q.error;
    }
    return out;
}

/// Integrates piece by piece over consecutive breakpoints.
template <class F>
QuadratureResult integrate(F&& f, std::span<const double> breakpoints, double rel_tol = 1e-10,
                           double abs_tol = 1e-14) {
    QuadratureResult total;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const QuadratureResult part = integrate(f, breakpoints[i], breakpoints[i + 1], rel_tol, abs_tol);
        total.value += part.value;
        total.error += part.error;
        total.evaluations += part.evaluations;
    }
    return total;
}

}  // namespace fcl
