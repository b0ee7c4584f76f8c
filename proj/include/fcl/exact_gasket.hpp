#pragma once

// Closed forms for the random Sierpiński gasket family: a level uses the
// 3-map atom G (ratio 1/2) with probability p and the 6-map atom H (ratio 1/3)
// otherwise. L = √3/6 is the inradius of the unit triangle.

#include <cmath>
#include <numbers>

#include "fcl/error.hpp"
#include "fcl/grid_geometry.hpp"
#include "fcl/piecewise.hpp"
#include "fcl/renewal.hpp"

namespace fcl::gasket {

inline const double kL = std::sqrt(3.0) / 6.0;

struct GasketParams {
    double p = 1.0;

    explicit GasketParams(double prob) : p(prob) {
        require(prob >= 0.0 && prob <= 1.0, ErrorKind::domain, "p must lie in [0, 1]");
    }
};

/// Steiner polynomial of the unit equilateral triangle.
inline CurvatureVector steiner_triangle(double r) {
    require(r >= 0.0, ErrorKind::domain, "r must be non-negative");
    const double pi = std::numbers::pi;
    return {1, 1.5 + pi * r, std::sqrt(3.0) / 4.0 + 3.0 * r + pi * r * r};
}

enum class Overlap { pair, triple };

/// C1 of the r-parallel intersection of two (or three) adjacent first-level triangles.
inline double intersection_C1(Overlap kind, double r) {
    require(r > 0.0, ErrorKind::domain, "r must be positive");
    const double pi = std::numbers::pi;
    return kind == Overlap::pair ? (2.0 * pi / 3.0 + std::sqrt(3.0)) * r : pi * r;
}

inline double c_p(double p) {
    const double pi = std::numbers::pi, s3 = std::sqrt(3.0);
    return 3.0 * p * (pi + 2.0 * s3) - (9.0 * s3 + 5.0 * pi);
}

inline double c_tilde_p(double p) {
    const double pi = std::numbers::pi;
    return pi - 3.0 * p * (pi + std::sqrt(3.0));
}

inline PiecewiseCurve r_curve(int k, GasketParams g) {
    const double p = g.p, L = kL;
    std::vector<double> b{0.0, L / 3.0, L / 2.0, L};
    if (k == 0) return PiecewiseCurve(b, {{5.0 * p - 8.0}, {1.0 - 4.0 * p}, {1.0}});
    if (k == 1)
        return PiecewiseCurve(b, {{0.0, c_p(p)}, {1.5 * (1.0 - p), c_tilde_p(p)}, {1.5, std::numbers::pi}});
    fail(ErrorKind::unsupported, "r_curve is available for k = 0 and k = 1 only");
}

inline double closed_form_frac(int k, GasketParams g, const ScalingData& s) {
    const double p = g.p, D = s.D, eta = s.eta, L = kL, pi = std::numbers::pi;
    require(eta > 0.0, ErrorKind::domain, "eta must be positive");
    switch (k) {
        case 0:
            return std::pow(L, D) / (D * eta) * (1.0 - (1.0 - p) * std::pow(3.0, 2.0 - D) - p * std::pow(2.0, 2.0 - D));
        case 1: {
            require(std::abs(D - 1.0) > 1e-12, ErrorKind::domain, "D = 1 makes the closed form degenerate");
            const double cp = c_p(p), ct = c_tilde_p(p);
            const double first =
                std::pow(L, D) / (D * eta) * (std::pow(3.0, -D) * (cp - ct) + std::pow(2.0, -D) * (ct - pi) + pi);
            const double second = 3.0 * std::pow(L, D - 1.0) / (2.0 * (D - 1.0) * eta) *
                                  (1.0 - (1.0 - p) * std::pow(3.0, 1.0 - D) - p * std::pow(2.0, 1.0 - D));
            return first + second;
        }
        case 2:
            require(D < 2.0, ErrorKind::domain, "D must be below 2");
            return 2.0 / (2.0 - D) * closed_form_frac(1, g, s);
        default:
            fail(ErrorKind::unsupported, "k must be 0, 1 or 2");
    }
}

}  // namespace fcl::gasket
