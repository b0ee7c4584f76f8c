#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fcl/exact_gasket.hpp"
#include "fcl/renewal.hpp"
#include "models.hpp"

using namespace fcl;
using testmodels::random_square_model;

namespace {

ModelPtr two_ratio_model() {
    IfsAtom a;
    a.maps = {{0.25, 0.0, false, {0, 0}}, {0.5, 0.0, false, {0.5, 0.5}}};
    return std::make_shared<const RandomIfsModel>(std::vector<WeightedAtom>{{a, 1.0}},
                                                  Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

}  // namespace

TEST(Dimension, GasketEndpointsInClosedForm) {
    EXPECT_NEAR(solve_dimension(*gasket_model(1.0)), std::log(3.0) / std::log(2.0), 1e-10);
    EXPECT_NEAR(solve_dimension(*gasket_model(0.0)), std::log(6.0) / std::log(3.0), 1e-10);
    const double D = solve_dimension(*gasket_model(0.5));
    EXPECT_NEAR(1.5 * std::pow(2.0, -D) + 3.0 * std::pow(3.0, -D), 1.0, 1e-12);
    EXPECT_NEAR(D, 1.6133592517974364, 1e-12);
}

TEST(Dimension, ResidualOnRandomModels) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const ModelPtr m = random_square_model(rng);
        const double D = solve_dimension(*m);
        EXPECT_LE(std::abs(moran_residual(*m, D)), 1e-12);
        EXPECT_GT(D, 0.0);
        EXPECT_LE(D, 2.0);
        EXPECT_LE(hausdorff_dimension(*m), D + 1e-12);
    }
}

TEST(Dimension, HausdorffGapIsStrictOnlyForRandomAtoms) {
    const double DH = hausdorff_dimension(*gasket_model(0.5));
    EXPECT_NEAR(DH, std::log(18.0) / std::log(6.0), 1e-10);
    EXPECT_LT(DH, solve_dimension(*gasket_model(0.5)));
    for (double p : {0.0, 1.0})
        EXPECT_NEAR(hausdorff_dimension(*gasket_model(p)), solve_dimension(*gasket_model(p)), 1e-12);
}

TEST(Eta, MatchesTheGasketExpression) {
    for (double p : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        const auto m = gasket_model(p);
        const double D = solve_dimension(*m);
        const double want = 3 * p / std::pow(2.0, D) * std::log(2.0) + 6 * (1 - p) / std::pow(3.0, D) * std::log(3.0);
        EXPECT_NEAR(compute_eta(*m, D), want, 1e-13);
    }
    EXPECT_NEAR(compute_eta(*gasket_model(1.0), std::log2(3.0)), std::log(2.0), 1e-14);
    EXPECT_NEAR(compute_eta(*gasket_model(0.0), std::log(6.0) / std::log(3.0)), std::log(3.0), 1e-14);
}

TEST(LatticeSpan, DetectsCommensurableLogRatios) {
    EXPECT_NEAR(*lattice_span(*gasket_model(1.0)), std::log(2.0), 1e-14);
    EXPECT_NEAR(*lattice_span(*gasket_model(0.0)), std::log(3.0), 1e-14);
    EXPECT_NEAR(*lattice_span(*two_ratio_model()), std::log(2.0), 1e-14);
    for (double p : {0.25, 0.5, 0.75}) EXPECT_FALSE(lattice_span(*gasket_model(p)).has_value());
}

TEST(FracLimit, ConstantCurveHasClosedForm) {
    ScalingData s{1.5, 1.5, 0.7, std::nullopt};
    const PiecewiseCurve one({0.0, 0.4}, {{1.0}});
    EXPECT_NEAR(frac_limit(one, s, 0), std::pow(0.4, 1.5) / (1.5 * 0.7), 1e-15);
}

TEST(FracLimit, DivergentIntegrandIsReported) {
    ScalingData s{1.5, 1.5, 0.7, std::nullopt};
    const PiecewiseCurve one({0.0, 0.4}, {{1.0}});
    try {
        frac_limit(one, s, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::numeric);
    }
    // vanishing to first order at 0 makes k = 2 convergent
    const PiecewiseCurve linear({0.0, 0.4}, {{0.0, 1.0}});
    EXPECT_NEAR(frac_limit(linear, s, 2), std::pow(0.4, 0.5) / (0.5 * 0.7), 1e-14);
    // exponent exactly 0 away from the origin integrates to a logarithm
    const PiecewiseCurve away({0.0, 0.1, 0.4}, {{0.0}, {1.0}});
    EXPECT_NEAR(frac_limit(away, {2.0, 2.0, 1.0, std::nullopt}, 2), std::log(4.0), 1e-14);
}

TEST(FracLimit, ExactAgreesWithAdaptiveQuadratureOnGasketCurves) {
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const ScalingData s = compute_scaling(*gasket_model(p));
        for (int k : {0, 1}) {
            const PiecewiseCurve c = gasket::r_curve(k, gasket::GasketParams(p));
            const double exact = frac_limit(c, s, k);
            const double quad = frac_limit([&](double r) { return c(r); }, s, k, c.L(), c.breakpoints());
            EXPECT_NEAR(quad, exact, 1e-8 * std::abs(exact)) << "p=" << p << " k=" << k;
        }
    }
}

TEST(FracLimit, ContinuousInP) {
    for (int k : {0, 1}) {
        double prev = frac_limit(gasket::r_curve(k, gasket::GasketParams(0.0)), compute_scaling(*gasket_model(0.0)), k);
        for (int i = 1; i <= 100; ++i) {
            const double p = i / 100.0;
            const double v = frac_limit(gasket::r_curve(k, gasket::GasketParams(p)), compute_scaling(*gasket_model(p)), k);
            EXPECT_LT(std::abs(v - prev), 0.01 * std::abs(v));
            prev = v;
        }
    }
}

TEST(SampledCurve, LinearInLogRadiusIsIntegratedExactly) {
    // R(r) = 2 − ln r on [0.01, 0.5], constant 2 − ln 0.01 below and 2 − ln 0.5 above up to L = 1
    SampledCurve c;
    for (double r : {0.01, 0.03, 0.1, 0.2, 0.5}) {
        c.r.push_back(r);
        c.value.push_back(2.0 - std::log(r));
    }
    const double a = 1.3;
    auto R = [&](double r) { return 2.0 - std::log(std::clamp(r, 0.01, 0.5)); };
    auto f = [&](double t) { return std::exp(-a * t) * R(std::exp(-t)); };
    const std::vector<double> bp{0.0, -std::log(0.5), -std::log(0.01), 60.0};
    const double want = integrate(f, bp, 1e-13).value;
    EXPECT_NEAR(weighted_integral(c, a, 0, 1.0), want, 1e-12);
}

TEST(SampledCurve, AdaptiveSamplingLocatesJumps) {
    auto R = [](double r) { return r < 0.0721 ? -3.0 : 0.0; };
    const SampledCurve c = sample_adaptive(R, 0.01, 0.14, 9, 0.5, 1e-4);
    const double D = std::log2(3.0);
    const double want = -3.0 * std::pow(0.0721, D) / D;
    EXPECT_NEAR(weighted_integral(c, D, 0, 0.14), want, 2e-3 * std::abs(want));
    EXPECT_LT(c.r.size(), 60u);
}

TEST(LatticeSeries, ConstantCurveIsGeometric) {
    const ScalingData s = compute_scaling(*gasket_model(1.0));
    const PiecewiseCurve one({0.0, gasket::kL}, {{1.0}});
    const double c = std::log(2.0);
    const double want = c / s.eta * std::pow(gasket::kL, s.D) / (1.0 - std::pow(2.0, -s.D));
    EXPECT_NEAR(lattice_series(one, s, 0, 0.0), want, 1e-10 * want);
}

TEST(LatticeSeries, AverageOverShiftReproducesFracLimit) {
    const ScalingData s = compute_scaling(*gasket_model(1.0));
    const double c = *s.lattice_span;
    for (int k : {0, 1}) {
        const PiecewiseCurve curve = gasket::r_curve(k, gasket::GasketParams(1.0));
        // the series is piecewise smooth in s with jumps where r_m hits a breakpoint
        std::vector<double> bp{0.0, c};
        for (double b : curve.breakpoints())
            if (b > 0.0 && b < curve.L()) {
                double t = std::log(curve.L() / b);
                t -= c * std::floor(t / c);
                if (t > 0.0 && t < c) bp.push_back(t);
            }
        std::sort(bp.begin(), bp.end());
        const double avg =
            integrate([&](double sh) { return lattice_series(curve, s, k, std::min(sh, std::nextafter(c, 0.0))); },
                      std::span<const double>(bp), 1e-11)
                .value /
            c;
        const double want = frac_limit(curve, s, k);
        EXPECT_NEAR(avg, want, 1e-8 * std::abs(want)) << "k=" << k;
    }
}

TEST(LatticeSeries, Preconditions) {
    const ScalingData lattice = compute_scaling(*gasket_model(1.0));
    const ScalingData nonlattice = compute_scaling(*gasket_model(0.5));
    const PiecewiseCurve curve = gasket::r_curve(0, gasket::GasketParams(1.0));
    EXPECT_THROW(lattice_series(curve, nonlattice, 0, 0.0), Error);
    EXPECT_THROW(lattice_series(curve, lattice, 0, 1.0), Error);
    try {
        lattice_series(curve, lattice, 2, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unsupported);
    }
}

TEST(LInvariance, IdenticalInputsGiveIdenticalValues) {
    SampledCurve c{{0.01, 0.05, 0.2}, {-3.0, -3.0, 1.0}};
    const auto [a, b] = check_L_invariance(1.6, 0, 0.3, c, 0.3, c);
    EXPECT_EQ(a, b);
}

TEST(LInvariance, DeterministicGasketAnalyticCurves) {
    // p = 1: R_{0,L/2} is −3 on (0, L/4] and 0 on (L/4, L/2)
    const ScalingData s = compute_scaling(*gasket_model(1.0));
    const double L = gasket::kL;
    auto R2 = [&](double r) { return r <= L / 4 ? -3.0 : 0.0; };
    const SampledCurve c = sample_adaptive(R2, L / 16, L / 2 * 0.999, 12, 0.5, 1e-6);
    const auto [one, two] = check_L_invariance(s, 0, gasket::r_curve(0, gasket::GasketParams(1.0)), L / 2, c);
    EXPECT_NEAR(one, -std::pow(L, s.D) / (3.0 * s.D), 1e-14);
    EXPECT_NEAR(two, one, 1e-4 * std::abs(one));
}
