#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fcl/exact_gasket.hpp"
#include "fcl/grid_geometry.hpp"
#include "fcl/ifs_core.hpp"
#include "oracles.hpp"

using namespace fcl;

namespace {

Polygon regular_polygon(Vec2 c, double radius, int n, double phase = 0.0) {
    Polygon p;
    for (int i = 0; i < n; ++i) {
        const double a = phase + 2.0 * std::numbers::pi * i / n;
        p.push_back({c.x + radius * std::cos(a), c.y + radius * std::sin(a)});
    }
    return p;
}

BitMask disk_mask(const GridSpec& g, Vec2 c, double rad, double hole = -1.0) {
    BitMask m(g);
    for (int j = 0; j < g.height; ++j)
        for (int i = 0; i < g.width; ++i) {
            const double d = distance(g.center(i, j), c);
            if (d <= rad && d > hole) m.set(i, j);
        }
    return m;
}

}  // namespace

TEST(GridSpec, CoveringContainsBoxAndRespectsBudget) {
    Box b;
    b.expand({0, 0});
    b.expand({1, 2});
    const GridSpec g = GridSpec::covering(b, 0.1, 0.3);
    const Box e = g.extent();
    EXPECT_LE(e.lo.x, -0.3 + 1e-12);
    EXPECT_GE(e.hi.y, 2.3 - 1e-12);
    EXPECT_THROW(GridSpec::covering(b, 1e-5, 0.0, 1000), Error);
}

TEST(Rasterize, AlignedAndOffsetUnitSquare) {
    const Polygon sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    GridSpec g;
    g.origin = {-0.5, -0.5};
    g.h = 0.1;
    g.width = g.height = 21;
    const BitMask aligned = rasterize_polygons(std::vector<Polygon>{sq}, g);
    EXPECT_EQ(aligned.count(), 121u);  // closed square: 11 x 11 centers

    g.origin = {-0.45, -0.45};
    const BitMask offset = rasterize_polygons(std::vector<Polygon>{sq}, g);
    EXPECT_NEAR(area(offset, g), 1.0, 2.0 * g.h);
    EXPECT_EQ(offset.count(), 100u);
}

TEST(Rasterize, OutOfGridPolygonIsABoundsError) {
    GridSpec g;
    g.h = 0.1;
    g.width = g.height = 5;
    try {
        rasterize_polygons(std::vector<Polygon>{regular_polygon({0, 0}, 2.0, 5)}, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::bounds);
    }
}

TEST(Rasterize, TinyPieceAlwaysLeavesASeed) {
    GridSpec g;
    g.h = 1.0;
    g.width = g.height = 4;
    BitMask m(g);
    const Polygon tiny = regular_polygon({1.4, 1.6}, 0.1, 3);
    paint_polygon(m, g, tiny);
    EXPECT_EQ(m.count(), 0u);
    paint_piece(m, g, tiny);
    EXPECT_EQ(m.count(), 1u);
    EXPECT_TRUE(m(1, 2));
}

TEST(DistanceField, MatchesBruteForceOnRandomMasks) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const int w = 5 + static_cast<int>(rng() % 40), h = 5 + static_cast<int>(rng() % 40);
        const double density = trial < 10 ? 0.005 : (trial < 30 ? 0.05 : 0.5);
        BitMask m = oracle::random_mask(rng, w, h, density);
        if (!m.any()) m.set(static_cast<int>(rng() % w), static_cast<int>(rng() % h));
        GridSpec g;
        g.width = w;
        g.height = h;
        const DistanceField f = distance_field(m, g);
        EXPECT_EQ(f.sq, oracle::brute_force_edt(m)) << "trial " << trial;
    }
}

TEST(DistanceField, SingleSeedAndEmptyInput) {
    GridSpec g;
    g.width = 7;
    g.height = 3;
    g.h = 0.5;
    BitMask m(g);
    m.set(6, 0);
    const DistanceField f = distance_field(m, g);
    EXPECT_EQ(f.squared(0, 2), 36u + 4u);
    EXPECT_DOUBLE_EQ(f.value(6, 2), 1.0);
    EXPECT_THROW(distance_field(BitMask(g), g), Error);
}

TEST(DistanceField, ThresholdAgreesWithValues) {
    DistanceField f;
    f.h = 0.1;
    for (double r : {0.0, 0.05, 0.1, 0.1414, 0.14142135623730951, 0.3, 1.7}) {
        const std::int64_t t = f.threshold(r);
        if (t >= 0) {
            EXPECT_LE(f.value_of(static_cast<std::uint32_t>(t)), r);
        }
        EXPECT_GT(f.value_of(static_cast<std::uint32_t>(t + 1)), r);
    }
    EXPECT_EQ(f.threshold(-1.0), -1);
}

TEST(EulerCharacteristic, MatchesFloodFillOnRandomMasks) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const double density = 0.2 + 0.6 * (trial % 7) / 6.0;
        const BitMask m = oracle::random_mask(rng, 24, 24, density);
        EXPECT_EQ(euler_char(m), oracle::flood_fill_euler(m)) << "trial " << trial;
    }
}

TEST(EulerCharacteristic, DiagonalContactJoinsCells) {
    BitMask m(3, 3);
    m.set(0, 0);
    m.set(1, 1);
    EXPECT_EQ(euler_char(m), 1);
    BitMask ring(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != 1 || j != 1) ring.set(i, j);
    EXPECT_EQ(euler_char(ring), 0);
    EXPECT_EQ(euler_char(BitMask(4, 4)), 0);
}

TEST(Curvatures, DiskAndAnnulus) {
    const double h = 1.0 / 64.0;
    Box b;
    b.expand({-1, -1});
    b.expand({1, 1});
    const GridSpec g = GridSpec::covering(b, h, 0.3);
    // seeds at the origin; the r-parallel set is the disk
    BitMask seeds(g);
    seeds.set(static_cast<int>(std::lround(-g.origin.x / h)), static_cast<int>(std::lround(-g.origin.y / h)));
    const DistanceField f = distance_field(seeds, g);
    const CurvatureVector cv = curvature_vector(f, 1.0, g);
    EXPECT_EQ(cv.c0, 1);
    EXPECT_NEAR(cv.c2, std::numbers::pi, 0.01 * std::numbers::pi);
    EXPECT_NEAR(2.0 * cv.c1, 2.0 * std::numbers::pi, 0.02 * 2.0 * std::numbers::pi);
    EXPECT_EQ(euler_char(disk_mask(g, {0, 0}, 1.0, 0.5)), 0);
}

TEST(Curvatures, SteinerFormulaOfTheTriangle) {
    const double r = 0.2, h = r / 64.0;
    const Polygon tri = unit_triangle();
    const GridSpec g = GridSpec::covering(bounding_box(tri), h, r + 4 * h);
    const DistanceField f = distance_field(rasterize_polygons(std::vector<Polygon>{tri}, g), g);
    const CurvatureVector cv = curvature_vector(f, r, g);
    const CurvatureVector want = gasket::steiner_triangle(r);
    EXPECT_EQ(cv.c0, 1);
    EXPECT_NEAR(cv.c1, want.c1, 0.01 * want.c1);
    EXPECT_NEAR(cv.c2, want.c2, 0.01 * want.c2);
}

TEST(Curvatures, GuardsAndEmptyLevelSet) {
    GridSpec g;
    g.h = 0.1;
    g.width = g.height = 21;
    BitMask seeds(g);
    seeds.set(10, 10);
    const DistanceField f = distance_field(seeds, g);
    try {
        curvature_vector(f, 0.15, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::resolution);
    }
    try {
        curvature_vector(f, 1.2, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::bounds);
    }
    const BoundaryLength none = boundary_length(f, 10.0, g);
    EXPECT_TRUE(none.empty_level_set);
    EXPECT_EQ(none.length, 0.0);
    EXPECT_FALSE(boundary_length(f, 0.5, g).empty_level_set);
}

TEST(Curvatures, ParallelMasksAreNested) {
    std::mt19937_64 rng(5);
    const BitMask seeds = oracle::random_mask(rng, 50, 50, 0.01);
    GridSpec g;
    g.width = g.height = 50;
    g.h = 0.02;
    const DistanceField f = distance_field(seeds, g);
    BitMask prev = parallel_mask(f, 0.0);
    EXPECT_EQ(prev, seeds);
    for (double r = 0.01; r < 0.3; r += 0.013) {
        const BitMask cur = parallel_mask(f, r);
        EXPECT_TRUE(prev.subset_of(cur));
        prev = cur;
    }
}

TEST(RegularityProbe, MidpointIsCriticalAndSingleSeedIsNot) {
    const std::vector<Vec2> two{{-1, 0}, {1, 0}};
    EXPECT_NEAR(regularity_probe(two, {0, 0}, 1e-9), 0.0, 1e-15);
    EXPECT_NEAR(regularity_probe(two, {0.5, 0}, 1e-9), 0.5, 1e-15);
    const std::vector<Vec2> one{{0, 0}};
    EXPECT_NEAR(regularity_probe(one, {3, 4}, 0.1), 5.0, 1e-15);
    EXPECT_THROW(regularity_probe(std::vector<Vec2>{}, {0, 0}, 0.1), Error);
}

TEST(RegularityProbe, LevelSetOfTwoPointsNearTheirMidpoint) {
    GridSpec g;
    g.h = 0.05;
    g.width = 61;
    g.height = 41;
    BitMask seeds(g);
    seeds.set(20, 20);
    seeds.set(40, 20);
    const DistanceField f = distance_field(seeds, g);
    // r = 0.5 equals half the separation: the circles touch at the midpoint
    const auto at_touch = probe_level_set(seeds, f, g, 0.5, 1000, g.h);
    double jmin = 1e9;
    for (const auto& s : at_touch) jmin = std::min(jmin, s.J);
    EXPECT_LT(jmin, 2.0 * g.h);
    const auto regular = probe_level_set(seeds, f, g, 0.3, 1000, g.h);
    for (const auto& s : regular) EXPECT_GT(s.J, 0.2);
}
