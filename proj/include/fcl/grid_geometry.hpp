#pragma once

// Raster geometry of parallel sets: point-sampled masks, an exact Euclidean
// distance transform, and the three total curvatures C0 (Euler
// characteristic), C1 (half boundary length) and C2 (area) of {d <= r}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "fcl/error.hpp"
#include "fcl/geometry.hpp"

namespace fcl {

inline constexpr std::int64_t kDefaultMaxGridCells = 200'000'000;

/// Cell (i, j) has its center at origin + (i·h, j·h).
struct GridSpec {
    Vec2 origin{};
    double h = 1.0;
    int width = 0;
    int height = 0;

    Vec2 center(int i, int j) const { return {origin.x + i * h, origin.y + j * h}; }
    std::size_t cells() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    Box extent() const {
        Box b;
        b.expand({origin.x - 0.5 * h, origin.y - 0.5 * h});
        b.expand({origin.x + (width - 0.5) * h, origin.y + (height - 0.5) * h});
        return b;
    }

    /// Smallest grid of spacing h whose cell centers cover `box` grown by `pad`.
    static GridSpec covering(const Box& box, double h, double pad, std::int64_t max_cells = kDefaultMaxGridCells) {
        require(h > 0.0 && std::isfinite(h), ErrorKind::domain, "cell size must be positive");
        require(!box.empty(), ErrorKind::empty_set, "cannot build a grid around an empty box");
        GridSpec g;
        g.h = h;
        g.origin = {box.lo.x - pad, box.lo.y - pad};
        const double w = (box.hi.x - box.lo.x + 2.0 * pad) / h;
        const double ht = (box.hi.y - box.lo.y + 2.0 * pad) / h;
        require(w * ht < static_cast<double>(max_cells), ErrorKind::resolution,
                "grid of " + std::to_string(static_cast<long long>(w * ht)) + " cells exceeds the cell budget");
        g.width = static_cast<int>(std::ceil(w)) + 1;
        g.height = static_cast<int>(std::ceil(ht)) + 1;
        return g;
    }
};

struct BitMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BitMask() = default;
    BitMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}
    explicit BitMask(const GridSpec& g) : BitMask(g.width, g.height) {}

    bool operator()(int i, int j) const { return bits[index(i, j)] != 0; }
    void set(int i, int j, bool v = true) { bits[index(i, j)] = v ? 1 : 0; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i);
    }
    std::size_t count() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)); }
    bool any() const { return std::find(bits.begin(), bits.end(), 1) != bits.end(); }
    bool subset_of(const BitMask& o) const {
        for (std::size_t k = 0; k < bits.size(); ++k)
            if (bits[k] && !o.bits[k]) return false;
        return true;
    }
    friend bool operator==(const BitMask&, const BitMask&) = default;
};

/// Squared distances in cell units (exact integers); value = h·sqrt(sq).
struct DistanceField {
    int width = 0;
    int height = 0;
    double h = 1.0;
    std::vector<std::uint32_t> sq;

    std::uint32_t squared(int i, int j) const {
        return sq[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i)];
    }
    double value(int i, int j) const { return value_of(squared(i, j)); }
    double value_of(std::uint32_t s) const { return h * std::sqrt(static_cast<double>(s)); }

    /// Largest squared distance whose field value is <= r (-1 if none).
    std::int64_t threshold(double r) const {
        if (r < 0.0) return -1;
        auto t = static_cast<std::int64_t>(std::floor((r / h) * (r / h)));
        t = std::min<std::int64_t>(t, std::numeric_limits<std::uint32_t>::max() - 1);
        while (value_of(static_cast<std::uint32_t>(t + 1)) <= r) ++t;
        while (t >= 0 && value_of(static_cast<std::uint32_t>(t)) > r) --t;
        return t;
    }
    std::uint32_t max_squared() const { return sq.empty() ? 0 : *std::max_element(sq.begin(), sq.end()); }
};

struct CurvatureVector {
    long long c0 = 0;  ///< Euler characteristic
    double c1 = 0.0;   ///< half boundary length
    double c2 = 0.0;   ///< area

    double operator[](int k) const { return k == 0 ? static_cast<double>(c0) : (k == 1 ? c1 : c2); }
};

// ---------------------------------------------------------------------------
// Rasterization

/// Marks cells whose center lies in a closed convex polygon.
inline void paint_polygon(BitMask& mask, const GridSpec& grid, PolygonView poly) {
    const Box b = bounding_box(poly);
    const Box ext = grid.extent();
    require(b.lo.x >= ext.lo.x && b.lo.y >= ext.lo.y && b.hi.x <= ext.hi.x && b.hi.y <= ext.hi.y, ErrorKind::bounds,
            "polygon lies outside the grid");
    const double slack = 1e-9 * grid.h;
    const int i0 = std::max(0, static_cast<int>(std::ceil((b.lo.x - grid.origin.x - slack) / grid.h)));
    const int i1 = std::min(grid.width - 1, static_cast<int>(std::floor((b.hi.x - grid.origin.x + slack) / grid.h)));
    const int j0 = std::max(0, static_cast<int>(std::ceil((b.lo.y - grid.origin.y - slack) / grid.h)));
    const int j1 = std::min(grid.height - 1, static_cast<int>(std::floor((b.hi.y - grid.origin.y + slack) / grid.h)));
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
            if (contains(poly, grid.center(i, j), slack)) mask.set(i, j);
}

/// Marks the cell whose center is nearest to p.
inline void mark_nearest(BitMask& mask, const GridSpec& grid, Vec2 p) {
    const auto i = std::lround((p.x - grid.origin.x) / grid.h);
    const auto j = std::lround((p.y - grid.origin.y) / grid.h);
    require(i >= 0 && j >= 0 && i < grid.width && j < grid.height, ErrorKind::bounds, "point lies outside the grid");
    mask.set(static_cast<int>(i), static_cast<int>(j));
}

/// Seeds for a piece no wider than a cell: covered centers plus the cell
/// nearest to its centroid, so no piece is lost between centers.
inline void paint_piece(BitMask& mask, const GridSpec& grid, PolygonView poly) {
    paint_polygon(mask, grid, poly);
    Vec2 c{};
    for (Vec2 v : poly) c = c + v;
    mark_nearest(mask, grid, c * (1.0 / static_cast<double>(poly.size())));
}

inline BitMask rasterize_polygons(std::span<const Polygon> polys, const GridSpec& grid) {
    BitMask mask(grid);
    for (const auto& p : polys) paint_polygon(mask, grid, p);
    return mask;
}

// ---------------------------------------------------------------------------
// Exact Euclidean distance transform (lower envelope of parabolas, two passes)

namespace detail {

inline constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Rational number with positive denominator.
struct Frac {
    std::int64_t num;
    std::int64_t den;
};

inline bool less_equal(Frac a, Frac b) { return a.num * b.den <= b.num * a.den; }

// d[i] = min_q f[q] + (i - q)^2 over finite f[q]. `v`, `z` are scratch buffers.
inline void envelope_1d(std::span<const std::int64_t> f, std::span<std::int64_t> d, std::vector<int>& v,
                        std::vector<Frac>& z) {
    const int n = static_cast<int>(f.size());
    v.resize(static_cast<std::size_t>(n));
    z.resize(static_cast<std::size_t>(n) + 1);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] >= kInf) continue;
        const std::int64_t fq = f[q] + static_cast<std::int64_t>(q) * q;
        Frac s{0, 1};
        while (k >= 0) {
            const int p = v[k];
            s = {fq - (f[p] + static_cast<std::int64_t>(p) * p), 2 * static_cast<std::int64_t>(q - p)};
            if (k > 0 && less_equal(s, z[k])) {
                --k;
                continue;
            }
            break;
        }
        ++k;
        v[k] = q;
        z[k] = s;  // z[0] is unused (acts as -inf)
    }
    if (k < 0) {
        std::fill(d.begin(), d.end(), kInf);
        return;
    }
    int j = 0;
    for (int i = 0; i < n; ++i) {
        // advance while the next parabola's interval starts at or before i
        while (j < k && z[j + 1].num <= static_cast<std::int64_t>(i) * z[j + 1].den) ++j;
        const std::int64_t dx = i - v[j];
        d[i] = f[v[j]] + dx * dx;
    }
}

}  // namespace detail

/// Exact squared Euclidean distance (cell units) from every cell center to the
/// nearest foreground cell center.
inline DistanceField distance_field(const BitMask& seeds, const GridSpec& grid) {
    require(seeds.width == grid.width && seeds.height == grid.height, ErrorKind::domain, "mask/grid size mismatch");
    require(seeds.any(), ErrorKind::empty_set, "distance_field needs at least one seed");
    const int W = grid.width, H = grid.height;
    DistanceField out;
    out.width = W;
    out.height = H;
    out.h = grid.h;
    out.sq.resize(grid.cells());

    // Pass 1: vertical distance to the nearest seed in the same column.
    constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t>& col = out.sq;
    for (int j = 0; j < H; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * W;
        for (int i = 0; i < W; ++i) {
            if (seeds.bits[row + i])
                col[row + i] = 0;
            else if (j > 0 && col[row - W + i] != none)
                col[row + i] = col[row - W + i] + 1;
            else
                col[row + i] = none;
        }
    }
    for (int j = H - 2; j >= 0; --j) {
        const std::size_t row = static_cast<std::size_t>(j) * W;
        for (int i = 0; i < W; ++i) {
            const std::uint32_t below = col[row + W + i];
            if (below != none && below + 1 < col[row + i]) col[row + i] = below + 1;
        }
    }

    // Pass 2: lower envelope along rows, in place.
    std::vector<std::int64_t> f(static_cast<std::size_t>(W)), d(static_cast<std::size_t>(W));
    std::vector<int> v;
    std::vector<detail::Frac> z;
    for (int j = 0; j < H; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * W;
        for (int i = 0; i < W; ++i) {
            const std::uint32_t g = col[row + i];
            f[i] = g == none ? detail::kInf : static_cast<std::int64_t>(g) * g;
        }
        detail::envelope_1d(f, d, v, z);
        for (int i = 0; i < W; ++i) out.sq[row + i] = static_cast<std::uint32_t>(d[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Curvature functionals

inline BitMask parallel_mask(const DistanceField& field, double r) {
    require(r >= 0.0, ErrorKind::domain, "radius must be non-negative");
    BitMask mask(field.width, field.height);
    const std::int64_t t = field.threshold(r);
    for (std::size_t k = 0; k < field.sq.size(); ++k) mask.bits[k] = static_cast<std::int64_t>(field.sq[k]) <= t;
    return mask;
}

inline double area(const BitMask& mask, const GridSpec& grid) {
    return static_cast<double>(mask.count()) * grid.h * grid.h;
}

/// χ of the union of the closed foreground cells, counted as V − E + F.
inline long long euler_char(const BitMask& mask) {
    const int W = mask.width, H = mask.height;
    auto fg = [&](int i, int j) { return i >= 0 && j >= 0 && i < W && j < H && mask.bits[mask.index(i, j)]; };
    long long V = 0, E = 0, F = 0;
    for (int j = 0; j <= H; ++j) {
        for (int i = 0; i <= W; ++i) {
            const bool a = fg(i - 1, j - 1), b = fg(i, j - 1), c = fg(i - 1, j), d = fg(i, j);
            V += (a || b || c || d);
            E += (b || d);  // horizontal edge from vertex (i, j) to (i+1, j)
            E += (c || d);  // vertical edge from vertex (i, j) to (i, j+1)
            F += d;
        }
    }
    return V - E + F;
}

struct BoundaryLength {
    double length = 0.0;
    bool empty_level_set = false;  ///< no crossing of the level was found
};

/// Total length of the iso-contour {d = r} from marching squares on the cell
/// centers, linear interpolation along edges, saddles split by the center average.
inline BoundaryLength boundary_length(const DistanceField& field, double r, const GridSpec& grid) {
    const int W = field.width, H = field.height;
    const std::int64_t t = field.threshold(r);
    auto inside = [&](std::size_t k) { return static_cast<std::int64_t>(field.sq[k]) <= t; };
    double total = 0.0;
    bool found = false;
    for (int j = 0; j + 1 < H; ++j) {
        const std::size_t r0 = static_cast<std::size_t>(j) * W, r1 = r0 + W;
        for (int i = 0; i + 1 < W; ++i) {
            const std::size_t k0 = r0 + i, k1 = r0 + i + 1, k2 = r1 + i + 1, k3 = r1 + i;
            const int code = inside(k0) | (inside(k1) << 1) | (inside(k2) << 2) | (inside(k3) << 3);
            if (code == 0 || code == 15) continue;
            found = true;
            const double v0 = field.value_of(field.sq[k0]), v1 = field.value_of(field.sq[k1]);
            const double v2 = field.value_of(field.sq[k2]), v3 = field.value_of(field.sq[k3]);
            auto lerp = [r](double a, double b) { return (r - a) / (b - a); };
            // crossing points in cell units relative to corner 0
            Vec2 p[4];
            if ((code ^ (code >> 1)) & 1) p[0] = {lerp(v0, v1), 0.0};
            if (((code >> 1) ^ (code >> 2)) & 1) p[1] = {1.0, lerp(v1, v2)};
            if (((code >> 3) ^ (code >> 2)) & 1) p[2] = {lerp(v3, v2), 1.0};
            if ((code ^ (code >> 3)) & 1) p[3] = {0.0, lerp(v0, v3)};
            auto seg = [&](int a, int b) { total += distance(p[a], p[b]); };
            switch (code) {
                case 1: case 14: seg(3, 0); break;
                case 2: case 13: seg(0, 1); break;
                case 3: case 12: seg(3, 1); break;
                case 4: case 11: seg(1, 2); break;
                case 6: case 9: seg(0, 2); break;
                case 7: case 8: seg(3, 2); break;
                case 5: case 10: {
                    const bool center_in = 0.25 * (v0 + v1 + v2 + v3) <= r;
                    // corners 0,2 inside (5) or 1,3 inside (10); cut off whichever pair is separated
                    const bool cut_02 = (code == 5) != center_in;
                    if (cut_02) { seg(3, 0); seg(1, 2); }
                    else { seg(0, 1); seg(2, 3); }
                    break;
                }
                default: break;
            }
        }
    }
    return {total * grid.h, !found};
}

/// (C0, C1, C2) of the parallel set {d <= r}.
inline CurvatureVector curvature_vector(const DistanceField& field, double r, const GridSpec& grid) {
    require(r >= 2.0 * grid.h, ErrorKind::resolution,
            "radius " + std::to_string(r) + " is below the resolution guard 2h = " + std::to_string(2.0 * grid.h));
    const BitMask mask = parallel_mask(field, r);
    for (int i = 0; i < mask.width; ++i)
        require(!mask(i, 0) && !mask(i, mask.height - 1), ErrorKind::bounds, "parallel set touches the grid border");
    for (int j = 0; j < mask.height; ++j)
        require(!mask(0, j) && !mask(mask.width - 1, j), ErrorKind::bounds, "parallel set touches the grid border");
    CurvatureVector cv;
    cv.c0 = euler_char(mask);
    cv.c1 = 0.5 * boundary_length(field, r, grid).length;
    cv.c2 = area(mask, grid);
    return cv;
}

// ---------------------------------------------------------------------------
// Regularity probe

/// dist(x, conv Σ^tol(x)), Σ^tol(x) = {a : |x − a| ≤ d_K(x) + tol}. Zero marks
/// x as (approximately) critical for the distance function.
inline double regularity_probe(std::span<const Vec2> seeds, Vec2 x, double tol) {
    require(!seeds.empty(), ErrorKind::empty_set, "regularity_probe needs seeds");
    require(tol >= 0.0, ErrorKind::domain, "tolerance must be non-negative");
    double d = std::numeric_limits<double>::infinity();
    for (Vec2 a : seeds) d = std::min(d, distance(x, a));
    std::vector<Vec2> near;
    for (Vec2 a : seeds)
        if (distance(x, a) <= d + tol) near.push_back(a);
    return distance_to_hull(near, x);
}

struct ProbeSample {
    Vec2 x;
    double J = 0.0;
};

/// Samples up to `points` crossings of {d = r} (evenly along the marching
/// order) and evaluates the probe there from the seed cells of `seeds`.
inline std::vector<ProbeSample> probe_level_set(const BitMask& seeds, const DistanceField& field, const GridSpec& grid,
                                                double r, int points, double tol) {
    require(points >= 1, ErrorKind::domain, "need at least one probe point");
    const int W = field.width, H = field.height;
    const std::int64_t t = field.threshold(r);
    std::vector<Vec2> crossings;
    for (int j = 0; j < H; ++j)
        for (int i = 0; i < W; ++i) {
            const double v = field.value(i, j);
            const bool in = static_cast<std::int64_t>(field.squared(i, j)) <= t;
            if (i + 1 < W && in != (static_cast<std::int64_t>(field.squared(i + 1, j)) <= t)) {
                const double w = field.value(i + 1, j);
                crossings.push_back(grid.center(i, j) + Vec2{grid.h * (r - v) / (w - v), 0.0});
            }
            if (j + 1 < H && in != (static_cast<std::int64_t>(field.squared(i, j + 1)) <= t)) {
                const double w = field.value(i, j + 1);
                crossings.push_back(grid.center(i, j) + Vec2{0.0, grid.h * (r - v) / (w - v)});
            }
        }
    std::vector<ProbeSample> out;
    if (crossings.empty()) return out;
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(points), crossings.size());
    const int reach = static_cast<int>(std::ceil((r + tol) / grid.h)) + 2;
    std::vector<Vec2> local;
    for (std::size_t s = 0; s < n; ++s) {
        const Vec2 x = crossings[s * crossings.size() / n];
        const int ci = static_cast<int>(std::lround((x.x - grid.origin.x) / grid.h));
        const int cj = static_cast<int>(std::lround((x.y - grid.origin.y) / grid.h));
        local.clear();
        for (int j = std::max(0, cj - reach); j <= std::min(H - 1, cj + reach); ++j)
            for (int i = std::max(0, ci - reach); i <= std::min(W - 1, ci + reach); ++i)
                if (seeds(i, j)) local.push_back(grid.center(i, j));
        if (local.empty()) continue;
        out.push_back({x, regularity_probe(local, x, tol)});
    }
    return out;
}

}  // namespace fcl
