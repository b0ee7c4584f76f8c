#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace fcl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Convex polygon as a counter-clockwise vertex cycle (no repeated closing vertex).
using Polygon = std::vector<Vec2>;
using PolygonView = std::span<const Vec2>;

struct Box {
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

    void expand(Vec2 p) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    bool empty() const { return lo.x > hi.x; }
};

inline Box bounding_box(PolygonView poly) {
    Box b;
    for (Vec2 v : poly) b.expand(v);
    return b;
}

inline double signed_area(PolygonView poly) {
    double a = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * a;
}

inline double polygon_area(PolygonView poly) { return std::abs(signed_area(poly)); }

inline void make_ccw(Polygon& poly) {
    if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
}

inline double diameter(PolygonView poly) {
    double d = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, distance(poly[i], poly[j]));
    return d;
}

/// Strict convexity check for a CCW cycle (collinear consecutive vertices rejected).
inline bool is_convex_ccw(PolygonView poly, double tol = 1e-12) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % n], c = poly[(i + 2) % n];
        if (cross(b - a, c - b) <= tol * norm(b - a) * norm(c - b)) return false;
    }
    return true;
}

/// Closed containment in a CCW convex polygon; `tol` is an absolute distance slack.
inline bool contains(PolygonView poly, Vec2 p, double tol = 0.0) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i], e = poly[(i + 1) % n] - a;
        if (cross(e, p - a) < -tol * norm(e)) return false;
    }
    return true;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + t * ab);
}

/// Distance from p to the boundary of a CCW convex polygon (p inside or outside).
inline double distance_to_boundary(PolygonView poly, Vec2 p) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = poly.size(); i < n; ++i)
        d = std::min(d, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
    return d;
}

namespace detail {

inline void project(PolygonView poly, Vec2 axis, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (Vec2 v : poly) {
        const double s = dot(v, axis);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
}

// Largest separation gap of P and Q along the edge normals of `edges`.
inline double max_gap(PolygonView edges, PolygonView p, PolygonView q) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = edges.size(); i < n; ++i) {
        const Vec2 e = edges[(i + 1) % n] - edges[i];
        const double len = norm(e);
        if (len == 0.0) continue;
        const Vec2 axis{e.y / len, -e.x / len};
        double plo, phi, qlo, qhi;
        project(p, axis, plo, phi);
        project(q, axis, qlo, qhi);
        best = std::max(best, std::max(qlo - phi, plo - qhi));
    }
    return best;
}

}  // namespace detail

/// Separating-axis overlap test for convex polygons. Returns the largest
/// separating gap: > 0 disjoint, = 0 touching, < 0 interiors overlap (penetration depth bound).
inline double separation(PolygonView p, PolygonView q) {
    return std::max(detail::max_gap(p, p, q), detail::max_gap(q, p, q));
}

/// Euclidean distance between two convex polygons (0 when they intersect).
inline double polygon_distance(PolygonView p, PolygonView q) {
    if (separation(p, q) <= 0.0) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) {
            d = std::min(d, point_segment_distance(p[i], q[j], q[(j + 1) % q.size()]));
            d = std::min(d, point_segment_distance(q[j], p[i], p[(i + 1) % p.size()]));
        }
    return d;
}

/// Andrew's monotone chain; returns a CCW hull without collinear points.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

/// Distance from x to the convex hull of `pts` (0 if x lies in it).
inline double distance_to_hull(const std::vector<Vec2>& pts, Vec2 x) {
    if (pts.empty()) return std::numeric_limits<double>::infinity();
    const std::vector<Vec2> hull = convex_hull(pts);
    if (hull.size() == 1) return distance(x, hull[0]);
    if (hull.size() == 2) return point_segment_distance(x, hull[0], hull[1]);
    if (contains(hull, x)) return 0.0;
    return distance_to_boundary(hull, x);
}

}  // namespace fcl
