#pragma once

// Random iterated function systems: similarities, finitely supported IFS
// distributions with a shared convex open set, seeded environments and the
// code-tree constructions built on top of them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fcl/error.hpp"
#include "fcl/geometry.hpp"

namespace fcl {

inline constexpr int kDefaultDepthCap = 64;

// ---------------------------------------------------------------------------
// Seeding

/// splitmix64 finalizer. All per-level and per-node draws go through this.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Order-sensitive combination of a key with one more word.
constexpr std::uint64_t mix(std::uint64_t key, std::uint64_t word) { return mix64(key ^ mix64(word)); }

/// Top 53 bits as a uniform double in [0, 1).
constexpr double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// Maps

/// Column-major 2x2 linear part plus translation.
struct Affine2 {
    double a = 1, b = 0, c = 0, d = 1;  // [[a, b], [c, d]]
    Vec2 t{};

    constexpr Vec2 linear(Vec2 p) const { return {a * p.x + b * p.y, c * p.x + d * p.y}; }
    constexpr Vec2 operator()(Vec2 p) const { return linear(p) + t; }

    /// (*this) ∘ g
    constexpr Affine2 then_inner(const Affine2& g) const {
        return {a * g.a + b * g.c, a * g.b + b * g.d, c * g.a + d * g.c, c * g.b + d * g.d, linear(g.t) + t};
    }
};

/// x ↦ scale · Q · x + translation, Q = rotation(rotation) · (reflect ? diag(1,-1) : I).
struct Similarity {
    double scale = 1.0;
    double rotation = 0.0;  // radians
    bool reflect = false;
    Vec2 translation{};

    Affine2 affine() const {
        const double cs = std::cos(rotation), sn = std::sin(rotation);
        if (!reflect) return {scale * cs, -scale * sn, scale * sn, scale * cs, translation};
        return {scale * cs, scale * sn, scale * sn, -scale * cs, translation};
    }
    Vec2 operator()(Vec2 p) const { return affine()(p); }
};

/// f ∘ g, staying in closed similarity form.
inline Similarity compose(const Similarity& f, const Similarity& g) {
    Similarity out;
    out.scale = f.scale * g.scale;
    out.reflect = f.reflect != g.reflect;
    out.rotation = f.rotation + (f.reflect ? -g.rotation : g.rotation);
    out.translation = f.affine().linear(g.translation) + f.translation;
    return out;
}

inline Similarity identity_similarity() { return {}; }

struct IfsAtom {
    std::vector<Similarity> maps;
    std::size_t size() const { return maps.size(); }
};

struct WeightedAtom {
    IfsAtom atom;
    double prob = 0.0;
};

// ---------------------------------------------------------------------------
// Model

/// Finitely supported distribution over IFSs that share a convex open set O.
class RandomIfsModel {
public:
    /// Validates everything, including the uniform open set condition checked on
    /// polygons with tolerance 1e-9. Touching closures are reported as warnings.
    RandomIfsModel(std::vector<WeightedAtom> atoms, Polygon open_set, std::optional<double> big_R = std::nullopt)
        : atoms_(std::move(atoms)), open_set_(std::move(open_set)) {
        require(!atoms_.empty(), ErrorKind::config, "model needs at least one atom");
        require(open_set_.size() >= 3, ErrorKind::config, "open set needs at least 3 vertices");
        make_ccw(open_set_);
        require(is_convex_ccw(open_set_), ErrorKind::config, "open set must be a strictly convex polygon");
        diam_ = diameter(open_set_);
        area_ = polygon_area(open_set_);

        double total = 0.0;
        r_min_ = 1.0;
        r_max_ = 0.0;
        for (std::size_t j = 0; j < atoms_.size(); ++j) {
            const auto& wa = atoms_[j];
            require(wa.prob > 0.0 && std::isfinite(wa.prob), ErrorKind::config,
                    "atom " + std::to_string(j) + ": probability must be positive");
            require(wa.atom.size() >= 2, ErrorKind::config, "atom " + std::to_string(j) + ": needs at least 2 maps");
            for (const auto& m : wa.atom.maps) {
                require(m.scale > 0.0 && m.scale < 1.0, ErrorKind::config,
                        "atom " + std::to_string(j) + ": scale must lie in (0,1)");
                r_min_ = std::min(r_min_, m.scale);
                r_max_ = std::max(r_max_, m.scale);
            }
            total += wa.prob;
            cumulative_.push_back(total);
        }
        require(std::abs(total - 1.0) <= 1e-12, ErrorKind::config, "atom probabilities must sum to 1");
        cumulative_.back() = 1.0;

        big_R_ = big_R.value_or(1.5 * diam_);
        require(big_R_ > std::sqrt(2.0) * diam_, ErrorKind::config, "big_R must exceed sqrt(2)·diam(O)");
        check_open_set_condition();
    }

    const std::vector<WeightedAtom>& atoms() const { return atoms_; }
    const IfsAtom& atom(std::size_t j) const { return atoms_[j].atom; }
    double prob(std::size_t j) const { return atoms_[j].prob; }
    std::size_t atom_count() const { return atoms_.size(); }
    const Polygon& open_set() const { return open_set_; }
    double big_R() const { return big_R_; }
    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }
    double open_set_diameter() const { return diam_; }
    double open_set_area() const { return area_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Inverse-CDF atom selection for u in [0,1).
    std::size_t pick(double u) const {
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
    }

    double expected_count() const {
        double e = 0.0;
        for (const auto& wa : atoms_) e += wa.prob * static_cast<double>(wa.atom.size());
        return e;
    }

private:
    void check_open_set_condition() {
        constexpr double tol = 1e-9;
        for (std::size_t j = 0; j < atoms_.size(); ++j) {
            std::vector<Polygon> images;
            for (const auto& m : atoms_[j].atom.maps) {
                const Affine2 f = m.affine();
                Polygon img;
                for (Vec2 v : open_set_) img.push_back(f(v));
                make_ccw(img);
                for (Vec2 v : img)
                    require(contains(open_set_, v, tol), ErrorKind::config,
                            "atom " + std::to_string(j) + ": image of the open set leaves the open set");
                images.push_back(std::move(img));
            }
            int touching = 0;
            for (std::size_t a = 0; a < images.size(); ++a)
                for (std::size_t b = a + 1; b < images.size(); ++b) {
                    const double gap = separation(images[a], images[b]);
                    require(gap >= -tol, ErrorKind::config,
                            "atom " + std::to_string(j) + ": images " + std::to_string(a) + " and " +
                                std::to_string(b) + " of the open set overlap");
                    if (gap <= tol) ++touching;
                }
            if (touching > 0)
                warnings_.push_back("atom " + std::to_string(j) + ": " + std::to_string(touching) +
                                    " pair(s) of images have touching closures");
        }
    }

    std::vector<WeightedAtom> atoms_;
    Polygon open_set_;
    std::vector<double> cumulative_;
    double big_R_ = 0.0;
    double r_min_ = 0.0;
    double r_max_ = 0.0;
    double diam_ = 0.0;
    double area_ = 0.0;
    std::vector<std::string> warnings_;
};

using ModelPtr = std::shared_ptr<const RandomIfsModel>;

// ---------------------------------------------------------------------------
// Environments and code words

/// One IFS per construction level, each a pure function of (master_seed, level).
/// Levels are 1-based. `shifted(k)` is the environment θ^k ω.
class Environment {
public:
    Environment(ModelPtr model, std::uint64_t master_seed, int depth, int offset = 0)
        : model_(std::move(model)), seed_(master_seed), offset_(offset) {
        prefix_.reserve(static_cast<std::size_t>(std::max(depth, 0)));
        for (int n = 1; n <= depth; ++n) prefix_.push_back(draw(n));
    }

    const RandomIfsModel& model() const { return *model_; }
    const ModelPtr& model_ptr() const { return model_; }
    std::uint64_t master_seed() const { return seed_; }
    int offset() const { return offset_; }
    const std::vector<std::size_t>& prefix() const { return prefix_; }

    /// Atom index used at `level` (>= 1). Levels beyond the realized prefix are
    /// computed on demand from the same mixing function.
    std::size_t atom_index(int level) const {
        if (level >= 1 && static_cast<std::size_t>(level) <= prefix_.size()) return prefix_[level - 1];
        return draw(level);
    }
    const IfsAtom& atom(int level) const { return model_->atom(atom_index(level)); }

    Environment shifted(int k) const {
        Environment out(model_, seed_, 0, offset_ + k);
        for (std::size_t n = static_cast<std::size_t>(k); n < prefix_.size(); ++n) out.prefix_.push_back(prefix_[n]);
        return out;
    }

    /// Largest contraction ratio among level-`level` maps.
    double level_max_scale(int level) const {
        double r = 0.0;
        for (const auto& m : atom(level).maps) r = std::max(r, m.scale);
        return r;
    }

private:
    std::size_t draw(int level) const {
        const auto n = static_cast<std::uint64_t>(level + offset_);
        return model_->pick(unit_interval(mix(seed_, n)));
    }

    ModelPtr model_;
    std::uint64_t seed_;
    int offset_;
    std::vector<std::size_t> prefix_;
};

inline Environment sample_environment(ModelPtr model, std::uint64_t master_seed, int depth) {
    require(depth >= 1, ErrorKind::domain, "depth must be at least 1");
    return Environment(std::move(model), master_seed, depth);
}

struct CodeWord {
    std::vector<int> entries;  // 1-based
    double ratio = 1.0;
    Similarity map{};

    std::size_t length() const { return entries.size(); }
};

/// f_σ = f^1_{σ1} ∘ f^2_{σ2} ∘ … ∘ f^n_{σn}.
inline CodeWord compose_word(const Environment& env, const std::vector<int>& entries) {
    CodeWord w;
    w.entries = entries;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const IfsAtom& atom = env.atom(static_cast<int>(i) + 1);
        const int idx = entries[i];
        require(idx >= 1 && static_cast<std::size_t>(idx) <= atom.size(), ErrorKind::invalid_code,
                "code entry " + std::to_string(idx) + " at level " + std::to_string(i + 1) + " is out of range 1.." +
                    std::to_string(atom.size()));
        const Similarity& m = atom.maps[static_cast<std::size_t>(idx - 1)];
        w.map = compose(w.map, m);
        w.ratio *= m.scale;
    }
    return w;
}

inline Polygon image_of(const Affine2& f, const Polygon& poly) {
    Polygon out;
    out.reserve(poly.size());
    for (Vec2 v : poly) out.push_back(f(v));
    make_ccw(out);
    return out;
}

inline Polygon piece_polygon(const Environment& env, const CodeWord& w) {
    return image_of(w.map.affine(), env.model().open_set());
}

namespace detail {

inline void stopping_dfs(const Environment& env, double threshold, CodeWord& cur, std::vector<CodeWord>& out) {
    const int level = static_cast<int>(cur.entries.size()) + 1;
    require(level <= 4096, ErrorKind::depth_limit, "stopping set recursion too deep");
    const IfsAtom& atom = env.atom(level);
    for (std::size_t i = 0; i < atom.size(); ++i) {
        CodeWord next;
        next.entries = cur.entries;
        next.entries.push_back(static_cast<int>(i) + 1);
        next.ratio = cur.ratio * atom.maps[i].scale;
        next.map = compose(cur.map, atom.maps[i]);
        if (next.ratio <= threshold)
            out.push_back(std::move(next));
        else
            stopping_dfs(env, threshold, next, out);
    }
}

}  // namespace detail

/// Σ(r) = {σ : R r_σ ≤ r < R r_{σ|(|σ|-1)}}, and {∅} for r ≥ R.
inline std::vector<CodeWord> stopping_set(const Environment& env, double r) {
    require(r > 0.0, ErrorKind::domain, "stopping_set needs r > 0");
    const double R = env.model().big_R();
    if (r >= R) return {CodeWord{}};
    std::vector<CodeWord> out;
    CodeWord root;
    detail::stopping_dfs(env, r / R, root, out);
    return out;
}

/// Members of Σ(r) whose piece polygon f_σ(cl O) lies within 2r of the
/// complement of f(O) = ∪ f_i(O). The polygon contains F_σ, so this is a
/// superset of the boundary codes.
inline std::vector<CodeWord> boundary_codes(const Environment& env, double r) {
    auto words = stopping_set(env, r);
    if (words.size() == 1 && words[0].entries.empty()) return words;
    const RandomIfsModel& model = env.model();
    const IfsAtom& first = env.atom(1);
    std::vector<Polygon> first_images;
    for (const auto& m : first.maps) first_images.push_back(image_of(m.affine(), model.open_set()));

    std::vector<CodeWord> out;
    for (auto& w : words) {
        const Polygon& outer = first_images[static_cast<std::size_t>(w.entries.front() - 1)];
        const Polygon piece = piece_polygon(env, w);
        double gap = std::numeric_limits<double>::infinity();
        for (Vec2 v : piece) gap = std::min(gap, contains(outer, v) ? distance_to_boundary(outer, v) : 0.0);
        if (gap <= 2.0 * r) out.push_back(std::move(w));
    }
    return out;
}

/// Smallest uniform depth n with max_σ r_σ · diam(O) ≤ bound.
inline int prefractal_depth(const Environment& env, double diameter_bound, int max_depth = kDefaultDepthCap) {
    require(diameter_bound > 0.0, ErrorKind::domain, "diameter_bound must be positive");
    double size = env.model().open_set_diameter();
    int n = 0;
    while (size > diameter_bound && n < 100000) {
        ++n;
        size *= env.level_max_scale(n);
    }
    if (n > max_depth) throw DepthLimitError(n, max_depth);
    return n;
}

/// Visits f_σ(cl O) for all σ ∈ Σ_n at the uniform depth chosen by prefractal_depth.
template <class Visitor>
void for_each_prefractal_polygon(const Environment& env, double diameter_bound, Visitor&& visit,
                                 int max_depth = kDefaultDepthCap) {
    const int depth = prefractal_depth(env, diameter_bound, max_depth);
    const Polygon& base = env.model().open_set();
    std::vector<std::vector<Affine2>> level_maps(static_cast<std::size_t>(depth));
    for (int n = 1; n <= depth; ++n)
        for (const auto& m : env.atom(n).maps) level_maps[static_cast<std::size_t>(n - 1)].push_back(m.affine());

    std::vector<Vec2> buf(base.size());
    auto rec = [&](auto&& self, const Affine2& f, int level) -> void {
        if (level == depth) {
            for (std::size_t i = 0; i < base.size(); ++i) buf[i] = f(base[i]);
            if (signed_area(buf) < 0.0) std::reverse(buf.begin(), buf.end());
            visit(PolygonView(buf));
            return;
        }
        for (const Affine2& g : level_maps[static_cast<std::size_t>(level)]) self(self, f.then_inner(g), level + 1);
    };
    rec(rec, Affine2{}, 0);
}

inline std::vector<Polygon> prefractal_polygons(const Environment& env, double diameter_bound,
                                                int max_depth = kDefaultDepthCap) {
    std::vector<Polygon> out;
    for_each_prefractal_polygon(
        env, diameter_bound, [&](PolygonView p) { out.emplace_back(p.begin(), p.end()); }, max_depth);
    return out;
}

/// Γ = κ₂ 4² R² / (r_min² · area(O)), κ₂ = π.
inline double gamma_bound(const RandomIfsModel& model) {
    const double R = model.big_R();
    return std::numbers::pi * 16.0 * R * R / (model.r_min() * model.r_min() * model.open_set_area());
}

/// max over σ ∈ Σ(r) of #{σ' ∈ Σ(r) : dist(P_σ, P_σ') ≤ 2r}, P = f(cl O).
inline int neighbor_overlap_count(const Environment& env, double r) {
    const auto words = stopping_set(env, r);
    if (words.size() <= 1) return static_cast<int>(words.size());
    std::vector<Polygon> pieces;
    pieces.reserve(words.size());
    double dmax = 0.0;
    for (const auto& w : words) {
        pieces.push_back(piece_polygon(env, w));
        dmax = std::max(dmax, w.ratio * env.model().open_set_diameter());
    }
    // first vertices of pieces within 2r lie within 2r + 2 dmax of each other
    const double cell = 2.0 * r + 2.0 * dmax;
    auto key = [](std::int64_t i, std::int64_t j) { return (i << 32) ^ (j & 0xffffffffLL); };
    std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
    std::vector<std::pair<std::int64_t, std::int64_t>> where(pieces.size());
    std::vector<Box> boxes(pieces.size());
    for (std::size_t s = 0; s < pieces.size(); ++s) {
        const Vec2 v = pieces[s].front();
        where[s] = {static_cast<std::int64_t>(std::floor(v.x / cell)), static_cast<std::int64_t>(std::floor(v.y / cell))};
        buckets[key(where[s].first, where[s].second)].push_back(s);
        boxes[s] = bounding_box(pieces[s]);
    }
    int best = 0;
    for (std::size_t s = 0; s < pieces.size(); ++s) {
        int count = 0;
        for (std::int64_t di = -1; di <= 1; ++di)
            for (std::int64_t dj = -1; dj <= 1; ++dj) {
                const auto it = buckets.find(key(where[s].first + di, where[s].second + dj));
                if (it == buckets.end()) continue;
                for (std::size_t t : it->second) {
                    if (t == s) {
                        ++count;
                        continue;
                    }
                    const Box& a = boxes[s];
                    const Box& b = boxes[t];
                    const double gx = std::max({0.0, a.lo.x - b.hi.x, b.lo.x - a.hi.x});
                    const double gy = std::max({0.0, a.lo.y - b.hi.y, b.lo.y - a.hi.y});
                    if (gx * gx + gy * gy > 4.0 * r * r) continue;
                    if (polygon_distance(pieces[s], pieces[t]) <= 2.0 * r) ++count;
                }
            }
        best = std::max(best, count);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Code trees: homogeneous (one IFS per level) or random recursive (one per node)

enum class Mode { homogeneous, recursive };

/// Random compact set described by its code tree. In homogeneous mode the IFS at
/// a node depends on the level only (through an Environment); in recursive mode
/// every node draws its own IFS from mix(seed, path hash).
class CodeTree {
public:
    struct Node {
        int level = 0;            // depth of the node (root = 0)
        std::uint64_t key = 0;    // canonical path hash
    };

    static CodeTree homogeneous(Environment env) {
        CodeTree t(env.model_ptr(), Mode::homogeneous, 0);
        t.env_.emplace(std::move(env));
        return t;
    }
    static CodeTree recursive(ModelPtr model, std::uint64_t seed) {
        return CodeTree(std::move(model), Mode::recursive, mix(seed, 0x5EEDC0DEULL));
    }

    Mode mode() const { return mode_; }
    const RandomIfsModel& model() const { return *model_; }
    const ModelPtr& model_ptr() const { return model_; }
    Node root() const { return {0, root_key_}; }

    std::size_t atom_index(Node n) const {
        if (mode_ == Mode::homogeneous) return env_->atom_index(n.level + 1);
        return model_->pick(unit_interval(n.key));
    }
    const IfsAtom& atom(Node n) const { return model_->atom(atom_index(n)); }
    Node child(Node n, std::size_t i) const { return {n.level + 1, mix(n.key, static_cast<std::uint64_t>(i) + 1)}; }

    /// The (unscaled) random set generated below `n`; for a first-level node
    /// this is F^{(1)} in homogeneous mode and K^{(i)} in recursive mode.
    CodeTree subtree(Node n) const {
        if (mode_ == Mode::homogeneous) return homogeneous(env_->shifted(n.level));
        CodeTree t(model_, Mode::recursive, n.key);
        return t;
    }

    const Environment* environment() const { return env_ ? &*env_ : nullptr; }

private:
    CodeTree(ModelPtr model, Mode mode, std::uint64_t key) : model_(std::move(model)), mode_(mode), root_key_(key) {}

    ModelPtr model_;
    Mode mode_;
    std::uint64_t root_key_;
    std::optional<Environment> env_;
};

/// Visits pieces f_σ(cl O) covering the set to within `diameter_bound`.
/// Homogeneous trees use the uniform depth rule; recursive trees stop each
/// branch as soon as r_σ · diam(O) ≤ diameter_bound.
template <class Visitor>
void for_each_piece(const CodeTree& tree, double diameter_bound, Visitor&& visit, int max_depth = kDefaultDepthCap) {
    if (tree.mode() == Mode::homogeneous) {
        for_each_prefractal_polygon(*tree.environment(), diameter_bound, visit, max_depth);
        return;
    }
    require(diameter_bound > 0.0, ErrorKind::domain, "diameter_bound must be positive");
    const RandomIfsModel& model = tree.model();
    const Polygon& base = model.open_set();
    const double diam = model.open_set_diameter();
    std::vector<Vec2> buf(base.size());
    auto rec = [&](auto&& self, const Affine2& f, double ratio, CodeTree::Node node) -> void {
        if (ratio * diam <= diameter_bound) {
            for (std::size_t i = 0; i < base.size(); ++i) buf[i] = f(base[i]);
            if (signed_area(buf) < 0.0) std::reverse(buf.begin(), buf.end());
            visit(PolygonView(buf));
            return;
        }
        if (node.level >= max_depth) {
            int need = node.level;
            for (double s = ratio * diam; s > diameter_bound; s *= model.r_max()) ++need;
            throw DepthLimitError(need, max_depth);
        }
        const IfsAtom& atom = tree.atom(node);
        for (std::size_t i = 0; i < atom.size(); ++i)
            self(self, f.then_inner(atom.maps[i].affine()), ratio * atom.maps[i].scale, tree.child(node, i));
    };
    rec(rec, Affine2{}, 1.0, tree.root());
}

// ---------------------------------------------------------------------------
// Homogeneous random Sierpiński gasket family

inline Polygon unit_triangle() { return {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}; }

/// G: the three half-scale maps of the standard gasket.
inline IfsAtom gasket_G() {
    const double s3 = std::sqrt(3.0);
    IfsAtom g;
    for (Vec2 t : {Vec2{0.0, 0.0}, Vec2{0.5, 0.0}, Vec2{0.25, s3 / 4.0}}) g.maps.push_back({0.5, 0.0, false, t});
    return g;
}

/// H: the six third-scale maps of the modified gasket.
inline IfsAtom gasket_H() {
    const double s3 = std::sqrt(3.0);
    IfsAtom h;
    for (Vec2 t : {Vec2{0.0, 0.0}, Vec2{1.0 / 3.0, 0.0}, Vec2{2.0 / 3.0, 0.0}, Vec2{1.0 / 6.0, s3 / 6.0},
                   Vec2{0.5, s3 / 6.0}, Vec2{1.0 / 3.0, s3 / 3.0}})
        h.maps.push_back({1.0 / 3.0, 0.0, false, t});
    return h;
}

/// P(G) = p, P(H) = 1 - p on O = int T with R = 3/2. Atoms without mass are dropped.
inline ModelPtr gasket_model(double p) {
    require(p >= 0.0 && p <= 1.0, ErrorKind::config, "gasket parameter p must lie in [0,1]");
    std::vector<WeightedAtom> atoms;
    if (p > 0.0) atoms.push_back({gasket_G(), p});
    if (p < 1.0) atoms.push_back({gasket_H(), 1.0 - p});
    return std::make_shared<const RandomIfsModel>(std::move(atoms), unit_triangle(), 1.5);
}

namespace detail {

inline bool same_atom(const IfsAtom& a, const IfsAtom& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Affine2 fa = a.maps[i].affine(), fb = b.maps[i].affine();
        const double err = std::abs(fa.a - fb.a) + std::abs(fa.b - fb.b) + std::abs(fa.c - fb.c) +
                           std::abs(fa.d - fb.d) + distance(fa.t, fb.t);
        if (err > 1e-12) return false;
    }
    return true;
}

}  // namespace detail

/// If the model is a member of the gasket family (atoms G and/or H on the unit
/// triangle), returns p = P(G).
inline std::optional<double> match_gasket(const RandomIfsModel& model) {
    const Polygon tri = unit_triangle();
    if (model.open_set().size() != 3) return std::nullopt;
    for (Vec2 v : tri) {
        bool found = false;
        for (Vec2 w : model.open_set()) found = found || distance(v, w) <= 1e-12;
        if (!found) return std::nullopt;
    }
    const IfsAtom g = gasket_G(), h = gasket_H();
    double p = 0.0;
    for (const auto& wa : model.atoms()) {
        if (detail::same_atom(wa.atom, g))
            p += wa.prob;
        else if (!detail::same_atom(wa.atom, h))
            return std::nullopt;
    }
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace fcl
