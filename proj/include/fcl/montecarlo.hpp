#pragma once

// Monte Carlo estimators over seeded replicas: E C_k(F(ε)), rescaled tables,
// Cesàro averages, the empirical integrand R_{k,L} and the Γ audit.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fcl/error.hpp"
#include "fcl/grid_geometry.hpp"
#include "fcl/ifs_core.hpp"
#include "fcl/renewal.hpp"

namespace fcl {

struct Estimate {
    double mean = 0.0;
    std::optional<double> std_error;  ///< sample sd / √n, absent for n < 2
    std::size_t n = 0;

    double se_or_zero() const { return std_error.value_or(0.0); }
};

struct Schedule {
    double eps_start = 0.0;
    double ratio = 0.5;
    int count = 1;

    double radius(int m) const { return eps_start * std::pow(ratio, m); }
    std::vector<double> radii() const {
        std::vector<double> out;
        for (int m = 0; m < count; ++m) out.push_back(radius(m));
        return out;
    }
    void validate(double min_radius) const {
        require(eps_start > 0.0 && std::isfinite(eps_start), ErrorKind::config, "schedule start must be positive");
        require(ratio > 0.0 && ratio < 1.0, ErrorKind::config, "schedule ratio must lie in (0, 1)");
        require(count >= 1, ErrorKind::config, "schedule needs at least one radius");
        require(radius(count - 1) >= min_radius, ErrorKind::resolution,
                "smallest schedule radius is below the resolvable minimum " + std::to_string(min_radius));
    }

    /// `count` radii ending exactly at eps_end.
    static Schedule ending_at(double eps_end, double ratio, int count) {
        return {eps_end * std::pow(ratio, -(count - 1)), ratio, count};
    }
};

struct RunConfig {
    ModelPtr model;
    Mode mode = Mode::homogeneous;
    int samples = 200;
    std::uint64_t master_seed = 1;
    int cells_per_eps = 32;
    std::vector<int> ks{0, 1, 2};
    int max_depth = kDefaultDepthCap;
    std::int64_t max_cells = kDefaultMaxGridCells;
    int threads = 0;  ///< 0: FCL_THREADS, else hardware concurrency

    void validate() const {
        require(model != nullptr, ErrorKind::config, "run needs a model");
        require(samples >= 1, ErrorKind::config, "samples must be at least 1");
        require(cells_per_eps >= 8, ErrorKind::config, "cells per eps must be at least 8");
        for (int k : ks) require(k >= 0 && k <= 2, ErrorKind::config, "k must be 0, 1 or 2");
    }

    /// Smallest ε whose grid fits the cell budget.
    double min_resolvable_eps() const {
        const Box b = bounding_box(model->open_set());
        const double extent = std::max(b.hi.x - b.lo.x, b.hi.y - b.lo.y);
        const double n = std::sqrt(static_cast<double>(max_cells));
        // (extent + 2ε + 8h) / h ≤ n with h = ε / cells_per_eps
        return extent * cells_per_eps / (n - 2.0 * cells_per_eps - 8.0);
    }
};

// ---------------------------------------------------------------------------
// Replica plumbing

inline int worker_count(int requested, std::size_t jobs) {
    int n = requested;
    if (n <= 0) {
        n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        if (const char* env = std::getenv("FCL_THREADS")) {
            const int cap = std::atoi(env);
            if (cap > 0) n = std::min(n, cap);
        }
    }
    return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(n), jobs)));
}

/// Runs fn(i) for i in [0, n); exceptions are rethrown for the lowest failing i.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    const int workers = worker_count(threads, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Pairwise (tree) sum in index order.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline Estimate make_estimate(std::span<const double> values) {
    Estimate e;
    e.n = values.size();
    if (values.empty()) return e;
    e.mean = pairwise_sum(values) / static_cast<double>(values.size());
    if (values.size() >= 2) {
        std::vector<double> dev(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) dev[i] = (values[i] - e.mean) * (values[i] - e.mean);
        const double var = pairwise_sum(dev) / static_cast<double>(values.size() - 1);
        e.std_error = std::sqrt(var / static_cast<double>(values.size()));
    }
    return e;
}

inline std::uint64_t replica_seed(std::uint64_t master_seed, int replica) {
    return mix(master_seed, static_cast<std::uint64_t>(replica));
}

inline CodeTree replica_tree(const RunConfig& cfg, int replica) {
    const std::uint64_t seed = replica_seed(cfg.master_seed, replica);
    if (cfg.mode == Mode::homogeneous) return CodeTree::homogeneous(Environment(cfg.model, seed, 0));
    return CodeTree::recursive(cfg.model, seed);
}

// ---------------------------------------------------------------------------
// Grid evaluation of one realization

struct Raster {
    GridSpec grid;
    BitMask seeds;
    DistanceField field;
};

/// Seeds of the prefractal at h = ε / cells_per_eps and their distance field.
inline Raster rasterize_tree(const CodeTree& tree, double eps, int cells_per_eps, int max_depth = kDefaultDepthCap,
                             std::int64_t max_cells = kDefaultMaxGridCells) {
    require(eps > 0.0, ErrorKind::domain, "eps must be positive");
    const double h = eps / cells_per_eps;
    Raster out;
    out.grid = GridSpec::covering(bounding_box(tree.model().open_set()), h, eps + 4.0 * h, max_cells);
    out.seeds = BitMask(out.grid);
    for_each_piece(tree, h, [&](PolygonView p) { paint_piece(out.seeds, out.grid, p); }, max_depth);
    out.field = distance_field(out.seeds, out.grid);
    return out;
}

inline CurvatureVector measure_curvature(const CodeTree& tree, double eps, int cells_per_eps,
                                         int max_depth = kDefaultDepthCap,
                                         std::int64_t max_cells = kDefaultMaxGridCells) {
    const Raster r = rasterize_tree(tree, eps, cells_per_eps, max_depth, max_cells);
    return curvature_vector(r.field, eps, r.grid);
}

inline CurvatureVector sample_curvature(const RunConfig& cfg, int replica, double eps) {
    return measure_curvature(replica_tree(cfg, replica), eps, cfg.cells_per_eps, cfg.max_depth, cfg.max_cells);
}

inline std::array<Estimate, 3> expected_curvature(const RunConfig& cfg, double eps) {
    cfg.validate();
    std::vector<CurvatureVector> s(static_cast<std::size_t>(cfg.samples));
    parallel_for(s.size(), cfg.threads, [&](std::size_t m) { s[m] = sample_curvature(cfg, static_cast<int>(m), eps); });
    std::array<Estimate, 3> out;
    std::vector<double> v(s.size());
    for (int k = 0; k < 3; ++k) {
        for (std::size_t m = 0; m < s.size(); ++m) v[m] = s[m][k];
        out[k] = make_estimate(v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rescaled tables and Cesàro averages

struct RescaledRow {
    double eps = 0.0;
    std::array<Estimate, 3> raw;
    std::array<Estimate, 3> rescaled;  ///< ε^{D−k} times raw
};

struct RescaledTable {
    double D = 0.0;
    std::vector<int> ks;
    std::vector<RescaledRow> rows;
    std::vector<std::vector<CurvatureVector>> samples;  ///< [replica][row]

    double rescale(int k, std::size_t row) const { return std::pow(rows[row].eps, D - k); }
};

inline RescaledTable table_from_samples(std::vector<std::vector<CurvatureVector>> samples, std::vector<double> radii,
                                        double D, std::vector<int> ks) {
    RescaledTable t;
    t.D = D;
    t.ks = std::move(ks);
    t.samples = std::move(samples);
    std::vector<double> v(t.samples.size());
    for (std::size_t row = 0; row < radii.size(); ++row) {
        RescaledRow r;
        r.eps = radii[row];
        for (int k = 0; k < 3; ++k) {
            for (std::size_t m = 0; m < t.samples.size(); ++m) v[m] = t.samples[m][row][k];
            r.raw[k] = make_estimate(v);
            const double w = std::pow(r.eps, D - k);
            r.rescaled[k] = {w * r.raw[k].mean, r.raw[k].std_error ? std::optional(w * *r.raw[k].std_error) : std::nullopt,
                             r.raw[k].n};
        }
        t.rows.push_back(r);
    }
    return t;
}

/// Progress callback: (replicas done, total).
using Progress = std::function<void(int, int)>;

inline RescaledTable rescaled_table(const RunConfig& cfg, const Schedule& schedule, const Progress& progress = {}) {
    cfg.validate();
    schedule.validate(cfg.min_resolvable_eps());
    const double D = solve_dimension(*cfg.model);
    const std::vector<double> radii = schedule.radii();
    std::vector<std::vector<CurvatureVector>> samples(static_cast<std::size_t>(cfg.samples));
    std::atomic<int> done{0};
    parallel_for(samples.size(), cfg.threads, [&](std::size_t m) {
        const CodeTree tree = replica_tree(cfg, static_cast<int>(m));
        for (double eps : radii)
            samples[m].push_back(measure_curvature(tree, eps, cfg.cells_per_eps, cfg.max_depth, cfg.max_cells));
        const int d = ++done;
        if (progress) progress(d, cfg.samples);
    });
    return table_from_samples(std::move(samples), radii, D, cfg.ks);
}

/// Trapezoidal average of ε^{D−k} C_k against d(ln ε), normalized by the
/// log-span of the table. The estimate's spread comes from per-replica averages.
inline std::array<Estimate, 3> cesaro_average(const RescaledTable& t) {
    require(t.rows.size() >= 3, ErrorKind::domain, "Cesaro average needs at least 3 rows");
    const std::size_t n = t.rows.size();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::log(t.rows[i].eps);
    const double span = std::abs(u.front() - u.back());
    require(span > 0.0, ErrorKind::domain, "Cesaro average needs distinct radii");
    std::array<Estimate, 3> out;
    for (int k = 0; k < 3; ++k) {
        std::vector<double> per(t.samples.size());
        for (std::size_t m = 0; m < t.samples.size(); ++m) {
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double a = t.rescale(k, i) * t.samples[m][i][k];
                const double b = t.rescale(k, i + 1) * t.samples[m][i + 1][k];
                acc += 0.5 * (a + b) * std::abs(u[i + 1] - u[i]);
            }
            per[m] = acc / span;
        }
        out[k] = make_estimate(per);
    }
    return out;
}

/// Mean of the rescaled values over the last ⌈n/3⌉ rows, per replica.
inline std::array<Estimate, 3> final_third_average(const RescaledTable& t) {
    require(!t.rows.empty(), ErrorKind::domain, "empty table");
    const std::size_t n = t.rows.size(), take = (n + 2) / 3;
    std::array<Estimate, 3> out;
    for (int k = 0; k < 3; ++k) {
        std::vector<double> per(t.samples.size());
        for (std::size_t m = 0; m < t.samples.size(); ++m) {
            double acc = 0.0;
            for (std::size_t i = n - take; i < n; ++i) acc += t.rescale(k, i) * t.samples[m][i][k];
            per[m] = acc / static_cast<double>(take);
        }
        out[k] = make_estimate(per);
    }
    return out;
}

/// Per-replica combination a·Ĉ_{k1} + b·Ĉ_{k2} of Cesàro values (paired spread).
inline Estimate cesaro_combination(const RescaledTable& t, int k1, double a, int k2, double b) {
    require(t.rows.size() >= 3, ErrorKind::domain, "Cesaro average needs at least 3 rows");
    std::vector<double> per(t.samples.size());
    const std::size_t n = t.rows.size();
    const double span = std::abs(std::log(t.rows.front().eps) - std::log(t.rows.back().eps));
    for (std::size_t m = 0; m < t.samples.size(); ++m) {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            auto f = [&](std::size_t row) {
                return a * t.rescale(k1, row) * t.samples[m][row][k1] + b * t.rescale(k2, row) * t.samples[m][row][k2];
            };
            acc += 0.5 * (f(i) + f(i + 1)) * std::abs(std::log(t.rows[i + 1].eps) - std::log(t.rows[i].eps));
        }
        per[m] = acc / span;
    }
    return make_estimate(per);
}

/// Per-replica combination a·Ĉ_{k1} + b·Ĉ_{k2} of final-third values (paired spread).
inline Estimate final_third_combination(const RescaledTable& t, int k1, double a, int k2, double b) {
    require(!t.rows.empty(), ErrorKind::domain, "empty table");
    const std::size_t n = t.rows.size(), take = (n + 2) / 3;
    std::vector<double> per(t.samples.size());
    for (std::size_t m = 0; m < t.samples.size(); ++m) {
        double acc = 0.0;
        for (std::size_t i = n - take; i < n; ++i)
            acc += a * t.rescale(k1, i) * t.samples[m][i][k1] + b * t.rescale(k2, i) * t.samples[m][i][k2];
        per[m] = acc / static_cast<double>(take);
    }
    return make_estimate(per);
}

/// Smallest d with |E C_k| ≤ d·ε^{k−D}·|ln(ε/R)| on every row.
inline double log_bound_constant(const RescaledTable& t, int k, double big_R) {
    double d = 0.0;
    for (const auto& row : t.rows) {
        const double env = std::pow(row.eps, k - t.D) * std::abs(std::log(row.eps / big_R));
        d = std::max(d, std::abs(row.raw[k].mean) / env);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Empirical integrand R_{k,L}(r)

/// R_{k,L}(r) for one realization, all k at once:
///   C_k(F(r)) − Σ_{i : r ≤ L r_i} r_i^k C_k(F^{(i)}(r / r_i)).
inline std::array<double, 3> realized_R(const CodeTree& tree, double L, double r, int cells_per_eps,
                                        int max_depth = kDefaultDepthCap,
                                        std::int64_t max_cells = kDefaultMaxGridCells) {
    require(r > 0.0 && L > 0.0, ErrorKind::domain, "r and L must be positive");
    const CurvatureVector full = measure_curvature(tree, r, cells_per_eps, max_depth, max_cells);
    std::array<double, 3> out{static_cast<double>(full.c0), full.c1, full.c2};
    const auto root = tree.root();
    const IfsAtom& atom = tree.atom(root);
    // in homogeneous mode all children share one set; cache by ratio
    std::vector<std::pair<double, CurvatureVector>> cache;
    for (std::size_t i = 0; i < atom.size(); ++i) {
        const double ri = atom.maps[i].scale;
        if (r > L * ri) continue;
        std::optional<CurvatureVector> cv;
        if (tree.mode() == Mode::homogeneous)
            for (const auto& [s, c] : cache)
                if (s == ri) cv = c;
        if (!cv) {
            cv = measure_curvature(tree.subtree(tree.child(root, i)), r / ri, cells_per_eps, max_depth, max_cells);
            if (tree.mode() == Mode::homogeneous) cache.emplace_back(ri, *cv);
        }
        out[0] -= static_cast<double>(cv->c0);
        out[1] -= ri * cv->c1;
        out[2] -= ri * ri * cv->c2;
    }
    return out;
}

inline std::array<Estimate, 3> empirical_R_all(const RunConfig& cfg, double L, double r) {
    cfg.validate();
    std::vector<std::array<double, 3>> s(static_cast<std::size_t>(cfg.samples));
    parallel_for(s.size(), cfg.threads, [&](std::size_t m) {
        s[m] = realized_R(replica_tree(cfg, static_cast<int>(m)), L, r, cfg.cells_per_eps, cfg.max_depth,
                          cfg.max_cells);
    });
    std::array<Estimate, 3> out;
    std::vector<double> v(s.size());
    for (int k = 0; k < 3; ++k) {
        for (std::size_t m = 0; m < s.size(); ++m) v[m] = s[m][k];
        out[k] = make_estimate(v);
    }
    return out;
}

inline Estimate empirical_R(const RunConfig& cfg, int k, double L, double r) {
    require(k >= 0 && k <= 2, ErrorKind::domain, "k must be 0, 1 or 2");
    return empirical_R_all(cfg, L, r)[k];
}

struct ModeRow {
    double r = 0.0;
    Estimate homogeneous;
    Estimate recursive;

    double difference() const { return homogeneous.mean - recursive.mean; }
    double combined_se() const {
        return std::hypot(homogeneous.se_or_zero(), recursive.se_or_zero());
    }
};

inline std::vector<ModeRow> mode_comparison(const RunConfig& homogeneous, const RunConfig& recursive, int k, double L,
                                            const std::vector<double>& r_grid) {
    require(homogeneous.model == recursive.model, ErrorKind::config, "both modes must use the same model");
    require(homogeneous.mode == Mode::homogeneous && recursive.mode == Mode::recursive, ErrorKind::config,
            "mode_comparison needs one homogeneous and one recursive configuration");
    std::vector<ModeRow> out;
    for (double r : r_grid) out.push_back({r, empirical_R(homogeneous, k, L, r), empirical_R(recursive, k, L, r)});
    return out;
}

// ---------------------------------------------------------------------------
// Γ audit

struct GammaAuditRow {
    double r = 0.0;
    int observed_max = 0;
};

struct GammaAudit {
    std::vector<GammaAuditRow> rows;
    double bound = 0.0;

    int observed_max() const {
        int m = 0;
        for (const auto& r : rows) m = std::max(m, r.observed_max);
        return m;
    }
};

inline GammaAudit gamma_audit(const RunConfig& cfg, const Schedule& schedule) {
    cfg.validate();
    require(cfg.mode == Mode::homogeneous, ErrorKind::unsupported, "the Γ audit runs on homogeneous environments");
    require(schedule.count >= 1 && schedule.eps_start > 0.0 && schedule.ratio > 0.0 && schedule.ratio < 1.0,
            ErrorKind::config, "invalid schedule");
    const std::vector<double> radii = schedule.radii();
    std::vector<std::vector<int>> counts(static_cast<std::size_t>(cfg.samples));
    parallel_for(counts.size(), cfg.threads, [&](std::size_t m) {
        const Environment env(cfg.model, replica_seed(cfg.master_seed, static_cast<int>(m)), 0);
        for (double r : radii) counts[m].push_back(neighbor_overlap_count(env, r));
    });
    GammaAudit out;
    out.bound = gamma_bound(*cfg.model);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        GammaAuditRow row{radii[i], 0};
        for (const auto& c : counts) row.observed_max = std::max(row.observed_max, c[i]);
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace fcl
