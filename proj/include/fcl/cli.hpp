#pragma once

// Command-line front end: subcommand dispatch, option validation and CSV output.

#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcl/error.hpp"
#include "fcl/exact_gasket.hpp"
#include "fcl/io.hpp"
#include "fcl/montecarlo.hpp"
#include "fcl/renewal.hpp"

namespace fcl::cli {

enum ExitCode : int { ok = 0, config_error = 2, numeric_error = 3, depth_error = 4 };

inline int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::numeric:
        case ErrorKind::resolution:
        case ErrorKind::bounds:
            return numeric_error;
        case ErrorKind::depth_limit:
            return depth_error;
        default:
            return config_error;
    }
}

namespace detail {

struct ModelArgs {
    std::string path;
    std::optional<double> gasket;

    void attach(CLI::App* app) {
        app->add_option("model", path, "model JSON file");
        app->add_option("--gasket", gasket, "use the built-in gasket family with P(G) = p instead of a file");
    }

    ModelPtr load() const {
        require(path.empty() != !gasket.has_value(), ErrorKind::config, "give exactly one of <model> or --gasket");
        return gasket ? gasket_model(*gasket) : io::load_model(path);
    }
};

struct RunArgs {
    int samples = 200;
    std::uint64_t seed = 1;
    int cells_per_eps = 32;
    int max_depth = kDefaultDepthCap;
    int threads = 0;
    std::string mode = "homogeneous";

    void attach(CLI::App* app, bool with_mode = true) {
        app->add_option("--samples", samples, "Monte Carlo replicas")->capture_default_str();
        app->add_option("--seed", seed, "master seed")->capture_default_str();
        app->add_option("--cells-per-eps", cells_per_eps, "grid cells per radius")->capture_default_str();
        app->add_option("--max-depth", max_depth, "construction depth cap")->capture_default_str();
        app->add_option("--threads", threads, "worker threads (0: FCL_THREADS or all cores)")->capture_default_str();
        if (with_mode)
            app->add_option("--mode", mode, "homogeneous | recursive")
                ->check(CLI::IsMember({"homogeneous", "recursive"}))
                ->capture_default_str();
    }

    RunConfig config(ModelPtr model) const {
        RunConfig cfg;
        cfg.model = std::move(model);
        cfg.samples = samples;
        cfg.master_seed = seed;
        cfg.cells_per_eps = cells_per_eps;
        cfg.max_depth = max_depth;
        cfg.threads = threads;
        require(max_depth >= 1, ErrorKind::config, "--max-depth must be at least 1");
        cfg.mode = mode == "recursive" ? Mode::recursive : Mode::homogeneous;
        cfg.validate();
        return cfg;
    }
};

struct Output {
    std::string path;
    void attach(CLI::App* app) { app->add_option("--out", path, "output CSV (default: standard output)"); }
    void emit(const std::string& csv, std::ostream& out) const {
        if (path.empty())
            out << csv;
        else
            io::write_atomic(path, csv);
    }
};

inline Schedule parse_schedule(const std::vector<double>& v) {
    require(v.size() == 3, ErrorKind::config, "--schedule expects START,RATIO,COUNT");
    require(v[2] >= 1 && v[2] == std::floor(v[2]), ErrorKind::config, "schedule count must be a positive integer");
    return {v[0], v[1], static_cast<int>(v[2])};
}

inline std::string fmt(double v) { return io::format_number(v); }
inline std::string fmt(const std::optional<double>& v) { return v ? io::format_number(*v) : std::string(); }

inline std::vector<double> midpoint_grid(double L, int points) {
    std::vector<double> r;
    for (int j = 0; j < points; ++j) r.push_back((j + 0.5) / points * L);
    return r;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Mean fractal curvatures of random self-similar sets", "fcl"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("--quiet", quiet, "suppress progress output");

    // dimension
    detail::ModelArgs dim_model;
    auto* dim = app.add_subcommand("dimension", "D, D_H, eta and lattice span of a model");
    dim_model.attach(dim);

    // closed-form
    detail::ModelArgs cf_model;
    int cf_k = 0;
    auto* cf = app.add_subcommand("closed-form", "closed-form mean fractal curvature of the gasket family");
    cf_model.attach(cf);
    cf->add_option("--k", cf_k, "order 0, 1 or 2")->required()->check(CLI::IsMember({0, 1, 2}));

    // r-curve
    detail::ModelArgs rc_model;
    detail::RunArgs rc_run;
    detail::Output rc_out;
    int rc_k = 0, rc_points = 8;
    std::optional<double> rc_L;
    auto* rc = app.add_subcommand("r-curve", "empirical R_{k,L}(r) on a midpoint grid of (0, L)");
    rc_model.attach(rc);
    rc_run.attach(rc);
    rc_out.attach(rc);
    rc->add_option("--k", rc_k, "order 0, 1 or 2")->check(CLI::IsMember({0, 1, 2}))->capture_default_str();
    rc->add_option("--L", rc_L, "cut-off L (default: sqrt(3)/6)");
    rc->add_option("--points", rc_points, "number of r values")->check(CLI::PositiveNumber)->capture_default_str();

    // simulate
    detail::ModelArgs sim_model;
    detail::RunArgs sim_run;
    detail::Output sim_out;
    std::vector<double> sim_schedule;
    std::vector<int> sim_ks{0, 1, 2};
    auto* sim = app.add_subcommand("simulate", "rescaled curvature table with a trailing Cesaro row");
    sim_model.attach(sim);
    sim_run.attach(sim);
    sim_out.attach(sim);
    sim->add_option("--schedule", sim_schedule, "START,RATIO,COUNT")->required()->delimiter(',')->expected(3);
    sim->add_option("--k-set", sim_ks, "orders to report, e.g. 0,1,2")->delimiter(',');

    // compare-modes
    detail::ModelArgs cm_model;
    detail::RunArgs cm_run;
    detail::Output cm_out;
    int cm_k = 0, cm_points = 8;
    std::optional<double> cm_L;
    auto* cm = app.add_subcommand("compare-modes", "empirical R_{k,L} for homogeneous vs recursive constructions");
    cm_model.attach(cm);
    cm_run.attach(cm, false);
    cm_out.attach(cm);
    cm->add_option("--k", cm_k, "order 0, 1 or 2")->check(CLI::IsMember({0, 1, 2}))->capture_default_str();
    cm->add_option("--L", cm_L, "cut-off L (default: sqrt(3)/6)");
    cm->add_option("--points", cm_points, "number of r values")->check(CLI::PositiveNumber)->capture_default_str();

    // audit
    detail::ModelArgs au_model;
    detail::RunArgs au_run;
    detail::Output au_out;
    std::vector<double> au_schedule;
    auto* au = app.add_subcommand("audit", "observed stopping-set neighbour counts against the Gamma bound");
    au_model.attach(au);
    au_run.attach(au, false);
    au_out.attach(au);
    au->add_option("--schedule", au_schedule, "START,RATIO,COUNT")->required()->delimiter(',')->expected(3);

    // probe
    detail::ModelArgs pr_model;
    detail::Output pr_out;
    double pr_r = 0.05, pr_tol = -1.0;
    int pr_points = 200, pr_cells = 32;
    std::uint64_t pr_seed = 1;
    std::string pr_mode = "homogeneous", pr_mask, pr_field;
    auto* pr = app.add_subcommand("probe", "regularity probe J along the level set {d = r}");
    pr_model.attach(pr);
    pr_out.attach(pr);
    pr->add_option("--r", pr_r, "radius")->capture_default_str();
    pr->add_option("--points", pr_points, "probe points")->check(CLI::PositiveNumber)->capture_default_str();
    pr->add_option("--tol", pr_tol, "near-minimizer tolerance (default: one cell)");
    pr->add_option("--seed", pr_seed, "replica seed")->capture_default_str();
    pr->add_option("--cells-per-eps", pr_cells, "grid cells per radius")->capture_default_str();
    pr->add_option("--mode", pr_mode, "homogeneous | recursive")->check(CLI::IsMember({"homogeneous", "recursive"}));
    pr->add_option("--dump-mask", pr_mask, "write the parallel set as PBM");
    pr->add_option("--dump-field", pr_field, "write the distance field as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return config_error;
    }

    const auto log = [&](const std::string& msg) {
        if (!quiet) err << msg << '\n';
    };
    const auto progress = [&](int done, int total) {
        if (!quiet && (done == total || done % std::max(1, total / 10) == 0))
            err << "  replicas " << done << "/" << total << '\n';
    };

    try {
        if (dim->parsed()) {
            const ModelPtr model = dim_model.load();
            for (const auto& w : model->warnings()) log("warning: " + w);
            const ScalingData s = compute_scaling(*model);
            char buf[64];
            auto line = [&](const char* name, double v) {
                std::snprintf(buf, sizeof buf, "%.10f", v);
                out << name << " = " << buf << '\n';
            };
            line("D", s.D);
            line("D_H", s.D_H);
            line("eta", s.eta);
            if (s.lattice_span)
                line("lattice_span", *s.lattice_span);
            else
                out << "lattice_span = none\n";
        } else if (cf->parsed()) {
            const ModelPtr model = cf_model.load();
            const auto p = match_gasket(*model);
            require(p.has_value(), ErrorKind::config, "closed forms exist only for the gasket family");
            const ScalingData s = compute_scaling(*model);
            out << io::format_number(gasket::closed_form_frac(cf_k, gasket::GasketParams(*p), s)) << '\n';
        } else if (rc->parsed()) {
            const ModelPtr model = rc_model.load();
            const RunConfig cfg = rc_run.config(model);
            const double L = rc_L.value_or(gasket::kL);
            require(L > 0.0, ErrorKind::config, "--L must be positive");
            const auto p = match_gasket(*model);
            std::optional<PiecewiseCurve> analytic;
            if (p && rc_k <= 1 && std::abs(L - gasket::kL) < 1e-12)
                analytic = gasket::r_curve(rc_k, gasket::GasketParams(*p));
            io::CsvWriter csv({"r", "k", "emp_mean", "emp_stderr", "analytic"});
            for (double r : detail::midpoint_grid(L, rc_points)) {
                log("r = " + detail::fmt(r));
                const Estimate e = empirical_R(cfg, rc_k, L, r);
                csv.row_strings({detail::fmt(r), std::to_string(rc_k), detail::fmt(e.mean), detail::fmt(e.std_error),
                                 analytic ? detail::fmt((*analytic)(r)) : std::string()});
            }
            rc_out.emit(csv.str(), out);
        } else if (sim->parsed()) {
            const ModelPtr model = sim_model.load();
            RunConfig cfg = sim_run.config(model);
            cfg.ks = sim_ks;
            cfg.validate();
            const Schedule sched = detail::parse_schedule(sim_schedule);
            sched.validate(cfg.min_resolvable_eps());
            log("simulating " + std::to_string(cfg.samples) + " replicas over " + std::to_string(sched.count) +
                " radii");
            const RescaledTable t = rescaled_table(cfg, sched, progress);
            io::CsvWriter csv({"eps", "k", "raw_mean", "raw_stderr", "rescaled_mean", "rescaled_stderr", "kind"});
            for (const auto& row : t.rows)
                for (int k : cfg.ks)
                    csv.row_strings({detail::fmt(row.eps), std::to_string(k), detail::fmt(row.raw[k].mean),
                                     detail::fmt(row.raw[k].std_error), detail::fmt(row.rescaled[k].mean),
                                     detail::fmt(row.rescaled[k].std_error), "row"});
            if (t.rows.size() >= 3) {
                const auto ces = cesaro_average(t);
                for (int k : cfg.ks)
                    csv.row_strings({detail::fmt(t.rows.back().eps), std::to_string(k), "", "",
                                     detail::fmt(ces[k].mean), detail::fmt(ces[k].std_error), "cesaro"});
            } else {
                log("warning: fewer than 3 radii, no Cesaro row");
            }
            sim_out.emit(csv.str(), out);
        } else if (cm->parsed()) {
            const ModelPtr model = cm_model.load();
            RunConfig hom = cm_run.config(model);
            RunConfig rec = hom;
            rec.mode = Mode::recursive;
            const double L = cm_L.value_or(gasket::kL);
            require(L > 0.0, ErrorKind::config, "--L must be positive");
            io::CsvWriter csv({"r", "k", "homogeneous_mean", "homogeneous_stderr", "recursive_mean",
                               "recursive_stderr", "difference", "combined_stderr"});
            for (const auto& row : mode_comparison(hom, rec, cm_k, L, detail::midpoint_grid(L, cm_points)))
                csv.row_strings({detail::fmt(row.r), std::to_string(cm_k), detail::fmt(row.homogeneous.mean),
                                 detail::fmt(row.homogeneous.std_error), detail::fmt(row.recursive.mean),
                                 detail::fmt(row.recursive.std_error), detail::fmt(row.difference()),
                                 detail::fmt(row.combined_se())});
            cm_out.emit(csv.str(), out);
        } else if (au->parsed()) {
            const ModelPtr model = au_model.load();
            const RunConfig cfg = au_run.config(model);
            const Schedule sched = detail::parse_schedule(au_schedule);
            const GammaAudit a = gamma_audit(cfg, sched);
            io::CsvWriter csv({"r", "observed_max", "gamma_bound"});
            for (const auto& row : a.rows)
                csv.row_strings({detail::fmt(row.r), std::to_string(row.observed_max), detail::fmt(a.bound)});
            au_out.emit(csv.str(), out);
            if (a.observed_max() > a.bound) log("warning: observed count exceeds the bound");
        } else if (pr->parsed()) {
            const ModelPtr model = pr_model.load();
            require(pr_r > 0.0, ErrorKind::config, "--r must be positive");
            require(pr_cells >= 8, ErrorKind::config, "cells per eps must be at least 8");
            const CodeTree tree = pr_mode == "recursive" ? CodeTree::recursive(model, replica_seed(pr_seed, 0))
                                                         : CodeTree::homogeneous(Environment(model, replica_seed(pr_seed, 0), 0));
            const Raster ras = rasterize_tree(tree, pr_r, pr_cells);
            const double tol = pr_tol >= 0.0 ? pr_tol : ras.grid.h;
            const auto samples = probe_level_set(ras.seeds, ras.field, ras.grid, pr_r, pr_points, tol);
            io::CsvWriter csv({"x", "y", "J_estimate"});
            double jmin = std::numeric_limits<double>::infinity();
            for (const auto& s : samples) {
                csv.row_strings({detail::fmt(s.x.x), detail::fmt(s.x.y), detail::fmt(s.J)});
                jmin = std::min(jmin, s.J);
            }
            pr_out.emit(csv.str(), out);
            if (!pr_mask.empty()) io::write_atomic(pr_mask, io::to_pbm(parallel_mask(ras.field, pr_r)));
            if (!pr_field.empty()) io::write_atomic(pr_field, io::field_csv(ras.field, ras.grid));
            if (samples.empty())
                log("level set empty at r = " + detail::fmt(pr_r));
            else
                log("min J = " + detail::fmt(jmin) + (jmin <= tol ? "  (near-critical radius)" : "  (regular)"));
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    }
    return ok;
}

}  // namespace fcl::cli
