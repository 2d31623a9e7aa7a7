#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "ptoc/runner.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"adaptive solver for box-constrained pointwise tracking control problems"};

    std::string config_path;
    ptoc::RunConfig cfg;
    bool uniform = false;

    app.add_option("--config", config_path, "key=value configuration file read before flags");
    auto* example = app.add_option("--example", cfg.example, "problem to solve (1-4)");
    auto* alpha = app.add_option("--alpha", cfg.alpha, "weight exponent in (0,2)");
    auto* marking = app.add_option("--marking", cfg.marking, "maximum, bulk or average");
    auto* theta = app.add_option("--theta", cfg.theta, "bulk parameter in (0,1]");
    auto* max_iters = app.add_option("--max-iters", cfg.max_iters, "adaptive iteration cap");
    auto* budget = app.add_option("--ndof-budget", cfg.ndof_budget, "stop once ndof reaches this");
    auto* unif = app.add_flag("--uniform", uniform, "refine every element instead of marking");
    auto* out = app.add_option("--out", cfg.out, "output directory");
    auto* subdiv = app.add_option("--initial-subdivisions", cfg.initial_subdivisions,
                                  "cells per side of the initial mesh");
    auto* prerefine = app.add_option("--prerefine-rounds", cfg.prerefine_rounds,
                                     "rounds available to separate observation patches");
    auto* quad = app.add_option("--quad-degree", cfg.quad_degree, "quadrature exactness degree");
    auto* depth = app.add_option("--error-subdiv-depth", cfg.error_subdiv_depth,
                                 "subdivision depth for weighted error integrals");
    auto* cg_tol = app.add_option("--cg-tol", cfg.cg_tol, "relative tolerance of the cg solver");
    auto* pdas_tol = app.add_option("--pdas-tol", cfg.pdas_tol, "active-set residual tolerance");
    auto* pdas_max = app.add_option("--pdas-max-outer", cfg.pdas_max_outer,
                                    "active-set iteration cap");
    auto* seed = app.add_option("--seed", cfg.seed, "seed recorded for reproducibility");
    auto* window = app.add_option("--slope-window", cfg.slope_window,
                                  "records used for the fitted convergence slope");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            ptoc::RunConfig from_file = ptoc::parse_config_file(config_path);
            // flags given on the command line override the file
            if (!*example)
                cfg.example = from_file.example;
            if (!*alpha)
                cfg.alpha = from_file.alpha;
            if (!*marking)
                cfg.marking = from_file.marking;
            if (!*theta)
                cfg.theta = from_file.theta;
            if (!*max_iters)
                cfg.max_iters = from_file.max_iters;
            if (!*budget)
                cfg.ndof_budget = from_file.ndof_budget;
            if (!*unif)
                uniform = from_file.uniform;
            if (!*out)
                cfg.out = from_file.out;
            if (!*subdiv)
                cfg.initial_subdivisions = from_file.initial_subdivisions;
            if (!*prerefine)
                cfg.prerefine_rounds = from_file.prerefine_rounds;
            if (!*quad)
                cfg.quad_degree = from_file.quad_degree;
            if (!*depth)
                cfg.error_subdiv_depth = from_file.error_subdiv_depth;
            if (!*cg_tol)
                cfg.cg_tol = from_file.cg_tol;
            if (!*pdas_tol)
                cfg.pdas_tol = from_file.pdas_tol;
            if (!*pdas_max)
                cfg.pdas_max_outer = from_file.pdas_max_outer;
            if (!*seed)
                cfg.seed = from_file.seed;
            if (!*window)
                cfg.slope_window = from_file.slope_window;
        }
        cfg.uniform = uniform;
        const ptoc::LoopResult res = ptoc::run(cfg);
        const ptoc::ConvergenceRecord& last = res.records.back();
        std::printf("iterations %d  ndof %lld  elements %d  est_total %.6e\n",
                    last.iteration + 1, last.ndof, last.elements, last.est_total);
        if (last.err_total)
            std::printf("err_total %.6e  effectivity %.4f\n", *last.err_total,
                        last.effectivity.value_or(0.0));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
