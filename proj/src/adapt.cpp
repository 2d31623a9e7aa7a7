#include "ptoc/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ptoc {

std::vector<int> mark(const std::vector<double>& combined_sq, const MarkingStrategy& strategy)
{
    const int n = static_cast<int>(combined_sq.size());
    for (double v : combined_sq)
        if (v < 0.0 || !std::isfinite(v))
            throw std::invalid_argument("mark: indicators must be finite and nonnegative");

    std::vector<int> marked;
    switch (strategy.kind) {
    case Marking::Maximum: {
        const double mx = n ? *std::max_element(combined_sq.begin(), combined_sq.end()) : 0.0;
        for (int t = 0; t < n; ++t)
            if (combined_sq[t] > 0.5 * mx)
                marked.push_back(t);
        break;
    }
    case Marking::Average: {
        const double total = std::accumulate(combined_sq.begin(), combined_sq.end(), 0.0);
        if (total <= 0.0)
            break;
        const double mean = total / n;
        for (int t = 0; t < n; ++t)
            if (combined_sq[t] >= mean)
                marked.push_back(t);
        break;
    }
    case Marking::Bulk: {
        if (!(strategy.theta > 0.0 && strategy.theta <= 1.0))
            throw std::invalid_argument("mark: bulk fraction must lie in (0,1]");
        const double total = std::accumulate(combined_sq.begin(), combined_sq.end(), 0.0);
        if (total <= 0.0)
            break;
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (combined_sq[a] != combined_sq[b])
                return combined_sq[a] > combined_sq[b];
            return a < b;
        });
        double acc = 0.0;
        for (int t : order) {
            marked.push_back(t);
            acc += combined_sq[t];
            if (acc >= strategy.theta * total)
                break;
        }
        std::sort(marked.begin(), marked.end());
        break;
    }
    }
    return marked;
}

long long count_ndof(const Mesh& mesh)
{
    return 2LL * mesh.num_interior_vertices() + mesh.num_elements();
}

LoopResult adaptive_loop(const ProblemSpec& spec, const Mesh& initial_mesh, const LoopConfig& cfg)
{
    const QuadratureRule rule = make_triangle_rule(cfg.quad_degree);

    LoopResult res;
    res.mesh = initial_mesh;
    DiscreteSolution warm;
    bool have_warm = false;

    for (int it = 0;; ++it) {
        if (!check_patch_assumption(res.mesh, spec.obs_points))
            throw std::runtime_error("adaptive_loop: patch condition violated after refinement");

        res.solution = pdas_solve(spec, res.mesh, cfg.pdas, have_warm ? &warm : nullptr);

        const auto geo = compute_geometry(res.mesh, spec.obs_points);
        res.indicators = combine(
            indicator_state(res.mesh, spec, res.solution.state, res.solution.control, rule),
            indicator_adjoint(res.mesh, spec, res.solution.adjoint, res.solution.state, geo),
            indicator_control(res.mesh, spec, res.solution.control, res.solution.adjoint, rule));

        ConvergenceRecord rec;
        rec.iteration = it;
        rec.ndof = count_ndof(res.mesh);
        rec.elements = res.mesh.num_elements();
        rec.est_state = res.indicators.global_state;
        rec.est_adjoint = res.indicators.global_adjoint;
        rec.est_control = res.indicators.global_control;
        rec.est_total = res.indicators.total;
        rec.osc = oscillation(res.mesh, spec.forcing, rule);
        rec.log_factor = log_factor(res.mesh);
        rec.cost = compute_cost(spec, res.mesh, res.solution);
        if (spec.exact) {
            const ErrorReport err =
                compute_errors(res.mesh, spec, res.solution.state, res.solution.adjoint,
                               res.solution.control, rule, cfg.error_subdiv_depth);
            rec.err_state_inf = err.state_inf;
            rec.err_adjoint = err.adjoint_weighted;
            rec.err_control = err.control_l2;
            rec.err_total = err.total;
            rec.effectivity = effectivity(res.indicators.total, err.total);
        }
        res.records.push_back(rec);

        if (it >= cfg.max_iterations || rec.ndof >= cfg.ndof_budget)
            break;

        std::vector<int> marked;
        if (cfg.uniform) {
            marked.resize(res.mesh.num_elements());
            std::iota(marked.begin(), marked.end(), 0);
        } else {
            marked = mark(res.indicators.combined_sq, cfg.strategy);
        }
        if (marked.empty())
            break;

        std::vector<int> ancestor;
        Mesh next = refine(res.mesh, marked, ancestor);
        warm = transfer_solution(res.solution, ancestor);
        have_warm = true;
        res.mesh = std::move(next);
    }
    return res;
}

} // namespace ptoc
