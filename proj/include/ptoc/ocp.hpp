#pragma once

#include <optional>
#include <vector>

#include "ptoc/fem.hpp"
#include "ptoc/problem.hpp"

namespace ptoc {

/// Clamp v into [a, b].
double project_control(double v, double a, double b);

struct PdasConfig {
    std::optional<double> active_set_weight;  // defaults to lambda
    double outer_tol = 1e-9;
    int max_outer = 100;
    double linear_tol = 1e-10;
    int linear_max_iter = 0;  // 0 -> 20 * dim
    int quad_degree = 7;
};

struct DiscreteSolution {
    P1Field state;
    P0Field control;
    P1Field adjoint;
    P0Field multiplier;
    std::vector<char> active_lower, active_upper;
    int outer_iterations = 0;
    double residual = 0.0;  // stationarity residual at termination
};

/// State solve -Lap y = f + u with the problem's Dirichlet data.
P1Field solve_state(const ProblemSpec& spec, const Mesh& mesh, const P0Field& u,
                    double tol_rel = 1e-10, int max_iter = 0, int quad_degree = 7);

/// Adjoint solve with point sources weighted by the tracking mismatch of y.
P1Field solve_adjoint(const ProblemSpec& spec, const Mesh& mesh, const P1Field& y,
                      double tol_rel = 1e-10, int max_iter = 0);

/// Primal-dual active set iteration for the control-constrained problem.
/// A warm start supplies the initial control/multiplier (its fields must be
/// sized for this mesh); otherwise the iteration starts from the clamped zero
/// control.  Throws on cycling or when max_outer is exhausted.
DiscreteSolution pdas_solve(const ProblemSpec& spec, const Mesh& mesh, const PdasConfig& cfg,
                            const DiscreteSolution* warm_start = nullptr);

/// Map control/multiplier onto a refined mesh by ancestor inheritance
/// (piecewise-constant interpolation).
DiscreteSolution transfer_solution(const DiscreteSolution& sol, const std::vector<int>& ancestor);

/// Tracking functional 1/2 sum_z |y(z)-target|^2 + lambda/2 ||u||^2.
double compute_cost(const ProblemSpec& spec, const Mesh& mesh, const DiscreteSolution& sol);

/// Variational-inequality pairing (p + lambda u, u' - u)_{L2} for a
/// piecewise-constant direction u'.
double vi_pairing(const ProblemSpec& spec, const Mesh& mesh, const DiscreteSolution& sol,
                  const P0Field& direction);

} // namespace ptoc
