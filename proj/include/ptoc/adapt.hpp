#pragma once

#include <optional>
#include <vector>

#include "ptoc/error_norms.hpp"
#include "ptoc/estimator.hpp"
#include "ptoc/mesh.hpp"
#include "ptoc/ocp.hpp"

namespace ptoc {

enum class Marking { Maximum, Bulk, Average };

struct MarkingStrategy {
    Marking kind = Marking::Maximum;
    double theta = 0.5;  // bulk fraction; the maximum strategy uses a fixed 1/2 threshold
};

/// Select elements for refinement from squared combined indicators.
///  - Maximum: every element with value > 0.5 * max (strict).
///  - Bulk: minimal-cardinality set with sum >= theta * total, largest first,
///    ties by lowest element id.
///  - Average: every element with value >= mean.
/// All-zero indicators mark nothing.  Returned ids are sorted ascending.
std::vector<int> mark(const std::vector<double>& combined_sq, const MarkingStrategy& strategy);

struct ConvergenceRecord {
    int iteration = 0;
    long long ndof = 0;  // 2 * interior vertices + elements
    int elements = 0;
    double est_state = 0.0;
    double est_adjoint = 0.0;
    double est_control = 0.0;
    double est_total = 0.0;
    double osc = 0.0;
    double log_factor = 0.0;
    std::optional<double> err_state_inf, err_adjoint, err_control, err_total, effectivity;
    double cost = 0.0;
};

long long count_ndof(const Mesh& mesh);

struct LoopConfig {
    int max_iterations = 30;
    long long ndof_budget = 1000000;
    MarkingStrategy strategy;
    bool uniform = false;  // mark every element instead of using the strategy
    int quad_degree = 7;
    int error_subdiv_depth = 4;
    PdasConfig pdas;
};

struct LoopResult {
    std::vector<ConvergenceRecord> records;
    Mesh mesh;                  // final mesh
    DiscreteSolution solution;  // solution on the final mesh
    IndicatorField indicators;  // indicators on the final mesh
};

/// Solve / estimate / mark / refine until the iteration or Ndof budget is
/// reached (records include the initial mesh as iteration 0).  Errors are
/// reported when the problem carries a closed-form solution.
LoopResult adaptive_loop(const ProblemSpec& spec, const Mesh& initial_mesh, const LoopConfig& cfg);

} // namespace ptoc
