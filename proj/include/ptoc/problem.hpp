#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ptoc/fem.hpp"
#include "ptoc/mesh.hpp"

namespace ptoc {

/// Closed-form optimal triple used for error reporting.
struct ExactSolution {
    ScalarField state;           // optimal state
    VectorField state_gradient;
    ScalarField state_laplacian;
    ScalarField adjoint;         // optimal adjoint (fundamental-solution sum)
    VectorField adjoint_gradient;
    ScalarField control;         // clamped -adjoint/lambda
};

/// Data of one tracking problem: minimize
///   1/2 sum_z |y(z) - target_z|^2 + lambda/2 ||u||^2_{L2}
/// over controls a <= u <= b subject to -Lap y = f + u with Dirichlet data.
struct ProblemSpec {
    Domain domain = Domain::UnitSquare;
    std::vector<Point2> obs_points;
    std::vector<double> targets;
    double lower = 0.0;   // control bound a
    double upper = 0.0;   // control bound b
    double lambda = 1.0;  // control cost
    double alpha = 1.5;   // weight exponent, in (0,2)
    ScalarField forcing;
    DirichletData state_bc;
    DirichletData adjoint_bc;
    std::optional<ExactSolution> exact;
};

/// Throws std::invalid_argument on inconsistent data (a >= b, lambda <= 0,
/// alpha outside (0,2), duplicate or non-interior observation points).
void validate_problem(const ProblemSpec& spec);

/// Benchmark configurations 1..4.  1: sinusoidal forcing, two observation
/// points, no closed form.  2-4: manufactured solutions built from the
/// log-kernel adjoint (4 lives on the L-shape with a corner-singular state).
ProblemSpec make_example(int number);

} // namespace ptoc
