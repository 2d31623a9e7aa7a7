#pragma once

#include "ptoc/estimator.hpp"
#include "ptoc/fem.hpp"
#include "ptoc/mesh.hpp"

namespace ptoc {

/// Max over all vertices and mapped quadrature nodes of |field - exact|.
double norm_linf_error(const Mesh& mesh, const P1Field& field, const ScalarField& exact,
                       const QuadratureRule& rule);

/// Weighted H1 seminorm  sqrt( sum_T int_T rho |grad field - exact_grad|^2 ).
/// Elements whose closure touches an observation point are integrated on a
/// uniform 4-way sub-triangulation of the given depth (the rule's nodes are
/// strictly interior, so the singular point is never sampled).
double norm_weighted_h1_error(const Mesh& mesh, const P1Field& field,
                              const VectorField& exact_grad, const WeightRho& weight,
                              const QuadratureRule& rule, int subdiv_depth = 4);

/// Elementwise L2 distance between a piecewise-constant control and a
/// reference function.
double norm_l2_control_error(const Mesh& mesh, const P0Field& u, const ScalarField& exact,
                             const QuadratureRule& rule);

struct ErrorReport {
    double state_inf = 0.0;
    double adjoint_weighted = 0.0;
    double control_l2 = 0.0;
    double total = 0.0;  // root sum of squares
};

ErrorReport compute_errors(const Mesh& mesh, const ProblemSpec& spec, const P1Field& y,
                           const P1Field& p, const P0Field& u, const QuadratureRule& rule,
                           int subdiv_depth = 4);

/// estimator total / true total; throws when the true error vanishes.
double effectivity(double estimator_total, double error_total);

} // namespace ptoc
