#pragma once

#include <vector>

#include "ptoc/fem.hpp"
#include "ptoc/mesh.hpp"
#include "ptoc/problem.hpp"

namespace ptoc {

/// Distance weight rho used by the adjoint error norm: with one observation
/// point rho = |x-z|^alpha everywhere; with several it is |x-z|^alpha inside
/// the radius d_z/2 around each z and one elsewhere.
struct WeightRho {
    std::vector<Point2> points;
    double alpha = 1.5;
    double d_z = 0.0;  // min of the pairwise distances and the boundary distance
};

WeightRho make_weight(const std::vector<Point2>& obs, double alpha, Domain domain);
double eval_rho(const WeightRho& w, Point2 x);

/// Signed normal-derivative jumps of a P1 field across every side (zero on
/// boundary sides).
struct JumpTrace {
    std::vector<double> side_jump;
};

JumpTrace compute_jumps(const Mesh& mesh, const P1Field& v);

/// Max-type state indicator  h^2 |f+u|_inf + h |jump|_inf(interior sides).
std::vector<double> indicator_state(const Mesh& mesh, const ProblemSpec& spec, const P1Field& y,
                                    const P0Field& u, const QuadratureRule& rule);

/// Weighted adjoint indicator (squared form under the root):
///   h D^alpha ||jump||^2_{L2(interior sides)} + sum_{z in T} h^alpha |y(z)-target|^2.
std::vector<double> indicator_adjoint(const Mesh& mesh, const ProblemSpec& spec, const P1Field& p,
                                      const P1Field& y, const std::vector<ElementGeometry>& geo);

/// L2 defect between the control and the clamped adjoint scaling.
std::vector<double> indicator_control(const Mesh& mesh, const ProblemSpec& spec, const P0Field& u,
                                      const P1Field& p, const QuadratureRule& rule);

struct IndicatorField {
    std::vector<double> state, adjoint, control;
    std::vector<double> combined_sq;  // per-element sum of the three squares
    double global_state = 0.0;        // max over elements
    double global_adjoint = 0.0;      // l2 sum
    double global_control = 0.0;      // l2 sum
    double total = 0.0;               // sum of the three globals
};

IndicatorField combine(const std::vector<double>& state, const std::vector<double>& adjoint,
                       const std::vector<double>& control);

/// max over elements of h^2 ||f - mean(f)||_inf.
double oscillation(const Mesh& mesh, const ScalarField& f, const QuadratureRule& rule);

/// |log(1 / min element diameter)|.
double log_factor(const Mesh& mesh);

} // namespace ptoc
