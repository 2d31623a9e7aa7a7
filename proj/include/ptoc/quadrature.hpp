#pragma once

#include <array>
#include <vector>

namespace ptoc {

/// Quadrature rule on the reference triangle, stored in barycentric
/// coordinates with weights summing to one, so that
///   \int_T f  ~=  |T| * sum_q w_q f(x_q).
struct QuadratureRule {
    int degree = 0;  // all polynomials up to this total degree are integrated exactly
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }
};

/// Collapsed Gauss-Legendre product rule of at least the requested degree.
/// All nodes are strictly interior and all weights positive.
QuadratureRule make_triangle_rule(int degree);

/// Gauss-Legendre nodes/weights on [0,1] (weights sum to one).
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace ptoc
