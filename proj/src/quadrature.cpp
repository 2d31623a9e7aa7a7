#include "ptoc/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace ptoc {

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    if (n < 1)
        throw std::invalid_argument("gauss_legendre_01: n must be positive");
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n over [-1,1]
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

QuadratureRule make_triangle_rule(int degree)
{
    if (degree < 1)
        throw std::invalid_argument("make_triangle_rule: degree must be positive");
    // Duffy map (s,t) -> (s, t(1-s)) carries the Jacobian (1-s), so exactness
    // up to total degree d needs 2n-1 >= d+1 Gauss points per direction.
    const int n = (degree + 3) / 2;
    std::vector<double> gx, gw;
    gauss_legendre_01(n, gx, gw);

    QuadratureRule rule;
    rule.degree = degree;
    rule.points.reserve(n * n);
    rule.weights.reserve(n * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = gx[i];
            const double y = gx[j] * (1.0 - gx[i]);
            rule.points.push_back({1.0 - x - y, x, y});
            // factor 2 rescales to a unit weight sum on the reference triangle
            rule.weights.push_back(2.0 * gw[i] * gw[j] * (1.0 - gx[i]));
        }
    }
    return rule;
}

} // namespace ptoc
