#include "ptoc/error_norms.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace ptoc {

double norm_linf_error(const Mesh& mesh, const P1Field& field, const ScalarField& exact,
                       const QuadratureRule& rule)
{
    double err = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        err = std::max(err, std::abs(field.values[v] - exact(mesh.vertices[v])));
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto& e = mesh.elements[t];
        const auto pts = map_quadrature_points(mesh, t, rule);
        for (int q = 0; q < rule.size(); ++q) {
            double fq = 0.0;
            for (int i = 0; i < 3; ++i)
                fq += rule.points[q][i] * field.values[e[i]];
            err = std::max(err, std::abs(fq - exact(pts[q])));
        }
    }
    return err;
}

namespace {

double cell_quadrature(const std::array<Point2, 3>& c, const QuadratureRule& rule,
                       const std::function<double(Point2)>& f)
{
    const double area = 0.5 * cross(c[1] - c[0], c[2] - c[0]);
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        const Point2 x = l[0] * c[0] + l[1] * c[1] + l[2] * c[2];
        acc += rule.weights[q] * f(x);
    }
    return area * acc;
}

double subdivided_quadrature(const std::array<Point2, 3>& c, int depth, const QuadratureRule& rule,
                             const std::function<double(Point2)>& f)
{
    if (depth == 0)
        return cell_quadrature(c, rule, f);
    const Point2 m01 = midpoint(c[0], c[1]);
    const Point2 m12 = midpoint(c[1], c[2]);
    const Point2 m20 = midpoint(c[2], c[0]);
    return subdivided_quadrature({c[0], m01, m20}, depth - 1, rule, f) +
           subdivided_quadrature({m01, c[1], m12}, depth - 1, rule, f) +
           subdivided_quadrature({m20, m12, c[2]}, depth - 1, rule, f) +
           subdivided_quadrature({m01, m12, m20}, depth - 1, rule, f);
}

bool closure_touches(const std::array<Point2, 3>& c, Point2 z)
{
    const double a = 0.5 * cross(c[1] - c[0], c[2] - c[0]);
    const double b0 = 0.5 * cross(c[1] - z, c[2] - z) / a;
    const double b1 = 0.5 * cross(c[2] - z, c[0] - z) / a;
    const double b2 = 0.5 * cross(c[0] - z, c[1] - z) / a;
    return b0 >= -1e-12 && b1 >= -1e-12 && b2 >= -1e-12;
}

} // namespace

double norm_weighted_h1_error(const Mesh& mesh, const P1Field& field,
                              const VectorField& exact_grad, const WeightRho& weight,
                              const QuadratureRule& rule, int subdiv_depth)
{
    double total = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto c = mesh.element_points(t);
        const Point2 gh = p1_gradient(mesh, field, t);
        auto integrand = [&](Point2 x) {
            const Point2 d = gh - exact_grad(x);
            return eval_rho(weight, x) * dot(d, d);
        };
        bool singular = false;
        for (const Point2& z : weight.points)
            if (closure_touches(c, z)) {
                singular = true;
                break;
            }
        total += singular ? subdivided_quadrature(c, subdiv_depth, rule, integrand)
                          : cell_quadrature(c, rule, integrand);
    }
    return std::sqrt(total);
}

double norm_l2_control_error(const Mesh& mesh, const P0Field& u, const ScalarField& exact,
                             const QuadratureRule& rule)
{
    double total = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto pts = map_quadrature_points(mesh, t, rule);
        double acc = 0.0;
        for (int q = 0; q < rule.size(); ++q) {
            const double d = u.values[t] - exact(pts[q]);
            acc += rule.weights[q] * d * d;
        }
        total += mesh.element_area(t) * acc;
    }
    return std::sqrt(total);
}

ErrorReport compute_errors(const Mesh& mesh, const ProblemSpec& spec, const P1Field& y,
                           const P1Field& p, const P0Field& u, const QuadratureRule& rule,
                           int subdiv_depth)
{
    if (!spec.exact)
        throw std::invalid_argument("compute_errors: problem has no closed-form solution");
    const WeightRho weight = make_weight(spec.obs_points, spec.alpha, spec.domain);
    ErrorReport r;
    r.state_inf = norm_linf_error(mesh, y, spec.exact->state, rule);
    r.adjoint_weighted =
        norm_weighted_h1_error(mesh, p, spec.exact->adjoint_gradient, weight, rule, subdiv_depth);
    r.control_l2 = norm_l2_control_error(mesh, u, spec.exact->control, rule);
    r.total = std::sqrt(r.state_inf * r.state_inf + r.adjoint_weighted * r.adjoint_weighted +
                        r.control_l2 * r.control_l2);
    return r;
}

double effectivity(double estimator_total, double error_total)
{
    if (error_total <= 0.0)
        throw std::invalid_argument("effectivity: true error is zero");
    return estimator_total / error_total;
}

} // namespace ptoc
