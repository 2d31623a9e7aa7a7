#include "ptoc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ptoc/ocp.hpp"

namespace ptoc {

WeightRho make_weight(const std::vector<Point2>& obs, double alpha, Domain domain)
{
    if (obs.empty())
        throw std::invalid_argument("make_weight: needs at least one observation point");
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("make_weight: alpha must lie in (0,2)");
    WeightRho w;
    w.points = obs;
    w.alpha = alpha;
    double d = std::numeric_limits<double>::infinity();
    for (const Point2& z : obs)
        d = std::min(d, domain_boundary_distance(domain, z));
    for (std::size_t i = 0; i < obs.size(); ++i)
        for (std::size_t j = i + 1; j < obs.size(); ++j)
            d = std::min(d, dist(obs[i], obs[j]));
    w.d_z = d;
    return w;
}

double eval_rho(const WeightRho& w, Point2 x)
{
    if (w.points.size() == 1)
        return std::pow(dist(x, w.points[0]), w.alpha);
    for (const Point2& z : w.points) {
        const double r = dist(x, z);
        if (r < 0.5 * w.d_z)
            return std::pow(r, w.alpha);
    }
    return 1.0;
}

JumpTrace compute_jumps(const Mesh& mesh, const P1Field& v)
{
    JumpTrace jumps;
    jumps.side_jump.assign(mesh.sides.size(), 0.0);
    for (std::size_t s = 0; s < mesh.sides.size(); ++s) {
        const Side& side = mesh.sides[s];
        if (side.right == -1)
            continue;
        const Point2 tangent = mesh.vertices[side.v1] - mesh.vertices[side.v0];
        const double len = norm(tangent);
        const Point2 normal{tangent.y / len, -tangent.x / len};
        const Point2 diff = p1_gradient(mesh, v, side.left) - p1_gradient(mesh, v, side.right);
        jumps.side_jump[s] = dot(normal, diff);
    }
    return jumps;
}

std::vector<double> indicator_state(const Mesh& mesh, const ProblemSpec& spec, const P1Field& y,
                                    const P0Field& u, const QuadratureRule& rule)
{
    const JumpTrace jumps = compute_jumps(mesh, y);
    std::vector<double> out(mesh.num_elements(), 0.0);
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const double h = mesh.element_diameter(t);
        const double ut = u.values.empty() ? 0.0 : u.values[t];
        double fmax = 0.0;
        for (const Point2& q : map_quadrature_points(mesh, t, rule))
            fmax = std::max(fmax, std::abs(spec.forcing(q) + ut));
        for (const Point2& q : mesh.element_points(t))
            fmax = std::max(fmax, std::abs(spec.forcing(q) + ut));
        double jmax = 0.0;
        for (int k = 0; k < 3; ++k) {
            const int s = mesh.element_sides[t][k];
            if (mesh.sides[s].right != -1)
                jmax = std::max(jmax, std::abs(jumps.side_jump[s]));
        }
        out[t] = h * h * fmax + h * jmax;
    }
    return out;
}

std::vector<double> indicator_adjoint(const Mesh& mesh, const ProblemSpec& spec, const P1Field& p,
                                      const P1Field& y, const std::vector<ElementGeometry>& geo)
{
    if (static_cast<int>(geo.size()) != mesh.num_elements())
        throw std::invalid_argument("indicator_adjoint: geometry size mismatch");
    const JumpTrace jumps = compute_jumps(mesh, p);

    std::vector<double> sq(mesh.num_elements(), 0.0);
    for (int t = 0; t < mesh.num_elements(); ++t) {
        if (!std::isfinite(geo[t].d_obs))
            throw std::invalid_argument("indicator_adjoint: geometry lacks observation distances");
        double side_sum = 0.0;
        for (int k = 0; k < 3; ++k) {
            const int s = mesh.element_sides[t][k];
            if (mesh.sides[s].right != -1)
                side_sum += jumps.side_jump[s] * jumps.side_jump[s] * mesh.side_length(s);
        }
        sq[t] = geo[t].diameter * std::pow(geo[t].d_obs, spec.alpha) * side_sum;
    }

    // each observation point charges exactly one element (the lowest id
    // among those containing it)
    for (std::size_t k = 0; k < spec.obs_points.size(); ++k) {
        const std::vector<int> holders = elements_containing(mesh, spec.obs_points[k]);
        if (holders.empty())
            continue;  // point outside the triangulated region: no mismatch term
        const int t = holders.front();
        double yz = 0.0;
        {
            const auto pts = mesh.element_points(t);
            const auto& e = mesh.elements[t];
            // barycentric interpolation within the holder element
            const double aT = 0.5 * cross(pts[1] - pts[0], pts[2] - pts[0]);
            const Point2 x = spec.obs_points[k];
            const double b0 = 0.5 * cross(pts[1] - x, pts[2] - x) / aT;
            const double b1 = 0.5 * cross(pts[2] - x, pts[0] - x) / aT;
            const double b2 = 0.5 * cross(pts[0] - x, pts[1] - x) / aT;
            yz = b0 * y.values[e[0]] + b1 * y.values[e[1]] + b2 * y.values[e[2]];
        }
        const double mismatch = yz - spec.targets[k];
        sq[t] += std::pow(geo[t].diameter, spec.alpha) * mismatch * mismatch;
    }

    std::vector<double> out(mesh.num_elements());
    for (int t = 0; t < mesh.num_elements(); ++t)
        out[t] = std::sqrt(sq[t]);
    return out;
}

std::vector<double> indicator_control(const Mesh& mesh, const ProblemSpec& spec, const P0Field& u,
                                      const P1Field& p, const QuadratureRule& rule)
{
    std::vector<double> out(mesh.num_elements(), 0.0);
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto pts = map_quadrature_points(mesh, t, rule);
        const auto& e = mesh.elements[t];
        double acc = 0.0;
        for (int q = 0; q < rule.size(); ++q) {
            double pq = 0.0;
            for (int i = 0; i < 3; ++i)
                pq += rule.points[q][i] * p.values[e[i]];
            const double d = u.values[t] - project_control(-pq / spec.lambda, spec.lower, spec.upper);
            acc += rule.weights[q] * d * d;
        }
        out[t] = std::sqrt(mesh.element_area(t) * acc);
    }
    return out;
}

IndicatorField combine(const std::vector<double>& state, const std::vector<double>& adjoint,
                       const std::vector<double>& control)
{
    if (state.size() != adjoint.size() || state.size() != control.size())
        throw std::invalid_argument("combine: indicator size mismatch");
    IndicatorField f;
    f.state = state;
    f.adjoint = adjoint;
    f.control = control;
    f.combined_sq.resize(state.size());
    double adj_sq = 0.0, ctl_sq = 0.0;
    for (std::size_t t = 0; t < state.size(); ++t) {
        f.combined_sq[t] =
            state[t] * state[t] + adjoint[t] * adjoint[t] + control[t] * control[t];
        f.global_state = std::max(f.global_state, state[t]);
        adj_sq += adjoint[t] * adjoint[t];
        ctl_sq += control[t] * control[t];
    }
    f.global_adjoint = std::sqrt(adj_sq);
    f.global_control = std::sqrt(ctl_sq);
    f.total = f.global_state + f.global_adjoint + f.global_control;
    return f;
}

double oscillation(const Mesh& mesh, const ScalarField& f, const QuadratureRule& rule)
{
    const P0Field mean = p0_projection(mesh, f, rule);
    double osc = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        double dev = 0.0;
        for (const Point2& q : map_quadrature_points(mesh, t, rule))
            dev = std::max(dev, std::abs(f(q) - mean.values[t]));
        for (const Point2& q : mesh.element_points(t))
            dev = std::max(dev, std::abs(f(q) - mean.values[t]));
        const double h = mesh.element_diameter(t);
        osc = std::max(osc, h * h * dev);
    }
    return osc;
}

double log_factor(const Mesh& mesh)
{
    double hmin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < mesh.num_elements(); ++t)
        hmin = std::min(hmin, mesh.element_diameter(t));
    return std::abs(std::log(1.0 / hmin));
}

} // namespace ptoc
