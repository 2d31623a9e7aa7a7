#include "ptoc/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace ptoc {

namespace {

double clamp_control(double v, double a, double b)
{
    return std::min(b, std::max(a, v));
}

// -1/(2 pi) sum_z log|x - z|, the free-space kernel with unit sources.
ScalarField log_kernel_sum(std::vector<Point2> zs)
{
    return [zs](Point2 x) {
        double acc = 0.0;
        for (const Point2& z : zs)
            acc += std::log(dist(x, z));
        return -acc / (2.0 * M_PI);
    };
}

VectorField log_kernel_sum_gradient(std::vector<Point2> zs)
{
    return [zs](Point2 x) {
        Point2 acc{0.0, 0.0};
        for (const Point2& z : zs) {
            const Point2 d = x - z;
            const double r2 = dot(d, d);
            acc = acc + (1.0 / r2) * d;
        }
        return (-1.0 / (2.0 * M_PI)) * acc;
    };
}

// Assemble a manufactured problem around a given state: the adjoint is the
// log-kernel sum with unit sources, the control its clamp, the forcing and
// targets whatever makes the optimality system hold.
ProblemSpec manufactured(Domain domain, std::vector<Point2> zs, double a, double b,
                         ScalarField state, VectorField state_grad, ScalarField state_lap)
{
    ProblemSpec spec;
    spec.domain = domain;
    spec.obs_points = zs;
    spec.lower = a;
    spec.upper = b;
    spec.lambda = 1.0;
    spec.alpha = 1.5;

    // unit source coefficients force target_z = state(z) - 1
    for (const Point2& z : zs)
        spec.targets.push_back(state(z) - 1.0);

    ExactSolution ex;
    ex.state = state;
    ex.state_gradient = state_grad;
    ex.state_laplacian = state_lap;
    ex.adjoint = log_kernel_sum(zs);
    ex.adjoint_gradient = log_kernel_sum_gradient(zs);
    const double lambda = spec.lambda;
    const ScalarField adjoint = ex.adjoint;
    ex.control = [adjoint, lambda, a, b](Point2 x) {
        return clamp_control(-adjoint(x) / lambda, a, b);
    };

    const ScalarField control = ex.control;
    spec.forcing = [state_lap, control](Point2 x) { return -state_lap(x) - control(x); };
    spec.state_bc = DirichletData{state};
    spec.adjoint_bc = DirichletData{ex.adjoint};
    spec.exact = std::move(ex);
    return spec;
}

} // namespace

void validate_problem(const ProblemSpec& spec)
{
    if (!(spec.lower < spec.upper))
        throw std::invalid_argument("problem: control bounds must satisfy a < b");
    if (!(spec.lambda > 0.0))
        throw std::invalid_argument("problem: lambda must be positive");
    if (!(spec.alpha > 0.0 && spec.alpha < 2.0))
        throw std::invalid_argument("problem: alpha must lie in (0,2)");
    if (spec.obs_points.empty() || spec.obs_points.size() != spec.targets.size())
        throw std::invalid_argument("problem: observation points and targets must match");
    for (std::size_t i = 0; i < spec.obs_points.size(); ++i) {
        if (domain_boundary_distance(spec.domain, spec.obs_points[i]) <= 0.0)
            throw std::invalid_argument("problem: observation points must be interior");
        for (std::size_t j = i + 1; j < spec.obs_points.size(); ++j)
            if (dist(spec.obs_points[i], spec.obs_points[j]) == 0.0)
                throw std::invalid_argument("problem: observation points must be distinct");
    }
}

ProblemSpec make_example(int number)
{
    switch (number) {
    case 1: {
        ProblemSpec spec;
        spec.domain = Domain::UnitSquare;
        spec.obs_points = {{0.75, 0.75}, {0.25, 0.25}};
        spec.targets = {1.0, -1.0};
        spec.lower = -0.5;
        spec.upper = 0.5;
        spec.lambda = 1.0;
        spec.alpha = 1.5;
        spec.forcing = [](Point2 p) {
            return std::sin(2.0 * M_PI * p.x) * std::cos(2.0 * M_PI * p.y) * p.x * p.x * p.x;
        };
        spec.state_bc = DirichletData::zero();
        spec.adjoint_bc = DirichletData::zero();
        validate_problem(spec);
        return spec;
    }
    case 2: {
        auto state = [](Point2 p) { return 32.0 * p.x * (1.0 - p.x) * p.y * (1.0 - p.y); };
        auto grad = [](Point2 p) {
            return Point2{32.0 * (1.0 - 2.0 * p.x) * p.y * (1.0 - p.y),
                          32.0 * p.x * (1.0 - p.x) * (1.0 - 2.0 * p.y)};
        };
        auto lap = [](Point2 p) {
            return -64.0 * (p.y * (1.0 - p.y) + p.x * (1.0 - p.x));
        };
        ProblemSpec spec = manufactured(Domain::UnitSquare, {{0.5, 0.5}}, -0.4, -0.2,
                                        state, grad, lap);
        validate_problem(spec);
        return spec;
    }
    case 3: {
        auto state = [](Point2 p) { return 2.75 - 2.0 * p.x - 2.0 * p.y + 4.0 * p.x * p.y; };
        auto grad = [](Point2 p) {
            return Point2{-2.0 + 4.0 * p.y, -2.0 + 4.0 * p.x};
        };
        auto lap = [](Point2) { return 0.0; };
        ProblemSpec spec = manufactured(
            Domain::UnitSquare,
            {{0.75, 0.75}, {0.75, 0.25}, {0.25, 0.75}, {0.25, 0.25}}, -1.2, -0.7,
            state, grad, lap);
        validate_problem(spec);
        return spec;
    }
    case 4: {
        // corner-singular harmonic state r^{2/3} sin(2 theta / 3), theta in [0, 3 pi/2]
        auto state = [](Point2 p) {
            const double r = norm(p);
            if (r == 0.0)
                return 0.0;
            double theta = std::atan2(p.y, p.x);
            if (theta < 0.0)
                theta += 2.0 * M_PI;
            return std::pow(r, 2.0 / 3.0) * std::sin(2.0 * theta / 3.0);
        };
        auto grad = [](Point2 p) {
            const double r2 = dot(p, p);
            if (r2 == 0.0)
                return Point2{0.0, 0.0};
            double theta = std::atan2(p.y, p.x);
            if (theta < 0.0)
                theta += 2.0 * M_PI;
            const double s = std::sin(2.0 * theta / 3.0);
            const double c = std::cos(2.0 * theta / 3.0);
            const double scale = (2.0 / 3.0) * std::pow(r2, -2.0 / 3.0);
            return Point2{scale * (p.x * s - p.y * c), scale * (p.y * s + p.x * c)};
        };
        auto lap = [](Point2) { return 0.0; };  // harmonic away from the corner
        ProblemSpec spec = manufactured(Domain::LShape, {{0.5, 0.5}}, -0.4, -0.2,
                                        state, grad, lap);
        validate_problem(spec);
        return spec;
    }
    default:
        throw std::invalid_argument("make_example: number must be 1..4");
    }
}

} // namespace ptoc
