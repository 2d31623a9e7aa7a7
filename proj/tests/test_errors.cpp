#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ptoc/error_norms.hpp"
#include "ptoc/fem.hpp"
#include "ptoc/mesh.hpp"
#include "ptoc/problem.hpp"

#include "test_util.hpp"

using namespace ptoc;

namespace {

P1Field interpolate(const Mesh& m, const ScalarField& g)
{
    P1Field f;
    f.values.reserve(m.num_vertices());
    for (const Point2& v : m.vertices)
        f.values.push_back(g(v));
    return f;
}

Point2 random_point_in_domain(Domain d, std::mt19937& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (d == Domain::UnitSquare)
        return {unit(rng), unit(rng)};
    std::uniform_real_distribution<double> wide(-1.0, 1.0);
    for (;;) {
        const Point2 p{wide(rng), wide(rng)};
        if (!(p.x > 0.0 && p.y < 0.0))
            return p;
    }
}

} // namespace

TEST_CASE("benchmark problem 1: sinusoidal forcing, no closed form")
{
    const ProblemSpec spec = make_example(1);
    CHECK(spec.domain == Domain::UnitSquare);
    REQUIRE(spec.obs_points.size() == 2);
    CHECK(spec.obs_points[0].x == doctest::Approx(0.75));
    CHECK(spec.obs_points[0].y == doctest::Approx(0.75));
    CHECK(spec.obs_points[1].x == doctest::Approx(0.25));
    CHECK(spec.obs_points[1].y == doctest::Approx(0.25));
    REQUIRE(spec.targets.size() == 2);
    CHECK(spec.targets[0] == doctest::Approx(1.0));
    CHECK(spec.targets[1] == doctest::Approx(-1.0));
    CHECK(spec.lower == doctest::Approx(-0.5));
    CHECK(spec.upper == doctest::Approx(0.5));
    CHECK(spec.lambda == doctest::Approx(1.0));
    CHECK(spec.alpha == doctest::Approx(1.5));
    CHECK_FALSE(spec.exact.has_value());

    // f = sin(2 pi x) cos(2 pi y) x^3 at hand-picked points
    CHECK(spec.forcing({0.25, 0.5}) == doctest::Approx(-1.0 / 64.0).epsilon(1e-12));
    CHECK(spec.forcing({0.5, 0.3}) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(spec.state_bc.value({0.3, 0.0}) == doctest::Approx(0.0));
    CHECK(spec.adjoint_bc.value({1.0, 0.4}) == doctest::Approx(0.0));
}

TEST_CASE("benchmark problem 2: product-bubble state on the unit square")
{
    const ProblemSpec spec = make_example(2);
    CHECK(spec.domain == Domain::UnitSquare);
    REQUIRE(spec.obs_points.size() == 1);
    CHECK(spec.obs_points[0].x == doctest::Approx(0.5));
    CHECK(spec.obs_points[0].y == doctest::Approx(0.5));
    CHECK(spec.lower == doctest::Approx(-0.4));
    CHECK(spec.upper == doctest::Approx(-0.2));
    CHECK(spec.lambda == doctest::Approx(1.0));
    REQUIRE(spec.exact.has_value());

    // state 32 x y (1-x)(1-y): value 2 at the center, target = value - 1
    CHECK(spec.exact->state({0.5, 0.5}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(spec.targets[0] == doctest::Approx(1.0).epsilon(1e-14));

    // adjoint -log|x-z|/(2 pi): at (0.25,0.25) the distance is 2^{-3/2}
    const double p_star = 1.5 * std::log(2.0) / (2.0 * M_PI);
    CHECK(spec.exact->adjoint({0.25, 0.25}) == doctest::Approx(p_star).epsilon(1e-14));

    // -p/lambda = -0.1655 clips to the upper bound -0.2
    CHECK(spec.exact->control({0.25, 0.25}) == doctest::Approx(-0.2).epsilon(1e-14));

    // forcing = -lap(state) - control = 24 + 0.2
    CHECK(spec.forcing({0.25, 0.25}) == doctest::Approx(24.2).epsilon(1e-13));

    // traces follow the exact fields
    CHECK(spec.state_bc.value({0.3, 0.0}) == doctest::Approx(0.0).scale(1.0));
    CHECK(spec.adjoint_bc.value({1.0, 0.5}) ==
          doctest::Approx(spec.exact->adjoint({1.0, 0.5})));
}

TEST_CASE("benchmark problem 3: bilinear state, four observation points")
{
    const ProblemSpec spec = make_example(3);
    REQUIRE(spec.obs_points.size() == 4);
    REQUIRE(spec.targets.size() == 4);
    CHECK(spec.lower == doctest::Approx(-1.2));
    CHECK(spec.upper == doctest::Approx(-0.7));
    REQUIRE(spec.exact.has_value());

    // state 2.75 - 2x - 2y + 4xy at the two right-hand points
    CHECK(spec.exact->state({0.75, 0.75}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(spec.exact->state({0.75, 0.25}) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(spec.targets[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(spec.targets[1] == doctest::Approx(0.5).epsilon(1e-14));

    // harmonic state: forcing reduces to -control, inside [0.7, 1.2]
    const double f_mid = spec.forcing({0.4, 0.6});
    CHECK(f_mid >= 0.7 - 1e-12);
    CHECK(f_mid <= 1.2 + 1e-12);
}

TEST_CASE("benchmark problem 4: corner-singular state on the L-shape")
{
    const ProblemSpec spec = make_example(4);
    CHECK(spec.domain == Domain::LShape);
    REQUIRE(spec.obs_points.size() == 1);
    CHECK(spec.obs_points[0].x == doctest::Approx(0.5));
    CHECK(spec.obs_points[0].y == doctest::Approx(0.5));
    CHECK(spec.lower == doctest::Approx(-0.4));
    CHECK(spec.upper == doctest::Approx(-0.2));
    REQUIRE(spec.exact.has_value());

    // r^{2/3} sin(2 theta/3) at (0.5,0.5): r = 2^{-1/2}, theta = pi/4
    const double at_z = std::pow(2.0, -4.0 / 3.0);
    CHECK(spec.exact->state({0.5, 0.5}) == doctest::Approx(at_z).epsilon(1e-14));
    CHECK(spec.targets[0] == doctest::Approx(at_z - 1.0).epsilon(1e-14));

    // the state vanishes on both legs that meet at the reentrant corner
    CHECK(spec.exact->state({0.3, 0.0}) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(spec.exact->state({0.0, -0.4}) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("make_example rejects unknown configuration numbers")
{
    CHECK_THROWS_AS(make_example(0), std::invalid_argument);
    CHECK_THROWS_AS(make_example(5), std::invalid_argument);
}

TEST_CASE("manufactured data is internally consistent")
{
    std::mt19937 rng(404);
    for (int number : {2, 3, 4}) {
        const ProblemSpec spec = make_example(number);
        REQUIRE(spec.exact.has_value());

        // unit point-source coefficients: state(z) - target = 1 at every z
        for (std::size_t k = 0; k < spec.obs_points.size(); ++k) {
            const double coeff = spec.exact->state(spec.obs_points[k]) - spec.targets[k];
            CHECK(coeff == doctest::Approx(1.0).epsilon(1e-12));
        }

        // the optimal control respects its own box everywhere
        for (int s = 0; s < 2000; ++s) {
            const Point2 x = random_point_in_domain(spec.domain, rng);
            const double u = spec.exact->control(x);
            if (u < spec.lower - 1e-12 || u > spec.upper + 1e-12) {
                CHECK(u >= spec.lower - 1e-12);
                CHECK(u <= spec.upper + 1e-12);
                break;
            }
        }

        // control = clamp(-adjoint/lambda) pointwise
        for (int s = 0; s < 200; ++s) {
            const Point2 x = random_point_in_domain(spec.domain, rng);
            const double v = std::min(spec.upper,
                                      std::max(spec.lower, -spec.exact->adjoint(x) / spec.lambda));
            CHECK(spec.exact->control(x) == doctest::Approx(v).epsilon(1e-13));
        }
    }
}

TEST_CASE("forcing closes the state equation under refinement")
{
    // solve -lap y = f + P0(control) with the manufactured data; the discrete
    // solution must approach the closed-form state as the mesh refines
    const ProblemSpec spec = make_example(2);
    const QuadratureRule rule = make_triangle_rule(7);
    double prev = 0.0;
    double last = 0.0;
    for (int s : {4, 8, 16}) {
        const Mesh m = build_initial_mesh(spec.domain, s);
        const SparseSym A = assemble_stiffness(m);
        const P0Field u = p0_projection(m, spec.exact->control, rule);
        const DenseVector load = assemble_load(m, spec.forcing, u, rule);
        const P1Field y = solve_dirichlet(A, load, spec.state_bc, m, 1e-12);
        const double err = norm_linf_error(m, y, spec.exact->state, rule);
        if (s > 4)
            CHECK(err < prev);
        prev = err;
        last = err;
    }
    CHECK(last < 0.05);
}

TEST_CASE("pointwise maximum error norm")
{
    const QuadratureRule rule = make_triangle_rule(7);
    const Mesh m = build_initial_mesh(Domain::UnitSquare, 2);

    SUBCASE("vanishes when the field interpolates an affine function")
    {
        auto g = [](Point2 p) { return 0.3 * p.x - 1.1 * p.y + 0.25; };
        const P1Field f = interpolate(m, g);
        CHECK(norm_linf_error(m, f, g, rule) <= 1e-13);
    }

    SUBCASE("constant offset is recovered exactly")
    {
        P1Field zero;
        zero.values.assign(m.num_vertices(), 0.0);
        auto one = [](Point2) { return 1.0; };
        CHECK(norm_linf_error(m, zero, one, rule) == doctest::Approx(1.0).epsilon(1e-14));
    }

    SUBCASE("quadratic interpolation gap is sampled near its true maximum")
    {
        // on the two-triangle square the interpolant of x^2 equals x on the
        // lower triangle; the gap x - x^2 peaks at 1/4
        const Mesh two = testutil::two_triangle_square();
        auto g = [](Point2 p) { return p.x * p.x; };
        const P1Field f = interpolate(two, g);
        const double err = norm_linf_error(two, f, g, rule);
        CHECK(err >= 0.2);
        CHECK(err <= 0.25 + 1e-12);
    }
}

TEST_CASE("weighted gradient error norm")
{
    const QuadratureRule rule = make_triangle_rule(7);

    SUBCASE("vanishes on an exactly represented gradient")
    {
        const Mesh m = build_initial_mesh(Domain::UnitSquare, 2);
        auto g = [](Point2 p) { return 2.0 * p.x - 0.5 * p.y; };
        const P1Field f = interpolate(m, g);
        auto grad = [](Point2) { return Point2{2.0, -0.5}; };
        const WeightRho w = make_weight({{0.5, 0.5}}, 1.5, Domain::UnitSquare);
        CHECK(norm_weighted_h1_error(m, f, grad, w, rule) <= 1e-13);
    }

    SUBCASE("unit weight reduces to the plain seminorm")
    {
        // two remote points make rho = 1 on the whole square
        const Mesh m = build_initial_mesh(Domain::UnitSquare, 2);
        const P1Field f = interpolate(m, [](Point2 p) { return p.x; });
        auto zero_grad = [](Point2) { return Point2{0.0, 0.0}; };
        WeightRho w;
        w.points = {{10.0, 10.0}, {-10.0, -10.0}};
        w.alpha = 1.5;
        w.d_z = 0.1;
        const double norm = norm_weighted_h1_error(m, f, zero_grad, w, rule);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("singular integrand at an observation vertex is resolved stably")
    {
        // gradient ~ 1/r around z with weight r^alpha: integrable, and the
        // subdivided quadrature must have essentially converged by depth 3
        const Mesh m = build_initial_mesh(Domain::UnitSquare, 2);
        const Point2 z{0.5, 0.5};
        const WeightRho w = make_weight({z}, 1.5, Domain::UnitSquare);
        P1Field zero;
        zero.values.assign(m.num_vertices(), 0.0);
        auto grad = [z](Point2 p) {
            const Point2 d = p - z;
            const double r2 = dot(d, d);
            return (1.0 / r2) * d;
        };
        const double coarse = norm_weighted_h1_error(m, zero, grad, w, rule, 3);
        const double fine = norm_weighted_h1_error(m, zero, grad, w, rule, 7);
        CHECK(coarse > 0.0);
        CHECK(std::abs(coarse - fine) / fine < 0.01);
    }
}

TEST_CASE("piecewise-constant L2 error norm")
{
    const QuadratureRule rule = make_triangle_rule(7);
    const Mesh m = build_initial_mesh(Domain::UnitSquare, 2);

    SUBCASE("zero against the matching constant")
    {
        P0Field u;
        u.values.assign(m.num_elements(), 0.7);
        auto g = [](Point2) { return 0.7; };
        CHECK(norm_l2_control_error(m, u, g, rule) <= 1e-14);
    }

    SUBCASE("unit offset over the unit square")
    {
        P0Field u;
        u.values.assign(m.num_elements(), 0.0);
        auto g = [](Point2) { return 1.0; };
        CHECK(norm_l2_control_error(m, u, g, rule) == doctest::Approx(1.0).epsilon(1e-13));
    }

    SUBCASE("linear reference integrates to 1/sqrt(3)")
    {
        P0Field u;
        u.values.assign(m.num_elements(), 0.0);
        auto g = [](Point2 p) { return p.x; };
        const double expected = 1.0 / std::sqrt(3.0);
        CHECK(norm_l2_control_error(m, u, g, rule) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("combined error report")
{
    const QuadratureRule rule = make_triangle_rule(7);
    // configuration 3 on a three-way split: no observation point is a mesh
    // vertex, so interpolating the log-singular adjoint stays finite
    const ProblemSpec spec = make_example(3);
    const Mesh m = build_initial_mesh(spec.domain, 3);

    const P1Field y = interpolate(m, spec.exact->state);
    const P1Field p = interpolate(m, spec.exact->adjoint);
    const P0Field u = p0_projection(m, spec.exact->control, rule);

    const ErrorReport r = compute_errors(m, spec, y, p, u, rule);
    CHECK(r.state_inf > 0.0);
    CHECK(r.adjoint_weighted > 0.0);
    CHECK(r.control_l2 > 0.0);
    const double rss = std::sqrt(r.state_inf * r.state_inf +
                                 r.adjoint_weighted * r.adjoint_weighted +
                                 r.control_l2 * r.control_l2);
    CHECK(r.total == doctest::Approx(rss).epsilon(1e-14));

    // a problem without a closed form cannot be scored
    const ProblemSpec blind = make_example(1);
    P0Field u0;
    u0.values.assign(m.num_elements(), 0.0);
    CHECK_THROWS_AS(compute_errors(m, blind, y, p, u0, rule), std::invalid_argument);
}

TEST_CASE("effectivity index")
{
    CHECK(effectivity(1.0, 0.5) == doctest::Approx(2.0));
    CHECK(effectivity(0.3, 0.3) == doctest::Approx(1.0));
    CHECK_THROWS_AS(effectivity(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(effectivity(1.0, -0.1), std::invalid_argument);
}
