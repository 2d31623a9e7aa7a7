#include "ptoc/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ptoc {

double project_control(double v, double a, double b)
{
    return std::min(b, std::max(a, v));
}

P1Field solve_state(const ProblemSpec& spec, const Mesh& mesh, const P0Field& u,
                    double tol_rel, int max_iter, int quad_degree)
{
    const SparseSym A = assemble_stiffness(mesh);
    const QuadratureRule rule = make_triangle_rule(quad_degree);
    const DenseVector load = assemble_load(mesh, spec.forcing, u, rule);
    return solve_dirichlet(A, load, spec.state_bc, mesh, tol_rel, max_iter);
}

P1Field solve_adjoint(const ProblemSpec& spec, const Mesh& mesh, const P1Field& y,
                      double tol_rel, int max_iter)
{
    std::vector<double> coeffs(spec.obs_points.size());
    for (std::size_t k = 0; k < spec.obs_points.size(); ++k)
        coeffs[k] = eval_p1(mesh, y, spec.obs_points[k]) - spec.targets[k];
    const SparseSym A = assemble_stiffness(mesh);
    const DenseVector load = assemble_dirac_load(mesh, spec.obs_points, coeffs);
    return solve_dirichlet(A, load, spec.adjoint_bc, mesh, tol_rel, max_iter);
}

namespace {

// Gaussian elimination with partial pivoting for the small coupled system in
// the point values (dimension = number of observation points).
std::vector<double> solve_small_dense(std::vector<std::vector<double>> M, std::vector<double> rhs)
{
    const int n = static_cast<int>(rhs.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int r = k + 1; r < n; ++r)
            if (std::abs(M[r][k]) > std::abs(M[piv][k]))
                piv = r;
        if (std::abs(M[piv][k]) < 1e-300)
            throw std::runtime_error("pdas_solve: coupled point-value system is singular");
        std::swap(M[k], M[piv]);
        std::swap(rhs[k], rhs[piv]);
        for (int r = k + 1; r < n; ++r) {
            const double f = M[r][k] / M[k][k];
            for (int c = k; c < n; ++c)
                M[r][c] -= f * M[k][c];
            rhs[r] -= f * rhs[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int k = n - 1; k >= 0; --k) {
        double acc = rhs[k];
        for (int c = k + 1; c < n; ++c)
            acc -= M[k][c] * x[c];
        x[k] = acc / M[k][k];
    }
    return x;
}

std::string pack_active(const std::vector<char>& lo, const std::vector<char>& up)
{
    std::string s(lo.size(), '0');
    for (std::size_t t = 0; t < lo.size(); ++t)
        s[t] = static_cast<char>('0' + (lo[t] ? 1 : 0) + (up[t] ? 2 : 0));
    return s;
}

} // namespace

DiscreteSolution pdas_solve(const ProblemSpec& spec, const Mesh& mesh, const PdasConfig& cfg,
                            const DiscreteSolution* warm_start)
{
    const int ne = mesh.num_elements();
    const int m = static_cast<int>(spec.obs_points.size());
    const double lam = spec.lambda;
    const double a = spec.lower, b = spec.upper;
    const double c = cfg.active_set_weight.value_or(lam);
    if (!(lam > 0.0))
        throw std::invalid_argument("pdas_solve: lambda must be positive");

    const SparseSym A = assemble_stiffness(mesh);
    const DirichletSolver solver(A, mesh);
    const QuadratureRule rule = make_triangle_rule(cfg.quad_degree);
    const std::vector<double> gy = interpolate_boundary(mesh, spec.state_bc);
    const std::vector<double> gp = interpolate_boundary(mesh, spec.adjoint_bc);
    const std::vector<double> zero_bc(mesh.num_vertices(), 0.0);
    const DenseVector load_f = assemble_load(mesh, spec.forcing, P0Field{}, rule);
    const DenseVector zero_load(mesh.num_vertices(), 0.0);

    std::vector<double> area(ne);
    for (int t = 0; t < ne; ++t)
        area[t] = mesh.element_area(t);

    // mesh-level precomputation: discrete kernels of the point sources and
    // the boundary lift of the adjoint data
    std::vector<P1Field> kernel(m);
    for (int k = 0; k < m; ++k) {
        const DenseVector ez = assemble_dirac_load(mesh, {spec.obs_points[k]}, {1.0});
        kernel[k] = solver.solve(ez, zero_bc, cfg.linear_tol, cfg.linear_max_iter);
    }
    const P1Field p_lift = solver.solve(zero_load, gp, cfg.linear_tol, cfg.linear_max_iter);

    std::vector<std::vector<double>> avg_kernel(m, std::vector<double>(ne));
    std::vector<double> avg_lift(ne);
    for (int t = 0; t < ne; ++t) {
        avg_lift[t] = element_avg_p1(mesh, p_lift, t);
        for (int k = 0; k < m; ++k)
            avg_kernel[k][t] = element_avg_p1(mesh, kernel[k], t);
    }

    // observation points located once; field evaluation is then a dot product
    std::vector<PointLocation> obs_loc(m);
    for (int k = 0; k < m; ++k) {
        const auto loc = locate_point(mesh, spec.obs_points[k]);
        if (!loc)
            throw std::runtime_error("pdas_solve: observation point outside the mesh");
        obs_loc[k] = *loc;
    }
    auto eval_at_obs = [&](const P1Field& f, int k) {
        double v = 0.0;
        for (int i = 0; i < 3; ++i)
            v += obs_loc[k].bary[i] * f.values[mesh.elements[obs_loc[k].element][i]];
        return v;
    };

    auto control_load = [&](const std::vector<double>& u) {
        DenseVector load(mesh.num_vertices(), 0.0);
        for (int t = 0; t < ne; ++t) {
            const double w = area[t] / 3.0 * u[t];
            for (int i = 0; i < 3; ++i)
                load[mesh.elements[t][i]] += w;
        }
        return load;
    };

    // initial classification
    std::vector<char> lo(ne, 0), up(ne, 0);
    {
        std::vector<double> u0(ne, project_control(0.0, a, b)), mu0(ne, 0.0);
        if (warm_start) {
            if (static_cast<int>(warm_start->control.values.size()) != ne ||
                static_cast<int>(warm_start->multiplier.values.size()) != ne)
                throw std::invalid_argument("pdas_solve: warm start sized for a different mesh");
            u0 = warm_start->control.values;
            mu0 = warm_start->multiplier.values;
        }
        for (int t = 0; t < ne; ++t) {
            lo[t] = (mu0[t] + c * (u0[t] - a) < 0.0);
            up[t] = (mu0[t] + c * (u0[t] - b) > 0.0);
        }
    }

    std::vector<std::string> seen{pack_active(lo, up)};
    P1Field y_base, y, p;
    std::vector<P1Field> y_dir(m);
    std::vector<double> u(ne), mu(ne);
    double residual = 0.0;

    for (int outer = 1; outer <= cfg.max_outer; ++outer) {
        // control ansatz for the current active sets:
        //   u = u_base + sum_k coeff_k u_dir_k  with the inactive part tied to
        //   the adjoint through u = -avg(p)/lambda
        std::vector<double> u_base(ne);
        std::vector<std::vector<double>> u_dir(m, std::vector<double>(ne, 0.0));
        for (int t = 0; t < ne; ++t) {
            if (lo[t])
                u_base[t] = a;
            else if (up[t])
                u_base[t] = b;
            else {
                u_base[t] = -avg_lift[t] / lam;
                for (int k = 0; k < m; ++k)
                    u_dir[k][t] = -avg_kernel[k][t] / lam;
            }
        }

        DenseVector load = load_f;
        {
            const DenseVector lu = control_load(u_base);
            for (std::size_t i = 0; i < load.size(); ++i)
                load[i] += lu[i];
        }
        y_base = solver.solve(load, gy, cfg.linear_tol, cfg.linear_max_iter,
                              y_base.values.empty() ? nullptr : &y_base);
        for (int k = 0; k < m; ++k)
            y_dir[k] = solver.solve(control_load(u_dir[k]), zero_bc, cfg.linear_tol,
                                    cfg.linear_max_iter,
                                    y_dir[k].values.empty() ? nullptr : &y_dir[k]);

        // point-value consistency: coeff_k = y(z_k) - target_k
        std::vector<std::vector<double>> M(m, std::vector<double>(m, 0.0));
        std::vector<double> rhs(m, 0.0);
        for (int zi = 0; zi < m; ++zi) {
            for (int k = 0; k < m; ++k)
                M[zi][k] = (zi == k ? 1.0 : 0.0) - eval_at_obs(y_dir[k], zi);
            rhs[zi] = eval_at_obs(y_base, zi) - spec.targets[zi];
        }
        const std::vector<double> coeff = solve_small_dense(M, rhs);

        y.values.assign(mesh.num_vertices(), 0.0);
        p.values.assign(mesh.num_vertices(), 0.0);
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            double yv = y_base.values[v];
            double pv = p_lift.values[v];
            for (int k = 0; k < m; ++k) {
                yv += coeff[k] * y_dir[k].values[v];
                pv += coeff[k] * kernel[k].values[v];
            }
            y.values[v] = yv;
            p.values[v] = pv;
        }
        for (int t = 0; t < ne; ++t) {
            u[t] = u_base[t];
            for (int k = 0; k < m; ++k)
                u[t] += coeff[k] * u_dir[k][t];
        }

        std::vector<char> nlo(ne), nup(ne);
        double avg_p;
        residual = 0.0;
        for (int t = 0; t < ne; ++t) {
            avg_p = 0.0;
            for (int i = 0; i < 3; ++i)
                avg_p += p.values[mesh.elements[t][i]];
            avg_p /= 3.0;
            mu[t] = -(avg_p + lam * u[t]);
            nlo[t] = (mu[t] + c * (u[t] - a) < 0.0);
            nup[t] = (mu[t] + c * (u[t] - b) > 0.0);
            // stationarity defect with the multiplier restricted to its
            // admissible sign on each active set
            double mu_r = 0.0;
            if (lo[t])
                mu_r = std::min(mu[t], 0.0);
            else if (up[t])
                mu_r = std::max(mu[t], 0.0);
            residual = std::max(residual, std::abs(lam * u[t] + avg_p + mu_r));
        }

        if (nlo == lo && nup == up) {
            if (residual > cfg.outer_tol)
                throw std::runtime_error(
                    "pdas_solve: active sets settled but stationarity residual " +
                    std::to_string(residual) + " exceeds tolerance");
            DiscreteSolution sol;
            sol.state = y;
            sol.adjoint = p;
            sol.control.values = u;
            sol.multiplier.values = mu;
            sol.active_lower = lo;
            sol.active_upper = up;
            sol.outer_iterations = outer;
            sol.residual = residual;
            return sol;
        }

        const std::string packed = pack_active(nlo, nup);
        for (std::size_t i = 0; i + 1 < seen.size(); ++i)
            if (seen[i] == packed)
                throw std::runtime_error("pdas_solve: active sets are cycling");
        seen.push_back(packed);
        lo = std::move(nlo);
        up = std::move(nup);
    }
    throw std::runtime_error("pdas_solve: no convergence within max_outer (residual " +
                             std::to_string(residual) + ")");
}

DiscreteSolution transfer_solution(const DiscreteSolution& sol, const std::vector<int>& ancestor)
{
    DiscreteSolution out;
    out.control.values.resize(ancestor.size());
    out.multiplier.values.resize(ancestor.size());
    const bool flags = !sol.active_lower.empty();
    if (flags) {
        out.active_lower.resize(ancestor.size());
        out.active_upper.resize(ancestor.size());
    }
    for (std::size_t t = 0; t < ancestor.size(); ++t) {
        out.control.values[t] = sol.control.values[ancestor[t]];
        out.multiplier.values[t] = sol.multiplier.values[ancestor[t]];
        if (flags) {
            out.active_lower[t] = sol.active_lower[ancestor[t]];
            out.active_upper[t] = sol.active_upper[ancestor[t]];
        }
    }
    return out;
}

double compute_cost(const ProblemSpec& spec, const Mesh& mesh, const DiscreteSolution& sol)
{
    double track = 0.0;
    for (std::size_t k = 0; k < spec.obs_points.size(); ++k) {
        const double d = eval_p1(mesh, sol.state, spec.obs_points[k]) - spec.targets[k];
        track += d * d;
    }
    double mass = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t)
        mass += mesh.element_area(t) * sol.control.values[t] * sol.control.values[t];
    return 0.5 * track + 0.5 * spec.lambda * mass;
}

double vi_pairing(const ProblemSpec& spec, const Mesh& mesh, const DiscreteSolution& sol,
                  const P0Field& direction)
{
    double acc = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const double avg_p = element_avg_p1(mesh, sol.adjoint, t);
        acc += mesh.element_area(t) * (avg_p + spec.lambda * sol.control.values[t]) *
               (direction.values[t] - sol.control.values[t]);
    }
    return acc;
}

} // namespace ptoc
