#include "ptoc/fem.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace ptoc {

std::vector<double> interpolate_boundary(const Mesh& mesh, const DirichletData& g)
{
    std::vector<double> out(mesh.num_vertices(), 0.0);
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (mesh.boundary_vertex[v])
            out[v] = g.value(mesh.vertices[v]);
    return out;
}

SparseSym assemble_stiffness(const Mesh& mesh)
{
    std::vector<Triplet> trips;
    trips.reserve(9 * mesh.num_elements());
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto p = mesh.element_points(t);
        const auto& verts = mesh.elements[t];
        // grad of the barycentric basis: (b_i, c_i) / (2 |T|)
        double b[3], c[3];
        for (int i = 0; i < 3; ++i) {
            b[i] = p[(i + 1) % 3].y - p[(i + 2) % 3].y;
            c[i] = p[(i + 2) % 3].x - p[(i + 1) % 3].x;
        }
        const double area = mesh.element_area(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trips.push_back({verts[i], verts[j], (b[i] * b[j] + c[i] * c[j]) / (4.0 * area)});
    }
    return SparseSym::from_triplets(mesh.num_vertices(), trips);
}

std::vector<Point2> map_quadrature_points(const Mesh& mesh, int t, const QuadratureRule& rule)
{
    const auto p = mesh.element_points(t);
    std::vector<Point2> out(rule.size());
    for (int q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        out[q] = l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
    }
    return out;
}

DenseVector assemble_load(const Mesh& mesh, const ScalarField& f, const P0Field& u,
                          const QuadratureRule& rule)
{
    if (rule.degree < 2)
        throw std::invalid_argument("assemble_load: rule degree must be >= 2");
    if (!u.values.empty() && static_cast<int>(u.values.size()) != mesh.num_elements())
        throw std::invalid_argument("assemble_load: control size mismatch");

    DenseVector load(mesh.num_vertices(), 0.0);
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto pts = map_quadrature_points(mesh, t, rule);
        const double area = mesh.element_area(t);
        const double ut = u.values.empty() ? 0.0 : u.values[t];
        double acc[3] = {0.0, 0.0, 0.0};
        for (int q = 0; q < rule.size(); ++q) {
            const double val = (f(pts[q]) + ut) * rule.weights[q];
            for (int i = 0; i < 3; ++i)
                acc[i] += val * rule.points[q][i];
        }
        for (int i = 0; i < 3; ++i)
            load[mesh.elements[t][i]] += area * acc[i];
    }
    return load;
}

DenseVector assemble_dirac_load(const Mesh& mesh, const std::vector<Point2>& points,
                                const std::vector<double>& coefficients)
{
    if (points.size() != coefficients.size())
        throw std::invalid_argument("assemble_dirac_load: size mismatch");
    DenseVector load(mesh.num_vertices(), 0.0);
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto loc = locate_point(mesh, points[k]);
        if (!loc)
            throw std::runtime_error("assemble_dirac_load: point source outside the mesh");
        for (int i = 0; i < 3; ++i)
            load[mesh.elements[loc->element][i]] += coefficients[k] * loc->bary[i];
    }
    return load;
}

DirichletSolver::DirichletSolver(const SparseSym& A, const Mesh& mesh) : A_(A), mesh_(mesh)
{
    if (A.dim() != mesh.num_vertices())
        throw std::invalid_argument("DirichletSolver: dimension mismatch");
    interior_index_.assign(mesh.num_vertices(), -1);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!mesh.boundary_vertex[v]) {
            interior_index_[v] = static_cast<int>(interior_.size());
            interior_.push_back(v);
        }
    }
    std::vector<Triplet> trips;
    for (int r = 0; r < A.dim(); ++r) {
        if (interior_index_[r] < 0)
            continue;
        for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
            const int c = A.cols[k];
            if (interior_index_[c] >= 0)
                trips.push_back({interior_index_[r], interior_index_[c], A.vals[k]});
        }
    }
    A_ii_ = SparseSym::from_triplets(interior_dim(), trips);
}

P1Field DirichletSolver::solve(const DenseVector& load, const std::vector<double>& boundary_values,
                               double tol_rel, int max_iter, const P1Field* x0) const
{
    const int nv = mesh_.num_vertices();
    if (static_cast<int>(load.size()) != nv || static_cast<int>(boundary_values.size()) != nv)
        throw std::invalid_argument("DirichletSolver::solve: size mismatch");

    // lift of the boundary data, zero inside
    DenseVector lift(nv, 0.0);
    for (int v = 0; v < nv; ++v)
        if (mesh_.boundary_vertex[v])
            lift[v] = boundary_values[v];
    const DenseVector A_lift = A_.multiply(lift);

    DenseVector rhs(interior_dim());
    for (int i = 0; i < interior_dim(); ++i) {
        const int v = interior_[i];
        rhs[i] = load[v] - A_lift[v];
    }

    DenseVector guess;
    const DenseVector* guess_ptr = nullptr;
    if (x0 && static_cast<int>(x0->values.size()) == nv) {
        guess.resize(interior_dim());
        for (int i = 0; i < interior_dim(); ++i)
            guess[i] = x0->values[interior_[i]];
        guess_ptr = &guess;
    }

    const DenseVector xi = cg_solve(A_ii_, rhs, tol_rel, max_iter, guess_ptr);

    P1Field out;
    out.values = lift;
    for (int i = 0; i < interior_dim(); ++i)
        out.values[interior_[i]] = xi[i];
    return out;
}

P1Field solve_dirichlet(const SparseSym& A, const DenseVector& load, const DirichletData& g,
                        const Mesh& mesh, double tol_rel, int max_iter)
{
    DirichletSolver solver(A, mesh);
    return solver.solve(load, interpolate_boundary(mesh, g), tol_rel, max_iter);
}

P0Field p0_projection(const Mesh& mesh, const ScalarField& f, const QuadratureRule& rule)
{
    P0Field out;
    out.values.resize(mesh.num_elements());
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const auto pts = map_quadrature_points(mesh, t, rule);
        double acc = 0.0;
        for (int q = 0; q < rule.size(); ++q)
            acc += rule.weights[q] * f(pts[q]);
        out.values[t] = acc;  // weights sum to one => elementwise mean
    }
    return out;
}

double eval_p1(const Mesh& mesh, const P1Field& field, Point2 x)
{
    const auto loc = locate_point(mesh, x);
    if (!loc)
        throw std::runtime_error("eval_p1: point outside the mesh");
    double v = 0.0;
    for (int i = 0; i < 3; ++i)
        v += loc->bary[i] * field.values[mesh.elements[loc->element][i]];
    return v;
}

double element_avg_p1(const Mesh& mesh, const P1Field& field, int t)
{
    const auto& e = mesh.elements[t];
    return (field.values[e[0]] + field.values[e[1]] + field.values[e[2]]) / 3.0;
}

Point2 p1_gradient(const Mesh& mesh, const P1Field& field, int t)
{
    const auto p = mesh.element_points(t);
    const auto& e = mesh.elements[t];
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double b = p[(i + 1) % 3].y - p[(i + 2) % 3].y;
        const double c = p[(i + 2) % 3].x - p[(i + 1) % 3].x;
        gx += field.values[e[i]] * b;
        gy += field.values[e[i]] * c;
    }
    const double inv = 1.0 / (2.0 * mesh.element_area(t));
    return {gx * inv, gy * inv};
}

} // namespace ptoc
