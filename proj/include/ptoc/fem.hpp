#pragma once

#include <functional>
#include <vector>

#include "ptoc/mesh.hpp"
#include "ptoc/quadrature.hpp"
#include "ptoc/sparse.hpp"

namespace ptoc {

using ScalarField = std::function<double(Point2)>;
using VectorField = std::function<Point2(Point2)>;

/// Continuous piecewise-linear nodal field (one value per vertex).
struct P1Field {
    std::vector<double> values;
};

/// Piecewise-constant field (one value per element).
struct P0Field {
    std::vector<double> values;
};

struct DirichletData {
    ScalarField value;
    static DirichletData zero()
    {
        return {[](Point2) { return 0.0; }};
    }
};

/// Nodal interpolation of g on the boundary: full-length vector, zero at
/// interior vertices.
std::vector<double> interpolate_boundary(const Mesh& mesh, const DirichletData& g);

/// Stiffness matrix of the Laplacian over all vertices (no boundary
/// conditions applied).
SparseSym assemble_stiffness(const Mesh& mesh);

/// Load vector of f + u against the nodal basis.  Pass an empty control to
/// use f alone.
DenseVector assemble_load(const Mesh& mesh, const ScalarField& f, const P0Field& u,
                          const QuadratureRule& rule);

/// Load vector sum_z c_z phi_i(z) of point sources.  Throws if some z lies
/// outside the mesh.
DenseVector assemble_dirac_load(const Mesh& mesh, const std::vector<Point2>& points,
                                const std::vector<double>& coefficients);

/// Interior solve of A x = load with the boundary rows eliminated
/// symmetrically against fixed boundary values.  Reusable across right-hand
/// sides; keeps references to A and mesh.
class DirichletSolver {
public:
    DirichletSolver(const SparseSym& A, const Mesh& mesh);

    /// boundary_values: full-length vector, read only at boundary vertices.
    /// x0, if given, is a full-length warm start.
    P1Field solve(const DenseVector& load, const std::vector<double>& boundary_values,
                  double tol_rel, int max_iter, const P1Field* x0 = nullptr) const;

    int interior_dim() const { return static_cast<int>(interior_.size()); }

private:
    const SparseSym& A_;
    const Mesh& mesh_;
    std::vector<int> interior_;       // interior vertex ids
    std::vector<int> interior_index_; // vertex id -> interior index, -1 on the boundary
    SparseSym A_ii_;
};

/// One-shot Dirichlet solve.
P1Field solve_dirichlet(const SparseSym& A, const DenseVector& load, const DirichletData& g,
                        const Mesh& mesh, double tol_rel = 1e-10, int max_iter = 0);

/// Elementwise L2 projection onto piecewise constants.
P0Field p0_projection(const Mesh& mesh, const ScalarField& f, const QuadratureRule& rule);

/// Point evaluation; throws if x lies outside the mesh.
double eval_p1(const Mesh& mesh, const P1Field& field, Point2 x);

/// Mean of the three nodal values (the exact element average of a P1 field).
double element_avg_p1(const Mesh& mesh, const P1Field& field, int t);

/// Constant gradient of a P1 field on element t.
Point2 p1_gradient(const Mesh& mesh, const P1Field& field, int t);

/// Physical positions of the quadrature nodes on element t.
std::vector<Point2> map_quadrature_points(const Mesh& mesh, int t, const QuadratureRule& rule);

} // namespace ptoc
