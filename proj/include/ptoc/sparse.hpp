#pragma once

#include <stdexcept>
#include <vector>

namespace ptoc {

using DenseVector = std::vector<double>;

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// Compressed-sparse-row matrix.  Callers are expected to supply both halves
/// of a symmetric matrix; duplicate entries are summed.
struct SparseSym {
    int n = 0;
    std::vector<int> row_ptr;  // size n+1
    std::vector<int> cols;
    std::vector<double> vals;

    int dim() const { return n; }

    static SparseSym from_triplets(int dimension, const std::vector<Triplet>& entries);

    void multiply(const DenseVector& x, DenseVector& y) const;
    DenseVector multiply(const DenseVector& x) const;

    double coeff(int r, int c) const;
    DenseVector diagonal() const;
    bool is_symmetric(double rel_tol = 1e-12) const;
};

struct CgError : std::runtime_error {
    double residual;
    explicit CgError(const std::string& what, double res) : std::runtime_error(what), residual(res) {}
};

/// Jacobi-preconditioned conjugate gradients.  Stops once
/// ||b - A x|| <= tol_rel * ||b||; throws CgError if max_iter is exhausted.
/// max_iter <= 0 selects the default 20 * dim.  x0, when given, is the
/// initial guess.
DenseVector cg_solve(const SparseSym& A, const DenseVector& b, double tol_rel, int max_iter,
                     const DenseVector* x0 = nullptr);

} // namespace ptoc
