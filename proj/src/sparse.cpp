#include "ptoc/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ptoc {

SparseSym SparseSym::from_triplets(int dimension, const std::vector<Triplet>& entries)
{
    if (dimension < 0)
        throw std::invalid_argument("from_triplets: negative dimension");
    for (const Triplet& t : entries)
        if (t.row < 0 || t.row >= dimension || t.col < 0 || t.col >= dimension)
            throw std::invalid_argument("from_triplets: index out of range");

    SparseSym A;
    A.n = dimension;
    A.row_ptr.assign(dimension + 1, 0);
    for (const Triplet& t : entries)
        ++A.row_ptr[t.row + 1];
    for (int r = 0; r < dimension; ++r)
        A.row_ptr[r + 1] += A.row_ptr[r];

    std::vector<int> cols(entries.size());
    std::vector<double> vals(entries.size());
    {
        std::vector<int> cursor(A.row_ptr.begin(), A.row_ptr.end() - 1);
        for (const Triplet& t : entries) {
            const int slot = cursor[t.row]++;
            cols[slot] = t.col;
            vals[slot] = t.value;
        }
    }

    // sort each row by column and merge duplicates
    A.cols.reserve(entries.size());
    A.vals.reserve(entries.size());
    std::vector<int> new_ptr(dimension + 1, 0);
    std::vector<int> perm;
    for (int r = 0; r < dimension; ++r) {
        const int lo = A.row_ptr[r], hi = A.row_ptr[r + 1];
        perm.resize(hi - lo);
        std::iota(perm.begin(), perm.end(), lo);
        std::sort(perm.begin(), perm.end(), [&](int a, int b) { return cols[a] < cols[b]; });
        for (int idx : perm) {
            if (!A.cols.empty() && static_cast<int>(A.cols.size()) > new_ptr[r] && A.cols.back() == cols[idx]) {
                A.vals.back() += vals[idx];
            } else {
                A.cols.push_back(cols[idx]);
                A.vals.push_back(vals[idx]);
            }
        }
        new_ptr[r + 1] = static_cast<int>(A.cols.size());
    }
    A.row_ptr = std::move(new_ptr);
    return A;
}

void SparseSym::multiply(const DenseVector& x, DenseVector& y) const
{
    y.assign(n, 0.0);
    for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            acc += vals[k] * x[cols[k]];
        y[r] = acc;
    }
}

DenseVector SparseSym::multiply(const DenseVector& x) const
{
    DenseVector y;
    multiply(x, y);
    return y;
}

double SparseSym::coeff(int r, int c) const
{
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        if (cols[k] == c)
            return vals[k];
    return 0.0;
}

DenseVector SparseSym::diagonal() const
{
    DenseVector d(n, 0.0);
    for (int r = 0; r < n; ++r)
        d[r] = coeff(r, r);
    return d;
}

bool SparseSym::is_symmetric(double rel_tol) const
{
    double scale = 0.0;
    for (double v : vals)
        scale = std::max(scale, std::abs(v));
    for (int r = 0; r < n; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (std::abs(vals[k] - coeff(cols[k], r)) > rel_tol * scale)
                return false;
    return true;
}

DenseVector cg_solve(const SparseSym& A, const DenseVector& b, double tol_rel, int max_iter,
                     const DenseVector* x0)
{
    const int n = A.dim();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("cg_solve: size mismatch");
    if (!(tol_rel > 0.0 && tol_rel < 1.0))
        throw std::invalid_argument("cg_solve: tol_rel must lie in (0,1)");
    if (max_iter <= 0)
        max_iter = 20 * n;

    const DenseVector diag = A.diagonal();
    DenseVector inv_diag(n);
    for (int i = 0; i < n; ++i) {
        if (diag[i] <= 0.0)
            throw std::invalid_argument("cg_solve: matrix has a nonpositive diagonal entry");
        inv_diag[i] = 1.0 / diag[i];
    }

    auto norm2 = [](const DenseVector& v) {
        double s = 0.0;
        for (double x : v)
            s += x * x;
        return std::sqrt(s);
    };

    const double b_norm = norm2(b);
    DenseVector x = x0 ? *x0 : DenseVector(n, 0.0);
    if (x0 && static_cast<int>(x0->size()) != n)
        throw std::invalid_argument("cg_solve: bad initial guess size");
    if (b_norm == 0.0)
        return DenseVector(n, 0.0);
    const double target = tol_rel * b_norm;

    DenseVector r(n), z(n), p(n), Ap(n);
    A.multiply(x, Ap);
    for (int i = 0; i < n; ++i)
        r[i] = b[i] - Ap[i];
    if (norm2(r) <= target)
        return x;
    for (int i = 0; i < n; ++i)
        z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (int i = 0; i < n; ++i)
        rz += r[i] * z[i];

    double res = norm2(r);
    for (int it = 0; it < max_iter; ++it) {
        A.multiply(p, Ap);
        double pAp = 0.0;
        for (int i = 0; i < n; ++i)
            pAp += p[i] * Ap[i];
        if (pAp <= 0.0)
            throw CgError("cg_solve: matrix is not positive definite", res);
        const double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        res = norm2(r);
        if (res <= target)
            return x;
        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    throw CgError("cg_solve: no convergence within max_iter (residual " + std::to_string(res) + ")", res);
}

} // namespace ptoc
