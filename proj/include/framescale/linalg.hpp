#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "framescale/error.hpp"

namespace framescale {

using Scalar = std::complex<double>;
using Vec = std::vector<Scalar>;

// Dense row-major complex matrix. Values are immutable by convention once a
// routine has returned them; all routines below are pure functions.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_columns(std::size_t dim, const std::vector<Vec>& cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Scalar& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Scalar& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Vec column(std::size_t j) const;
    void set_column(std::size_t j, const Vec& v);

    DenseMatrix adjoint() const;
    bool all_finite() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> a_;
};

// -- elementary vector/matrix operations ------------------------------------

// Conjugate-linear in the first argument: inner(a, b) = a^* b.
Scalar inner(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double norm(const Vec& v);
Vec sub(const Vec& a, const Vec& b);
bool is_zero_vec(const Vec& v) noexcept;

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// adjoint(a) * b without forming the adjoint.
DenseMatrix adjoint_mul(const DenseMatrix& a, const DenseMatrix& b);
Vec mat_vec(const DenseMatrix& a, const Vec& x);
Vec mat_vec_adjoint(const DenseMatrix& a, const Vec& x);
// m += s * u v^*
void add_outer(DenseMatrix& m, const Vec& u, const Vec& v, double s = 1.0);
double max_abs(const DenseMatrix& m);

// -- decompositions ----------------------------------------------------------

// One-sided (Hestenes) Jacobi SVD: a = u * diag(sigma) * v^*, sigma sorted
// descending. u has a.cols() columns; columns past the rank are zero.
// High relative accuracy for column-scaled matrices.
struct SvdResult {
    DenseMatrix u;
    std::vector<double> sigma;
    DenseMatrix v;  // empty unless requested
};
SvdResult jacobi_svd(DenseMatrix a, bool want_v);

struct LuFactor {
    DenseMatrix lu;
    std::vector<std::size_t> piv;
};
LuFactor lu_factor(DenseMatrix a);
Vec lu_solve(const LuFactor& f, Vec b);

// -- substrate operations -----------------------------------------------------

// Orthonormal basis of span(vectors) inside C^dim. Singular values below
// rank_tol * sigma_max are treated as zero. Columns follow the sign
// convention: the first component of largest modulus is real positive.
DenseMatrix orthonormal_basis(std::size_t dim, const std::vector<Vec>& vectors,
                              double rank_tol);
DenseMatrix orthonormal_basis_cols(const DenseMatrix& columns, double rank_tol);

// Orthonormal basis of span(big) ∩ span(small)^⊥. Requires span(small) ⊆
// span(big) within tol; returns exactly big.cols() - small.cols() columns.
DenseMatrix complement_within(const DenseMatrix& big, const DenseMatrix& small,
                              double tol);

// Minimum-norm least-squares solution of a c ≈ b (rank cut at tol * sigma_max).
Vec min_norm_least_squares(const DenseMatrix& a, const Vec& b, double tol);

// Largest singular value.
double operator_norm(const DenseMatrix& m);

// Smallest eigenvalue of a Hermitian matrix, via cyclic Jacobi with a
// relative off-diagonal threshold (keeps relative accuracy on graded
// positive-definite matrices whose entries span many orders of magnitude).
double hermitian_min_eig(const DenseMatrix& m);

// Fix the phase of a unit column: first entry of largest modulus becomes
// real positive.
void fix_column_phase(Vec& v);

}  // namespace framescale
