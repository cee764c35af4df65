#include "framescale/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace framescale {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Off-diagonal threshold for both Jacobi loops, relative to the local scale.
constexpr double kJacobiTol = 8.0 * kEps;
constexpr int kMaxSweeps = 128;

double sign_or_one(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

const char* error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::input: return "input";
        case ErrorKind::parse: return "parse";
        case ErrorKind::totality: return "totality";
        case ErrorKind::inconsistency: return "inconsistency";
        case ErrorKind::approximation: return "approximation";
        case ErrorKind::invertibility: return "invertibility";
        case ErrorKind::overflow: return "overflow";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_columns(std::size_t dim, const std::vector<Vec>& cols) {
    DenseMatrix m(dim, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != dim) {
            std::ostringstream os;
            os << "vector " << j + 1 << " has dimension " << cols[j].size()
               << ", expected " << dim;
            fail(ErrorKind::input, os.str());
        }
        for (std::size_t i = 0; i < dim; ++i) m(i, j) = cols[j][i];
    }
    return m;
}

Vec DenseMatrix::column(std::size_t j) const {
    Vec v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void DenseMatrix::set_column(std::size_t j, const Vec& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

DenseMatrix DenseMatrix::adjoint() const {
    DenseMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

bool DenseMatrix::all_finite() const noexcept {
    for (const Scalar& z : a_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

Scalar inner(const Vec& a, const Vec& b) {
    Scalar s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm2(const Vec& v) {
    double s = 0.0;
    for (const Scalar& z : v) s += std::norm(z);
    return s;
}

double norm(const Vec& v) { return std::sqrt(norm2(v)); }

Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

bool is_zero_vec(const Vec& v) noexcept {
    for (const Scalar& z : v)
        if (z.real() != 0.0 || z.imag() != 0.0) return false;
    return true;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Scalar aik = a(i, k);
            if (aik == Scalar(0.0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

DenseMatrix adjoint_mul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Scalar s = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) s += std::conj(a(k, i)) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

Vec mat_vec(const DenseMatrix& a, const Vec& x) {
    Vec y(a.rows(), Scalar(0.0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Scalar s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vec mat_vec_adjoint(const DenseMatrix& a, const Vec& x) {
    Vec y(a.cols(), Scalar(0.0));
    for (std::size_t j = 0; j < a.cols(); ++j) {
        Scalar s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) s += std::conj(a(i, j)) * x[i];
        y[j] = s;
    }
    return y;
}

void add_outer(DenseMatrix& m, const Vec& u, const Vec& v, double s) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const Scalar ui = s * u[i];
        if (ui == Scalar(0.0)) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += ui * std::conj(v[j]);
    }
}

double max_abs(const DenseMatrix& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
    return r;
}

SvdResult jacobi_svd(DenseMatrix a, bool want_v) {
    const std::size_t d = a.rows();
    const std::size_t m = a.cols();
    DenseMatrix v = want_v ? DenseMatrix::identity(m) : DenseMatrix();

    // Columns this far below the largest are rounding residue of dependent
    // inputs. Rotating them against full-size columns re-couples at the eps
    // level every sweep and never settles; their singular values sit far
    // below every rank cut (>= 1e-10), so leave them alone.
    double max_col = 0.0;
    for (std::size_t j = 0; j < m; ++j) max_col = std::max(max_col, norm2(a.column(j)));
    const double tiny2 = 1e-26 * max_col;

    bool rotated = true;
    int sweeps = 0;
    while (rotated) {
        if (++sweeps > kMaxSweeps)
            fail(ErrorKind::internal, "jacobi_svd failed to converge");
        rotated = false;
        for (std::size_t p = 0; p + 1 < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                double alpha = 0.0, beta = 0.0;
                Scalar gamma = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    const Scalar x = a(i, p), y = a(i, q);
                    alpha += std::norm(x);
                    beta += std::norm(y);
                    gamma += std::conj(x) * y;
                }
                const double g = std::abs(gamma);
                if (alpha == 0.0 || beta == 0.0 || g <= kJacobiTol * std::sqrt(alpha * beta))
                    continue;
                if (std::min(alpha, beta) <= tiny2) continue;
                rotated = true;
                const Scalar w = std::conj(gamma) / g;  // absorbs the phase of gamma
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t =
                    sign_or_one(zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::size_t i = 0; i < d; ++i) {
                    const Scalar x = a(i, p), y = w * a(i, q);
                    a(i, p) = cs * x - sn * y;
                    a(i, q) = sn * x + cs * y;
                }
                if (want_v) {
                    for (std::size_t i = 0; i < m; ++i) {
                        const Scalar x = v(i, p), y = w * v(i, q);
                        v(i, p) = cs * x - sn * y;
                        v(i, q) = sn * x + cs * y;
                    }
                }
            }
        }
    }

    std::vector<double> sigma(m);
    for (std::size_t j = 0; j < m; ++j) sigma[j] = norm(a.column(j));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    SvdResult r;
    r.u = DenseMatrix(d, m);
    r.sigma.resize(m);
    if (want_v) r.v = DenseMatrix(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t src = order[j];
        r.sigma[j] = sigma[src];
        if (sigma[src] > 0.0) {
            for (std::size_t i = 0; i < d; ++i) r.u(i, j) = a(i, src) / sigma[src];
        }
        if (want_v)
            for (std::size_t i = 0; i < m; ++i) r.v(i, j) = v(i, src);
    }
    return r;
}

LuFactor lu_factor(DenseMatrix a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) fail(ErrorKind::input, "lu_factor requires a square matrix");
    LuFactor f;
    f.piv.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double cand = std::abs(a(i, k));
            if (cand > best) {
                best = cand;
                p = i;
            }
        }
        if (best == 0.0) fail(ErrorKind::invertibility, "singular matrix in lu_factor");
        f.piv[k] = p;
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
        const Scalar pivot = a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const Scalar l = a(i, k) / pivot;
            a(i, k) = l;
            if (l == Scalar(0.0)) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
        }
    }
    f.lu = std::move(a);
    return f;
}

Vec lu_solve(const LuFactor& f, Vec b) {
    const std::size_t n = f.lu.rows();
    for (std::size_t k = 0; k < n; ++k)
        if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
    for (std::size_t i = 1; i < n; ++i) {
        Scalar s = b[i];
        for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * b[j];
        b[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        Scalar s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * b[j];
        b[i] = s / f.lu(i, i);
    }
    return b;
}

void fix_column_phase(Vec& v) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best) {
            best = a;
            arg = i;
        }
    }
    if (best <= 0.0) return;
    const Scalar phase = v[arg] / best;
    const Scalar corr = std::conj(phase);
    for (Scalar& z : v) z *= corr;
    v[arg] = Scalar(std::abs(v[arg]), 0.0);  // clamp the residual imaginary part
}

DenseMatrix orthonormal_basis_cols(const DenseMatrix& columns, double rank_tol) {
    if (rank_tol < 0.0) fail(ErrorKind::input, "rank_tol must be nonnegative");
    if (columns.cols() == 0) return DenseMatrix(columns.rows(), 0);
    SvdResult svd = jacobi_svd(columns, false);
    const double cut = rank_tol * svd.sigma[0];
    std::size_t r = 0;
    while (r < svd.sigma.size() && svd.sigma[r] > 0.0 && svd.sigma[r] >= cut) ++r;
    DenseMatrix b(columns.rows(), r);
    for (std::size_t j = 0; j < r; ++j) {
        Vec c = svd.u.column(j);
        fix_column_phase(c);
        b.set_column(j, c);
    }
    return b;
}

DenseMatrix orthonormal_basis(std::size_t dim, const std::vector<Vec>& vectors,
                              double rank_tol) {
    return orthonormal_basis_cols(DenseMatrix::from_columns(dim, vectors), rank_tol);
}

DenseMatrix complement_within(const DenseMatrix& big, const DenseMatrix& small,
                              double tol) {
    if (big.rows() != small.rows())
        fail(ErrorKind::input, "complement_within: ambient dimensions differ");
    if (small.cols() > big.cols())
        fail(ErrorKind::inconsistency,
             "complement_within: small basis has more columns than big basis");

    // Containment precondition: every column of small must lie in span(big).
    for (std::size_t j = 0; j < small.cols(); ++j) {
        Vec s = small.column(j);
        Vec proj = mat_vec(big, mat_vec_adjoint(big, s));
        const double resid = norm(sub(s, proj));
        if (resid > tol) {
            std::ostringstream os;
            os << "complement_within: column " << j + 1 << " of the inner basis lies "
               << resid << " outside the outer span (tol " << tol << ")";
            fail(ErrorKind::inconsistency, os.str());
        }
    }

    const std::size_t want = big.cols() - small.cols();
    DenseMatrix c(big.rows(), big.cols());
    for (std::size_t j = 0; j < big.cols(); ++j) {
        Vec col = big.column(j);
        if (small.cols() > 0) {
            Vec proj = mat_vec(small, mat_vec_adjoint(small, col));
            col = sub(col, proj);
        }
        c.set_column(j, col);
    }
    if (want == 0) return DenseMatrix(big.rows(), 0);

    SvdResult svd = jacobi_svd(c, false);
    if (svd.sigma[want - 1] < 1e-6)
        fail(ErrorKind::inconsistency,
             "complement_within: projected columns are rank deficient");
    DenseMatrix out(big.rows(), want);
    for (std::size_t j = 0; j < want; ++j) {
        Vec col = svd.u.column(j);
        fix_column_phase(col);
        out.set_column(j, col);
    }
    return out;
}

Vec min_norm_least_squares(const DenseMatrix& a, const Vec& b, double tol) {
    if (tol < 0.0) fail(ErrorKind::input, "min_norm_least_squares: tol must be nonnegative");
    if (b.size() != a.rows())
        fail(ErrorKind::input, "min_norm_least_squares: right-hand side dimension mismatch");
    const std::size_t m = a.cols();
    Vec c(m, Scalar(0.0));
    if (m == 0) return c;
    SvdResult svd = jacobi_svd(a, true);
    if (svd.sigma[0] == 0.0) return c;
    const double cut = tol * svd.sigma[0];
    for (std::size_t j = 0; j < m; ++j) {
        const double s = svd.sigma[j];
        if (s <= 0.0 || s < cut) break;
        const Scalar coeff = inner(svd.u.column(j), b) / s;
        for (std::size_t i = 0; i < m; ++i) c[i] += coeff * svd.v(i, j);
    }
    return c;
}

double operator_norm(const DenseMatrix& m) {
    if (!m.all_finite()) fail(ErrorKind::input, "operator_norm: matrix has non-finite entries");
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return jacobi_svd(m, false).sigma[0];
}

double hermitian_min_eig(const DenseMatrix& m) {
    const std::size_t n = m.rows();
    if (n == 0 || m.cols() != n)
        fail(ErrorKind::input, "hermitian_min_eig: matrix must be square and nonempty");
    if (!m.all_finite())
        fail(ErrorKind::input, "hermitian_min_eig: matrix has non-finite entries");

    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            dev = std::max(dev, std::abs(m(i, j) - std::conj(m(j, i))));
    const double scale = std::max(1.0, max_abs(m));
    if (dev > 1e-10 * scale)
        fail(ErrorKind::input, "hermitian_min_eig: matrix is not Hermitian within tolerance");

    // Symmetrize, then cyclic Jacobi. The skip test is relative to
    // sqrt(|w_pp w_qq|), which preserves the small eigenvalues of graded
    // positive-definite matrices (frame operators with lambda ~ 4^k).
    DenseMatrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            w(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    for (std::size_t i = 0; i < n; ++i) w(i, i) = Scalar(w(i, i).real(), 0.0);

    bool rotated = true;
    int sweeps = 0;
    while (rotated) {
        if (++sweeps > kMaxSweeps)
            fail(ErrorKind::internal, "hermitian_min_eig failed to converge");
        rotated = false;
        // Relative threshold only; after many sweeps (indefinite matrices with
        // vanishing diagonal) fall back to an absolute one to terminate.
        const double abs_floor =
            sweeps > 40 ? kJacobiTol * std::max(1e-300, max_abs(w)) : 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Scalar c = w(p, q);
                const double g = std::abs(c);
                const double app = w(p, p).real();
                const double aqq = w(q, q).real();
                if (g == 0.0 || g <= kJacobiTol * std::sqrt(std::abs(app) * std::abs(aqq)) ||
                    g <= abs_floor)
                    continue;
                rotated = true;
                const Scalar u = c / g;
                const Scalar wc = std::conj(u);
                const double zeta = (aqq - app) / (2.0 * g);
                const double t =
                    sign_or_one(zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::size_t i = 0; i < n; ++i) {  // columns: W <- W G
                    const Scalar x = w(i, p), y = wc * w(i, q);
                    w(i, p) = cs * x - sn * y;
                    w(i, q) = sn * x + cs * y;
                }
                for (std::size_t j = 0; j < n; ++j) {  // rows: W <- G^* W
                    const Scalar x = w(p, j), y = u * w(q, j);
                    w(p, j) = cs * x - sn * y;
                    w(q, j) = sn * x + cs * y;
                }
                w(p, q) = 0.0;
                w(q, p) = 0.0;
                w(p, p) = Scalar(w(p, p).real(), 0.0);
                w(q, q) = Scalar(w(q, q).real(), 0.0);
            }
        }
    }

    double lo = w(0, 0).real();
    for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, w(i, i).real());
    return lo;
}

}  // namespace framescale
