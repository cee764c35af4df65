#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "framescale/family.hpp"
#include "framescale/linalg.hpp"

using namespace framescale;

namespace {

const double kSqrt2 = std::sqrt(2.0);

Vec rv(std::initializer_list<double> xs) {
    Vec v;
    for (double x : xs) v.push_back(Scalar(x, 0.0));
    return v;
}

DenseMatrix from_rows(std::initializer_list<std::initializer_list<Scalar>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = rows.begin()->size();
    DenseMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (const Scalar& z : row) m(i, j++) = z;
        ++i;
    }
    return m;
}

double max_gram_dev(const DenseMatrix& b) {
    DenseMatrix g = adjoint_mul(b, b);
    double dev = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j)
            dev = std::max(dev, std::abs(g(i, j) - (i == j ? Scalar(1.0) : Scalar(0.0))));
    return dev;
}

DenseMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.complex_gaussian();
    return m;
}

}  // namespace

TEST_CASE("orthonormal_basis handles duplicates, empty input, and full rank") {
    // duplicate vector collapses to a single direction
    DenseMatrix b = orthonormal_basis(2, {rv({1, 0}), rv({1, 0})}, 1e-8);
    REQUIRE(b.cols() == 1);
    CHECK(std::abs(b(0, 0) - Scalar(1.0)) < 1e-12);  // sign convention: +e1
    CHECK(std::abs(b(1, 0)) < 1e-12);

    // empty span
    DenseMatrix e = orthonormal_basis(2, {}, 1e-8);
    CHECK(e.rows() == 2);
    CHECK(e.cols() == 0);

    // {(1,0),(1,1)} spans the plane; oracle: direct multiplication
    std::vector<Vec> vs = {rv({1, 0}), rv({1, 1})};
    DenseMatrix f = orthonormal_basis(2, vs, 1e-10);
    REQUIRE(f.cols() == 2);
    CHECK(max_gram_dev(f) <= 1e-10);
    for (const Vec& v : vs) {
        Vec proj = mat_vec(f, mat_vec_adjoint(f, v));
        CHECK(norm(sub(v, proj)) <= 1e-10 * norm(v));
    }
}

TEST_CASE("orthonormal_basis rejects mismatched dimensions") {
    CHECK_THROWS_AS(orthonormal_basis(2, {rv({1, 0}), rv({1, 0, 0})}, 1e-8), Error);
}

TEST_CASE("orthonormal_basis rank threshold is relative to the largest singular value") {
    // second direction sits below the cut
    DenseMatrix b = orthonormal_basis(2, {rv({1, 0}), rv({1e-12, 1e-12})}, 1e-8);
    CHECK(b.cols() == 1);
    DenseMatrix b2 = orthonormal_basis(2, {rv({1, 0}), rv({1e-4, 1e-4})}, 1e-8);
    CHECK(b2.cols() == 2);
}

TEST_CASE("orthonormal_basis output stays orthonormal on random input") {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + trial % 7;
        const std::size_t m = 1 + (trial * 3) % 10;
        std::vector<Vec> vs;
        for (std::size_t j = 0; j < m; ++j) {
            Vec v(d);
            for (std::size_t i = 0; i < d; ++i) v[i] = rng.complex_gaussian();
            vs.push_back(std::move(v));
        }
        DenseMatrix b = orthonormal_basis(d, vs, 1e-10);
        CHECK(max_gram_dev(b) <= 1e-10);
        CHECK(b.cols() == std::min(d, m));
    }
}

TEST_CASE("complement_within basic cases") {
    DenseMatrix big = from_rows({{1.0, 0.0}, {0.0, 1.0}});
    DenseMatrix small(2, 1);
    small(1, 0) = 1.0;  // e2

    DenseMatrix c = complement_within(big, small, 1e-10);
    REQUIRE(c.cols() == 1);
    CHECK(std::abs(c(0, 0) - Scalar(1.0)) < 1e-12);
    CHECK(std::abs(c(1, 0)) < 1e-12);

    // equal subspaces leave nothing
    DenseMatrix none = complement_within(big, big, 1e-10);
    CHECK(none.cols() == 0);
}

TEST_CASE("complement_within on a slanted span matches the hand solution") {
    DenseMatrix big = orthonormal_basis(2, {rv({1, 0}), rv({1, 1})}, 1e-10);
    DenseMatrix small(2, 1);
    small(0, 0) = 1.0 / kSqrt2;
    small(1, 0) = 1.0 / kSqrt2;

    DenseMatrix c = complement_within(big, small, 1e-8);
    REQUIRE(c.cols() == 1);
    // sign convention picks (1,-1)/sqrt(2)
    CHECK(std::abs(c(0, 0) - Scalar(1.0 / kSqrt2)) < 1e-10);
    CHECK(std::abs(c(1, 0) - Scalar(-1.0 / kSqrt2)) < 1e-10);
    // orthogonality and membership, verified numerically
    CHECK(std::abs(inner(small.column(0), c.column(0))) <= 1e-10);
    Vec proj = mat_vec(big, mat_vec_adjoint(big, c.column(0)));
    CHECK(norm(sub(c.column(0), proj)) <= 1e-8);
}

TEST_CASE("complement_within rejects a non-contained inner basis") {
    DenseMatrix big(2, 1);
    big(0, 0) = 1.0;  // e1
    DenseMatrix small(2, 1);
    small(1, 0) = 1.0;  // e2, not inside span{e1}
    CHECK_THROWS_AS(complement_within(big, small, 1e-8), Error);
}

TEST_CASE("complement_within columns are orthogonal to the inner span on random data") {
    Rng rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 6;
        DenseMatrix big = orthonormal_basis_cols(random_matrix(d, 4, rng), 1e-10);
        REQUIRE(big.cols() == 4);
        // a subspace genuinely inside span(big)
        DenseMatrix mix = matmul(big, random_matrix(4, 2, rng));
        DenseMatrix small = orthonormal_basis_cols(mix, 1e-10);
        REQUIRE(small.cols() == 2);

        DenseMatrix c = complement_within(big, small, 1e-8);
        REQUIRE(c.cols() == 2);
        DenseMatrix overlap = adjoint_mul(small, c);
        CHECK(max_abs(overlap) <= 1e-10);
        for (std::size_t j = 0; j < c.cols(); ++j) {
            Vec col = c.column(j);
            Vec proj = mat_vec(big, mat_vec_adjoint(big, col));
            CHECK(norm(sub(col, proj)) <= 10 * 1e-8);
        }
    }
}

TEST_CASE("min_norm_least_squares matches hand-solved systems") {
    // identity columns
    DenseMatrix id = DenseMatrix::identity(2);
    Vec c = min_norm_least_squares(id, rv({1, 0}), 1e-10);
    CHECK(std::abs(c[0] - Scalar(1.0)) < 1e-12);
    CHECK(std::abs(c[1]) < 1e-12);

    // duplicated column: symmetry forces the equal split
    DenseMatrix dup(2, 2);
    dup(0, 0) = 1.0;
    dup(0, 1) = 1.0;
    Vec half = min_norm_least_squares(dup, rv({1, 0}), 1e-10);
    CHECK(std::abs(half[0] - Scalar(0.5)) < 1e-12);
    CHECK(std::abs(half[1] - Scalar(0.5)) < 1e-12);

    // columns (1,0) and (1,1), rhs (1,-1)/sqrt(2): solved by hand and by the
    // normal equations (Cramer) as an independent oracle
    DenseMatrix a = from_rows({{1.0, 1.0}, {0.0, 1.0}});
    Vec b = rv({1.0 / kSqrt2, -1.0 / kSqrt2});
    Vec got = min_norm_least_squares(a, b, 1e-10);

    // normal equations: [[1,1],[1,2]] c = [b1, b1+b2]
    const double g11 = 1, g12 = 1, g22 = 2;
    const double r1 = b[0].real(), r2 = b[0].real() + b[1].real();
    const double det = g11 * g22 - g12 * g12;
    const double c1 = (r1 * g22 - g12 * r2) / det;
    const double c2 = (g11 * r2 - r1 * g12) / det;
    CHECK(std::abs(got[0] - Scalar(c1)) < 1e-12);
    CHECK(std::abs(got[1] - Scalar(c2)) < 1e-12);
    CHECK(c1 == doctest::Approx(kSqrt2).epsilon(1e-13));
    CHECK(c2 == doctest::Approx(-1.0 / kSqrt2).epsilon(1e-13));
}

TEST_CASE("min_norm_least_squares beats random candidate coefficients") {
    Rng rng(303);
    DenseMatrix a(3, 3);  // rank 2: columns e1, e1, e2
    a(0, 0) = 1.0;
    a(0, 1) = 1.0;
    a(1, 2) = 1.0;
    Vec b = rv({2, 3, 5});
    Vec c = min_norm_least_squares(a, b, 1e-10);
    const double best = norm(sub(b, mat_vec(a, c)));
    for (int trial = 0; trial < 100; ++trial) {
        Vec cand(3);
        for (Scalar& z : cand) z = rng.complex_gaussian();
        CHECK(best <= norm(sub(b, mat_vec(a, cand))) + 1e-12);
    }
    // minimum-norm: also no larger than the candidates that tie
    Vec tie = c;
    tie[0] += 0.5;
    tie[1] -= 0.5;  // same residual direction for columns e1,e1
    CHECK(norm(c) <= norm(tie) + 1e-12);
}

TEST_CASE("min_norm_least_squares is deterministic") {
    Rng rng(404);
    DenseMatrix a = random_matrix(5, 8, rng);
    Vec b(5);
    for (Scalar& z : b) z = rng.complex_gaussian();
    Vec c1 = min_norm_least_squares(a, b, 1e-10);
    Vec c2 = min_norm_least_squares(a, b, 1e-10);
    for (std::size_t i = 0; i < c1.size(); ++i) {
        CHECK(c1[i].real() == c2[i].real());
        CHECK(c1[i].imag() == c2[i].imag());
    }
}

TEST_CASE("operator_norm examples") {
    CHECK(operator_norm(DenseMatrix(3, 3)) == 0.0);

    DenseMatrix diag(2, 2);
    diag(0, 0) = 1.0;
    diag(1, 1) = -3.0;
    CHECK(operator_norm(diag) == doctest::Approx(3.0).epsilon(1e-12));

    // rank one: ||v w^*|| = ||v|| ||w||
    Rng rng(505);
    for (int trial = 0; trial < 20; ++trial) {
        Vec v(5), w(5);
        for (Scalar& z : v) z = rng.complex_gaussian();
        for (Scalar& z : w) z = rng.complex_gaussian();
        DenseMatrix m(5, 5);
        add_outer(m, v, w);
        CHECK(operator_norm(m) ==
              doctest::Approx(norm(v) * norm(w)).epsilon(1e-10));
    }
}

TEST_CASE("operator_norm of the adjoint agrees") {
    Rng rng(606);
    for (int trial = 0; trial < 20; ++trial) {
        DenseMatrix m = random_matrix(4 + trial % 3, 3 + trial % 4, rng);
        const double a = operator_norm(m);
        const double b = operator_norm(m.adjoint());
        CHECK(std::abs(a - b) <= 1e-10 * std::max(a, b));
    }
}

TEST_CASE("hermitian_min_eig examples") {
    CHECK(hermitian_min_eig(DenseMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));

    DenseMatrix diag(2, 2);
    diag(0, 0) = 5.0;
    diag(1, 1) = 2.0;
    CHECK(hermitian_min_eig(diag) == doctest::Approx(2.0).epsilon(1e-12));

    // the worked 2x2 from the two-vector family; oracle: closed form
    const double lam1 = std::exp2(3.5);
    const double lam2 = std::exp2(2.5) + std::exp2(3.5);
    DenseMatrix s(2, 2);
    s(0, 0) = lam1 + lam2;
    s(0, 1) = lam2;
    s(1, 0) = lam2;
    s(1, 1) = lam2;
    const double tr = (lam1 + lam2) + lam2;
    const double det = lam1 * lam2;
    const double oracle = (tr - std::sqrt(tr * tr - 4.0 * det)) / 2.0;
    const double got = hermitian_min_eig(s);
    CHECK(std::abs(got - oracle) <= 1e-9 * operator_norm(s));
    CHECK(got == doctest::Approx(4.74).epsilon(0.01));
}

TEST_CASE("hermitian_min_eig rejects non-Hermitian input") {
    DenseMatrix m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = 1.0;
    m(1, 1) = 1.0;  // m(1,0) = 0
    CHECK_THROWS_AS(hermitian_min_eig(m), Error);
}

TEST_CASE("hermitian_min_eig handles complex entries") {
    // 2x2 complex Hermitian, closed-form oracle
    const Scalar c(0.3, -0.7);
    DenseMatrix m(2, 2);
    m(0, 0) = 2.0;
    m(0, 1) = c;
    m(1, 0) = std::conj(c);
    m(1, 1) = 1.0;
    const double disc = std::sqrt(1.0 + 4.0 * std::norm(c));
    const double oracle = (3.0 - disc) / 2.0;
    CHECK(hermitian_min_eig(m) == doctest::Approx(oracle).epsilon(1e-12));

    // positive definite: smallest eigenvalue equals the smallest singular
    // value, computed by the one-sided loop as a cross-check
    Rng rng(909);
    DenseMatrix g = random_matrix(4, 4, rng);
    DenseMatrix s = adjoint_mul(g, g);
    for (std::size_t i = 0; i < 4; ++i) s(i, i) += 0.1;
    const double eig = hermitian_min_eig(s);
    const std::vector<double> sigma = jacobi_svd(s, false).sigma;
    CHECK(eig == doctest::Approx(sigma.back()).epsilon(1e-10));
    CHECK(eig >= 0.1 - 1e-12);

    // 1x1 is the entry itself
    DenseMatrix one(1, 1);
    one(0, 0) = -2.5;
    CHECK(hermitian_min_eig(one) == -2.5);
}

TEST_CASE("hermitian_min_eig keeps relative accuracy on graded matrices") {
    // [[a, c],[c, b]] with a ~ 2^100; the small eigenvalue is det / lam_max,
    // far below eps * ||M||. A tridiagonalization-based solver would lose it.
    const double a = std::exp2(100);
    const double b = 5.5;
    const double c = std::exp2(40);
    DenseMatrix m(2, 2);
    m(0, 0) = a;
    m(0, 1) = c;
    m(1, 0) = c;
    m(1, 1) = b;
    const double det = a * b - c * c;
    const double lam_max = ((a + b) + std::sqrt((a - b) * (a - b) + 4 * c * c)) / 2.0;
    const double oracle = det / lam_max;
    const double got = hermitian_min_eig(m);
    CHECK(std::abs(got - oracle) <= 1e-12 * oracle);
}

TEST_CASE("jacobi_svd factors reproduce the matrix") {
    Rng rng(707);
    DenseMatrix a = random_matrix(4, 6, rng);
    SvdResult svd = jacobi_svd(a, true);
    REQUIRE(svd.sigma.size() == 6);
    for (std::size_t j = 1; j < svd.sigma.size(); ++j)
        CHECK(svd.sigma[j] <= svd.sigma[j - 1]);  // sorted
    // a v_j = sigma_j u_j
    for (std::size_t j = 0; j < 6; ++j) {
        Vec av = mat_vec(a, svd.v.column(j));
        Vec su = svd.u.column(j);
        for (Scalar& z : su) z *= svd.sigma[j];
        CHECK(norm(sub(av, su)) <= 1e-10 * (1.0 + svd.sigma[0]));
    }
}

TEST_CASE("lu solves against multiplication oracle") {
    Rng rng(808);
    DenseMatrix a = random_matrix(6, 6, rng);
    for (std::size_t i = 0; i < 6; ++i) a(i, i) += 4.0;  // keep it comfortably regular
    Vec b(6);
    for (Scalar& z : b) z = rng.complex_gaussian();
    Vec x = lu_solve(lu_factor(a), b);
    CHECK(norm(sub(mat_vec(a, x), b)) <= 1e-12 * norm(b));
}
