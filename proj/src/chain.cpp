#include "framescale/chain.hpp"

#include <cmath>
#include <sstream>

namespace framescale {

namespace {

constexpr double kChainTol = 1e-8;

DenseMatrix append_column(const DenseMatrix& b, const Vec& v) {
    DenseMatrix m(v.size(), b.cols() + 1);
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = b(i, j);
    m.set_column(b.cols(), v);
    return m;
}

double membership_residual(const DenseMatrix& basis, const Vec& v) {
    Vec proj = mat_vec(basis, mat_vec_adjoint(basis, v));
    return norm(sub(v, proj));
}

}  // namespace

std::size_t CanonicalBasis::nonzero_count() const {
    std::size_t c = 0;
    for (const Vec& v : entries)
        if (!is_zero_vec(v)) ++c;
    return c;
}

TailSpanChain compute_tail_chain(const VectorFamily& f, double rank_tol) {
    validate_family(f);
    const std::size_t d = f.dim;
    const std::size_t n_vec = f.count();

    TailSpanChain chain;
    chain.dim = d;
    chain.chain_length = n_vec;
    chain.bases.resize(n_vec + 1);

    if (f.tail == TailMode::zero) {
        // Suffix accumulation: B_n from B_{n+1} plus v_n, re-orthonormalized.
        chain.bases[n_vec] = DenseMatrix(d, 0);
        for (std::size_t n = n_vec; n >= 1; --n) {
            chain.bases[n - 1] =
                orthonormal_basis_cols(append_column(chain.bases[n], f.vectors[n - 1]),
                                       rank_tol);
        }
        chain.core = DenseMatrix(d, 0);
    } else {
        // One full tail period starting at n spans H_n.
        for (std::size_t n = 1; n <= n_vec + 1; ++n) {
            std::vector<Vec> period;
            period.reserve(n_vec);
            for (std::size_t k = n; k < n + n_vec; ++k)
                period.push_back(effective_vector(f, k));
            chain.bases[n - 1] = orthonormal_basis(d, period, rank_tol);
        }
        chain.core = chain.bases[0];
    }

    if (chain.rank(1) != d) {
        std::ostringstream os;
        os << "family is not total: tail spans reach rank " << chain.rank(1)
           << " of " << d << " at rank tolerance " << rank_tol;
        fail(ErrorKind::totality, os.str());
    }
    for (std::size_t n = 1; n <= n_vec; ++n) {
        const std::size_t rn = chain.rank(n), rn1 = chain.rank(n + 1);
        if (rn < rn1 || rn - rn1 > 1) {
            std::ostringstream os;
            os << "tail chain dimension drop at step " << n << " is " << rn << " -> " << rn1;
            fail(ErrorKind::internal, os.str());
        }
    }
    return chain;
}

CanonicalBasis build_canonical_basis(const TailSpanChain& chain) {
    const std::size_t d = chain.dim;
    const std::size_t m = chain.chain_length;

    CanonicalBasis cb;
    cb.dim = d;
    cb.entries.assign(2 * m, Vec(d, Scalar(0.0)));

    for (std::size_t n = 1; n <= m; ++n) {
        const std::size_t rn = chain.rank(n), rn1 = chain.rank(n + 1);
        if (rn < rn1 || rn - rn1 > 1)
            fail(ErrorKind::inconsistency,
                 "chain violates the dimension-drop bound; cannot build gap vectors");
        if (rn - rn1 == 1) {
            DenseMatrix gap =
                complement_within(chain.basis(n), chain.basis(n + 1), kChainTol);
            cb.entries[2 * n - 2] = gap.column(0);
        }
        if (n <= chain.core.cols()) cb.entries[2 * n - 1] = chain.core.column(n - 1);
    }

    // {u_n : u_n != 0} must be an orthonormal basis of H adapted to the chain.
    if (cb.nonzero_count() != d) {
        std::ostringstream os;
        os << "canonical basis has " << cb.nonzero_count() << " nonzero entries, expected "
           << d;
        fail(ErrorKind::internal, os.str());
    }
    std::vector<std::size_t> live;
    for (std::size_t n = 1; n <= 2 * m; ++n)
        if (!cb.is_zero(n)) live.push_back(n);
    for (std::size_t a = 0; a < live.size(); ++a) {
        for (std::size_t b = 0; b < live.size(); ++b) {
            const double g = std::abs(inner(cb.u(live[a]), cb.u(live[b])));
            const double want = a == b ? 1.0 : 0.0;
            if (std::abs(g - want) > 1e-9)
                fail(ErrorKind::internal, "canonical basis entries are not orthonormal");
        }
    }
    for (std::size_t n : live) {
        if (membership_residual(chain.basis(half_index(n)), cb.u(n)) > 1e-9) {
            std::ostringstream os;
            os << "u_" << n << " fails membership in H_" << half_index(n);
            fail(ErrorKind::internal, os.str());
        }
    }
    return cb;
}

}  // namespace framescale
