#pragma once

#include "framescale/family.hpp"
#include "framescale/linalg.hpp"

namespace framescale {

// Orthonormal bases for the nested tail spans H_n = span{v_k : k >= n},
// H_1 ⊇ H_2 ⊇ ... ⊇ H_{M+1}, plus a basis of the core H_∞ = ∩ H_n.
// With zero tail H_{N+1} = {0} and the core is empty; with cyclic tail the
// chain is constant and the core is all of H. M = N in both modes.
struct TailSpanChain {
    std::vector<DenseMatrix> bases;  // B_1..B_{M+1}; bases[n-1] spans H_n
    DenseMatrix core;
    std::size_t chain_length = 0;  // M
    std::size_t dim = 0;

    std::size_t rank(std::size_t n) const { return bases[n - 1].cols(); }
    const DenseMatrix& basis(std::size_t n) const { return bases[n - 1]; }
};

TailSpanChain compute_tail_chain(const VectorFamily& f, double rank_tol);

// The interleaved sequence u_{2n-1} = x_n (gap vector of H_n ∩ H_{n+1}^⊥,
// or 0 when the chain does not drop) and u_{2n} = y_n (core basis vector,
// or 0 when exhausted). Zero markers are materialized as zero vectors.
struct CanonicalBasis {
    std::vector<Vec> entries;  // u_1..u_{2M}; entries[n-1] is u_n
    std::size_t dim = 0;

    std::size_t size() const noexcept { return entries.size(); }
    bool is_zero(std::size_t n) const { return is_zero_vec(entries[n - 1]); }
    const Vec& u(std::size_t n) const { return entries[n - 1]; }
    std::size_t nonzero_count() const;
};

CanonicalBasis build_canonical_basis(const TailSpanChain& chain);

// ceil(n/2): the tail span a canonical vector u_n is guaranteed to live in.
inline std::size_t half_index(std::size_t n) { return (n + 1) / 2; }

}  // namespace framescale
