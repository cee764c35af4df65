#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "framescale/family.hpp"
#include "framescale/linalg.hpp"

namespace framescale {

struct ApproximantSet;  // pipeline.hpp
struct TailSpanChain;   // chain.hpp
struct CanonicalBasis;

// One verified inequality: passed ⇔ lhs <= rhs + tol, slack = rhs + tol - lhs.
struct CheckEntry {
    std::string name;
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
};

CheckEntry make_check(std::string name, double lhs, double rhs, double tol);

struct VerificationReport {
    std::vector<CheckEntry> checks;
    std::uint64_t seed = 0;
    std::size_t sample_count = 0;

    bool all_passed() const;
    const CheckEntry* find(const std::string& name) const;
    void add(CheckEntry entry) { checks.push_back(std::move(entry)); }
    void sort_by_name();
};

// Frame operator S = sum_k lambda_k v_k v_k^*, assembled exactly Hermitian.
DenseMatrix assemble_frame_operator(const VectorFamily& f,
                                    const std::map<std::size_t, double>& lambda_eff);

// Lower frame inequality ||x||^2 <= sum_k lambda_k |v_k^* x|^2: a sampling
// check over the given unit vectors, the analytic eigenvalue check, and the
// meta-check that the eigenvalue result implies the sampling one.
std::vector<CheckEntry> check_lower_frame(const VectorFamily& f,
                                          const std::map<std::size_t, double>& lambda_eff,
                                          const std::vector<Vec>& samples);
std::vector<CheckEntry> check_lower_frame(const VectorFamily& f,
                                          const std::map<std::size_t, double>& lambda_eff,
                                          std::size_t samples, std::uint64_t seed);

// ||I - sum_n w_n z_n^*|| <= 1e-8.
CheckEntry check_identity(const std::vector<Vec>& w, const ApproximantSet& z);

// (sum beta_n)^2 <= sum 2^n beta_n^2 for nonnegative beta.
std::pair<double, double> weighted_cs_gap(const std::vector<double>& beta);

// Per-n bound |z_n^* x|^2 <= 2^{-(n/2)+1} sum_k 2^k |gamma_k|^2 |v_k^* x|^2;
// records the tightest n over the given x.
CheckEntry check_z_bound(const ApproximantSet& z, const VectorFamily& f, const Vec& x);

// Structural checks on the chain and the canonical basis.
std::vector<CheckEntry> check_chain(const TailSpanChain& chain, const CanonicalBasis& u);

// 1/A where A is the smallest eigenvalue of the unweighted frame operator;
// the uniform scaling that would certify the same bound, for context.
double uniform_baseline(const VectorFamily& f);

std::vector<Vec> draw_samples(std::size_t dim, std::size_t count, std::uint64_t seed);

}  // namespace framescale
