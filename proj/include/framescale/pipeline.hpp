#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "framescale/chain.hpp"
#include "framescale/family.hpp"
#include "framescale/verify.hpp"

namespace framescale {

enum class ApproxMode { exact, quantized };
enum class SolveMethod { direct, neumann };

const char* approx_mode_name(ApproxMode m) noexcept;
const char* solve_method_name(SolveMethod m) noexcept;
ApproxMode approx_mode_from_name(const std::string& name);
SolveMethod solve_method_from_name(const std::string& name);

// z_n ≈ u_n as a finite combination of tail vectors v_k, k >= ceil(n/2).
// gamma holds the combination; rho = ||u_n - z_n|| stays under the budget
// max(3^{-n}, 1e-9) — the second term is the floating-point floor for
// indices whose 3^{-n} is below achievable precision.
struct Approximant {
    Vec z;
    std::map<std::size_t, Scalar> gamma;  // global index k -> coefficient
    double rho = 0.0;
};

struct ApproximantSet {
    std::vector<Approximant> items;  // items[n-1] approximates u_n

    std::size_t size() const noexcept { return items.size(); }
    const Approximant& at(std::size_t n) const { return items[n - 1]; }
};

// T = sum_n u_n (u_n - z_n)^*; ||T|| < 1 makes I - T invertible.
struct PerturbationOperator {
    DenseMatrix t;
    double norm = 0.0;
    double series_bound = 0.0;  // sum_n rho_n
};

struct PipelineConfig {
    ApproxMode mode = ApproxMode::exact;
    SolveMethod method = SolveMethod::direct;
    double rank_tol = 1e-10;
    double lambda_floor = 0.0;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
};

struct ScalingCertificate {
    std::size_t dim = 0;
    std::size_t family_count = 0;
    TailMode tail = TailMode::zero;
    ApproxMode mode = ApproxMode::exact;
    SolveMethod method = SolveMethod::direct;
    double rank_tol = 1e-10;
    double lambda_floor = 0.0;

    std::vector<Vec> w;                        // resolvent vectors, one per u_n
    std::map<std::size_t, double> lambda;      // weights on global indices k
    std::map<std::size_t, double> lambda_eff;  // aggregated to family indices

    double t_norm = 0.0;
    double identity_residual = 0.0;
    double min_frame_eig = 0.0;
    std::optional<double> uniform_baseline;  // zero-tail families only

    std::vector<double> w_norms;
    std::vector<std::vector<std::size_t>> gamma_supports;
    VerificationReport report;
};

ApproximantSet approximate_basis(const CanonicalBasis& u, const VectorFamily& f,
                                 ApproxMode mode, double rank_tol);
PerturbationOperator build_perturbation(const CanonicalBasis& u, const ApproximantSet& z);
std::vector<Vec> resolve_frame(const PerturbationOperator& t, const CanonicalBasis& u,
                               SolveMethod method);
std::map<std::size_t, double> scaling_weights(const std::vector<Vec>& w,
                                              const ApproximantSet& z);

// Aggregate weights on global indices down to family indices (identity for
// zero tail; residue classes mod N for cyclic tail).
std::map<std::size_t, double> aggregate_weights(const std::map<std::size_t, double>& lambda,
                                                const VectorFamily& f);

ScalingCertificate run_pipeline(const VectorFamily& f, const PipelineConfig& config);

std::string certificate_to_json(const ScalingCertificate& cert);

// Minimal certificate view needed to re-verify stored weights.
struct StoredCertificate {
    std::size_t dim = 0;
    std::map<std::size_t, double> lambda;
};
StoredCertificate parse_certificate_json(const std::string& text);

}  // namespace framescale
