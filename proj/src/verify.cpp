#include "framescale/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "framescale/chain.hpp"
#include "framescale/pipeline.hpp"

namespace framescale {

namespace {

constexpr double kOperatorTol = 1e-8;   // absolute, operator residuals
constexpr double kInequalityTol = 1e-8; // relative-ish, inequality slack

double frame_sum(const VectorFamily& f, const std::map<std::size_t, double>& lambda_eff,
                 const Vec& x) {
    double s = 0.0;
    for (const auto& [k, lam] : lambda_eff) {
        if (k < 1 || k > f.count()) continue;  // zero tail vectors contribute nothing
        s += lam * std::norm(inner(f.vectors[k - 1], x));
    }
    return s;
}

}  // namespace

CheckEntry make_check(std::string name, double lhs, double rhs, double tol) {
    CheckEntry e;
    e.name = std::move(name);
    e.lhs = lhs;
    e.rhs = rhs;
    e.slack = rhs + tol - lhs;
    e.passed = lhs <= rhs + tol;
    return e;
}

bool VerificationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckEntry& e) { return e.passed; });
}

const CheckEntry* VerificationReport::find(const std::string& name) const {
    for (const CheckEntry& e : checks)
        if (e.name == name) return &e;
    return nullptr;
}

void VerificationReport::sort_by_name() {
    std::stable_sort(checks.begin(), checks.end(),
                     [](const CheckEntry& a, const CheckEntry& b) { return a.name < b.name; });
}

std::vector<Vec> draw_samples(std::size_t dim, std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec> xs;
    xs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) xs.push_back(rng.unit_vector(dim));
    return xs;
}

DenseMatrix assemble_frame_operator(const VectorFamily& f,
                                    const std::map<std::size_t, double>& lambda_eff) {
    const std::size_t d = f.dim;
    DenseMatrix s(d, d);
    for (const auto& [k, lam] : lambda_eff) {
        if (k < 1 || k > f.count()) continue;
        const Vec& v = f.vectors[k - 1];
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) s(i, j) += lam * v[i] * std::conj(v[j]);
    }
    for (std::size_t i = 0; i < d; ++i) {
        s(i, i) = Scalar(s(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < d; ++j) s(j, i) = std::conj(s(i, j));
    }
    return s;
}

std::vector<CheckEntry> check_lower_frame(const VectorFamily& f,
                                          const std::map<std::size_t, double>& lambda_eff,
                                          const std::vector<Vec>& samples) {
    std::vector<CheckEntry> out;

    bool sampling_ok = true;
    double worst_lhs = 0.0, worst_rhs = 0.0, worst_slack = 0.0;
    bool first = true;
    for (const Vec& x : samples) {
        const double lhs = norm2(x);
        const double rhs = frame_sum(f, lambda_eff, x);
        const double slack = rhs + kInequalityTol - lhs;
        if (first || slack < worst_slack) {
            worst_lhs = lhs;
            worst_rhs = rhs;
            worst_slack = slack;
            first = false;
        }
        if (lhs > rhs + kInequalityTol) sampling_ok = false;
    }
    if (first) {
        worst_lhs = 1.0;
        worst_rhs = 0.0;
    }
    out.push_back(make_check("lower_frame_sampling", worst_lhs, worst_rhs, kInequalityTol));

    double min_eig;
    if (lambda_eff.empty()) {
        min_eig = 0.0;  // empty weights certify nothing
    } else {
        min_eig = hermitian_min_eig(assemble_frame_operator(f, lambda_eff));
    }
    out.push_back(make_check("lower_frame_min_eig", 1.0, min_eig, kInequalityTol));

    // If the analytic bound holds, sampling cannot have failed.
    const bool implication_broken = (min_eig >= 1.0) && !sampling_ok;
    out.push_back(make_check("lower_frame_meta_implication", implication_broken ? 1.0 : 0.0,
                             0.0, 0.0));
    return out;
}

std::vector<CheckEntry> check_lower_frame(const VectorFamily& f,
                                          const std::map<std::size_t, double>& lambda_eff,
                                          std::size_t samples, std::uint64_t seed) {
    return check_lower_frame(f, lambda_eff, draw_samples(f.dim, samples, seed));
}

CheckEntry check_identity(const std::vector<Vec>& w, const ApproximantSet& z) {
    if (w.size() != z.size())
        fail(ErrorKind::input, "check_identity: w and z lengths differ");
    const std::size_t d = w.empty() ? 0 : w.front().size();
    DenseMatrix r = DenseMatrix::identity(d);
    for (std::size_t n = 1; n <= z.size(); ++n) add_outer(r, w[n - 1], z.at(n).z, -1.0);
    return make_check("identity_reconstruction", operator_norm(r), kOperatorTol, 0.0);
}

std::pair<double, double> weighted_cs_gap(const std::vector<double>& beta) {
    double sum = 0.0, weighted = 0.0;
    for (std::size_t n = 0; n < beta.size(); ++n) {
        if (beta[n] < 0.0)
            fail(ErrorKind::input, "weighted_cs_gap: beta entries must be nonnegative");
        sum += beta[n];
        weighted += std::ldexp(beta[n] * beta[n], static_cast<int>(n) + 1);
    }
    return {sum * sum, weighted};
}

CheckEntry check_z_bound(const ApproximantSet& z, const VectorFamily& f, const Vec& x) {
    for (const Scalar& e : x)
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
            fail(ErrorKind::input, "check_z_bound: x has non-finite entries");

    bool ok = true;
    double worst_lhs = 0.0, worst_rhs = 0.0, worst_slack = 0.0;
    bool first = true;
    for (std::size_t n = 1; n <= z.size(); ++n) {
        const Approximant& ap = z.at(n);
        const double lhs = std::norm(inner(ap.z, x));
        double rhs = 0.0;
        for (const auto& [k, g] : ap.gamma) {
            rhs += std::exp2(static_cast<double>(k)) * std::norm(g) *
                   std::norm(inner(effective_vector(f, k), x));
        }
        rhs *= std::exp2(1.0 - 0.5 * static_cast<double>(n));
        const double tol = 1e-10 * (1.0 + rhs);
        const double slack = rhs + tol - lhs;
        if (first || slack < worst_slack) {
            worst_lhs = lhs;
            worst_rhs = rhs;
            worst_slack = slack;
            first = false;
        }
        if (lhs > rhs + tol) ok = false;
    }
    CheckEntry e = make_check("z_bound", worst_lhs, worst_rhs, 1e-10 * (1.0 + worst_rhs));
    e.passed = ok;
    return e;
}

std::vector<CheckEntry> check_chain(const TailSpanChain& chain, const CanonicalBasis& u) {
    std::vector<CheckEntry> out;

    double max_drop = 0.0;
    double max_nesting = 0.0;
    for (std::size_t n = 1; n <= chain.chain_length; ++n) {
        const double drop =
            static_cast<double>(chain.rank(n)) - static_cast<double>(chain.rank(n + 1));
        max_drop = std::max(max_drop, drop);

        const DenseMatrix& bn = chain.basis(n);
        const DenseMatrix& bn1 = chain.basis(n + 1);
        for (std::size_t j = 0; j < bn1.cols(); ++j) {
            Vec c = bn1.column(j);
            Vec proj = mat_vec(bn, mat_vec_adjoint(bn, c));
            max_nesting = std::max(max_nesting, norm(sub(c, proj)));
        }
    }
    out.push_back(make_check("chain_dim_drops", max_drop, 1.0, 0.0));
    out.push_back(make_check("chain_nesting", max_nesting, kOperatorTol, 0.0));

    std::vector<std::size_t> live;
    for (std::size_t n = 1; n <= u.size(); ++n)
        if (!u.is_zero(n)) live.push_back(n);
    double gram_dev = 0.0;
    for (std::size_t a = 0; a < live.size(); ++a)
        for (std::size_t b = a; b < live.size(); ++b) {
            const double g = std::abs(inner(u.u(live[a]), u.u(live[b])));
            gram_dev = std::max(gram_dev, std::abs(g - (a == b ? 1.0 : 0.0)));
        }
    out.push_back(make_check("chain_u_gram", gram_dev, 1e-9, 0.0));

    double max_member = 0.0;
    for (std::size_t n : live) {
        const DenseMatrix& b = chain.basis(half_index(n));
        Vec proj = mat_vec(b, mat_vec_adjoint(b, u.u(n)));
        max_member = std::max(max_member, norm(sub(u.u(n), proj)));
    }
    out.push_back(make_check("chain_membership", max_member, kOperatorTol, 0.0));
    return out;
}

double uniform_baseline(const VectorFamily& f) {
    validate_family(f);
    if (f.tail != TailMode::zero)
        fail(ErrorKind::input, "uniform_baseline is defined for zero-tail families");
    std::map<std::size_t, double> ones;
    for (std::size_t k = 1; k <= f.count(); ++k) ones[k] = 1.0;
    const DenseMatrix s = assemble_frame_operator(f, ones);
    const double a = hermitian_min_eig(s);
    // degeneracy is relative to the operator's own scale, not an absolute cut
    if (a <= 1e-14 * std::max(max_abs(s), 1e-300)) {
        std::ostringstream os;
        os << "unweighted frame operator is numerically singular (min eig " << a
           << "); family is not total";
        fail(ErrorKind::degenerate, os.str());
    }
    return 1.0 / a;
}

}  // namespace framescale
