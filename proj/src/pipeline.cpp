#include "framescale/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace framescale {

namespace {

using nlohmann::ordered_json;

constexpr double kExactResidualTol = 1e-9;

// Budget for ||u_n - z_n||: 3^{-n}, floored at the level exact projection
// actually achieves in doubles.
double residual_budget(std::size_t n) {
    return std::max(std::pow(3.0, -static_cast<double>(n)), kExactResidualTol);
}

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(stage) + ": " + e.what());
    }
}

Scalar quantize(Scalar z, double step) {
    return Scalar(std::round(z.real() / step) * step, std::round(z.imag() / step) * step);
}

}  // namespace

const char* approx_mode_name(ApproxMode m) noexcept {
    return m == ApproxMode::exact ? "exact" : "quantized";
}
const char* solve_method_name(SolveMethod m) noexcept {
    return m == SolveMethod::direct ? "direct" : "neumann";
}
ApproxMode approx_mode_from_name(const std::string& name) {
    if (name == "exact") return ApproxMode::exact;
    if (name == "quantized") return ApproxMode::quantized;
    fail(ErrorKind::input, "mode must be \"exact\" or \"quantized\", got \"" + name + "\"");
}
SolveMethod solve_method_from_name(const std::string& name) {
    if (name == "direct") return SolveMethod::direct;
    if (name == "neumann") return SolveMethod::neumann;
    fail(ErrorKind::input, "method must be \"direct\" or \"neumann\", got \"" + name + "\"");
}

ApproximantSet approximate_basis(const CanonicalBasis& u, const VectorFamily& f,
                                 ApproxMode mode, double rank_tol) {
    const std::size_t d = f.dim;
    const std::size_t n_vec = f.count();
    ApproximantSet out;
    out.items.resize(u.size());

    for (std::size_t n = 1; n <= u.size(); ++n) {
        Approximant& ap = out.items[n - 1];
        ap.z.assign(d, Scalar(0.0));
        if (u.is_zero(n)) continue;

        const std::size_t k_lo = half_index(n);
        const std::size_t k_hi = f.tail == TailMode::zero ? n_vec : k_lo + n_vec - 1;
        if (k_lo > k_hi) {
            std::ostringstream os;
            os << "no tail vectors available to approximate u_" << n;
            fail(ErrorKind::approximation, os.str());
        }
        std::vector<Vec> dict;
        dict.reserve(k_hi - k_lo + 1);
        for (std::size_t k = k_lo; k <= k_hi; ++k) dict.push_back(effective_vector(f, k));
        const DenseMatrix a = DenseMatrix::from_columns(d, dict);

        const Vec coeff = min_norm_least_squares(a, u.u(n), rank_tol);
        const Vec z_exact = mat_vec(a, coeff);
        const double rho_exact = norm(sub(u.u(n), z_exact));
        if (rho_exact > kExactResidualTol) {
            std::ostringstream os;
            os << "residual for u_" << n << " is " << rho_exact
               << "; cannot reach the 3^-n budget (membership failure)";
            fail(ErrorKind::approximation, os.str());
        }

        Vec chosen = coeff;
        if (mode == ApproxMode::quantized) {
            const double target = 0.5 * std::pow(3.0, -static_cast<double>(n));
            if (target > rho_exact) {
                double max_mag = 0.0;
                for (const Scalar& g : coeff)
                    max_mag = std::max({max_mag, std::abs(g.real()), std::abs(g.imag())});
                const int e0 = max_mag > 0.0 ? std::ilogb(max_mag) + 3 : 3;
                for (int e = e0; e >= e0 - 120; --e) {
                    const double step = std::ldexp(1.0, e);
                    Vec q(coeff.size());
                    for (std::size_t i = 0; i < coeff.size(); ++i)
                        q[i] = quantize(coeff[i], step);
                    const Vec zq = mat_vec(a, q);
                    if (norm(sub(u.u(n), zq)) < target) {
                        chosen = std::move(q);
                        break;
                    }
                }
            }
        }

        const Vec z = mat_vec(a, chosen);
        ap.z = z;
        ap.rho = norm(sub(u.u(n), z));
        for (std::size_t i = 0; i < chosen.size(); ++i)
            if (chosen[i] != Scalar(0.0)) ap.gamma[k_lo + i] = chosen[i];

        if (!(ap.rho < residual_budget(n) || ap.rho <= rho_exact)) {
            std::ostringstream os;
            os << "residual " << ap.rho << " for u_" << n << " exceeds the budget "
               << residual_budget(n);
            fail(ErrorKind::approximation, os.str());
        }
    }
    return out;
}

PerturbationOperator build_perturbation(const CanonicalBasis& u, const ApproximantSet& z) {
    if (u.size() != z.size())
        fail(ErrorKind::input, "build_perturbation: u and z lengths differ");
    const std::size_t d = u.dim;
    PerturbationOperator p;
    p.t = DenseMatrix(d, d);
    for (std::size_t n = 1; n <= u.size(); ++n) {
        p.series_bound += z.at(n).rho;
        if (u.is_zero(n)) continue;
        add_outer(p.t, u.u(n), sub(u.u(n), z.at(n).z));
    }
    p.norm = operator_norm(p.t);
    if (p.norm >= 1.0) {
        std::ostringstream os;
        os << "perturbation norm " << p.norm << " >= 1; I - T is not invertible";
        fail(ErrorKind::invertibility, os.str());
    }
    if (p.norm > p.series_bound + 1e-10)
        fail(ErrorKind::internal, "perturbation norm exceeds the residual series bound");
    return p;
}

std::vector<Vec> resolve_frame(const PerturbationOperator& t, const CanonicalBasis& u,
                               SolveMethod method) {
    if (t.norm >= 1.0)
        fail(ErrorKind::invertibility, "resolve_frame requires ||T|| < 1");
    const std::size_t d = u.dim;

    DenseMatrix a = DenseMatrix::identity(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a(i, j) -= t.t(i, j);

    std::vector<Vec> w(u.size(), Vec(d, Scalar(0.0)));
    if (method == SolveMethod::direct) {
        const LuFactor f = lu_factor(a);
        for (std::size_t n = 1; n <= u.size(); ++n) {
            if (u.is_zero(n)) continue;
            Vec x = lu_solve(f, u.u(n));
            Vec r = sub(u.u(n), mat_vec(a, x));
            if (norm(r) > 1e-13 * norm(u.u(n))) {  // one refinement pass
                Vec dx = lu_solve(f, r);
                for (std::size_t i = 0; i < d; ++i) x[i] += dx[i];
                r = sub(u.u(n), mat_vec(a, x));
            }
            if (norm(r) > 1e-12 * norm(u.u(n)))
                fail(ErrorKind::internal, "resolvent solve missed the residual target");
            w[n - 1] = std::move(x);
        }
    } else {
        std::size_t terms = 0;
        if (t.norm > 0.0)
            terms = static_cast<std::size_t>(
                std::ceil(std::log(1e-14) / std::log(t.norm)));
        for (std::size_t n = 1; n <= u.size(); ++n) {
            if (u.is_zero(n)) continue;
            Vec x = u.u(n);
            for (std::size_t j = 0; j < terms; ++j) {
                Vec tx = mat_vec(t.t, x);
                for (std::size_t i = 0; i < d; ++i) x[i] = u.u(n)[i] + tx[i];
            }
            w[n - 1] = std::move(x);
        }
    }
    return w;
}

std::map<std::size_t, double> scaling_weights(const std::vector<Vec>& w,
                                              const ApproximantSet& z) {
    if (w.size() != z.size())
        fail(ErrorKind::input, "scaling_weights: w and z lengths differ");
    std::map<std::size_t, double> lambda;
    for (std::size_t n = 1; n <= z.size(); ++n) {
        const double wn2 = norm2(w[n - 1]);
        if (wn2 == 0.0) continue;
        for (const auto& [k, g] : z.at(n).gamma) {
            const double factor =
                std::exp2(0.5 * static_cast<double>(n) + static_cast<double>(k) + 1.0);
            lambda[k] += factor * wn2 * std::norm(g);
        }
    }
    for (const auto& [k, v] : lambda) {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "lambda_" << k << " overflowed the double range; rerun with log-domain "
               << "reporting (log2 values are still finite)";
            fail(ErrorKind::overflow, os.str());
        }
    }
    return lambda;
}

std::map<std::size_t, double> aggregate_weights(const std::map<std::size_t, double>& lambda,
                                                const VectorFamily& f) {
    if (f.tail == TailMode::zero) return lambda;
    std::map<std::size_t, double> eff;
    const std::size_t n = f.count();
    for (const auto& [k, v] : lambda) eff[(k - 1) % n + 1] += v;
    return eff;
}

ScalingCertificate run_pipeline(const VectorFamily& f, const PipelineConfig& config) {
    run_stage("sequence-model", [&] { validate_family(f); return 0; });
    if (!(config.rank_tol > 0.0))
        fail(ErrorKind::input, "rank_tol must be positive");
    if (config.samples < 1) fail(ErrorKind::input, "samples must be at least 1");

    const TailSpanChain chain =
        run_stage("tail-chain", [&] { return compute_tail_chain(f, config.rank_tol); });
    const CanonicalBasis u =
        run_stage("tail-chain", [&] { return build_canonical_basis(chain); });
    const ApproximantSet z = run_stage("scaling-pipeline", [&] {
        return approximate_basis(u, f, config.mode, config.rank_tol);
    });
    const PerturbationOperator t =
        run_stage("scaling-pipeline", [&] { return build_perturbation(u, z); });
    const std::vector<Vec> w =
        run_stage("scaling-pipeline", [&] { return resolve_frame(t, u, config.method); });
    std::map<std::size_t, double> lambda =
        run_stage("scaling-pipeline", [&] { return scaling_weights(w, z); });
    if (config.lambda_floor > 0.0)
        for (auto& [k, v] : lambda) v += config.lambda_floor;

    ScalingCertificate cert;
    cert.dim = f.dim;
    cert.family_count = f.count();
    cert.tail = f.tail;
    cert.mode = config.mode;
    cert.method = config.method;
    cert.rank_tol = config.rank_tol;
    cert.lambda_floor = config.lambda_floor;
    cert.w = w;
    cert.lambda = std::move(lambda);
    cert.lambda_eff = aggregate_weights(cert.lambda, f);
    cert.t_norm = t.norm;

    cert.w_norms.reserve(w.size());
    for (const Vec& wn : w) cert.w_norms.push_back(norm(wn));
    cert.gamma_supports.reserve(z.size());
    for (const Approximant& ap : z.items) {
        std::vector<std::size_t> keys;
        keys.reserve(ap.gamma.size());
        for (const auto& [k, g] : ap.gamma) keys.push_back(k);
        cert.gamma_supports.push_back(std::move(keys));
    }

    run_stage("verifier", [&] {
        VerificationReport report;
        report.seed = config.seed;
        report.sample_count = config.samples;
        const std::vector<Vec> xs = draw_samples(f.dim, config.samples, config.seed);

        for (CheckEntry& e : check_chain(chain, u)) report.add(std::move(e));

        CheckEntry identity = check_identity(w, z);
        cert.identity_residual = identity.lhs;
        report.add(std::move(identity));

        std::vector<CheckEntry> frame = check_lower_frame(f, cert.lambda_eff, xs);
        for (CheckEntry& e : frame) {
            if (e.name == "lower_frame_min_eig") cert.min_frame_eig = e.rhs;
            report.add(std::move(e));
        }

        CheckEntry worst_z = check_z_bound(z, f, xs.front());
        for (std::size_t i = 1; i < xs.size(); ++i) {
            CheckEntry e = check_z_bound(z, f, xs[i]);
            if (e.slack < worst_z.slack || (!e.passed && worst_z.passed)) worst_z = e;
        }
        report.add(std::move(worst_z));

        if (f.tail == TailMode::zero) {
            // context metric only; an ill-conditioned unweighted operator
            // does not invalidate the weighted certificate
            try {
                cert.uniform_baseline = uniform_baseline(f);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::degenerate) throw;
            }
        }

        report.sort_by_name();
        cert.report = std::move(report);
        return 0;
    });

    return cert;
}

std::string certificate_to_json(const ScalingCertificate& cert) {
    ordered_json j;
    j["dim"] = cert.dim;
    j["mode"] = approx_mode_name(cert.mode);
    j["method"] = solve_method_name(cert.method);
    j["T_norm"] = cert.t_norm;
    j["identity_residual"] = cert.identity_residual;
    j["min_frame_eig"] = cert.min_frame_eig;

    ordered_json lam = ordered_json::array();
    for (const auto& [k, v] : cert.lambda) {
        ordered_json row;
        row["k"] = k;
        row["value"] = v;
        row["log2"] = std::log2(v);
        lam.push_back(std::move(row));
    }
    j["lambda"] = std::move(lam);

    if (cert.tail == TailMode::cyclic) {
        ordered_json eff = ordered_json::array();
        for (const auto& [k, v] : cert.lambda_eff) {
            ordered_json row;
            row["k"] = k;
            row["value"] = v;
            row["log2"] = std::log2(v);
            eff.push_back(std::move(row));
        }
        j["lambda_eff"] = std::move(eff);
    }

    j["w_norms"] = cert.w_norms;
    j["gamma_supports"] = cert.gamma_supports;

    ordered_json checks = ordered_json::array();
    for (const CheckEntry& e : cert.report.checks) {
        ordered_json row;
        row["name"] = e.name;
        row["passed"] = e.passed;
        row["lhs"] = e.lhs;
        row["rhs"] = e.rhs;
        row["slack"] = e.slack;
        checks.push_back(std::move(row));
    }
    j["checks"] = std::move(checks);
    j["seed"] = cert.report.seed;
    j["samples"] = cert.report.sample_count;
    if (cert.uniform_baseline) j["uniform_baseline"] = *cert.uniform_baseline;

    ordered_json config;
    config["tail"] = cert.tail == TailMode::zero ? "zero" : "cyclic";
    config["count"] = cert.family_count;
    config["mode"] = approx_mode_name(cert.mode);
    config["method"] = solve_method_name(cert.method);
    config["rank_tol"] = cert.rank_tol;
    config["lambda_floor"] = cert.lambda_floor;
    config["samples"] = cert.report.sample_count;
    config["seed"] = cert.report.seed;
    j["config"] = std::move(config);

    return j.dump(2) + "\n";
}

StoredCertificate parse_certificate_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorKind::parse, std::string("certificate JSON does not parse: ") + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("lambda"))
        fail(ErrorKind::input, "certificate JSON must carry dim and lambda");
    StoredCertificate cert;
    cert.dim = j["dim"].get<std::size_t>();
    if (!j["lambda"].is_array())
        fail(ErrorKind::input, "certificate lambda must be an array of {k, value}");
    for (const auto& row : j["lambda"]) {
        if (!row.is_object() || !row.contains("k") || !row.contains("value"))
            fail(ErrorKind::input, "certificate lambda entries must carry k and value");
        cert.lambda[row["k"].get<std::size_t>()] = row["value"].get<double>();
    }
    return cert;
}

}  // namespace framescale
