#include "framescale/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace framescale {

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::input, "cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::input, "cannot open output file: " + path);
    f << text;
}

VectorFamily resolve_family(const RunConfig& config) {
    if (config.generator) {
        VectorFamily f = generate_family(*config.generator);
        if (config.tail_override) f.tail = *config.tail_override;
        return f;
    }
    if (config.input_path.empty())
        fail(ErrorKind::input, "either --gen KIND or --input PATH is required");
    FileFormat fmt = FileFormat::json;
    if (config.input_path.size() >= 4 &&
        config.input_path.compare(config.input_path.size() - 4, 4, ".csv") == 0)
        fmt = FileFormat::csv;
    return load_family(config.input_path, fmt);
}

PipelineConfig pipeline_config(const RunConfig& config) {
    PipelineConfig pc;
    pc.mode = config.mode;
    pc.method = config.method;
    pc.rank_tol = config.rank_tol;
    pc.lambda_floor = config.lambda_floor;
    pc.samples = config.samples;
    pc.seed = config.seed;
    return pc;
}

ordered_json config_echo(const RunConfig& config) {
    ordered_json j;
    switch (config.command) {
        case Command::generate: j["command"] = "generate"; break;
        case Command::analyze: j["command"] = "analyze"; break;
        case Command::verify: j["command"] = "verify"; break;
        case Command::sweep: j["command"] = "sweep"; break;
    }
    if (config.generator) {
        ordered_json g;
        g["kind"] = generator_kind_name(config.generator->kind);
        g["dim"] = config.generator->dim;
        g["count"] = config.generator->count;
        g["damping"] = config.generator->damping;
        g["seed"] = config.generator->seed;
        j["generator"] = std::move(g);
    }
    if (!config.input_path.empty()) j["input"] = config.input_path;
    if (!config.cert_path.empty()) j["cert"] = config.cert_path;
    j["mode"] = approx_mode_name(config.mode);
    j["method"] = solve_method_name(config.method);
    j["rank_tol"] = config.rank_tol;
    j["lambda_floor"] = config.lambda_floor;
    j["samples"] = config.samples;
    j["seed"] = config.seed;
    j["format"] = config.format == FileFormat::json ? "json" : "csv";
    if (!config.out_path.empty()) j["out"] = config.out_path;
    return j;
}

std::string lambda_csv(const ScalingCertificate& cert) {
    std::ostringstream os;
    os << "k,value,log2\n";
    for (const auto& [k, v] : cert.lambda)
        os << k << ',' << format_double(v) << ',' << format_double(std::log2(v)) << '\n';
    return os.str();
}

}  // namespace

std::string format_double(double x) { return ordered_json(x).dump(); }

int cmd_generate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    (void)err;
    if (!config.generator)
        fail(ErrorKind::input, "generate requires --gen KIND and --dim D");
    VectorFamily f = generate_family(*config.generator);
    if (config.tail_override) f.tail = *config.tail_override;
    const std::string text =
        config.format == FileFormat::csv ? family_to_csv(f) : family_to_json(f);
    write_output(config.out_path, text, out);
    if (!config.out_path.empty())
        out << "wrote " << (config.format == FileFormat::csv ? "csv" : "json") << " family ("
            << "d=" << f.dim << " N=" << f.count() << ") to " << config.out_path << "\n";
    return kExitOk;
}

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const VectorFamily f = resolve_family(config);
    const ScalingCertificate cert = run_pipeline(f, pipeline_config(config));

    std::string text;
    if (config.format == FileFormat::csv) {
        text = lambda_csv(cert);
    } else {
        ordered_json j = ordered_json::parse(certificate_to_json(cert));
        ordered_json echo = config_echo(config);
        for (auto it = echo.begin(); it != echo.end(); ++it) j["config"][it.key()] = it.value();
        text = j.dump(2) + "\n";
    }
    write_output(config.out_path, text, out);
    // Keep stdout parseable when the artifact itself goes there.
    std::ostream& summary = config.out_path.empty() ? err : out;

    std::size_t passed = 0;
    for (const CheckEntry& e : cert.report.checks)
        if (e.passed) ++passed;
    double lam_min = 0.0, lam_max = 0.0;
    if (!cert.lambda.empty()) {
        lam_min = cert.lambda.begin()->second;
        lam_max = lam_min;
        for (const auto& [k, v] : cert.lambda) {
            lam_min = std::min(lam_min, v);
            lam_max = std::max(lam_max, v);
        }
    }
    summary << "family: d=" << cert.dim << " N=" << cert.family_count
            << " tail=" << (cert.tail == TailMode::zero ? "zero" : "cyclic") << "\n"
            << "mode=" << approx_mode_name(cert.mode)
            << " method=" << solve_method_name(cert.method) << "\n"
            << "T_norm=" << format_double(cert.t_norm)
            << " identity_residual=" << format_double(cert.identity_residual) << "\n"
            << "min_frame_eig=" << format_double(cert.min_frame_eig) << "\n"
            << "lambda: " << cert.lambda.size() << " keys, min=" << format_double(lam_min)
            << " max=" << format_double(lam_max) << "\n";
    if (cert.uniform_baseline)
        summary << "uniform_baseline=" << format_double(*cert.uniform_baseline) << "\n";
    summary << "checks: " << passed << "/" << cert.report.checks.size() << " passed\n";

    return cert.report.all_passed() ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
    (void)err;
    if (config.cert_path.empty())
        fail(ErrorKind::input, "verify requires --cert PATH");
    if (config.input_path.empty())
        fail(ErrorKind::input, "verify requires --input PATH (the family file)");

    const StoredCertificate cert = parse_certificate_json(read_file(config.cert_path));
    FileFormat fmt = FileFormat::json;
    if (config.input_path.size() >= 4 &&
        config.input_path.compare(config.input_path.size() - 4, 4, ".csv") == 0)
        fmt = FileFormat::csv;
    const VectorFamily f = load_family(config.input_path, fmt);
    if (f.dim != cert.dim) {
        std::ostringstream os;
        os << "certificate dimension " << cert.dim << " does not match family dimension "
           << f.dim;
        fail(ErrorKind::input, os.str());
    }

    const std::map<std::size_t, double> lambda_eff = aggregate_weights(cert.lambda, f);
    const std::vector<CheckEntry> checks =
        check_lower_frame(f, lambda_eff, config.samples, config.seed);

    bool all = true;
    for (const CheckEntry& e : checks) {
        out << (e.passed ? "pass" : "FAIL") << "  " << e.name
            << "  lhs=" << format_double(e.lhs) << " rhs=" << format_double(e.rhs) << "\n";
        all = all && e.passed;
    }
    return all ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
    (void)err;
    if (!config.generator)
        fail(ErrorKind::input, "sweep requires --gen KIND");
    if (config.dims.empty())
        fail(ErrorKind::input, "sweep requires --dims D1,D2,...");
    for (std::size_t d : config.dims)
        if (d == 0) fail(ErrorKind::input, "sweep dimensions must be at least 1");

    std::ostringstream csv;
    csv << "d,N,mode,T_norm,min_frame_eig,max_lambda,runtime_ms,status\n";
    ordered_json rows = ordered_json::array();
    bool all_ok = true;
    for (std::size_t d : config.dims) {
        GeneratorSpec gen = *config.generator;
        gen.dim = d;
        // counts scale with the dimension unless the caller pinned a larger one
        if (gen.kind == GeneratorKind::orthonormal || gen.kind == GeneratorKind::shifted_sum)
            gen.count = 0;
        else if (gen.count != 0 && gen.count < d)
            gen.count = d;

        const auto start = std::chrono::steady_clock::now();
        std::string status = "ok";
        double t_norm = std::nan("");
        double min_eig = std::nan("");
        double max_lambda = std::nan("");
        try {
            const VectorFamily f = generate_family(gen);
            const ScalingCertificate cert = run_pipeline(f, pipeline_config(config));
            t_norm = cert.t_norm;
            min_eig = cert.min_frame_eig;
            for (const auto& [k, v] : cert.lambda) max_lambda = std::fmax(max_lambda, v);
            if (!cert.report.all_passed()) {
                status = "check_failed";
                all_ok = false;
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::overflow) {
                status = "overflow";  // flagged, not fatal
            } else {
                throw;
            }
        }
        const auto stop = std::chrono::steady_clock::now();
        const double ms =
            config.timings
                ? std::chrono::duration<double, std::milli>(stop - start).count()
                : 0.0;
        csv << d << ',' << (gen.count == 0 ? d : gen.count) << ','
            << approx_mode_name(config.mode) << ',' << format_double(t_norm) << ','
            << format_double(min_eig) << ',' << format_double(max_lambda) << ','
            << format_double(ms) << ',' << status << '\n';
        ordered_json row;
        row["d"] = d;
        row["N"] = gen.count == 0 ? d : gen.count;
        row["mode"] = approx_mode_name(config.mode);
        row["T_norm"] = t_norm;
        row["min_frame_eig"] = min_eig;
        row["max_lambda"] = max_lambda;
        row["runtime_ms"] = ms;
        row["status"] = status;
        rows.push_back(std::move(row));
    }
    write_output(config.out_path,
                 config.format == FileFormat::json ? rows.dump(2) + "\n" : csv.str(), out);
    if (!config.out_path.empty())
        out << "wrote sweep (" << config.dims.size() << " rows) to " << config.out_path << "\n";
    return all_ok ? kExitOk : kExitCheckFailed;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.command) {
            case Command::generate: return cmd_generate(config, out, err);
            case Command::analyze: return cmd_analyze(config, out, err);
            case Command::verify: return cmd_verify(config, out, err);
            case Command::sweep: return cmd_sweep(config, out, err);
        }
        fail(ErrorKind::internal, "unknown command");
    } catch (const Error& e) {
        err << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace framescale
