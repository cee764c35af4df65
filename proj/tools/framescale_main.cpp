#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "framescale/cli.hpp"

namespace {

using framescale::RunConfig;

struct CommonFlags {
    std::string gen_kind;
    std::string input;
    std::size_t dim = 0;
    std::size_t count = 0;
    std::string tail;  // empty = generator default
    double damping = 0.9;
    std::string mode = "exact";
    std::string method = "direct";
    double rank_tol = 1e-10;
    double lambda_floor = 0.0;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_family, bool with_pipeline) {
    if (with_family) {
        cmd->add_option("--gen", f.gen_kind,
                        "generator kind: orthonormal|shifted_sum|damped_tail|"
                        "random_gaussian|cyclic_spanning");
        cmd->add_option("--input", f.input, "family file (.json or .csv)");
        cmd->add_option("--dim", f.dim, "ambient dimension d for --gen");
        cmd->add_option("--count", f.count, "number of vectors N for --gen (default per kind)");
        cmd->add_option("--tail", f.tail,
                        "override tail semantics of a generated family: zero|cyclic")
            ->check(CLI::IsMember({"zero", "cyclic"}));
        cmd->add_option("--damping", f.damping, "damping factor for damped_tail (0,1)");
    }
    if (with_pipeline) {
        cmd->add_option("--mode", f.mode, "approximation mode: exact|quantized")
            ->check(CLI::IsMember({"exact", "quantized"}));
        cmd->add_option("--method", f.method, "resolvent method: direct|neumann")
            ->check(CLI::IsMember({"direct", "neumann"}));
        cmd->add_option("--rank-tol", f.rank_tol, "relative numerical-rank threshold");
        cmd->add_option("--lambda-floor", f.lambda_floor,
                        "positive floor added to every reported lambda");
    }
    cmd->add_option("--samples", f.samples, "random unit vectors per sampling check");
    cmd->add_option("--seed", f.seed, "seed for all randomness in this invocation");
    cmd->add_option("--out", f.out, "output path (default: stdout)");
    cmd->add_option("--format", f.format, "output format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

RunConfig to_config(const CommonFlags& f, framescale::Command command) {
    RunConfig c;
    c.command = command;
    if (!f.gen_kind.empty()) {
        framescale::GeneratorSpec g;
        g.kind = framescale::generator_kind_from_name(f.gen_kind);
        if (f.dim == 0)
            framescale::fail(framescale::ErrorKind::input, "--gen requires --dim D >= 1");
        g.dim = f.dim;
        g.count = f.count;
        g.damping = f.damping;
        g.seed = f.seed;
        c.generator = g;
    }
    if (!f.tail.empty())
        c.tail_override = f.tail == "cyclic" ? framescale::TailMode::cyclic
                                             : framescale::TailMode::zero;
    c.input_path = f.input;
    c.mode = framescale::approx_mode_from_name(f.mode);
    c.method = framescale::solve_method_from_name(f.method);
    if (!(f.rank_tol > 0.0))
        framescale::fail(framescale::ErrorKind::input, "--rank-tol must be positive");
    c.rank_tol = f.rank_tol;
    if (f.lambda_floor < 0.0)
        framescale::fail(framescale::ErrorKind::input, "--lambda-floor must be nonnegative");
    c.lambda_floor = f.lambda_floor;
    if (f.samples < 1)
        framescale::fail(framescale::ErrorKind::input, "--samples must be at least 1");
    c.samples = f.samples;
    c.seed = f.seed;
    c.out_path = f.out;
    c.format = f.format == "csv" ? framescale::FileFormat::csv : framescale::FileFormat::json;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "framescale: scalings that make a total sequence satisfy the lower frame "
        "inequality, with independent verification"};
    app.require_subcommand(1);

    CommonFlags gen_flags, ana_flags, ver_flags, swe_flags;
    std::string cert_path;
    std::vector<std::size_t> dims;
    bool timings = false;

    CLI::App* gen = app.add_subcommand("generate", "generate a vector family file");
    add_common(gen, gen_flags, true, false);

    CLI::App* ana = app.add_subcommand(
        "analyze", "run the full pipeline and write a scaling certificate");
    add_common(ana, ana_flags, true, true);

    CLI::App* ver = app.add_subcommand(
        "verify", "re-verify the lower frame inequality of a stored certificate");
    ver->add_option("--cert", cert_path, "certificate JSON file")->required();
    add_common(ver, ver_flags, true, false);

    CLI::App* swe = app.add_subcommand(
        "sweep", "run the pipeline across dimensions; CSV columns: "
                 "d,N,mode,T_norm,min_frame_eig,max_lambda,runtime_ms,status "
                 "(--format json emits the rows as objects)");
    swe_flags.format = "csv";
    add_common(swe, swe_flags, true, true);
    swe->add_option("--dims", dims, "dimensions to sweep, e.g. --dims 4,8,16")
        ->delimiter(',');
    swe->add_flag("--timings", timings,
                  "fill runtime_ms with wall-clock time (breaks byte-identical reruns; "
                  "the column is 0 otherwise)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? framescale::kExitOk : framescale::kExitError;
    }

    try {
        RunConfig config;
        if (gen->parsed()) {
            config = to_config(gen_flags, framescale::Command::generate);
        } else if (ana->parsed()) {
            config = to_config(ana_flags, framescale::Command::analyze);
        } else if (ver->parsed()) {
            config = to_config(ver_flags, framescale::Command::verify);
            config.cert_path = cert_path;
        } else {
            for (std::size_t d : dims)
                if (d == 0)
                    framescale::fail(framescale::ErrorKind::input,
                                     "sweep dimensions must be at least 1");
            if (swe_flags.dim == 0 && !dims.empty()) swe_flags.dim = dims.front();
            config = to_config(swe_flags, framescale::Command::sweep);
            config.dims = dims;
            config.timings = timings;
        }
        return framescale::run_command(config, std::cout, std::cerr);
    } catch (const framescale::Error& e) {
        std::cerr << "error (" << framescale::error_kind_name(e.kind()) << "): " << e.what()
                  << "\n";
        return framescale::kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return framescale::kExitError;
    }
}
