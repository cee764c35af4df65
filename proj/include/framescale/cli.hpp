#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "framescale/family.hpp"
#include "framescale/pipeline.hpp"

namespace framescale {

// Exit codes: 0 = pass, 1 = input/usage/stage error, 2 = verification failure.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

enum class Command { generate, analyze, verify, sweep };

struct RunConfig {
    Command command = Command::analyze;

    std::string input_path;               // family file, empty when generating
    std::optional<GeneratorSpec> generator;
    std::optional<TailMode> tail_override;  // forces the tail of a generated family

    FileFormat format = FileFormat::json;
    ApproxMode mode = ApproxMode::exact;
    SolveMethod method = SolveMethod::direct;
    double rank_tol = 1e-10;
    double lambda_floor = 0.0;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    std::string out_path;                 // empty -> stdout

    std::string cert_path;                // verify only
    std::vector<std::size_t> dims;        // sweep only
    bool timings = false;                 // sweep only; wall clock breaks determinism
};

int cmd_generate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

// Shortest round-trip decimal rendering (what the JSON reports use).
std::string format_double(double x);

}  // namespace framescale
