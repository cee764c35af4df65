#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path work_dir() {
    fs::path p = fs::temp_directory_path() / "framescale_cli_tests";
    fs::create_directories(p);
    return p;
}

// Runs the real binary; stdout/stderr captured through files.
RunResult run_cli(const std::string& args, const std::string& tag) {
    const fs::path dir = work_dir();
    const fs::path out = dir / (tag + ".out");
    const fs::path err = dir / (tag + ".err");
    std::ostringstream cmd;
    cmd << FRAMESCALE_CLI_PATH << " " << args << " > " << out << " 2> " << err;
    const int raw = std::system(cmd.str().c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string write_file(const std::string& name, const std::string& text) {
    const fs::path p = work_dir() / name;
    std::ofstream f(p, std::ios::binary);
    f << text;
    return p.string();
}

const char* kTwoVectorJson =
    R"({"field":"real","dim":2,"tail":"zero","vectors":[[1,0],[1,1]]})";
const char* kRankDeficientJson =
    R"({"field":"real","dim":2,"tail":"zero","vectors":[[1,0],[2,0]]})";

}  // namespace

TEST_CASE("analyze certifies a generated orthonormal family") {
    const fs::path cert = work_dir() / "ortho_cert.json";
    RunResult r = run_cli("analyze --gen orthonormal --dim 4 --out " + cert.string(),
                          "analyze_ortho");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("min_frame_eig=5.656854249492381") != std::string::npos);
    CHECK(r.out.find("checks: 9/9 passed") != std::string::npos);

    auto j = nlohmann::json::parse(slurp(cert));
    CHECK(j["dim"] == 4);
    CHECK(j["mode"] == "exact");
    CHECK(j["method"] == "direct");
    CHECK(j.contains("T_norm"));
    CHECK(j.contains("identity_residual"));
    CHECK(j.contains("min_frame_eig"));
    CHECK(j["lambda"].size() == 4);
    CHECK(j["lambda"][0].contains("k"));
    CHECK(j["lambda"][0].contains("value"));
    CHECK(j["lambda"][0].contains("log2"));
    CHECK(j["w_norms"].size() == 8);
    CHECK(j["gamma_supports"].size() == 8);
    CHECK(j.contains("checks"));
    CHECK(j["config"]["command"] == "analyze");
}

TEST_CASE("analyze exits 1 on a rank-deficient input family") {
    const std::string fam = write_file("rank_deficient.json", kRankDeficientJson);
    RunResult r = run_cli("analyze --input " + fam, "analyze_bad");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("total") != std::string::npos);
}

TEST_CASE("analyze quantized+neumann keeps T inside (0, 1/2]") {
    const std::string fam = write_file("two_vec.json", kTwoVectorJson);
    const fs::path cert = work_dir() / "two_quant.json";
    RunResult r = run_cli("analyze --input " + fam +
                              " --mode quantized --method neumann --out " + cert.string(),
                          "analyze_quant");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(slurp(cert));
    const double t = j["T_norm"].get<double>();
    CHECK(t > 0.0);
    CHECK(t <= 0.5);
}

TEST_CASE("verify round-trips a certificate and catches scaled-down weights") {
    const fs::path dir = work_dir();
    const fs::path fam = dir / "shifted5.json";
    const fs::path cert = dir / "shifted5_cert.json";
    CHECK(run_cli("generate --gen shifted_sum --dim 5 --out " + fam.string(), "gen5")
              .exit_code == 0);
    CHECK(run_cli("analyze --input " + fam.string() + " --out " + cert.string(), "ana5")
              .exit_code == 0);
    CHECK(run_cli("verify --cert " + cert.string() + " --input " + fam.string(), "ver5")
              .exit_code == 0);

    // scale every lambda down by 1e-6: the eigen oracle must fall below 1
    auto j = nlohmann::json::parse(slurp(cert));
    for (auto& row : j["lambda"]) row["value"] = row["value"].get<double>() * 1e-6;
    const std::string small = write_file("shifted5_small.json", j.dump());
    RunResult r = run_cli("verify --cert " + small + " --input " + fam.string(), "ver5s");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("FAIL") != std::string::npos);

    // truncated certificate: parse error
    const std::string broken = write_file("broken_cert.json", "{\"dim\": 5, \"lambda");
    CHECK(run_cli("verify --cert " + broken + " --input " + fam.string(), "ver5b")
              .exit_code == 1);

    // mismatched dimensions
    const fs::path fam4 = dir / "shifted4.json";
    CHECK(run_cli("generate --gen shifted_sum --dim 4 --out " + fam4.string(), "gen4")
              .exit_code == 0);
    CHECK(run_cli("verify --cert " + cert.string() + " --input " + fam4.string(), "ver45")
              .exit_code == 1);
}

TEST_CASE("sweep emits one row per dimension with the theorem bound holding") {
    const fs::path csv = work_dir() / "sweep.csv";
    RunResult r = run_cli("sweep --gen shifted_sum --dims 4,8,16 --samples 100 --out " +
                              csv.string(),
                          "sweep3");
    CHECK(r.exit_code == 0);
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    CHECK(line == "d,N,mode,T_norm,min_frame_eig,max_lambda,runtime_ms,status");
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');  // d
        std::getline(ss, cell, ',');  // N
        std::getline(ss, cell, ',');  // mode
        std::getline(ss, cell, ',');  // T_norm
        std::getline(ss, cell, ',');  // min_frame_eig
        CHECK(std::stod(cell) >= 1.0 - 1e-8);
        CHECK(line.find(",ok") != std::string::npos);
    }
    CHECK(rows == 3);
}

TEST_CASE("sweep --format json emits the same rows as objects") {
    RunResult r = run_cli("sweep --gen shifted_sum --dims 4,8 --samples 50 --format json",
                          "sweep_json");
    CHECK(r.exit_code == 0);
    auto rows = nlohmann::json::parse(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["d"] == 4);
    CHECK(rows[1]["d"] == 8);
    for (const auto& row : rows) {
        CHECK(row["status"] == "ok");
        CHECK(row["min_frame_eig"].get<double>() >= 1.0 - 1e-8);
        CHECK(row["runtime_ms"] == 0.0);
    }
}

TEST_CASE("sweep rejects a zero dimension as a usage error") {
    RunResult r = run_cli("sweep --gen shifted_sum --dims 0", "sweep0");
    CHECK(r.exit_code == 1);
}

TEST_CASE("the tail override turns a generated family cyclic") {
    RunResult g = run_cli("generate --gen random_gaussian --dim 3 --count 5 --seed 2 "
                          "--tail cyclic",
                          "gen_tail");
    CHECK(g.exit_code == 0);
    CHECK(nlohmann::json::parse(g.out)["tail"] == "cyclic");

    RunResult r = run_cli("analyze --gen random_gaussian --dim 3 --count 5 --seed 2 "
                          "--tail cyclic --samples 100 --out " +
                              (work_dir() / "cyc_rand.json").string(),
                          "ana_tail");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(slurp(work_dir() / "cyc_rand.json"));
    CHECK(j["config"]["tail"] == "cyclic");
    CHECK(j.contains("lambda_eff"));
}

TEST_CASE("generate writes loadable families in both formats") {
    RunResult j = run_cli("generate --gen orthonormal --dim 3", "gen_json");
    CHECK(j.exit_code == 0);
    auto parsed = nlohmann::json::parse(j.out);
    CHECK(parsed["dim"] == 3);
    CHECK(parsed["vectors"].size() == 3);

    RunResult c = run_cli("generate --gen orthonormal --dim 3 --format csv", "gen_csv");
    CHECK(c.exit_code == 0);
    CHECK(c.out == "1.0,0.0,0.0\n0.0,1.0,0.0\n0.0,0.0,1.0\n");
}

TEST_CASE("identical invocations produce byte-identical outputs") {
    const fs::path dir = work_dir();
    const fs::path cert = dir / "det.json";
    const std::string base = "analyze --gen random_gaussian --dim 5 --count 9 --seed 9 "
                             "--mode quantized --samples 200 --out " + cert.string();
    RunResult r1 = run_cli(base, "det1");
    const std::string bytes1 = slurp(cert);
    RunResult r2 = run_cli(base, "det2");
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    CHECK(r1.out == r2.out);
    CHECK(bytes1 == slurp(cert));

    RunResult s1 = run_cli("sweep --gen damped_tail --dims 4,8 --samples 50", "sdet1");
    RunResult s2 = run_cli("sweep --gen damped_tail --dims 4,8 --samples 50", "sdet2");
    CHECK(s1.out == s2.out);

    RunResult g1 = run_cli("generate --gen random_gaussian --dim 4 --count 6 --seed 3",
                           "gdet1");
    RunResult g2 = run_cli("generate --gen random_gaussian --dim 4 --count 6 --seed 3",
                           "gdet2");
    CHECK(g1.out == g2.out);
}

TEST_CASE("analyze accepts CSV families and emits the lambda CSV projection") {
    const std::string fam = write_file("two_vec.csv", "1,0\n1,1\n");
    const fs::path out = work_dir() / "lam.csv";
    RunResult r = run_cli("analyze --input " + fam + " --format csv --out " + out.string(),
                          "analyze_csv");
    CHECK(r.exit_code == 0);
    std::istringstream in(slurp(out));
    std::string header, row1, row2;
    std::getline(in, header);
    std::getline(in, row1);
    std::getline(in, row2);
    CHECK(header == "k,value,log2");
    CHECK(row1 == "1,11.313708498984765,3.5000000000000004");
    CHECK(row2.substr(0, 2) == "2,");
}

TEST_CASE("analyze handles the smallest family and the lambda floor") {
    RunResult one = run_cli("analyze --gen orthonormal --dim 1 --out " +
                                (work_dir() / "d1.json").string(),
                            "analyze_d1");
    CHECK(one.exit_code == 0);
    CHECK(one.out.find("min_frame_eig=5.656854249492381") != std::string::npos);

    const fs::path cert = work_dir() / "floored.json";
    RunResult r = run_cli("analyze --gen orthonormal --dim 2 --lambda-floor 1e-300 --out " +
                              cert.string(),
                          "analyze_floor");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(slurp(cert));
    for (const auto& row : j["lambda"]) CHECK(row["value"].get<double>() > 0.0);
    CHECK(j["config"]["lambda_floor"] == 1e-300);
}

TEST_CASE("verify aggregates cyclic certificates onto family indices") {
    const fs::path dir = work_dir();
    const fs::path fam = dir / "cyclic.json";
    const fs::path cert = dir / "cyclic_cert.json";
    CHECK(run_cli("generate --gen cyclic_spanning --dim 3 --count 5 --out " + fam.string(),
                  "genc")
              .exit_code == 0);
    CHECK(run_cli("analyze --input " + fam.string() + " --out " + cert.string(), "anac")
              .exit_code == 0);
    CHECK(run_cli("verify --cert " + cert.string() + " --input " + fam.string(), "verc")
              .exit_code == 0);
}

TEST_CASE("malformed usage never aborts") {
    CHECK(run_cli("analyze --input /nonexistent/file.json", "missing").exit_code == 1);
    CHECK(run_cli("analyze --gen unknown_kind --dim 3", "badkind").exit_code == 1);
    CHECK(run_cli("frobnicate", "badcmd").exit_code == 1);
    CHECK(run_cli("analyze --gen orthonormal --dim 3 --rank-tol 0", "badtol").exit_code == 1);
    CHECK(run_cli("--help", "help").exit_code == 0);

    const std::string truncated = write_file("truncated.json", "{\"dim\": 2, \"vec");
    CHECK(run_cli("analyze --input " + truncated, "trunc").exit_code == 1);
}
