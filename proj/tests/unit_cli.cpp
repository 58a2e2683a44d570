#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

/// Run the real binary (path from the KDINFER_CLI environment variable)
/// with stdout/stderr captured.
CliResult run_cli(const std::vector<std::string>& args) {
    const char* bin = std::getenv("KDINFER_CLI");
    REQUIRE_MESSAGE(bin != nullptr, "KDINFER_CLI must point at the binary");

    static int counter = 0;
    static const std::string capture_dir = oracle::make_temp_dir("cli_capture");
    std::string out_path = capture_dir + "/out" + std::to_string(counter);
    std::string err_path = capture_dir + "/err" + std::to_string(counter);
    ++counter;

    std::string cmd = shell_quote(bin);
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " >" + shell_quote(out_path) + " 2>" + shell_quote(err_path);

    int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out);
    out << content;
}

/// The truth table carries an effect column; eval wants the bare pair list.
void truth_to_reference(const std::string& truth_path, const std::string& ref_path) {
    std::ifstream in(truth_path);
    REQUIRE(in);
    std::ofstream out(ref_path, std::ios::binary);
    out << "regulator\ttarget\n";
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        auto cut = line.rfind('\t');
        out << line.substr(0, cut) << '\n';
    }
}

const char* kSmallSim = R"({
  "n_genes": 60,
  "n_regulators": 10,
  "plates": 4,
  "controls_per_plate": 5,
  "knockdowns_per_regulator": 6,
  "edge_density": 0.08,
  "seed": 21
})";

}  // namespace

TEST_CASE("a bare invocation demands a subcommand") {
    auto r = run_cli({});
    CHECK(r.exit_code != 0);
}

TEST_CASE("simulate is deterministic per seed and reports its outputs") {
    auto dir = oracle::make_temp_dir("cli_sim");
    std::string cfg = dir + "/sim.json";
    write_file(cfg, kSmallSim);

    auto r1 = run_cli({"simulate", "--sim-config", cfg, "--out-prefix", dir + "/a", "--seed", "9"});
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.out.find("\"seed\": 9") != std::string::npos);

    auto r2 = run_cli({"simulate", "--sim-config", cfg, "--out-prefix", dir + "/b", "--seed", "9"});
    REQUIRE(r2.exit_code == 0);

    for (const char* suffix : {"_expression.tsv", "_metadata.tsv", "_truth.tsv"}) {
        CHECK(slurp(dir + "/a" + suffix) == slurp(dir + "/b" + suffix));
    }

    // A different seed must actually change the data.
    auto r3 = run_cli({"simulate", "--sim-config", cfg, "--out-prefix", dir + "/c", "--seed", "10"});
    REQUIRE(r3.exit_code == 0);
    CHECK(slurp(dir + "/a_expression.tsv") != slurp(dir + "/c_expression.tsv"));

    fs::remove_all(dir);
}

TEST_CASE("an empty network leaves only the truth header") {
    auto dir = oracle::make_temp_dir("cli_sim_empty");
    std::string cfg = dir + "/sim.json";
    write_file(cfg, R"({"n_genes": 20, "n_regulators": 4, "edge_density": 0.0, "seed": 3})");

    auto r = run_cli({"simulate", "--sim-config", cfg, "--out-prefix", dir + "/s"});
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(dir + "/s_truth.tsv") == "regulator\ttarget\teffect\n");
    fs::remove_all(dir);
}

TEST_CASE("sim config mistakes are named") {
    auto dir = oracle::make_temp_dir("cli_sim_bad");
    std::string cfg = dir + "/sim.json";
    write_file(cfg, R"({"n_gene": 20})");

    auto r = run_cli({"simulate", "--sim-config", cfg, "--out-prefix", dir + "/s"});
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(r.err.find("n_gene") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("simulate, infer and eval compose into one loop") {
    auto dir = oracle::make_temp_dir("cli_loop");
    std::string cfg = dir + "/sim.json";
    write_file(cfg, kSmallSim);

    auto sim = run_cli({"simulate", "--sim-config", cfg, "--out-prefix", dir + "/s"});
    REQUIRE(sim.exit_code == 0);

    auto infer = run_cli({"infer", "--expression", dir + "/s_expression.tsv", "--metadata",
                          dir + "/s_metadata.tsv", "--output", dir + "/edges.tsv"});
    REQUIRE_MESSAGE(infer.exit_code == 0, infer.err);
    CHECK(infer.out.find("\"pairs_scored\"") != std::string::npos);
    CHECK(infer.out.find("\"passes\": 2") != std::string::npos);

    // Thread count must not leak into the output bytes.
    auto threaded = run_cli({"infer", "--expression", dir + "/s_expression.tsv", "--metadata",
                             dir + "/s_metadata.tsv", "--output", dir + "/edges_t4.tsv",
                             "--threads", "4"});
    REQUIRE(threaded.exit_code == 0);
    CHECK(slurp(dir + "/edges.tsv") == slurp(dir + "/edges_t4.tsv"));

    truth_to_reference(dir + "/s_truth.tsv", dir + "/reference.tsv");
    auto eval = run_cli({"eval", "--edgelist", dir + "/edges.tsv", "--reference",
                         dir + "/reference.tsv", "--output", dir + "/confusion.tsv",
                         "--curve-out", dir + "/curve.tsv"});
    REQUIRE_MESSAGE(eval.exit_code == 0, eval.err);
    CHECK(eval.out.find("\"auprc\"") != std::string::npos);
    CHECK(slurp(dir + "/confusion.tsv").find("cutoff\ttp\tfp\tfn\ttn\tpvalue") == 0);
    CHECK(slurp(dir + "/curve.tsv").find("# baseline_precision=") == 0);

    fs::remove_all(dir);
}

TEST_CASE("alternative g policies run end to end") {
    auto dir = oracle::make_temp_dir("cli_gpolicy");
    std::string cfg = dir + "/sim.json";
    write_file(cfg, kSmallSim);
    REQUIRE(run_cli({"simulate", "--sim-config", cfg, "--out-prefix", dir + "/s"}).exit_code == 0);

    std::vector<std::string> base = {"infer", "--expression", dir + "/s_expression.tsv",
                                     "--metadata", dir + "/s_metadata.tsv"};
    auto unit = base;
    unit.insert(unit.end(), {"--output", dir + "/unit.tsv", "--g-policy", "unit"});
    REQUIRE(run_cli(unit).exit_code == 0);

    auto fixed = base;
    fixed.insert(fixed.end(), {"--output", dir + "/fixed.tsv", "--g-policy", "fixed:4"});
    REQUIRE(run_cli(fixed).exit_code == 0);

    // Different g, different posteriors.
    CHECK(slurp(dir + "/unit.tsv") != slurp(dir + "/fixed.tsv"));
    fs::remove_all(dir);
}

TEST_CASE("flag mistakes come back as diagnostics, not crashes") {
    auto dir = oracle::make_temp_dir("cli_flags");
    std::string cfg = dir + "/sim.json";
    write_file(cfg, kSmallSim);
    REQUIRE(run_cli({"simulate", "--sim-config", cfg, "--out-prefix", dir + "/s"}).exit_code == 0);
    std::vector<std::string> base = {"infer", "--expression", dir + "/s_expression.tsv",
                                     "--metadata", dir + "/s_metadata.tsv", "--output",
                                     dir + "/e.tsv"};

    auto bad_policy = base;
    bad_policy.insert(bad_policy.end(), {"--g-policy", "fixed:junk"});
    auto r1 = run_cli(bad_policy);
    CHECK(r1.exit_code == 1);
    CHECK(r1.err.find("--g-policy") != std::string::npos);

    auto bad_mode = base;
    bad_mode.insert(bad_mode.end(), {"--mode", "lemons"});
    auto r2 = run_cli(bad_mode);
    CHECK(r2.exit_code == 1);
    CHECK(r2.err.find("--mode") != std::string::npos);

    auto unknown = base;
    unknown.push_back("--frobnicate");
    CHECK(run_cli(unknown).exit_code != 0);

    fs::remove_all(dir);
}

TEST_CASE("missing inputs name the offending path") {
    auto dir = oracle::make_temp_dir("cli_missing");
    std::string cfg = dir + "/sim.json";
    write_file(cfg, kSmallSim);
    REQUIRE(run_cli({"simulate", "--sim-config", cfg, "--out-prefix", dir + "/s"}).exit_code == 0);

    auto r = run_cli({"infer", "--expression", dir + "/s_expression.tsv", "--metadata",
                      dir + "/absent.tsv", "--output", dir + "/e.tsv"});
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(r.err.find(dir + "/absent.tsv") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("eval reproduces the fixture confusion counts") {
    auto dir = oracle::make_temp_dir("cli_eval");
    auto fx = oracle::write_assessment_fixture(dir);

    auto r = run_cli({"eval", "--edgelist", fx.edgelist_path, "--reference", fx.reference_path,
                      "--output", dir + "/confusion.tsv", "--cutoffs", "0.5,0.95"});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out.find("\"cutoff\": 0.5") != std::string::npos);
    CHECK(r.out.find("\"tp\": 41") != std::string::npos);
    CHECK(r.out.find("\"cutoff\": 0.95") != std::string::npos);
    CHECK(r.out.find("\"tp\": 14") != std::string::npos);

    // Cutoffs land in the confusion report, one row each plus the header.
    auto report = slurp(dir + "/confusion.tsv");
    CHECK(std::count(report.begin(), report.end(), '\n') == 3);

    // A reference with no overlap is an error, not a silent zero.
    write_file(dir + "/tiny_ref.tsv", "regulator\ttarget\nZZ1\tZZ2\n");
    auto r2 = run_cli({"eval", "--edgelist", fx.edgelist_path, "--reference", dir + "/tiny_ref.tsv",
                       "--output", dir + "/c2.tsv"});
    CHECK(r2.exit_code == 1);
    CHECK(r2.err.find("universe") != std::string::npos);

    fs::remove_all(dir);
}
