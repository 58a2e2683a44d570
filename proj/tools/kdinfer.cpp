#include <charconv>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kdinfer/errors.hpp"
#include "kdinfer/pipeline.hpp"

namespace {

bool parse_double(const std::string& text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

/// --prior takes either a probability or a path to a prior table.
void apply_prior_flag(const std::string& value, kdinfer::InferConfig& config) {
    double p = 0.0;
    if (parse_double(value, p)) {
        config.prior_scalar = p;
        config.prior_table_path.clear();
    } else {
        config.prior_table_path = value;
    }
}

kdinfer::GPolicy parse_g_policy(const std::string& token) {
    if (token == "sqrt") return kdinfer::GPolicy::sqrt_n();
    if (token == "unit") return kdinfer::GPolicy::unit_information();
    if (token.rfind("fixed:", 0) == 0) {
        double v = 0.0;
        if (!parse_double(token.substr(6), v)) {
            throw kdinfer::ValidationError("bad --g-policy value: \"" + token + "\"");
        }
        return kdinfer::GPolicy::fixed(v);
    }
    throw kdinfer::ValidationError("--g-policy must be sqrt, unit or fixed:<v>, got \"" + token +
                                   "\"");
}

kdinfer::PipelineMode parse_mode(const std::string& token) {
    if (token == "knockdown") return kdinfer::PipelineMode::knockdown;
    if (token == "two-class") return kdinfer::PipelineMode::two_class;
    throw kdinfer::ValidationError("--mode must be knockdown or two-class, got \"" + token + "\"");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regulatory edge inference from knockdown expression screens"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);

    // --- infer ---------------------------------------------------------
    auto* infer = app.add_subcommand("infer", "Score regulator-target edges from a screen");
    kdinfer::InferConfig infer_config;
    std::string prior_flag = "0.0005";
    std::string g_policy_flag = "sqrt";
    std::string mode_flag = "knockdown";
    infer->add_option("--expression", infer_config.expression_path,
                      "Expression TSV (experiments x genes)");
    infer->add_option("--metadata", infer_config.metadata_path, "Experiment metadata TSV");
    infer->add_option("--output", infer_config.output_path, "Edgelist TSV to write");
    infer->add_option("--prior", prior_flag,
                      "Edge prior: probability, or path to a regulator/target/prior TSV")
        ->capture_default_str();
    infer->add_option("--prior-default", infer_config.prior_default,
                      "Prior for pairs a prior table omits")
        ->capture_default_str();
    infer->add_option("--g-policy", g_policy_flag, "g choice: sqrt, unit or fixed:<v>")
        ->capture_default_str();
    infer->add_option("--min-experiments", infer_config.min_experiments,
                      "Minimum paired observations per scored pair")
        ->capture_default_str();
    infer->add_option("--mode", mode_flag, "knockdown or two-class")->capture_default_str();
    infer->add_option("--threads", infer_config.threads, "Worker threads for scoring")
        ->capture_default_str();
    infer->add_option("--dump-baselines", infer_config.baselines_path,
                      "Also write the plate baselines to this TSV");

    // --- eval ----------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "Assess an edgelist against a reference standard");
    kdinfer::EvalConfig eval_config;
    eval->add_option("--edgelist", eval_config.edgelist_path, "Ranked edgelist TSV to assess");
    eval->add_option("--reference", eval_config.reference_path,
                     "Reference standard TSV (regulator/target)");
    eval->add_option("--output", eval_config.output_path, "Confusion report TSV to write");
    eval->add_option("--cutoffs", eval_config.cutoffs, "Posterior cutoffs for the 2x2 tables")
        ->delimiter(',')
        ->capture_default_str();
    eval->add_option("--curve-out", eval_config.curve_path, "Precision-recall curve TSV to write");

    // --- simulate ------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic screen with known truth");
    kdinfer::SimulateConfig sim_config;
    std::string sim_config_path;
    bool seed_given = false;
    std::uint64_t seed_flag = 0;
    simulate->add_option("--sim-config", sim_config_path, "Generator settings JSON");
    simulate->add_option("--out-prefix", sim_config.out_prefix,
                         "Prefix for _expression/_metadata/_truth.tsv");
    simulate->add_option("--seed", seed_flag, "Seed override")->each([&](const std::string&) {
        seed_given = true;
    });

    CLI11_PARSE(app, argc, argv);

    try {
        if (infer->parsed()) {
            apply_prior_flag(prior_flag, infer_config);
            infer_config.g_policy = parse_g_policy(g_policy_flag);
            infer_config.mode = parse_mode(mode_flag);
            kdinfer::InferResult result = kdinfer::run_infer(infer_config);
            std::cout << result.report.to_json() << '\n';
        } else if (eval->parsed()) {
            kdinfer::EvalRunResult result = kdinfer::run_eval(eval_config);
            std::cout << result.to_json() << '\n';
        } else if (simulate->parsed()) {
            if (!sim_config_path.empty()) {
                sim_config.sim = kdinfer::load_sim_config_file(sim_config_path);
            }
            if (seed_given) sim_config.sim.seed = seed_flag;
            kdinfer::SimulateResult result = kdinfer::run_simulate(sim_config);
            std::cout << result.to_json() << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
