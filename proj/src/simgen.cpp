#include "kdinfer/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include <json.hpp>

#include "kdinfer/errors.hpp"
#include "kdinfer/rng.hpp"
#include "kdinfer/running_stats.hpp"
#include "kdinfer/tsv.hpp"

namespace kdinfer {

namespace {

// Substream layout (part of the reproducibility contract; see rng.hpp):
//   0            network topology and effects
//   1            global gene means
//   1000 + p     everything on plate p (shifts, noise, missingness)
constexpr std::uint64_t kNetworkStream = 0;
constexpr std::uint64_t kGeneMeanStream = 1;
constexpr std::uint64_t kPlateStreamBase = 1000;

std::string padded_id(const char* prefix, std::int64_t index, std::int64_t max_value) {
    std::string digits = std::to_string(index);
    std::string width = std::to_string(max_value);
    std::string out = prefix;
    out.append(width.size() - digits.size(), '0');
    out += digits;
    return out;
}

}  // namespace

void SimConfig::validate() const {
    if (n_genes < 2) throw ValidationError("sim config: n_genes must be >= 2");
    if (n_regulators < 1 || n_regulators > n_genes) {
        throw ValidationError("sim config: n_regulators must lie in [1, n_genes]");
    }
    if (!(edge_density >= 0.0 && edge_density < 1.0)) {
        throw ValidationError("sim config: edge_density must lie in [0, 1)");
    }
    if (plates < 1) throw ValidationError("sim config: plates must be >= 1");
    if (controls_per_plate < 2) {
        throw ValidationError("sim config: controls_per_plate must be >= 2");
    }
    if (knockdowns_per_regulator < 3) {
        throw ValidationError("sim config: knockdowns_per_regulator must be >= 3");
    }
    if (!(knockdown_strength < 0.0)) {
        throw ValidationError("sim config: knockdown_strength must be negative");
    }
    if (!(noise_sd > 0.0)) throw ValidationError("sim config: noise_sd must be positive");
    if (!(plate_shift_sd >= 0.0)) {
        throw ValidationError("sim config: plate_shift_sd must be non-negative");
    }
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) {
        throw ValidationError("sim config: missing_rate must lie in [0, 1)");
    }
}

SimConfig load_sim_config(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("sim config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("sim config must be a JSON object");

    SimConfig c;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "n_genes") {
                c.n_genes = value.get<std::int64_t>();
            } else if (key == "n_regulators") {
                c.n_regulators = value.get<std::int64_t>();
            } else if (key == "edge_density") {
                c.edge_density = value.get<double>();
            } else if (key == "plates") {
                c.plates = value.get<std::int64_t>();
            } else if (key == "controls_per_plate") {
                c.controls_per_plate = value.get<std::int64_t>();
            } else if (key == "knockdowns_per_regulator") {
                c.knockdowns_per_regulator = value.get<std::int64_t>();
            } else if (key == "knockdown_strength") {
                c.knockdown_strength = value.get<double>();
            } else if (key == "noise_sd") {
                c.noise_sd = value.get<double>();
            } else if (key == "plate_shift_sd") {
                c.plate_shift_sd = value.get<double>();
            } else if (key == "seed") {
                c.seed = value.get<std::uint64_t>();
            } else if (key == "propagate_indirect") {
                c.propagate_indirect = value.get<bool>();
            } else if (key == "missing_rate") {
                c.missing_rate = value.get<double>();
            } else {
                throw ValidationError("sim config: unknown field \"" + key + "\"");
            }
        } catch (const nlohmann::json::exception&) {
            throw ValidationError("sim config: field \"" + key + "\" has the wrong type");
        }
    }
    c.validate();
    return c;
}

SimConfig load_sim_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    return load_sim_config(in);
}

TrueNetwork generate_network(const SimConfig& config) {
    config.validate();
    TrueNetwork net;
    net.genes.reserve(static_cast<std::size_t>(config.n_genes));
    for (std::int64_t i = 1; i <= config.n_genes; ++i) {
        net.genes.push_back(padded_id("G", i, config.n_genes));
    }

    Rng rng(config.seed, kNetworkStream);
    for (std::int64_t r = 0; r < config.n_regulators; ++r) {
        for (std::int64_t t = 0; t < config.n_genes; ++t) {
            if (t == r) continue;
            if (!rng.bernoulli(config.edge_density)) continue;
            double magnitude = rng.uniform(0.5, 2.0);
            double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
            net.edges.push_back({net.genes[static_cast<std::size_t>(r)],
                                 net.genes[static_cast<std::size_t>(t)], sign * magnitude});
        }
    }
    return net;
}

ExpressionDataset simulate_dataset(const TrueNetwork& network, const SimConfig& config) {
    config.validate();
    if (static_cast<std::int64_t>(network.genes.size()) != config.n_genes) {
        throw ValidationError("network has " + std::to_string(network.genes.size()) +
                              " genes but config says " + std::to_string(config.n_genes));
    }

    const std::size_t n_genes = network.genes.size();
    std::map<std::string, std::size_t> gene_index;
    for (std::size_t g = 0; g < n_genes; ++g) gene_index.emplace(network.genes[g], g);

    // adjacency[h] = direct targets of h, ascending by gene index.
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(n_genes);
    for (const auto& e : network.edges) {
        auto r = gene_index.find(e.regulator);
        auto t = gene_index.find(e.target);
        if (r == gene_index.end() || t == gene_index.end()) {
            throw ValidationError("network edge " + e.regulator + " -> " + e.target +
                                  " references a gene missing from the gene list");
        }
        adjacency[r->second].emplace_back(t->second, e.effect);
    }
    for (auto& targets : adjacency) std::sort(targets.begin(), targets.end());

    Rng mean_rng(config.seed, kGeneMeanStream);
    std::vector<double> gene_mean(n_genes);
    for (auto& m : gene_mean) m = mean_rng.uniform(5.0, 15.0);

    // Knockdown replicate j of regulator r lands on plate (r*K + j) mod P,
    // spreading each regulator's replicates across plates.
    std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> plate_knockdowns(
        static_cast<std::size_t>(config.plates));
    for (std::int64_t r = 0; r < config.n_regulators; ++r) {
        for (std::int64_t j = 0; j < config.knockdowns_per_regulator; ++j) {
            auto p = static_cast<std::size_t>((r * config.knockdowns_per_regulator + j) %
                                              config.plates);
            plate_knockdowns[p].emplace_back(r, j);
        }
    }

    std::vector<std::string> row_ids;
    std::vector<ExperimentMeta> meta;
    std::vector<Eigen::RowVectorXd> rows;

    for (std::int64_t p = 0; p < config.plates; ++p) {
        std::string plate_id = padded_id("P", p + 1, config.plates);
        Rng rng(config.seed, kPlateStreamBase + static_cast<std::uint64_t>(p));

        std::vector<double> plate_shift(n_genes);
        for (auto& s : plate_shift) s = rng.normal(0.0, config.plate_shift_sd);

        // Every well consumes the same number of draws whatever the
        // network looks like, so edits to one plate or one edge never
        // shift another plate's values.
        auto draw_well = [&](Eigen::RowVectorXd& well) {
            well.resize(static_cast<Eigen::Index>(n_genes));
            for (std::size_t g = 0; g < n_genes; ++g) {
                well[static_cast<Eigen::Index>(g)] =
                    gene_mean[g] + plate_shift[g] + rng.normal(0.0, config.noise_sd);
            }
        };
        auto knock_out_missing = [&](Eigen::RowVectorXd& well) {
            if (config.missing_rate <= 0.0) return;
            for (Eigen::Index g = 0; g < well.size(); ++g) {
                if (rng.bernoulli(config.missing_rate)) {
                    well[g] = std::numeric_limits<double>::quiet_NaN();
                }
            }
        };

        // Per-gene control statistics for this plate, taken before
        // missingness. Knockdown shifts below are expressed in these
        // measured units -- the same coordinate system the downstream
        // z-scoring estimates -- so a target's z responds linearly to the
        // regulator's realized z whatever spread this plate's controls
        // happened to land on.
        std::vector<RunningStats<double>> control_stats(n_genes);

        for (std::int64_t c = 0; c < config.controls_per_plate; ++c) {
            Eigen::RowVectorXd well;
            draw_well(well);
            for (std::size_t g = 0; g < n_genes; ++g) {
                control_stats[g].add(well[static_cast<Eigen::Index>(g)]);
            }
            knock_out_missing(well);
            row_ids.push_back(plate_id + "_ctrl" + padded_id("", c + 1, config.controls_per_plate));
            meta.push_back({row_ids.back(), plate_id, ExperimentKind::control, ""});
            rows.push_back(std::move(well));
        }

        auto control_mean = [&](std::size_t g) { return control_stats[g].mean(); };
        auto control_sd = [&](std::size_t g) {
            double sd = control_stats[g].sd();
            return sd > 0.0 ? sd : config.noise_sd;  // exact ties are measure-zero
        };

        auto wells = plate_knockdowns[static_cast<std::size_t>(p)];
        std::sort(wells.begin(), wells.end());
        for (const auto& [r, j] : wells) {
            const auto h = static_cast<std::size_t>(r);
            Eigen::RowVectorXd well;
            draw_well(well);

            // The knockdown moves gene h by `strength` plate-control sds;
            // its realized z-deviation (strength plus h's own noise, in
            // the same units) is what propagates to the targets.
            auto hi = static_cast<Eigen::Index>(h);
            well[hi] += config.knockdown_strength * control_sd(h);
            double zdev_h = (well[hi] - control_mean(h)) / control_sd(h);
            std::vector<double> zdev(n_genes, 0.0);
            for (const auto& [t, effect] : adjacency[h]) {
                auto ti = static_cast<Eigen::Index>(t);
                double shift = effect * zdev_h;
                zdev[t] = (well[ti] - control_mean(t)) / control_sd(t) + shift;
                well[ti] += shift * control_sd(t);
            }
            if (config.propagate_indirect) {
                // One extra hop: direct targets pass their realized
                // z-deviation on to their own targets.
                for (const auto& [t, effect_ht] : adjacency[h]) {
                    (void)effect_ht;
                    for (const auto& [u, effect_tu] : adjacency[t]) {
                        if (u == h) continue;
                        auto ui = static_cast<Eigen::Index>(u);
                        well[ui] += effect_tu * zdev[t] * control_sd(u);
                    }
                }
            }

            knock_out_missing(well);
            std::string gene = network.genes[h];
            row_ids.push_back(plate_id + "_kd_" + gene + "_r" +
                              padded_id("", j + 1, config.knockdowns_per_regulator));
            meta.push_back({row_ids.back(), plate_id, ExperimentKind::knockdown, gene});
            rows.push_back(std::move(well));
        }
    }

    ExpressionMatrix matrix;
    matrix.gene_ids = network.genes;
    matrix.row_ids = std::move(row_ids);
    matrix.values.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(n_genes));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        matrix.values.row(static_cast<Eigen::Index>(i)) = rows[i];
    }
    return validate_dataset(std::move(matrix), std::move(meta));
}

void write_truth(const TrueNetwork& network, std::ostream& out) {
    out << "regulator\ttarget\teffect\n";
    for (const auto& e : network.edges) {
        out << e.regulator << '\t' << e.target << '\t' << tsv::format_value(e.effect) << '\n';
    }
    if (!out) throw IoError("failed writing truth table");
}

}  // namespace kdinfer
