#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kdinfer/dataset.hpp"
#include "kdinfer/ingest.hpp"

namespace kdinfer {

/// Planted ground truth: directed edges with signed effect sizes.
struct TrueEdge {
    std::string regulator;
    std::string target;
    double effect = 0.0;
};

struct TrueNetwork {
    std::vector<std::string> genes;
    std::vector<TrueEdge> edges;  ///< sorted by (regulator index, target index)
};

/// Generator settings. Defaults are the standard recovery fixture.
struct SimConfig {
    std::int64_t n_genes = 100;
    std::int64_t n_regulators = 20;
    double edge_density = 0.05;
    std::int64_t plates = 10;
    std::int64_t controls_per_plate = 8;
    std::int64_t knockdowns_per_regulator = 12;
    double knockdown_strength = -5.0;  ///< z-shift applied to the knocked-down gene
    double noise_sd = 1.0;
    double plate_shift_sd = 0.5;
    std::uint64_t seed = 0;
    bool propagate_indirect = false;  ///< one round of indirect-effect propagation
    double missing_rate = 0.0;        ///< per-cell probability of an NA

    void validate() const;  ///< throws ValidationError naming the bad field
};

/// Read a SimConfig from JSON; absent keys keep their defaults, unknown
/// keys are rejected.
SimConfig load_sim_config(std::istream& in);
SimConfig load_sim_config_file(const std::string& path);

/// Draw a network: every (regulator, other gene) pair becomes an edge
/// independently with probability edge_density; effects are uniform on
/// +-[0.5, 2.0]. Fully determined by config.seed.
TrueNetwork generate_network(const SimConfig& config);

/// Simulate a plate-structured knockdown dataset for the network. Each
/// plate draws its values from its own substream, so plates are
/// independent and the whole dataset is reproducible from the seed alone.
/// In each knockdown well the knocked-down gene h moves by
/// knockdown_strength of that plate's measured control sds, and every
/// direct target of h moves by effect x h's realized z-deviation against
/// the same measured plate baselines -- the coordinate system downstream
/// z-scoring estimates -- so regressing a target's z-scores on h's
/// recovers the planted effect.
ExpressionDataset simulate_dataset(const TrueNetwork& network, const SimConfig& config);

/// "regulator\ttarget\teffect"; readable as a reference standard (the
/// effect column is ignored there).
void write_truth(const TrueNetwork& network, std::ostream& out);

}  // namespace kdinfer
