#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kdinfer/dataset.hpp"
#include "kdinfer/running_stats.hpp"

namespace kdinfer {

/// Per-plate control summary, one entry per gene on the panel. A gene's
/// entry is valid only when it has >= 2 finite control values and a
/// strictly positive sample standard deviation; z-scores against invalid
/// entries are undefined and must be treated as missing.
struct PlateBaseline {
    std::string plate_id;
    Eigen::ArrayXd mean;
    Eigen::ArrayXd sd;  ///< sample standard deviation (n-1 divisor); 0 when n < 2
    Eigen::Array<std::int64_t, Eigen::Dynamic, 1> n_controls;
    Eigen::Array<bool, Eigen::Dynamic, 1> valid;

    struct Entry {
        double mean = 0.0;
        double sd = 0.0;
        std::int64_t n_controls = 0;
        bool valid = false;
    };
    Entry entry(Eigen::Index gene) const {
        return {mean[gene], sd[gene], n_controls[gene], valid[gene]};
    }
};

using PlateBaselines = std::map<std::string, PlateBaseline>;

/// Streaming builder for plate baselines: feed control rows one at a time
/// (missing cells are skipped per gene), merge partial builders in any
/// order, then finalize. This is the one-pass core behind
/// compute_plate_baselines and pass 1 of the pipeline.
class PlateBaselineAccumulator {
public:
    explicit PlateBaselineAccumulator(std::size_t n_genes) : n_genes_(n_genes) {}

    /// Add one control experiment's raw values (NaN = missing).
    void add_control(const std::string& plate_id, const Eigen::RowVectorXd& values);

    /// Fold another accumulator built over a disjoint set of controls into
    /// this one. Associative and commutative up to 1e-12 relative.
    void merge(const PlateBaselineAccumulator& other);

    PlateBaselines finalize() const;

    std::size_t n_plates() const { return stats_.size(); }

private:
    std::size_t n_genes_;
    std::map<std::string, std::vector<RunningStats<double>>> stats_;
};

/// Summarize every plate that has at least one control experiment.
PlateBaselines compute_plate_baselines(const ExpressionDataset& dataset);

/// (x - mean)/sd against one gene's baseline entry. Throws
/// ValidationError on an invalid entry; callers that can tolerate
/// degeneracy should test entry.valid and record a missing value instead.
double zscore(double x, const PlateBaseline::Entry& entry);

/// Standardize every usable non-control experiment against its own
/// plate's baseline. Cells with a missing raw value or an invalid
/// plate-gene baseline come out missing (NaN). include_controls additionally
/// standardizes control experiments (two-class path); their z-scores are
/// computed against a baseline they themselves contributed to.
ZScoreMatrix standardize(const ExpressionDataset& dataset, const PlateBaselines& baselines,
                         bool include_controls = false);

/// Debug dump: "plate_id\tgene_id\tmean\tsd\tn_controls\tvalid".
void write_baselines(const PlateBaselines& baselines, const std::vector<std::string>& gene_ids,
                     std::ostream& out);

}  // namespace kdinfer
