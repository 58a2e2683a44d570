#include "kdinfer/baseline.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "kdinfer/errors.hpp"
#include "kdinfer/tsv.hpp"

namespace kdinfer {

void PlateBaselineAccumulator::add_control(const std::string& plate_id,
                                           const Eigen::RowVectorXd& values) {
    if (static_cast<std::size_t>(values.size()) != n_genes_) {
        throw ValidationError("control row has " + std::to_string(values.size()) +
                              " genes, expected " + std::to_string(n_genes_));
    }
    auto& per_gene = stats_[plate_id];
    if (per_gene.empty()) per_gene.resize(n_genes_);
    for (Eigen::Index g = 0; g < values.size(); ++g) {
        // Missing control values drop out per gene, not per experiment.
        if (!std::isnan(values[g])) per_gene[static_cast<std::size_t>(g)].add(values[g]);
    }
}

void PlateBaselineAccumulator::merge(const PlateBaselineAccumulator& other) {
    if (other.n_genes_ != n_genes_) {
        throw ValidationError("cannot merge baseline accumulators over different panels");
    }
    for (const auto& [plate_id, other_stats] : other.stats_) {
        auto& per_gene = stats_[plate_id];
        if (per_gene.empty()) per_gene.resize(n_genes_);
        for (std::size_t g = 0; g < n_genes_; ++g) per_gene[g].merge(other_stats[g]);
    }
}

PlateBaselines PlateBaselineAccumulator::finalize() const {
    PlateBaselines out;
    for (const auto& [plate_id, per_gene] : stats_) {
        PlateBaseline b;
        b.plate_id = plate_id;
        auto n = static_cast<Eigen::Index>(n_genes_);
        b.mean.resize(n);
        b.sd.resize(n);
        b.n_controls.resize(n);
        b.valid.resize(n);
        for (Eigen::Index g = 0; g < n; ++g) {
            const auto& s = per_gene[static_cast<std::size_t>(g)];
            b.mean[g] = s.mean();
            b.n_controls[g] = s.count();
            b.sd[g] = s.count() >= 2 ? s.sd() : 0.0;
            b.valid[g] = s.count() >= 2 && b.sd[g] > 0.0;
        }
        out.emplace(plate_id, std::move(b));
    }
    return out;
}

PlateBaselines compute_plate_baselines(const ExpressionDataset& dataset) {
    PlateBaselineAccumulator acc(static_cast<std::size_t>(dataset.n_genes()));
    for (Eigen::Index i = 0; i < dataset.n_experiments(); ++i) {
        const auto& m = dataset.experiments[static_cast<std::size_t>(i)];
        if (m.kind == ExperimentKind::control) acc.add_control(m.plate_id, dataset.values.row(i));
    }
    return acc.finalize();
}

double zscore(double x, const PlateBaseline::Entry& entry) {
    if (!entry.valid) {
        throw ValidationError("degenerate baseline: n_controls=" +
                              std::to_string(entry.n_controls) + ", sd=" +
                              tsv::format_value(entry.sd));
    }
    return (x - entry.mean) / entry.sd;
}

ZScoreMatrix standardize(const ExpressionDataset& dataset, const PlateBaselines& baselines,
                         bool include_controls) {
    ZScoreMatrix out;
    out.gene_ids = dataset.gene_ids;
    out.gene_index = dataset.gene_index;

    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < dataset.n_experiments(); ++i) {
        const auto& m = dataset.experiments[static_cast<std::size_t>(i)];
        if (dataset.status[static_cast<std::size_t>(i)] != ExperimentStatus::usable) continue;
        if (m.kind == ExperimentKind::control && !include_controls) continue;
        rows.push_back(i);
    }

    const auto n_genes = dataset.n_genes();
    out.z.resize(static_cast<Eigen::Index>(rows.size()), n_genes);
    out.experiments.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& m = dataset.experiments[static_cast<std::size_t>(rows[r])];
        auto it = baselines.find(m.plate_id);
        if (it == baselines.end()) {
            // Validation marks non-controls on control-less plates unusable,
            // so a usable experiment without a baseline means the baselines
            // were computed from a different dataset.
            throw ValidationError("no baseline for plate \"" + m.plate_id +
                                  "\" referenced by experiment \"" + m.experiment_id + "\"");
        }
        const PlateBaseline& b = it->second;
        out.experiments.push_back(m);
        for (Eigen::Index g = 0; g < n_genes; ++g) {
            double x = dataset.values(rows[r], g);
            out.z(static_cast<Eigen::Index>(r), g) =
                (b.valid[g] && !std::isnan(x)) ? (x - b.mean[g]) / b.sd[g]
                                               : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

void write_baselines(const PlateBaselines& baselines, const std::vector<std::string>& gene_ids,
                     std::ostream& out) {
    out << "plate_id\tgene_id\tmean\tsd\tn_controls\tvalid\n";
    for (const auto& [plate_id, b] : baselines) {
        for (std::size_t g = 0; g < gene_ids.size(); ++g) {
            auto gi = static_cast<Eigen::Index>(g);
            out << plate_id << '\t' << gene_ids[g] << '\t' << tsv::format_value(b.mean[gi])
                << '\t' << tsv::format_value(b.sd[gi]) << '\t' << b.n_controls[gi] << '\t'
                << (b.valid[gi] ? "true" : "false") << '\n';
        }
    }
    if (!out) throw IoError("failed writing baseline table");
}

}  // namespace kdinfer
