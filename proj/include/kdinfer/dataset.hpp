#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace kdinfer {

enum class ExperimentKind { control, knockdown, perturbation };

std::string to_string(ExperimentKind kind);

struct ExperimentMeta {
    std::string experiment_id;
    std::string plate_id;
    ExperimentKind kind = ExperimentKind::control;
    std::string target_gene;  // empty = none; required for knockdowns
};

/// Exactly one state per experiment after validation.
///   usable:        participates in baselines and/or scoring
///   unusable_plate: non-control on a plate with fewer than 2 controls
///   off_panel:     knockdown whose target gene is not measured
enum class ExperimentStatus { usable, unusable_plate, off_panel };

/// Parsed expression matrix before the metadata join: rows in file order,
/// one row id per experiment, NaN marks a missing ("NA") cell.
struct ExpressionMatrix {
    std::vector<std::string> gene_ids;
    std::vector<std::string> row_ids;
    Eigen::MatrixXd values;  // rows = experiments, cols = genes
};

/// Joined and validated dataset. Immutable after validation; safe to share
/// across threads. Row order matches the expression file.
struct ExpressionDataset {
    std::vector<std::string> gene_ids;
    std::vector<ExperimentMeta> experiments;
    Eigen::MatrixXd values;  // rows = experiments, cols = genes, NaN = missing
    std::vector<ExperimentStatus> status;

    std::unordered_map<std::string, Eigen::Index> gene_index;

    std::int64_t usable_knockdowns = 0;
    std::int64_t unusable_plate_count = 0;
    std::int64_t off_panel_count = 0;

    Eigen::Index n_genes() const { return values.cols(); }
    Eigen::Index n_experiments() const { return values.rows(); }
};

/// Plate-standardized values for the usable non-control experiments.
/// NaN where the raw value was missing or the plate-gene baseline invalid;
/// finite everywhere else.
struct ZScoreMatrix {
    std::vector<std::string> gene_ids;
    std::vector<ExperimentMeta> experiments;
    Eigen::MatrixXd z;
    std::unordered_map<std::string, Eigen::Index> gene_index;
};

}  // namespace kdinfer
