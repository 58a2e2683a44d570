#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "kdinfer/dataset.hpp"

namespace kdinfer {

/// Parse a wide expression TSV: header "experiment_id\t<gene>...", one
/// experiment per row, cells decimal or "NA". Preserves file order.
/// Ragged rows, non-numeric cells, non-finite values and duplicate gene
/// ids all throw with file coordinates.
ExpressionMatrix parse_expression(std::istream& in);
ExpressionMatrix parse_expression_file(const std::string& path);

/// Parse the experiment metadata TSV with header exactly
/// "experiment_id\tplate_id\tkind\ttarget_gene".
std::vector<ExperimentMeta> parse_metadata(std::istream& in);
std::vector<ExperimentMeta> parse_metadata_file(const std::string& path);

/// Which usability rule validation enforces at the dataset level.
/// knockdown mode requires at least one usable knockdown experiment;
/// two_class mode requires controls and perturbations instead.
enum class PipelineMode { knockdown, two_class };

/// Join matrix and metadata by experiment id and assign each experiment
/// its status. Knockdowns on plates with < 2 controls become
/// unusable_plate (reported, not dropped); knockdowns whose target is not
/// measured become off_panel. Row order follows the matrix.
ExpressionDataset validate_dataset(ExpressionMatrix matrix,
                                   std::vector<ExperimentMeta> meta,
                                   PipelineMode mode = PipelineMode::knockdown);

/// Canonical writers for the same formats (17-significant-digit values,
/// "NA" for missing). parse(write(d)) reproduces d bit for bit.
void write_expression(const ExpressionDataset& dataset, std::ostream& out);
void write_expression(const ExpressionMatrix& matrix, std::ostream& out);
void write_metadata(const std::vector<ExperimentMeta>& meta, std::ostream& out);

/// Streaming view of an expression TSV for the two-pass pipeline: the
/// header is parsed once, then each data row is handed to the callback as
/// (row id, values) without retaining previous rows.
class ExpressionRowReader {
public:
    explicit ExpressionRowReader(std::istream& in);

    const std::vector<std::string>& gene_ids() const { return gene_ids_; }

    /// Invokes fn(row_id, row_values) for every data row, in file order.
    void for_each_row(const std::function<void(const std::string&, const Eigen::RowVectorXd&)>& fn);

private:
    std::istream& in_;
    std::vector<std::string> gene_ids_;
    std::size_t header_lines_ = 0;
};

}  // namespace kdinfer
