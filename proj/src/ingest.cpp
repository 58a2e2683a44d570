#include "kdinfer/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "kdinfer/errors.hpp"
#include "kdinfer/tsv.hpp"

namespace kdinfer {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    return in;
}

std::vector<std::string> parse_expression_header(const std::string& line, std::size_t line_no) {
    auto cells = tsv::split(line);
    if (cells.empty() || cells[0] != "experiment_id") {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expression header must start with \"experiment_id\"");
    }
    if (cells.size() < 2) {
        throw ValidationError("expression header names no genes");
    }
    std::vector<std::string> gene_ids;
    gene_ids.reserve(cells.size() - 1);
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i].empty()) {
            throw ValidationError("line " + std::to_string(line_no) + ", column " +
                                  std::to_string(i + 1) + ": empty gene id in header");
        }
        if (!seen.insert(cells[i]).second) {
            throw ValidationError("duplicate gene id in header: \"" + std::string(cells[i]) + "\"");
        }
        gene_ids.emplace_back(cells[i]);
    }
    return gene_ids;
}

/// Parses one expression data row into (row id, values); enforces the column
/// count and the finite-or-NA cell contract.
std::string parse_expression_row(const std::string& line, std::size_t line_no,
                                 std::size_t n_cols, Eigen::RowVectorXd& out) {
    auto cells = tsv::split(line);
    if (cells.size() != n_cols) {
        throw ParseError("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(n_cols) + " columns, found " +
                         std::to_string(cells.size()));
    }
    if (cells[0].empty()) {
        throw ValidationError("line " + std::to_string(line_no) + ": empty experiment id");
    }
    for (std::size_t j = 1; j < cells.size(); ++j) {
        if (cells[j] == "NA") {
            out[static_cast<Eigen::Index>(j - 1)] = kMissing;
        } else {
            out[static_cast<Eigen::Index>(j - 1)] = tsv::parse_value(cells[j], line_no, j + 1);
        }
    }
    return std::string(cells[0]);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::control: return "control";
        case ExperimentKind::knockdown: return "knockdown";
        case ExperimentKind::perturbation: return "perturbation";
    }
    return "?";
}

ExpressionMatrix parse_expression(std::istream& in) {
    tsv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw ParseError("empty expression file");

    ExpressionMatrix result;
    result.gene_ids = parse_expression_header(line, reader.line_no());
    const std::size_t n_cols = result.gene_ids.size() + 1;

    std::vector<Eigen::RowVectorXd> rows;
    std::unordered_set<std::string> seen_ids;
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(result.gene_ids.size()));
    while (reader.next(line)) {
        std::string id = parse_expression_row(line, reader.line_no(), n_cols, row);
        if (!seen_ids.insert(id).second) {
            throw ValidationError("duplicate experiment id: \"" + id + "\"");
        }
        result.row_ids.push_back(std::move(id));
        rows.push_back(row);
    }

    result.values.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(result.gene_ids.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        result.values.row(static_cast<Eigen::Index>(i)) = rows[i];
    }
    return result;
}

ExpressionMatrix parse_expression_file(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_expression(in);
}

std::vector<ExperimentMeta> parse_metadata(std::istream& in) {
    tsv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw ParseError("empty metadata file");
    if (line != "experiment_id\tplate_id\tkind\ttarget_gene") {
        throw ParseError("metadata header must be exactly "
                         "\"experiment_id\\tplate_id\\tkind\\ttarget_gene\"");
    }

    std::vector<ExperimentMeta> out;
    std::unordered_set<std::string> seen_ids;
    while (reader.next(line)) {
        auto cells = tsv::split(line);
        if (cells.size() != 4) {
            throw ParseError("line " + std::to_string(reader.line_no()) +
                             ": expected 4 columns, found " + std::to_string(cells.size()));
        }
        ExperimentMeta meta;
        meta.experiment_id = std::string(cells[0]);
        meta.plate_id = std::string(cells[1]);
        meta.target_gene = std::string(cells[3]);
        if (meta.experiment_id.empty()) {
            throw ValidationError("line " + std::to_string(reader.line_no()) +
                                  ": empty experiment id");
        }
        if (meta.plate_id.empty()) {
            throw ValidationError("line " + std::to_string(reader.line_no()) +
                                  ": empty plate id");
        }
        if (cells[2] == "control") {
            meta.kind = ExperimentKind::control;
        } else if (cells[2] == "knockdown") {
            meta.kind = ExperimentKind::knockdown;
        } else if (cells[2] == "perturbation") {
            meta.kind = ExperimentKind::perturbation;
        } else {
            throw ParseError("line " + std::to_string(reader.line_no()) +
                             ": unknown experiment kind: \"" + std::string(cells[2]) + "\"");
        }
        if (meta.kind == ExperimentKind::control && !meta.target_gene.empty()) {
            throw ValidationError("line " + std::to_string(reader.line_no()) +
                                  ": control must not name a target_gene");
        }
        if (meta.kind == ExperimentKind::knockdown && meta.target_gene.empty()) {
            throw ValidationError("line " + std::to_string(reader.line_no()) +
                                  ": knockdown requires target_gene");
        }
        if (!seen_ids.insert(meta.experiment_id).second) {
            throw ValidationError("duplicate experiment id: \"" + meta.experiment_id + "\"");
        }
        out.push_back(std::move(meta));
    }
    return out;
}

std::vector<ExperimentMeta> parse_metadata_file(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_metadata(in);
}

ExpressionDataset validate_dataset(ExpressionMatrix matrix,
                                   std::vector<ExperimentMeta> meta,
                                   PipelineMode mode) {
    std::unordered_map<std::string, std::size_t> meta_index;
    meta_index.reserve(meta.size());
    for (std::size_t i = 0; i < meta.size(); ++i) {
        meta_index.emplace(meta[i].experiment_id, i);
    }

    // The two files must describe the same experiments; report asymmetry
    // in both directions rather than the first mismatch.
    std::set<std::string> only_matrix;
    std::set<std::string> only_meta;
    std::unordered_set<std::string> matrix_ids(matrix.row_ids.begin(), matrix.row_ids.end());
    for (const auto& id : matrix.row_ids) {
        if (!meta_index.count(id)) only_matrix.insert(id);
    }
    for (const auto& m : meta) {
        if (!matrix_ids.count(m.experiment_id)) only_meta.insert(m.experiment_id);
    }
    if (!only_matrix.empty() || !only_meta.empty()) {
        std::ostringstream msg;
        msg << "experiment ids differ between matrix and metadata;";
        if (!only_matrix.empty()) {
            msg << " matrix only: {";
            bool first = true;
            for (const auto& id : only_matrix) msg << (first ? "" : ", ") << id, first = false;
            msg << "}";
        }
        if (!only_meta.empty()) {
            msg << " metadata only: {";
            bool first = true;
            for (const auto& id : only_meta) msg << (first ? "" : ", ") << id, first = false;
            msg << "}";
        }
        throw ValidationError(msg.str());
    }

    ExpressionDataset ds;
    ds.gene_ids = std::move(matrix.gene_ids);
    ds.values = std::move(matrix.values);
    ds.gene_index.reserve(ds.gene_ids.size());
    for (std::size_t j = 0; j < ds.gene_ids.size(); ++j) {
        ds.gene_index.emplace(ds.gene_ids[j], static_cast<Eigen::Index>(j));
    }

    // Keep the matrix row order; metadata is joined by id.
    ds.experiments.reserve(matrix.row_ids.size());
    for (const auto& id : matrix.row_ids) {
        ds.experiments.push_back(meta[meta_index.at(id)]);
    }

    std::map<std::string, std::int64_t> controls_per_plate;
    for (const auto& m : ds.experiments) {
        if (m.kind == ExperimentKind::control) ++controls_per_plate[m.plate_id];
    }

    std::int64_t usable_controls = 0;
    std::int64_t usable_perturbations = 0;
    ds.status.resize(ds.experiments.size(), ExperimentStatus::usable);
    for (std::size_t i = 0; i < ds.experiments.size(); ++i) {
        const auto& m = ds.experiments[i];
        if (m.kind == ExperimentKind::control) {
            ++usable_controls;
            continue;
        }
        if (m.kind == ExperimentKind::knockdown && !ds.gene_index.count(m.target_gene)) {
            ds.status[i] = ExperimentStatus::off_panel;
            ++ds.off_panel_count;
            continue;
        }
        auto it = controls_per_plate.find(m.plate_id);
        if (it == controls_per_plate.end() || it->second < 2) {
            ds.status[i] = ExperimentStatus::unusable_plate;
            ++ds.unusable_plate_count;
            continue;
        }
        if (m.kind == ExperimentKind::knockdown) {
            ++ds.usable_knockdowns;
        } else {
            ++usable_perturbations;
        }
    }

    if (mode == PipelineMode::knockdown && ds.usable_knockdowns == 0) {
        throw ValidationError("empty dataset: no usable knockdown experiments");
    }
    if (mode == PipelineMode::two_class &&
        (usable_perturbations == 0 || usable_controls == 0)) {
        throw ValidationError("empty dataset: two-class mode needs control and "
                              "perturbation experiments");
    }
    return ds;
}

namespace {

void write_expression_impl(const std::vector<std::string>& gene_ids,
                           const std::vector<std::string>& row_ids,
                           const Eigen::MatrixXd& values, std::ostream& out) {
    out << "experiment_id";
    for (const auto& g : gene_ids) out << '\t' << g;
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << row_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            double v = values(i, j);
            out << '\t' << (std::isnan(v) ? "NA" : tsv::format_value(v));
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing expression table");
}

}  // namespace

void write_expression(const ExpressionDataset& dataset, std::ostream& out) {
    std::vector<std::string> ids;
    ids.reserve(dataset.experiments.size());
    for (const auto& m : dataset.experiments) ids.push_back(m.experiment_id);
    write_expression_impl(dataset.gene_ids, ids, dataset.values, out);
}

void write_expression(const ExpressionMatrix& matrix, std::ostream& out) {
    write_expression_impl(matrix.gene_ids, matrix.row_ids, matrix.values, out);
}

void write_metadata(const std::vector<ExperimentMeta>& meta, std::ostream& out) {
    out << "experiment_id\tplate_id\tkind\ttarget_gene\n";
    for (const auto& m : meta) {
        out << m.experiment_id << '\t' << m.plate_id << '\t' << to_string(m.kind) << '\t'
            << m.target_gene << '\n';
    }
    if (!out) throw IoError("failed writing metadata table");
}

ExpressionRowReader::ExpressionRowReader(std::istream& in) : in_(in) {
    tsv::LineReader reader(in_);
    std::string line;
    if (!reader.next(line)) throw ParseError("empty expression file");
    gene_ids_ = parse_expression_header(line, reader.line_no());
    header_lines_ = reader.line_no();
}

void ExpressionRowReader::for_each_row(
    const std::function<void(const std::string&, const Eigen::RowVectorXd&)>& fn) {
    tsv::LineReader reader(in_);
    std::string line;
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(gene_ids_.size()));
    while (reader.next(line)) {
        std::string id =
            parse_expression_row(line, header_lines_ + reader.line_no(), gene_ids_.size() + 1, row);
        fn(id, row);
    }
}

}  // namespace kdinfer
