#include "kdinfer/prior.hpp"

#include <fstream>

#include "kdinfer/errors.hpp"
#include "kdinfer/tsv.hpp"

namespace kdinfer {

namespace {

void check_probability(double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError(what + " must lie in [0,1], got " + tsv::format_value(p));
    }
}

}  // namespace

PriorSpec PriorSpec::scalar(double value) {
    check_probability(value, "prior");
    PriorSpec spec;
    spec.kind = Kind::scalar;
    spec.scalar_value = value;
    return spec;
}

PriorSpec PriorSpec::with_table(std::map<std::pair<std::string, std::string>, double> table,
                                double default_value) {
    check_probability(default_value, "default prior");
    for (const auto& [pair, p] : table) {
        check_probability(p, "prior for (" + pair.first + ", " + pair.second + ")");
    }
    PriorSpec spec;
    spec.kind = Kind::table;
    spec.table = std::move(table);
    spec.table_default = default_value;
    return spec;
}

double resolve_prior(const PriorSpec& spec, const std::string& regulator,
                     const std::string& target) {
    if (spec.kind == PriorSpec::Kind::scalar) return spec.scalar_value;
    auto it = spec.table.find({regulator, target});
    return it == spec.table.end() ? spec.table_default : it->second;
}

PriorSpec load_prior_table(std::istream& in, double default_value) {
    tsv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw ParseError("empty prior table");
    if (line != "regulator\ttarget\tprior") {
        throw ParseError("prior table header must be exactly \"regulator\\ttarget\\tprior\"");
    }
    std::map<std::pair<std::string, std::string>, double> table;
    while (reader.next(line)) {
        auto cells = tsv::split(line);
        if (cells.size() != 3) {
            throw ParseError("line " + std::to_string(reader.line_no()) +
                             ": expected 3 columns, found " + std::to_string(cells.size()));
        }
        double p = tsv::parse_value(cells[2], reader.line_no(), 3);
        check_probability(p, "line " + std::to_string(reader.line_no()) + ": prior");
        auto key = std::make_pair(std::string(cells[0]), std::string(cells[1]));
        if (!table.emplace(std::move(key), p).second) {
            throw ValidationError("line " + std::to_string(reader.line_no()) +
                                  ": duplicate prior for (" + std::string(cells[0]) + ", " +
                                  std::string(cells[1]) + ")");
        }
    }
    return PriorSpec::with_table(std::move(table), default_value);
}

PriorSpec load_prior_table_file(const std::string& path, double default_value) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    return load_prior_table(in, default_value);
}

}  // namespace kdinfer
