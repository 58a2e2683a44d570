#include "kdinfer/edgelist.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <ostream>

#include "kdinfer/errors.hpp"
#include "kdinfer/tsv.hpp"

namespace kdinfer {

namespace {

constexpr const char* kHeader = "regulator\ttarget\tn\tr2\tg\tprior\tlog_odds\tposterior";

bool canonical_before(const EdgeScore& a, const EdgeScore& b) {
    if (a.posterior != b.posterior) return a.posterior > b.posterior;
    if (a.regulator != b.regulator) return a.regulator < b.regulator;
    return a.target < b.target;
}

std::int64_t parse_count(std::string_view cell, std::size_t line_no, std::size_t col_no) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || value < 0) {
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(col_no) +
                         ": bad count: \"" + std::string(cell) + "\"");
    }
    return value;
}

/// log_odds is the one column where +-inf is legal on disk.
double parse_extended(std::string_view cell, std::size_t line_no, std::size_t col_no) {
    if (cell == "inf") return std::numeric_limits<double>::infinity();
    if (cell == "-inf") return -std::numeric_limits<double>::infinity();
    return tsv::parse_value(cell, line_no, col_no);
}

}  // namespace

RankedEdgeList rank_edges(std::vector<EdgeScore> scores, std::int64_t skipped) {
    std::sort(scores.begin(), scores.end(), canonical_before);
    return {std::move(scores), skipped};
}

RankedEdgeList threshold(const RankedEdgeList& list, double cutoff) {
    if (!(cutoff >= 0.0 && cutoff <= 1.0)) {
        throw ValidationError("cutoff must lie in [0,1], got " + tsv::format_value(cutoff));
    }
    // The list is sorted by posterior, so the qualifying entries are a prefix.
    auto end = std::partition_point(list.edges.begin(), list.edges.end(),
                                    [cutoff](const EdgeScore& e) { return e.posterior >= cutoff; });
    return {{list.edges.begin(), end}, list.skipped};
}

void write_edgelist(const RankedEdgeList& list, std::ostream& out) {
    out << kHeader << '\n';
    for (const auto& e : list.edges) {
        out << e.regulator << '\t' << e.target << '\t' << e.n << '\t' << tsv::format_value(e.r2)
            << '\t' << tsv::format_value(e.g) << '\t' << tsv::format_value(e.prior) << '\t'
            << tsv::format_value(e.log_odds) << '\t' << tsv::format_value(e.posterior) << '\n';
    }
    if (!out) throw IoError("failed writing edgelist");
}

void write_edgelist_file(const RankedEdgeList& list, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    write_edgelist(list, out);
}

RankedEdgeList read_edgelist(std::istream& in) {
    tsv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw ParseError("empty edgelist file");
    if (line != kHeader) {
        throw ParseError("edgelist header must be exactly \"regulator\\ttarget\\tn\\tr2\\tg\\t"
                         "prior\\tlog_odds\\tposterior\"");
    }
    RankedEdgeList list;
    while (reader.next(line)) {
        auto cells = tsv::split(line);
        if (cells.size() != 8) {
            throw ParseError("line " + std::to_string(reader.line_no()) +
                             ": expected 8 columns, found " + std::to_string(cells.size()));
        }
        EdgeScore e;
        e.regulator = std::string(cells[0]);
        e.target = std::string(cells[1]);
        e.n = parse_count(cells[2], reader.line_no(), 3);
        e.r2 = tsv::parse_value(cells[3], reader.line_no(), 4);
        e.g = tsv::parse_value(cells[4], reader.line_no(), 5);
        e.prior = tsv::parse_value(cells[5], reader.line_no(), 6);
        e.log_odds = parse_extended(cells[6], reader.line_no(), 7);
        e.posterior = tsv::parse_value(cells[7], reader.line_no(), 8);
        list.edges.push_back(std::move(e));
    }
    if (!std::is_sorted(list.edges.begin(), list.edges.end(),
                        [](const EdgeScore& a, const EdgeScore& b) {
                            return a.posterior > b.posterior;
                        })) {
        throw ValidationError("edgelist is not sorted by posterior");
    }
    return list;
}

RankedEdgeList read_edgelist_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    return read_edgelist(in);
}

}  // namespace kdinfer
