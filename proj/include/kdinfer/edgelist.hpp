#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kdinfer/scoring.hpp"

namespace kdinfer {

/// Edge scores in the canonical order: posterior non-increasing, ties
/// broken by regulator id then target id, so output is byte-identical
/// across runs and parallel schedules. skipped counts candidate pairs
/// excluded upstream for insufficient data.
struct RankedEdgeList {
    std::vector<EdgeScore> edges;
    std::int64_t skipped = 0;
};

RankedEdgeList rank_edges(std::vector<EdgeScore> scores, std::int64_t skipped = 0);

/// All and only entries with posterior >= cutoff; a prefix of the list.
RankedEdgeList threshold(const RankedEdgeList& list, double cutoff);

/// TSV "regulator\ttarget\tn\tr2\tg\tprior\tlog_odds\tposterior", reals at
/// 17 significant digits (round-trip exact), infinite log_odds as
/// "inf"/"-inf".
void write_edgelist(const RankedEdgeList& list, std::ostream& out);
void write_edgelist_file(const RankedEdgeList& list, const std::string& path);

RankedEdgeList read_edgelist(std::istream& in);
RankedEdgeList read_edgelist_file(const std::string& path);

}  // namespace kdinfer
