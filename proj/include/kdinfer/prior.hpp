#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>

namespace kdinfer {

/// Edge prior π for a regulator-target pair: either one scalar for every
/// pair, or a per-pair table with a default for pairs the table omits.
struct PriorSpec {
    enum class Kind { scalar, table };
    Kind kind = Kind::scalar;
    double scalar_value = 0.0005;
    std::map<std::pair<std::string, std::string>, double> table;
    double table_default = 0.0005;

    static PriorSpec scalar(double value);
    static PriorSpec with_table(std::map<std::pair<std::string, std::string>, double> table,
                                double default_value);
};

double resolve_prior(const PriorSpec& spec, const std::string& regulator,
                     const std::string& target);

/// Load a per-pair prior table, TSV "regulator\ttarget\tprior".
/// Probabilities outside [0,1] and duplicate pairs are rejected.
PriorSpec load_prior_table(std::istream& in, double default_value);
PriorSpec load_prior_table_file(const std::string& path, double default_value);

}  // namespace kdinfer
