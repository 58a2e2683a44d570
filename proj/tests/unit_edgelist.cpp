#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "kdinfer/edgelist.hpp"
#include "kdinfer/errors.hpp"
#include "kdinfer/prior.hpp"
#include "kdinfer/rng.hpp"
#include "support/oracles.hpp"

using namespace kdinfer;

namespace {

EdgeScore edge(const std::string& r, const std::string& t, double posterior) {
    EdgeScore e;
    e.regulator = r;
    e.target = t;
    e.n = 10;
    e.r2 = 0.5;
    e.g = 3.0;
    e.prior = 0.0005;
    e.posterior = posterior;
    e.log_odds = std::log(posterior) - std::log1p(-posterior);
    return e;
}

}  // namespace

TEST_CASE("scalar prior applies to every pair") {
    auto spec = PriorSpec::scalar(0.0005);
    CHECK(resolve_prior(spec, "G1", "G2") == 0.0005);
    CHECK(resolve_prior(spec, "X", "Y") == 0.0005);
}

TEST_CASE("table prior hits and misses") {
    std::map<std::pair<std::string, std::string>, double> table{{{"G1", "G2"}, 0.9}};
    auto spec = PriorSpec::with_table(table, 0.0005);
    CHECK(resolve_prior(spec, "G1", "G2") == 0.9);
    CHECK(resolve_prior(spec, "G2", "G1") == 0.0005);
    CHECK(resolve_prior(spec, "G1", "G3") == 0.0005);
}

TEST_CASE("prior construction rejects non-probabilities") {
    CHECK_THROWS_AS(PriorSpec::scalar(-0.1), ValidationError);
    CHECK_THROWS_AS(PriorSpec::scalar(1.5), ValidationError);
    std::map<std::pair<std::string, std::string>, double> bad{{{"A", "B"}, 2.0}};
    CHECK_THROWS_AS(PriorSpec::with_table(bad, 0.5), ValidationError);
    CHECK_THROWS_AS(PriorSpec::with_table({}, -1.0), ValidationError);
}

TEST_CASE("prior table file parsing") {
    std::istringstream in(
        "regulator\ttarget\tprior\n"
        "G1\tG2\t0.9\n"
        "G3\tG4\t0.25\n");
    auto spec = load_prior_table(in, 0.001);
    CHECK(resolve_prior(spec, "G1", "G2") == 0.9);
    CHECK(resolve_prior(spec, "G3", "G4") == 0.25);
    CHECK(resolve_prior(spec, "G9", "G9") == 0.001);

    std::istringstream dup(
        "regulator\ttarget\tprior\n"
        "G1\tG2\t0.9\n"
        "G1\tG2\t0.8\n");
    CHECK_THROWS_AS(load_prior_table(dup, 0.001), ValidationError);

    std::istringstream range(
        "regulator\ttarget\tprior\n"
        "G1\tG2\t1.9\n");
    CHECK_THROWS_AS(load_prior_table(range, 0.001), ValidationError);

    std::istringstream header("reg\ttarget\tprior\nG1\tG2\t0.9\n");
    CHECK_THROWS_AS(load_prior_table(header, 0.001), ParseError);
}

TEST_CASE("rank_edges sorts by posterior descending") {
    auto ranked = rank_edges({edge("A", "B", 0.2), edge("C", "D", 0.9), edge("E", "F", 0.5)});
    REQUIRE(ranked.edges.size() == 3);
    CHECK(ranked.edges[0].posterior == 0.9);
    CHECK(ranked.edges[1].posterior == 0.5);
    CHECK(ranked.edges[2].posterior == 0.2);
}

TEST_CASE("ties break by regulator then target") {
    auto ranked = rank_edges({edge("B", "X", 0.5), edge("A", "Z", 0.5), edge("A", "Y", 0.5)});
    CHECK(ranked.edges[0].regulator == "A");
    CHECK(ranked.edges[0].target == "Y");
    CHECK(ranked.edges[1].target == "Z");
    CHECK(ranked.edges[2].regulator == "B");
}

TEST_CASE("ranking 10k random scores is a sorted permutation") {
    Rng rng(17, 0);
    std::vector<EdgeScore> scores;
    std::multiset<double> before;
    for (int i = 0; i < 10000; ++i) {
        // A coarse grid forces plenty of ties through the tie-break path.
        double p = std::floor(rng.uniform01() * 50.0) / 50.0;
        scores.push_back(edge("R" + std::to_string(rng.bits() % 100),
                              "T" + std::to_string(rng.bits() % 100), p));
        before.insert(p);
    }
    auto ranked = rank_edges(std::move(scores));
    REQUIRE(ranked.edges.size() == 10000);
    std::multiset<double> after;
    for (std::size_t i = 0; i < ranked.edges.size(); ++i) {
        after.insert(ranked.edges[i].posterior);
        if (i == 0) continue;
        const auto& prev = ranked.edges[i - 1];
        const auto& cur = ranked.edges[i];
        bool ordered = prev.posterior > cur.posterior ||
                       (prev.posterior == cur.posterior &&
                        (prev.regulator < cur.regulator ||
                         (prev.regulator == cur.regulator && prev.target <= cur.target)));
        CHECK(ordered);
    }
    CHECK(before == after);
}

TEST_CASE("threshold boundaries") {
    auto ranked = rank_edges({edge("A", "B", 1.0), edge("C", "D", 0.6), edge("E", "F", 0.0)});
    CHECK(threshold(ranked, 0.0).edges.size() == 3);
    CHECK(threshold(ranked, 1.0).edges.size() == 1);
    CHECK(threshold(ranked, 0.6).edges.size() == 2);  // inclusive cutoff
    CHECK(threshold(ranked, 0.61).edges.size() == 1);
    CHECK_THROWS_AS(threshold(ranked, 1.5), ValidationError);
    CHECK_THROWS_AS(threshold(ranked, -0.5), ValidationError);
}

TEST_CASE("stored fixture reproduces the designed prefix counts") {
    auto dir = oracle::make_temp_dir("edgelist");
    auto fx = oracle::write_assessment_fixture(dir);
    auto list = read_edgelist_file(fx.edgelist_path);
    CHECK(threshold(list, 0.5).edges.size() == 292);
    CHECK(threshold(list, 0.95).edges.size() == 76);
    std::filesystem::remove_all(dir);
}

TEST_CASE("empty list writes header only") {
    std::ostringstream out;
    write_edgelist(RankedEdgeList{}, out);
    CHECK(out.str() == "regulator\ttarget\tn\tr2\tg\tprior\tlog_odds\tposterior\n");
}

TEST_CASE("single edge writes two lines") {
    std::ostringstream out;
    write_edgelist(rank_edges({edge("A", "B", 0.25)}), out);
    const std::string text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("500 random scores round-trip exactly") {
    Rng rng(19, 0);
    std::vector<EdgeScore> scores;
    for (int i = 0; i < 500; ++i) {
        EdgeScore e;
        e.regulator = "R" + std::to_string(i);
        e.target = "T" + std::to_string(rng.bits() % 400);
        e.n = 3 + static_cast<std::int64_t>(rng.bits() % 300);
        e.r2 = rng.uniform01();
        e.g = rng.uniform(1.0, 200.0);
        e.prior = rng.uniform01();
        e.log_odds = rng.uniform(-700.0, 700.0);
        if (i == 0) e.log_odds = std::numeric_limits<double>::infinity();
        if (i == 1) e.log_odds = -std::numeric_limits<double>::infinity();
        e.posterior = posterior_probability(e.log_odds);
        scores.push_back(std::move(e));
    }
    auto ranked = rank_edges(std::move(scores), 7);

    std::ostringstream out;
    write_edgelist(ranked, out);
    std::istringstream in(out.str());
    auto back = read_edgelist(in);

    REQUIRE(back.edges.size() == ranked.edges.size());
    for (std::size_t i = 0; i < back.edges.size(); ++i) {
        const auto& a = ranked.edges[i];
        const auto& b = back.edges[i];
        CHECK(a.regulator == b.regulator);
        CHECK(a.target == b.target);
        CHECK(a.n == b.n);
        CHECK(a.r2 == b.r2);
        CHECK(a.g == b.g);
        CHECK(a.prior == b.prior);
        CHECK(a.posterior == b.posterior);
        CHECK(a.log_odds == b.log_odds);
    }
}

TEST_CASE("read_edgelist rejects malformed input") {
    // Wrong header.
    std::istringstream h("regulator\ttarget\tposterior\nA\tB\t0.5\n");
    CHECK_THROWS_AS(read_edgelist(h), ParseError);
    // Unsorted list.
    std::ostringstream out;
    write_edgelist(rank_edges({edge("A", "B", 0.2), edge("C", "D", 0.9)}), out);
    std::string text = out.str();
    // Swap the two data lines to break the order.
    auto first_nl = text.find('\n');
    auto second_nl = text.find('\n', first_nl + 1);
    std::string header = text.substr(0, first_nl + 1);
    std::string line1 = text.substr(first_nl + 1, second_nl - first_nl);
    std::string line2 = text.substr(second_nl + 1);
    std::istringstream swapped(header + line2 + line1);
    CHECK_THROWS_AS(read_edgelist(swapped), ValidationError);
    // Ragged row.
    std::istringstream ragged(header + "A\tB\t10\t0.5\n");
    CHECK_THROWS_AS(read_edgelist(ragged), ParseError);
}

TEST_CASE("swapping the prior shifts log odds by the prior-odds delta") {
    // The data term depends only on (r2, n, g): two scores for the same
    // statistics under different priors differ by exactly
    // logit(prior2) - logit(prior1).
    PairAccumulator<double> acc;
    Rng rng(23, 0);
    for (int i = 0; i < 12; ++i) {
        double x = rng.normal(-4.0, 1.0);
        acc.add(x, 0.8 * x + rng.normal(0.0, 0.7));
    }
    auto a = score_accumulator(acc, 0.0005, GPolicy::sqrt_n());
    auto b = score_accumulator(acc, 0.37, GPolicy::sqrt_n());
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    double delta = (std::log(0.37) - std::log1p(-0.37)) -
                   (std::log(0.0005) - std::log1p(-0.0005));
    CHECK(std::abs((b->log_odds - a->log_odds) - delta) < 1e-12);
}
