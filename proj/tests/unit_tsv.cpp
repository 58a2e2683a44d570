#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "kdinfer/errors.hpp"
#include "kdinfer/rng.hpp"
#include "kdinfer/tsv.hpp"

using namespace kdinfer;

TEST_CASE("split keeps empty fields") {
    auto f = tsv::split("a\tb\tc");
    REQUIRE(f.size() == 3);
    CHECK(f[0] == "a");
    CHECK(f[2] == "c");

    f = tsv::split("a\t\tc\t");
    REQUIRE(f.size() == 4);
    CHECK(f[1] == "");
    CHECK(f[3] == "");

    f = tsv::split("");
    REQUIRE(f.size() == 1);
    CHECK(f[0] == "");
}

TEST_CASE("parse_value accepts decimal and scientific notation") {
    CHECK(tsv::parse_value("1.5", 1, 1) == 1.5);
    CHECK(tsv::parse_value("-2", 1, 1) == -2.0);
    CHECK(tsv::parse_value("1e-3", 1, 1) == 1e-3);
    CHECK(tsv::parse_value("3.25E2", 1, 1) == 325.0);
}

TEST_CASE("parse_value rejects junk with file coordinates") {
    CHECK_THROWS_AS(tsv::parse_value("abc", 3, 7), ParseError);
    CHECK_THROWS_AS(tsv::parse_value("", 3, 7), ParseError);
    CHECK_THROWS_AS(tsv::parse_value("1.5x", 3, 7), ParseError);
    CHECK_THROWS_AS(tsv::parse_value("nan", 3, 7), ParseError);
    try {
        tsv::parse_value("abc", 3, 7);
    } catch (const ParseError& e) {
        CHECK(std::strstr(e.what(), "3") != nullptr);
        CHECK(std::strstr(e.what(), "7") != nullptr);
    }
}

TEST_CASE("format_value round-trips doubles exactly") {
    Rng rng(11, 0);
    for (int i = 0; i < 1000; ++i) {
        double v = (rng.uniform01() - 0.5) * std::pow(10.0, rng.uniform(-12.0, 12.0));
        std::string s = tsv::format_value(v);
        double back = tsv::parse_value(s, 1, 1);
        CHECK(back == v);
    }
    CHECK(tsv::format_value(0.0) == "0");
    CHECK(tsv::format_value(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(tsv::format_value(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("LineReader tracks 1-based line numbers and final newline") {
    std::istringstream in("one\ntwo\nthree\n");
    tsv::LineReader reader(in);
    std::string line;
    REQUIRE(reader.next(line));
    CHECK(line == "one");
    CHECK(reader.line_no() == 1);
    REQUIRE(reader.next(line));
    REQUIRE(reader.next(line));
    CHECK(line == "three");
    CHECK(reader.line_no() == 3);
    CHECK_FALSE(reader.next(line));

    std::istringstream no_trailer("one\ntwo");
    tsv::LineReader r2(no_trailer);
    int n = 0;
    while (r2.next(line)) ++n;
    CHECK(n == 2);
}
