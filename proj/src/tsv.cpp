#include "kdinfer/tsv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>

#include "kdinfer/errors.hpp"

namespace kdinfer::tsv {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

double parse_value(std::string_view cell, std::size_t line_no, std::size_t col_no) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError("line " + std::to_string(line_no) + ", column " +
                         std::to_string(col_no) + ": not a number: \"" +
                         std::string(cell) + "\"");
    }
    if (!std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ", column " +
                         std::to_string(col_no) + ": non-finite value: \"" +
                         std::string(cell) + "\"");
    }
    return v;
}

std::string format_value(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool LineReader::next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    return true;
}

}  // namespace kdinfer::tsv
