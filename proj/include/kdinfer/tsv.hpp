#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace kdinfer::tsv {

/// Split one line on tabs. Empty fields are kept, so the field count is
/// always 1 + number of tabs.
std::vector<std::string_view> split(std::string_view line);

/// Parse a decimal cell (plain or scientific notation). Throws ParseError
/// naming (line, column) if the cell is not a number or not finite.
/// Column numbers are 1-based to match editor conventions.
double parse_value(std::string_view cell, std::size_t line_no, std::size_t col_no);

/// Render a double with 17 significant digits so that parsing the result
/// recovers the exact same bits. Infinities render as "inf" / "-inf".
std::string format_value(double v);

/// Read lines separated by LF, tracking 1-based line numbers.
/// Returns false at end of stream. A trailing newline does not produce an
/// empty final line.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}
    bool next(std::string& line);
    std::size_t line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

}  // namespace kdinfer::tsv
