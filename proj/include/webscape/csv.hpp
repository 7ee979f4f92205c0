#pragma once

// Minimal RFC 4180 reader/writer. Unquoted fields are trimmed of surrounding
// blanks so hand-typed rows ("4, Yahoo, ...") read the same as machine rows.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace webscape::csv {

struct Row {
    std::size_t line = 0;  // 1-based physical line where the row starts
    std::vector<std::string> fields;
};

/// Blank lines are skipped. Throws ParseError on an unterminated quote.
std::vector<Row> parse(std::string_view text);

std::string escape(std::string_view field);
std::string format_row(const std::vector<std::string>& fields);

std::string format_double(double value);
/// Strict: the whole field must be consumed. Returns false on failure.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

/// Case-insensitive, blank-trimmed comparison of a header row to `expected`.
bool header_matches(const std::vector<std::string>& header,
                    const std::vector<std::string_view>& expected);

}  // namespace webscape::csv
