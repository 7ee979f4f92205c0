#include "webscape/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "webscape/errors.hpp"

namespace webscape::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<Row> parse(std::string_view text) {
    std::vector<Row> rows;
    std::size_t line = 1;
    std::size_t i = 0;
    if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;  // UTF-8 BOM

    while (i < text.size()) {
        Row row;
        row.line = line;
        std::string field;
        bool row_done = false;
        while (!row_done) {
            // Start of a field: skip leading blanks, detect a quoted field.
            std::size_t j = i;
            while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
            if (j < text.size() && text[j] == '"') {
                i = j + 1;
                const std::size_t start_line = line;
                for (;;) {
                    if (i >= text.size())
                        throw ParseError(0, "unterminated quoted field starting on line " +
                                                std::to_string(start_line));
                    const char c = text[i++];
                    if (c == '"') {
                        if (i < text.size() && text[i] == '"') {
                            field.push_back('"');
                            ++i;
                        } else {
                            break;
                        }
                    } else {
                        if (c == '\n') ++line;
                        field.push_back(c);
                    }
                }
                // Consume anything up to the delimiter (blanks are tolerated).
                while (i < text.size() && text[i] != ',' && text[i] != '\n') ++i;
            } else {
                const std::size_t start = i;
                while (i < text.size() && text[i] != ',' && text[i] != '\n') ++i;
                field = std::string(trim(text.substr(start, i - start)));
            }
            row.fields.push_back(std::move(field));
            field.clear();
            if (i >= text.size()) {
                row_done = true;
            } else if (text[i] == ',') {
                ++i;
                if (i >= text.size()) {
                    row.fields.emplace_back();
                    row_done = true;
                }
            } else {  // '\n'
                ++i;
                ++line;
                row_done = true;
            }
        }
        const bool blank = row.fields.size() == 1 && row.fields.front().empty();
        if (!blank) rows.push_back(std::move(row));
    }
    return rows;
}

std::string escape(std::string_view field) {
    const bool needs_quotes =
        field.find_first_of(",\"\n\r") != std::string_view::npos ||
        (!field.empty() && (field.front() == ' ' || field.back() == ' ' || field.front() == '\t'));
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    out.push_back('\n');
    return out;
}

std::string format_double(double value) {
    char buf[64];
    // Whole numbers print as integers ("200000", not "2e+05").
    if (value == std::trunc(value) && std::abs(value) < 1e15) {
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
        return std::string(buf, ec == std::errc{} ? ptr : buf);
    }
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ec == std::errc{} ? ptr : buf);
}

bool parse_double(std::string_view text, double& out) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

bool parse_int(std::string_view text, long long& out) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

bool header_matches(const std::vector<std::string>& header,
                    const std::vector<std::string_view>& expected) {
    if (header.size() != expected.size()) return false;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto got = trim(header[i]);
        const auto want = expected[i];
        if (got.size() != want.size()) return false;
        for (std::size_t k = 0; k < got.size(); ++k) {
            if (std::tolower(static_cast<unsigned char>(got[k])) !=
                std::tolower(static_cast<unsigned char>(want[k])))
                return false;
        }
    }
    return true;
}

}  // namespace webscape::csv
