#pragma once

// Result-table file format. One comma-separated file per (keyword, engine,
// date) snapshot with the header
//
//   rank,engine,keyword,search_date,url,type,latitude,longitude,zipcode,area,ip,host
//
// Annotated files append
//
//   accuracy,evidence_source,creator_lat,creator_lon,company_lat,company_lon
//
// Absent values are empty cells. Dates are written as YYYY-MM-DD; MM/DD/YYYY
// is accepted on input.

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

#include "webscape/model.hpp"

namespace webscape {

inline constexpr std::array<std::string_view, 12> kResultColumns = {
    "rank", "engine", "keyword", "search_date", "url", "type",
    "latitude", "longitude", "zipcode", "area", "ip", "host",
};

inline constexpr std::array<std::string_view, 6> kAnnotationColumns = {
    "accuracy", "evidence_source", "creator_lat", "creator_lon", "company_lat", "company_lon",
};

/// Throws ParseError (naming the row) for malformed cells and ValidationError
/// for set-level problems such as duplicate ranks.
ResultSet parse_result_table(std::string_view text);

/// Emits the annotation columns only when some record carries a code or evidence.
std::string write_result_table(const ResultSet& set);

ResultSet read_result_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it over `path`.
void write_result_file(const std::filesystem::path& path, const ResultSet& set);

/// `<keyword-slug>_<engine>_<date>.csv`
std::string snapshot_file_name(const ResultSet& set);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace webscape
