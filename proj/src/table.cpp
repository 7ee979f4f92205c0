#include "webscape/table.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "webscape/csv.hpp"
#include "webscape/errors.hpp"
#include "webscape/url.hpp"

namespace webscape {

namespace {

std::vector<std::string_view> base_header() {
    return {kResultColumns.begin(), kResultColumns.end()};
}

std::vector<std::string_view> extended_header() {
    auto h = base_header();
    h.insert(h.end(), kAnnotationColumns.begin(), kAnnotationColumns.end());
    return h;
}

std::optional<std::string> opt_text(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    return cell;
}

// Both cells empty -> nullopt. One empty -> error. (0, 0) -> nullopt.
std::optional<GeoLocation> parse_point(std::size_t row, const std::string& lat_cell,
                                       const std::string& lon_cell,
                                       std::optional<std::string> zip,
                                       std::optional<std::string> area, LocationSource source,
                                       std::string_view what) {
    if (lat_cell.empty() && lon_cell.empty()) return std::nullopt;
    double lat = 0, lon = 0;
    if (!csv::parse_double(lat_cell, lat) || !csv::parse_double(lon_cell, lon))
        throw ParseError(row, "invalid " + std::string(what) + " coordinates '" + lat_cell +
                                  "', '" + lon_cell + "'");
    try {
        return GeoLocation::make(lat, lon, std::move(zip), std::move(area), source);
    } catch (const ValidationError& e) {
        throw ParseError(row, e.what());
    }
}

WebPageRecord parse_row(const csv::Row& row, std::size_t row_number, bool extended) {
    const auto& f = row.fields;
    WebPageRecord r;

    long long rank = 0;
    if (!csv::parse_int(f[0], rank) || rank < 1 || rank > 1'000'000'000)
        throw ParseError(row_number, "rank must be a positive integer, got '" + f[0] + "'");
    r.rank = static_cast<int>(rank);

    try {
        r.engine = parse_engine(f[1]);
    } catch (const ValidationError& e) {
        throw ParseError(row_number, e.what());
    }
    r.keyword = f[2];
    if (r.keyword.empty()) throw ParseError(row_number, "keyword is empty");
    try {
        r.search_date = parse_date(f[3]);
    } catch (const ValidationError& e) {
        throw ParseError(row_number, e.what());
    }

    r.url = f[4];
    const auto url = try_parse_url(r.url);
    if (!url) throw ParseError(row_number, "not an absolute URL: '" + r.url + "'");

    if (!f[5].empty()) {
        r.category = parse_category(f[5]);
        if (!r.category) throw ParseError(row_number, "unknown type '" + f[5] + "'");
    }

    r.location = parse_point(row_number, f[6], f[7], opt_text(f[8]), opt_text(f[9]),
                             LocationSource::Database, "server");

    if (!f[10].empty()) {
        r.ip = Ipv4Address::try_parse(f[10]);
        if (!r.ip) throw ParseError(row_number, "invalid IPv4 address '" + f[10] + "'");
    }
    r.host = f[11].empty() ? url->host : f[11];

    if (extended) {
        if (!f[12].empty()) {
            r.accuracy = parse_accuracy_code(f[12]);
            if (!r.accuracy) throw ParseError(row_number, "unknown accuracy code '" + f[12] + "'");
        }
        if (!f[13].empty()) {
            LocationEvidence ev;
            const auto source = parse_evidence_source(f[13]);
            if (!source) throw ParseError(row_number, "unknown evidence source '" + f[13] + "'");
            ev.evidence_source = *source;
            ev.creator_location = parse_point(row_number, f[14], f[15], std::nullopt,
                                              std::nullopt, LocationSource::Manual, "creator");
            ev.company_location = parse_point(row_number, f[16], f[17], std::nullopt,
                                              std::nullopt, LocationSource::Manual, "company");
            ev.page_offline = r.category == Category::Offline;
            r.evidence = std::move(ev);
        } else if (!f[14].empty() || !f[15].empty() || !f[16].empty() || !f[17].empty()) {
            throw ParseError(row_number, "creator/company coordinates without an evidence source");
        }
    }

    try {
        r.validate();
    } catch (const ValidationError& e) {
        throw ParseError(row_number, e.what());
    }
    return r;
}

void append_point(std::vector<std::string>& cells, const std::optional<GeoLocation>& loc) {
    if (loc) {
        cells.push_back(csv::format_double(loc->latitude()));
        cells.push_back(csv::format_double(loc->longitude()));
    } else {
        cells.emplace_back();
        cells.emplace_back();
    }
}

}  // namespace

ResultSet parse_result_table(std::string_view text) {
    const auto rows = csv::parse(text);
    if (rows.empty()) throw ParseError(0, "missing header row");

    const bool extended = csv::header_matches(rows.front().fields, extended_header());
    if (!extended && !csv::header_matches(rows.front().fields, base_header()))
        throw ParseError(0, "header must be: rank,engine,keyword,search_date,url,type,latitude,"
                            "longitude,zipcode,area,ip,host (optionally followed by the "
                            "annotation columns)");
    const std::size_t width = extended ? extended_header().size() : base_header().size();

    std::vector<WebPageRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].fields.size() != width)
            throw ParseError(i, "expected " + std::to_string(width) + " cells, found " +
                                    std::to_string(rows[i].fields.size()));
        records.push_back(parse_row(rows[i], i, extended));
    }
    if (records.empty()) return ResultSet("", Engine::Other, Date{});

    const auto& first = records.front();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.keyword != first.keyword || r.engine != first.engine ||
            r.search_date != first.search_date)
            throw ValidationError("row " + std::to_string(i + 1) +
                                  ": keyword/engine/date differ from row 1; one file holds one "
                                  "snapshot");
    }
    return ResultSet(first.keyword, first.engine, first.search_date, std::move(records));
}

std::string write_result_table(const ResultSet& set) {
    bool extended = false;
    for (const auto& r : set.records()) extended = extended || r.accuracy || r.evidence;

    std::ostringstream out;
    const auto header = extended ? extended_header() : base_header();
    out << csv::format_row({header.begin(), header.end()});

    for (const auto& r : set.records()) {
        std::vector<std::string> cells;
        cells.reserve(header.size());
        cells.push_back(std::to_string(r.rank));
        cells.emplace_back(to_string(r.engine));
        cells.push_back(r.keyword);
        cells.push_back(format_date(r.search_date));
        cells.push_back(r.url);
        cells.emplace_back(r.category ? to_string(*r.category) : "");
        append_point(cells, r.location);
        cells.push_back(r.location && r.location->zip() ? *r.location->zip() : "");
        cells.push_back(r.location && r.location->area() ? *r.location->area() : "");
        cells.push_back(r.ip ? r.ip->to_string() : "");
        cells.push_back(r.host);
        if (extended) {
            cells.emplace_back(r.accuracy ? to_string(*r.accuracy) : "");
            if (r.evidence) {
                cells.emplace_back(to_string(r.evidence->evidence_source));
                append_point(cells, r.evidence->creator_location);
                append_point(cells, r.evidence->company_location);
            } else {
                cells.insert(cells.end(), 5, std::string{});
            }
        }
        out << csv::format_row(cells);
    }
    return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

ResultSet read_result_file(const std::filesystem::path& path) {
    try {
        return parse_result_table(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string(), e);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_result_file(const std::filesystem::path& path, const ResultSet& set) {
    write_text_file(path, write_result_table(set));
}

std::string snapshot_file_name(const ResultSet& set) {
    std::string engine(to_string(set.engine()));
    for (char& c : engine) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return keyword_slug(set.keyword()) + "_" + engine + "_" + format_date(set.search_date()) +
           ".csv";
}

}  // namespace webscape
