#include "webscape/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "webscape/annotate.hpp"
#include "webscape/classify.hpp"
#include "webscape/csv.hpp"
#include "webscape/geolocate.hpp"
#include "webscape/harvest.hpp"
#include "webscape/render.hpp"
#include "webscape/table.hpp"
#include "webscape/temporal.hpp"

#ifndef WEBSCAPE_DEFAULT_DATA_DIR
#define WEBSCAPE_DEFAULT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;

namespace webscape {

// ---------------------------------------------------------------------------
// Configuration

fs::path default_data_dir() { return fs::path(WEBSCAPE_DEFAULT_DATA_DIR); }

Config Config::defaults() {
    Config c;
    const auto data = default_data_dir();
    c.fixture_dir = data / "fixtures";
    c.range_table = data / "ranges.csv";
    c.sentinel_policy = data / "sentinels.csv";
    c.city_table = data / "cities.csv";
    c.hosts_file = data / "hosts.csv";
    return c;
}

void Config::validate() const {
    const auto need = [](const fs::path& p, std::string_view key, bool directory) {
        std::error_code ec;
        const bool ok = directory ? fs::is_directory(p, ec) : fs::is_regular_file(p, ec);
        if (!ok)
            throw UsageError(std::string(key) + ": " + (directory ? "directory" : "file") +
                             " not found: " + p.string());
    };
    need(fixture_dir, "fixture_dir", true);
    need(range_table, "range_table", false);
    need(sentinel_policy, "sentinel_policy", false);
    need(city_table, "city_table", false);
    need(hosts_file, "hosts_file", false);

    const auto check = [](bool ok, std::string_view what) {
        if (!ok) throw UsageError(std::string(what));
    };
    try {
        grid.validate();
        kernel.validate();
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    check(max_results >= 1 && max_results <= 100'000, "harvest.max_results must be in 1..100000");
    check(requests_per_second > 0, "harvest.requests_per_second must be > 0");
    check(burst >= 1, "harvest.burst must be >= 1");
    check(concurrency >= 1 && concurrency <= 64, "harvest.concurrency must be in 1..64");
    check(max_attempts >= 1 && max_attempts <= 100, "harvest.max_attempts must be in 1..100");
    check(initial_backoff.count() >= 0 && max_backoff >= initial_backoff,
          "harvest backoff must satisfy 0 <= initial_backoff_ms <= max_backoff_ms");
    check(equilibrium_window >= 2, "equilibrium.window must be >= 2");
    check(slope_tolerance >= 0 && slope_tolerance <= 1, "equilibrium.slope_tol must be in [0, 1]");
    check(cell_px >= 1 && cell_px <= 64, "render.cell_px must be in 1..64");
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double config_number(const std::string& key, const std::string& value) {
    double v = 0;
    if (!csv::parse_double(value, v)) throw UsageError(key + ": not a number: '" + value + "'");
    return v;
}

long long config_integer(const std::string& key, const std::string& value) {
    long long v = 0;
    if (!csv::parse_int(value, v)) throw UsageError(key + ": not an integer: '" + value + "'");
    return v;
}

}  // namespace

Config parse_config(std::string_view text, const fs::path& base_dir, Config c) {
    const auto path_of = [&](const std::string& v) {
        fs::path p(v);
        return p.is_relative() ? base_dir / p : p;
    };
    std::optional<double> cell_deg;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"fixture_dir", [&](auto&, auto& v) { c.fixture_dir = path_of(v); }},
        {"range_table", [&](auto&, auto& v) { c.range_table = path_of(v); }},
        {"sentinel_policy", [&](auto&, auto& v) { c.sentinel_policy = path_of(v); }},
        {"city_table", [&](auto&, auto& v) { c.city_table = path_of(v); }},
        {"hosts_file", [&](auto&, auto& v) { c.hosts_file = path_of(v); }},
        {"grid.min_lon", [&](auto& k, auto& v) { c.grid.min_lon = config_number(k, v); }},
        {"grid.min_lat", [&](auto& k, auto& v) { c.grid.min_lat = config_number(k, v); }},
        {"grid.max_lon", [&](auto& k, auto& v) { c.grid.max_lon = config_number(k, v); }},
        {"grid.max_lat", [&](auto& k, auto& v) { c.grid.max_lat = config_number(k, v); }},
        {"grid.cols",
         [&](auto& k, auto& v) {
             const auto n = config_integer(k, v);
             if (n < 1) throw UsageError(k + " must be >= 1");
             c.grid.n_cols = static_cast<std::size_t>(n);
         }},
        {"grid.rows",
         [&](auto& k, auto& v) {
             const auto n = config_integer(k, v);
             if (n < 1) throw UsageError(k + " must be >= 1");
             c.grid.n_rows = static_cast<std::size_t>(n);
         }},
        {"grid.cell_deg", [&](auto& k, auto& v) { cell_deg = config_number(k, v); }},
        {"kernel.radius_m", [&](auto& k, auto& v) { c.kernel.radius_m = config_number(k, v); }},
        {"kernel.population_method",
         [&](auto& k, auto& v) {
             try {
                 c.kernel.population_method = parse_population_method(v);
             } catch (const ValidationError& e) {
                 throw UsageError(k + ": " + e.what());
             }
         }},
        {"kernel.normalization",
         [&](auto& k, auto& v) {
             try {
                 c.kernel.normalization = parse_normalization(v);
             } catch (const ValidationError& e) {
                 throw UsageError(k + ": " + e.what());
             }
         }},
        {"harvest.max_results",
         [&](auto& k, auto& v) { c.max_results = static_cast<int>(config_integer(k, v)); }},
        {"harvest.requests_per_second",
         [&](auto& k, auto& v) { c.requests_per_second = config_number(k, v); }},
        {"harvest.burst", [&](auto& k, auto& v) { c.burst = config_number(k, v); }},
        {"harvest.concurrency",
         [&](auto& k, auto& v) {
             const auto n = config_integer(k, v);
             if (n < 1) throw UsageError(k + " must be >= 1");
             c.concurrency = static_cast<unsigned>(n);
         }},
        {"harvest.max_attempts",
         [&](auto& k, auto& v) { c.max_attempts = static_cast<int>(config_integer(k, v)); }},
        {"harvest.initial_backoff_ms",
         [&](auto& k, auto& v) { c.initial_backoff = std::chrono::milliseconds(config_integer(k, v)); }},
        {"harvest.max_backoff_ms",
         [&](auto& k, auto& v) { c.max_backoff = std::chrono::milliseconds(config_integer(k, v)); }},
        {"equilibrium.window",
         [&](auto& k, auto& v) {
             const auto n = config_integer(k, v);
             if (n < 2) throw UsageError(k + " must be >= 2");
             c.equilibrium_window = static_cast<std::size_t>(n);
         }},
        {"equilibrium.slope_tol", [&](auto& k, auto& v) { c.slope_tolerance = config_number(k, v); }},
        {"render.cell_px",
         [&](auto& k, auto& v) {
             const auto n = config_integer(k, v);
             if (n < 1) throw UsageError(k + " must be >= 1");
             c.cell_px = static_cast<std::size_t>(n);
         }},
    };

    std::istringstream in{std::string(text)};
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto content = trim(line);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        const std::string where = "config line " + std::to_string(line_no);
        if (eq == std::string::npos) throw UsageError(where + ": expected key = value");
        const auto key = trim(std::string_view(content).substr(0, eq));
        const auto value = trim(std::string_view(content).substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw UsageError(where + ": unknown key '" + key + "'");
        if (value.empty()) throw UsageError(where + ": empty value for '" + key + "'");
        it->second(key, value);
    }
    if (cell_deg) {
        try {
            c.grid = GridSpec::from_cell_size(c.grid.min_lon, c.grid.min_lat, c.grid.max_lon,
                                              c.grid.max_lat, *cell_deg);
        } catch (const ValidationError& e) {
            throw UsageError(std::string("grid.cell_deg: ") + e.what());
        }
    }
    return c;
}

Config load_config(const fs::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        throw UsageError(std::string("cannot read config: ") + e.what());
    }
    return parse_config(text, path.parent_path());
}

std::string config_template() {
    const Config c = Config::defaults();
    std::ostringstream o;
    o << "# webscape configuration. Relative paths resolve against this file's directory.\n"
      << "fixture_dir = " << c.fixture_dir.string() << "\n"
      << "range_table = " << c.range_table.string() << "\n"
      << "sentinel_policy = " << c.sentinel_policy.string() << "\n"
      << "city_table = " << c.city_table.string() << "\n"
      << "hosts_file = " << c.hosts_file.string() << "\n"
      << "\n# Raster extent in degrees; either cols/rows or cell_deg.\n"
      << "grid.min_lon = " << csv::format_double(c.grid.min_lon) << "\n"
      << "grid.min_lat = " << csv::format_double(c.grid.min_lat) << "\n"
      << "grid.max_lon = " << csv::format_double(c.grid.max_lon) << "\n"
      << "grid.max_lat = " << csv::format_double(c.grid.max_lat) << "\n"
      << "grid.cols = " << c.grid.n_cols << "\n"
      << "grid.rows = " << c.grid.n_rows << "\n"
      << "# grid.cell_deg = 0.1\n"
      << "\nkernel.radius_m = " << csv::format_double(c.kernel.radius_m) << "\n"
      << "kernel.population_method = " << to_string(c.kernel.population_method) << "\n"
      << "kernel.normalization = " << to_string(c.kernel.normalization) << "\n"
      << "\nharvest.max_results = " << c.max_results << "\n"
      << "harvest.requests_per_second = " << csv::format_double(c.requests_per_second) << "\n"
      << "harvest.burst = " << csv::format_double(c.burst) << "\n"
      << "harvest.concurrency = " << c.concurrency << "\n"
      << "harvest.max_attempts = " << c.max_attempts << "\n"
      << "harvest.initial_backoff_ms = " << c.initial_backoff.count() << "\n"
      << "harvest.max_backoff_ms = " << c.max_backoff.count() << "\n"
      << "\nequilibrium.window = " << c.equilibrium_window << "\n"
      << "equilibrium.slope_tol = " << csv::format_double(c.slope_tolerance) << "\n"
      << "\nrender.cell_px = " << c.cell_px << "\n";
    return o.str();
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Io {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    bool verbose = false;

    void note(const std::string& message) const {
        if (verbose) err << message << "\n";
    }
};

std::vector<ResultSet> read_sets(const std::vector<std::string>& paths) {
    std::vector<ResultSet> sets;
    sets.reserve(paths.size());
    for (const auto& p : paths) sets.push_back(read_result_file(p));
    return sets;
}

SentinelPolicy load_policy(const Config& cfg) {
    return parse_sentinel_policy(read_text_file(cfg.sentinel_policy));
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// -- harvest

struct HarvestArgs {
    std::string keyword;
    std::string provider = "fixture";
    std::string date;
    std::optional<int> max_results;
    std::string out;
};

const std::vector<std::string>& provider_names() {
    static const std::vector<std::string> names = {"fixture"};
    return names;
}

std::unique_ptr<SearchProvider> make_provider(const HarvestArgs& a, const Config& cfg) {
    if (a.provider == "fixture") {
        if (a.date.empty()) throw UsageError("the fixture provider needs --date YYYY-MM-DD");
        Date date;
        try {
            date = parse_date(a.date);
        } catch (const Error& e) {
            throw UsageError(std::string("--date: ") + e.what());
        }
        return std::make_unique<FixtureProvider>(cfg.fixture_dir, date, 50, 100'000);
    }
    std::string list;
    for (const auto& n : provider_names()) list += (list.empty() ? "" : ", ") + n;
    throw UsageError("unknown provider '" + a.provider + "'; available providers: " + list);
}

int cmd_harvest(const HarvestArgs& a, const Config& cfg, const Io& io) {
    const auto provider = make_provider(a, cfg);
    HarvestOptions options;
    options.max_results = a.max_results.value_or(cfg.max_results);
    options.concurrency = cfg.concurrency;
    options.requests_per_second = cfg.requests_per_second;
    options.burst = cfg.burst;
    options.max_attempts = cfg.max_attempts;
    options.initial_backoff = cfg.initial_backoff;
    options.max_backoff = cfg.max_backoff;
    const auto set = fetch_results(*provider, a.keyword, options);

    fs::path out = a.out.empty() ? fs::path(snapshot_file_name(set)) : fs::path(a.out);
    if (fs::is_directory(out)) out /= snapshot_file_name(set);
    write_result_file(out, set);
    io.out << "collected " << set.total() << " results for \"" << set.keyword() << "\" from "
           << provider->name() << " -> " << out.string() << "\n";
    return kExitOk;
}

// -- geolocate

struct GeolocateArgs {
    std::string input;
    std::string out;
    std::string range_table;
    std::string resolver = "static";
};

int cmd_geolocate(const GeolocateArgs& a, const Config& cfg, const Io& io) {
    const auto set = read_result_file(a.input);
    const fs::path table_path = a.range_table.empty() ? cfg.range_table : fs::path(a.range_table);
    IpRangeTable table;
    try {
        table = load_range_table(read_text_file(table_path));
    } catch (const ParseError& e) {
        throw ParseError(table_path.string(), e);
    }
    const auto policy = load_policy(cfg);

    std::unique_ptr<Resolver> resolver;
    if (a.resolver == "static")
        resolver = std::make_unique<StaticResolver>(StaticResolver::parse(read_text_file(cfg.hosts_file)));
    else if (a.resolver == "system")
        resolver = std::make_unique<SystemResolver>();
    else if (a.resolver != "none")
        throw UsageError("unknown resolver '" + a.resolver + "'; choose static, system or none");

    const auto report = geolocate_records(set, table, policy, resolver.get());
    write_result_file(a.out, report.set);
    io.out << report.set.total() << " records: " << report.hits << " hits, " << report.misses
           << " misses, " << report.sentinels << " sentinel, " << report.unresolved
           << " without address -> " << a.out << "\n";
    return kExitOk;
}

// -- annotate

struct AnnotateArgs {
    std::string input;
    std::string out;
    std::string cities;
};

int cmd_annotate(const AnnotateArgs& a, const Config& cfg, const Io& io, const CliContext& ctx) {
    if (!ctx.interactive)
        throw UsageError(
            "annotate is interactive and stdin is not a terminal; run it from a shell "
            "session, e.g. `webscape annotate results.csv`");
    const auto set = read_result_file(a.input);
    const auto cities = CityTable::parse(read_text_file(a.cities.empty() ? cfg.city_table : fs::path(a.cities)));
    const fs::path out = a.out.empty() ? fs::path(a.input) : fs::path(a.out);
    AnnotationSession session(
        set, cities, [&](const ResultSet& s) { write_result_file(out, s); }, load_policy(cfg));
    session.run(io.in, io.out);
    return kExitOk;
}

// -- decay

struct DecayArgs {
    std::vector<std::string> inputs;
    std::string out;
    std::string chart;
    std::optional<std::size_t> window;
    std::optional<double> slope_tol;
};

int cmd_decay(const DecayArgs& a, const Config& cfg, const Io& io) {
    auto sets = read_sets(a.inputs);
    std::vector<std::string> odd;
    for (std::size_t i = 1; i < sets.size(); ++i) {
        if (sets[i].keyword() != sets[0].keyword() || sets[i].engine() != sets[0].engine())
            odd.push_back(a.inputs[i] + " (\"" + sets[i].keyword() + "\", " +
                          std::string(to_string(sets[i].engine())) + ")");
    }
    if (!odd.empty()) {
        std::string msg = "snapshots must share keyword and engine with " + a.inputs[0] + " (\"" +
                          sets[0].keyword() + "\", " + std::string(to_string(sets[0].engine())) +
                          "); offending files:";
        for (const auto& o : odd) msg += " " + o;
        throw ValidationError(msg);
    }
    const WeeklySeries series(std::move(sets));
    const auto url = same_url_counts(series);
    const auto rank = same_rank_counts(series);

    std::string table = csv::format_row({"week", "date", "same_url", "same_rank", "fraction"});
    for (std::size_t k = 0; k < url.weeks(); ++k)
        table += csv::format_row({std::to_string(k + 1), format_date(url.dates[k]),
                                  std::to_string(url.counts[k]), std::to_string(rank.counts[k]),
                                  csv::format_double(url.fractions[k])});

    const std::size_t window = a.window.value_or(cfg.equilibrium_window);
    const double tol = a.slope_tol.value_or(cfg.slope_tolerance);
    std::string summary;
    if (url.weeks() < window) {
        summary = "equilibrium: needs at least " + std::to_string(window) + " weeks";
    } else if (const auto eq = equilibrium_level(url, window, tol)) {
        const double base = static_cast<double>(url.baseline());
        summary = "equilibrium: level " + csv::format_double(eq->level) + " (" +
                  percent(base > 0 ? 100.0 * eq->level / base : 0.0) + "% of week 1), onset week " +
                  std::to_string(eq->onset_week);
    } else {
        summary = "equilibrium: not reached";
    }

    if (a.out.empty()) {
        io.out << table;
        io.err << summary << "\n";
    } else {
        write_text_file(a.out, table);
        io.out << url.weeks() << " weeks of \"" << series.keyword() << "\" -> " << a.out << "\n"
               << summary << "\n";
    }
    if (!a.chart.empty()) {
        std::vector<double> url_f = url.fractions, rank_f = rank.fractions;
        write_png_file(a.chart, line_chart({{"same_url", url_f}, {"same_rank", rank_f}}));
        io.note("chart -> " + a.chart);
    }
    return kExitOk;
}

// -- stats

struct StatsArgs {
    std::vector<std::string> inputs;
    std::string out_dir;
    bool charts = false;
};

int cmd_stats(const StatsArgs& a, const Config&, const Io& io) {
    const auto sets = read_sets(a.inputs);
    std::size_t records = 0, annotated = 0;
    for (const auto& s : sets) {
        for (const auto& r : s.records()) {
            ++records;
            if (is_annotated(r)) ++annotated;
        }
    }
    if (annotated == 0)
        throw ValidationError("nothing annotated: " + std::to_string(records) + " records in " +
                              std::to_string(sets.size()) +
                              " file(s) carry no category or accuracy code");

    const auto shares = category_breakdown(sets);
    const auto tally = accuracy_summary(sets);
    const auto per_category = category_accuracy(sets);

    std::string categories = csv::format_row({"category", "count", "percent"});
    std::vector<double> category_values;
    for (const auto& s : shares) {
        categories += csv::format_row({std::string(category_label(s.category)), std::to_string(s.count),
                                      percent(s.percent)});
        category_values.push_back(s.percent);
    }

    std::string accuracy = csv::format_row({"code", "count", "percent"});
    std::vector<double> code_values;
    for (std::size_t i = 0; i < kAllAccuracyCodes.size(); ++i) {
        const double pct = tally.n ? 100.0 * static_cast<double>(tally.histogram[i]) /
                                         static_cast<double>(tally.n)
                                   : 0.0;
        accuracy += csv::format_row({std::string(to_string(kAllAccuracyCodes[i])),
                                    std::to_string(tally.histogram[i]), percent(pct)});
        code_values.push_back(pct);
    }
    const auto count_of = [&](double pct) {
        return std::to_string(static_cast<long long>(std::llround(pct * static_cast<double>(tally.n) / 100.0)));
    };
    accuracy += csv::format_row({"accurate", count_of(tally.accurate_pct), percent(tally.accurate_pct)});
    accuracy += csv::format_row({"inaccurate", count_of(tally.inaccurate_pct), percent(tally.inaccurate_pct)});
    accuracy += csv::format_row({"unknown", count_of(tally.unknown_pct), percent(tally.unknown_pct)});

    std::string by_category = csv::format_row({"category", "count", "accurate", "accurate_percent"});
    std::vector<double> by_category_values;
    for (const auto& c : per_category) {
        by_category += csv::format_row({std::string(category_label(c.category)), std::to_string(c.count),
                                       std::to_string(c.accurate), percent(c.accurate_pct)});
        by_category_values.push_back(c.accurate_pct);
    }

    io.out << "# categories (" << records << " records, " << annotated << " annotated)\n"
           << categories << "\n# accuracy";
    if (tally.uncoded) io.out << " (" << tally.uncoded << " uncoded counted as NA)";
    io.out << "\n" << accuracy << "\n# accuracy by category\n" << by_category;

    if (!a.out_dir.empty()) {
        const fs::path dir(a.out_dir);
        fs::create_directories(dir);
        write_text_file(dir / "categories.csv", categories);
        write_text_file(dir / "accuracy.csv", accuracy);
        write_text_file(dir / "category_accuracy.csv", by_category);
        if (a.charts) {
            write_png_file(dir / "categories.png", bar_chart(category_values));
            write_png_file(dir / "accuracy.png", bar_chart(code_values));
            write_png_file(dir / "category_accuracy.png", bar_chart(by_category_values));
        }
        io.note("reports -> " + dir.string());
    } else if (a.charts) {
        throw UsageError("--charts needs --out-dir");
    }
    return kExitOk;
}

// -- landscape / sweep

PointSelection select_or_fail(const std::vector<ResultSet>& sets, const PointFilter& filter,
                              std::string_view role) {
    auto sel = select_points(sets, filter);
    if (sel.points.empty())
        throw ValidationError("no usable " + std::string(role) + " points: " + sel.describe());
    return sel;
}

struct LandscapeArgs {
    std::vector<std::string> keyword;
    std::vector<std::string> background;
    std::string out_dir;
    std::optional<double> radius;
    std::string method;
    std::string normalization;
    bool accurate_only = false;
    bool sweep = false;
};

KernelParams kernel_from(const Config& cfg, std::optional<double> radius, const std::string& method,
                         const std::string& normalization) {
    KernelParams p = cfg.kernel;
    try {
        if (radius) p.radius_m = *radius;
        if (!method.empty()) p.population_method = parse_population_method(method);
        if (!normalization.empty()) p.normalization = parse_normalization(normalization);
        p.validate();
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    return p;
}

int cmd_landscape(const LandscapeArgs& a, const Config& cfg, const Io& io) {
    const auto params = kernel_from(cfg, a.radius, a.method, a.normalization);
    const auto keyword_sets = read_sets(a.keyword);
    const auto background_sets = read_sets(a.background);
    PointFilter filter{load_policy(cfg), a.accurate_only};
    const auto kw = select_or_fail(keyword_sets, filter, "keyword");
    const auto bg = select_or_fail(background_sets, filter, "background");
    io.note("keyword: " + kw.describe());
    io.note("background: " + bg.describe());

    const auto kw_points = weight_points(kw.points, params.population_method);
    const auto bg_points = weight_points(bg.points, params.population_method);
    const std::vector<double> radii = a.sweep ? default_sweep_radii() : std::vector<double>{params.radius_m};

    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    std::string manifest = csv::format_row(
        {"name", "radius_m", "population_method", "normalization", "accurate_only", "keyword_points",
         "background_points", "keyword_file", "background_file", "differential_file", "image_file"});
    RenderOptions render;
    render.ramp = Ramp::Diverging;
    render.cell_px = cfg.cell_px;
    for (const double radius : radii) {
        const auto name = sweep_name(radius, params.population_method, params.normalization);
        const std::string prefix = a.sweep ? name + "_" : "";
        const auto k = kernel_density(kw_points, cfg.grid, radius);
        const auto b = kernel_density(bg_points, cfg.grid, radius);
        RasterGrid d = [&] {
            try {
                return differential(k, b, params.normalization);
            } catch (const ValidationError& e) {
                throw ValidationError("radius " + csv::format_double(radius) + " m: " + e.what() +
                                      " (are the points inside the grid extent?)");
            }
        }();
        const std::string kf = prefix + "keyword.asc", bf = prefix + "background.asc",
                          df = prefix + "differential.asc", pf = prefix + "differential.png";
        write_ascii_grid_file(dir / kf, k);
        write_ascii_grid_file(dir / bf, b);
        write_ascii_grid_file(dir / df, d);
        write_png_file(dir / pf, render_raster(d, render));
        manifest += csv::format_row({name, csv::format_double(radius),
                                     std::string(to_string(params.population_method)),
                                     std::string(to_string(params.normalization)),
                                     a.accurate_only ? "true" : "false", std::to_string(kw.points.size()),
                                     std::to_string(bg.points.size()), kf, bf, df, pf});
        io.note("wrote " + name);
    }
    write_text_file(dir / "manifest.csv", manifest);
    io.out << radii.size() << " landscape" << (radii.size() == 1 ? "" : "s") << " ("
           << kw.points.size() << " keyword points, " << bg.points.size()
           << " background points) -> " << dir.string() << "\n";
    return kExitOk;
}

struct SweepArgs {
    std::vector<std::string> inputs;
    std::string out_dir;
    std::vector<double> radii;
    std::vector<std::string> methods;
    std::vector<std::string> normalizations;
    bool accurate_only = false;
};

int cmd_sweep(const SweepArgs& a, const Config& cfg, const Io& io) {
    std::vector<PopulationMethod> methods;
    std::vector<Normalization> norms;
    try {
        for (const auto& m : a.methods) methods.push_back(parse_population_method(m));
        for (const auto& n : a.normalizations) norms.push_back(parse_normalization(n));
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    if (methods.empty()) methods.push_back(cfg.kernel.population_method);
    if (norms.empty()) norms.push_back(cfg.kernel.normalization);
    const auto radii = a.radii.empty() ? default_sweep_radii() : a.radii;

    const auto sets = read_sets(a.inputs);
    const auto sel = select_or_fail(sets, PointFilter{load_policy(cfg), a.accurate_only}, "input");
    io.note(sel.describe());
    const auto sweep = parameter_sweep(sel.points, cfg.grid, radii, methods, norms);
    write_sweep(sweep, a.out_dir);
    for (const auto& e : sweep.entries) {
        if (!e.error.empty()) io.err << "failed: " << e.name << ": " << e.error << "\n";
    }
    io.out << sweep.entries.size() - sweep.failures() << " of " << sweep.entries.size()
           << " rasters written -> " << a.out_dir << "\n";
    return sweep.failures() == sweep.entries.size() ? kExitFailure : kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------
// Entry point

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err, const CliContext& context) {
    CLI::App app{"Geolocate ranked web-search results and map their information landscapes.",
                 "webscape"};
    app.fallthrough();
    app.require_subcommand(1);
    std::string config_path;
    bool verbose = false;
    app.add_option("--config", config_path, "Key-value configuration file")->check(CLI::ExistingFile);
    app.add_flag("-v,--verbose", verbose, "Report progress on stderr");

    HarvestArgs ha;
    auto* harvest = app.add_subcommand("harvest", "Collect ranked results into a snapshot file");
    harvest->add_option("-k,--keyword", ha.keyword, "Search keyword")->required();
    harvest->add_option("-p,--provider", ha.provider, "Search provider")->capture_default_str();
    harvest->add_option("-d,--date", ha.date, "Snapshot date for the fixture provider (YYYY-MM-DD)");
    harvest->add_option("-n,--max-results", ha.max_results, "Result cap (default from config)")
        ->check(CLI::Range(1, 100'000));
    harvest->add_option("-o,--out", ha.out, "Output file or directory");

    GeolocateArgs ga;
    auto* geolocate = app.add_subcommand("geolocate", "Fill server locations from an IP range table");
    geolocate->add_option("input", ga.input, "Result table")->required()->check(CLI::ExistingFile);
    geolocate->add_option("-o,--out", ga.out, "Output result table")->required();
    geolocate->add_option("--range-table", ga.range_table, "Range table (default from config)");
    geolocate->add_option("--resolver", ga.resolver, "Address source for rows without an IP: static, system or none")
        ->capture_default_str();

    AnnotateArgs aa;
    auto* annotate = app.add_subcommand("annotate", "Interactively code categories and accuracy");
    annotate->add_option("input", aa.input, "Result table")->required()->check(CLI::ExistingFile);
    annotate->add_option("-o,--out", aa.out, "Output (default: update the input in place)");
    annotate->add_option("--cities", aa.cities, "City table (default from config)");

    DecayArgs da;
    auto* decay = app.add_subcommand("decay", "Week-over-week persistence of a keyword's results");
    decay->add_option("inputs", da.inputs, "Snapshot files, one per week")->required()->check(CLI::ExistingFile);
    decay->add_option("-o,--out", da.out, "Report file (default stdout)");
    decay->add_option("--chart", da.chart, "Line chart PNG");
    decay->add_option("--window", da.window, "Equilibrium window in weeks")->check(CLI::Range(2, 1000));
    decay->add_option("--slope-tol", da.slope_tol, "Equilibrium slope tolerance")->check(CLI::Range(0.0, 1.0));

    StatsArgs sa;
    auto* stats = app.add_subcommand("stats", "Category and accuracy statistics of annotated files");
    stats->add_option("inputs", sa.inputs, "Annotated result tables")->required()->check(CLI::ExistingFile);
    stats->add_option("-o,--out-dir", sa.out_dir, "Directory for CSV reports");
    stats->add_flag("--charts", sa.charts, "Also write bar charts (needs --out-dir)");

    LandscapeArgs la;
    auto* landscape = app.add_subcommand("landscape", "Keyword, background and differential rasters");
    landscape->add_option("-k,--keyword", la.keyword, "Keyword result tables")->required()->check(CLI::ExistingFile);
    landscape->add_option("-b,--background", la.background, "Background result tables")
        ->required()
        ->check(CLI::ExistingFile);
    landscape->add_option("-o,--out-dir", la.out_dir, "Output directory")->required();
    landscape->add_option("-r,--radius", la.radius, "Kernel radius in metres")->check(CLI::PositiveNumber);
    landscape->add_option("-m,--method", la.method, "Population method: none, inverse-rank, log-rank, fuzzy");
    landscape->add_option("--normalization", la.normalization, "max-score or score-range");
    landscape->add_flag("--accurate-only", la.accurate_only, "Drop records coded E3, I3 or NA");
    landscape->add_flag("--sweep", la.sweep, "One landscape per radius from 50 km to 300 km");

    SweepArgs wa;
    auto* sweep = app.add_subcommand("sweep", "Normalised density rasters over a parameter grid");
    sweep->add_option("inputs", wa.inputs, "Result tables")->required()->check(CLI::ExistingFile);
    sweep->add_option("-o,--out-dir", wa.out_dir, "Output directory")->required();
    sweep->add_option("--radii", wa.radii, "Radii in metres (default 50000..300000 step 50000)")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    sweep->add_option("--methods", wa.methods, "Population methods")->delimiter(',');
    sweep->add_option("--normalizations", wa.normalizations, "Normalizations")->delimiter(',');
    sweep->add_flag("--accurate-only", wa.accurate_only, "Drop records coded E3, I3 or NA");

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const Io io{in, out, err, verbose};
    try {
        Config cfg = config_path.empty() ? Config::defaults() : load_config(config_path);
        cfg.validate();
        io.note("config: " + (config_path.empty() ? std::string("built-in defaults") : config_path));
        if (*harvest) return cmd_harvest(ha, cfg, io);
        if (*geolocate) return cmd_geolocate(ga, cfg, io);
        if (*annotate) return cmd_annotate(aa, cfg, io, context);
        if (*decay) return cmd_decay(da, cfg, io);
        if (*stats) return cmd_stats(sa, cfg, io);
        if (*landscape) return cmd_landscape(la, cfg, io);
        if (*sweep) return cmd_sweep(wa, cfg, io);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace webscape
