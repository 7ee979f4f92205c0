#pragma once

// Command-line front end. `run_cli` is the whole program minus process
// plumbing so it can be driven in-process.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "webscape/errors.hpp"
#include "webscape/landscape.hpp"
#include "webscape/raster.hpp"

namespace webscape {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags, bad configuration or an unknown provider: exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Compile-time location of the bundled data files.
std::filesystem::path default_data_dir();

struct Config {
    std::filesystem::path fixture_dir;
    std::filesystem::path range_table;
    std::filesystem::path sentinel_policy;
    std::filesystem::path city_table;
    std::filesystem::path hosts_file;

    GridSpec grid;
    KernelParams kernel;

    int max_results = 600;
    double requests_per_second = 1.0;
    double burst = 1.0;
    unsigned concurrency = 4;
    int max_attempts = 5;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::milliseconds max_backoff{30'000};

    std::size_t equilibrium_window = 4;
    double slope_tolerance = 0.005;

    std::size_t cell_px = 2;

    /// Paths under default_data_dir().
    static Config defaults();

    /// Throws UsageError when a path is missing or a number is out of range.
    void validate() const;
};

/// `key = value` lines; `#` starts a comment. Relative paths resolve
/// against `base_dir`. Unknown keys are errors. Throws UsageError.
Config parse_config(std::string_view text, const std::filesystem::path& base_dir,
                    Config base = Config::defaults());
Config load_config(const std::filesystem::path& path);

/// Documented template listing every key with its default.
std::string config_template();

struct CliContext {
    /// Whether stdin is an interactive terminal; annotate refuses otherwise.
    bool interactive = false;
};

/// `args` excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err, const CliContext& context = {});

}  // namespace webscape
