#pragma once

// Collecting ranked results from a search provider and resolving hosts to
// IPv4 addresses. Live search APIs sit behind SearchProvider; the bundled
// implementation replays snapshot files from a fixture directory.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "webscape/errors.hpp"
#include "webscape/geolocate.hpp"
#include "webscape/model.hpp"

namespace webscape {

/// A provider or network failure that survived every retry.
class HarvestError : public Error {
public:
    HarvestError(const std::string& what, int attempts)
        : Error(what + " (after " + std::to_string(attempts) + " attempt" +
                (attempts == 1 ? "" : "s") + ")"),
          attempts_(attempts) {}

    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

/// The provider kept answering "rate limited" until the retry cap.
class RateLimitError : public HarvestError {
public:
    using HarvestError::HarvestError;
};

class UnresolvableError : public Error {
public:
    using Error::Error;
};

struct PageRequest {
    std::string keyword;
    int offset = 0;  // 0-based index of the first result wanted
    int count = 0;
};

enum class PageStatus { Ok, RateLimited, Failed };

struct PageResponse {
    PageStatus status = PageStatus::Ok;
    /// Ranks offset+1 .. offset+records.size(). Fewer than requested means
    /// the provider has no more results.
    std::vector<WebPageRecord> records;
    std::string message;
    std::chrono::milliseconds retry_after{0};
    bool retryable = true;  // only consulted for Failed
};

/// Implementations must tolerate concurrent fetch_page calls.
class SearchProvider {
public:
    virtual ~SearchProvider() = default;

    virtual std::string name() const = 0;
    virtual Engine engine() const = 0;
    virtual int page_size() const = 0;
    virtual int max_results() const = 0;
    /// Date stamped on the collected set. Live providers use today.
    virtual Date search_date() const { return today(); }

    virtual PageResponse fetch_page(const PageRequest& request) const = 0;
};

/// Replays `<dir>/<keyword-slug>/<date>.csv`.
class FixtureProvider : public SearchProvider {
public:
    FixtureProvider(std::filesystem::path dir, Date date, int page_size = 50,
                    int max_results = 1000);

    std::string name() const override { return "fixture"; }
    /// Engine of the snapshot, or Other when it cannot be read.
    Engine engine() const override;
    int page_size() const override { return page_size_; }
    int max_results() const override { return max_results_; }
    Date search_date() const override { return date_; }

    PageResponse fetch_page(const PageRequest& request) const override;

    std::filesystem::path snapshot_path(std::string_view keyword) const;

private:
    const ResultSet* load(std::string_view keyword) const;

    std::filesystem::path dir_;
    Date date_;
    int page_size_;
    int max_results_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, std::shared_ptr<ResultSet>> cache_;
};

/// Time source for rate limiting and backoff, swappable in tests.
struct Timer {
    std::function<std::chrono::steady_clock::time_point()> now = [] {
        return std::chrono::steady_clock::now();
    };
    std::function<void(std::chrono::steady_clock::duration)> sleep;  // defaults to sleep_for
};

/// Classic token bucket; thread-safe. acquire() blocks until a token is free.
class TokenBucket {
public:
    /// Throws ValidationError unless rate > 0 and burst >= 1.
    TokenBucket(double rate_per_second, double burst = 1.0, Timer timer = {});

    void acquire();

private:
    double rate_;
    double burst_;
    double tokens_;
    Timer timer_;
    std::chrono::steady_clock::time_point last_;
    std::mutex mutex_;
};

struct HarvestOptions {
    int max_results = 600;
    unsigned concurrency = 4;
    double requests_per_second = 1.0;
    double burst = 1.0;
    int max_attempts = 5;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::milliseconds max_backoff{30'000};
    Timer timer;

    void validate() const;
};

/// Pages through the provider, up to `concurrency` requests in flight,
/// and assembles ranks 1..n in order (n <= max_results). Retries failures
/// and rate-limit answers with exponential backoff up to `max_attempts`.
ResultSet fetch_results(const SearchProvider& provider, std::string_view keyword,
                        const HarvestOptions& options = {});

/// Hostname of an absolute URL, lowercased and otherwise verbatim.
std::string extract_host(std::string_view url);
/// extract_host without a leading "www." label.
std::string display_host(std::string_view url);

/// Letters, digits and hyphens in dot-separated labels.
bool is_valid_hostname(std::string_view host);

class Resolver {
public:
    virtual ~Resolver() = default;
    /// nullopt when the name does not resolve. Must be thread-safe.
    virtual std::optional<Ipv4Address> resolve(std::string_view host) const = 0;
};

/// Fixed host -> address map, case-insensitive on the host.
class StaticResolver : public Resolver {
public:
    StaticResolver() = default;
    explicit StaticResolver(std::map<std::string, Ipv4Address> entries);

    /// Columns host, ip (header row optional). Lookups fall back to the host
    /// without a leading "www.".
    static StaticResolver parse(std::string_view text);

    std::optional<Ipv4Address> resolve(std::string_view host) const override;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<std::string, Ipv4Address> entries_;
};

/// First A record from the system resolver (getaddrinfo).
class SystemResolver : public Resolver {
public:
    std::optional<Ipv4Address> resolve(std::string_view host) const override;
};

/// Throws ValidationError for a malformed host and UnresolvableError when the
/// resolver has no answer.
Ipv4Address resolve_ip(std::string_view host, const Resolver& resolver);

/// Resolves every host with up to `concurrency` lookups in flight; results
/// line up with `hosts`.
std::vector<std::optional<Ipv4Address>> resolve_hosts(const std::vector<std::string>& hosts,
                                                      const Resolver& resolver,
                                                      unsigned concurrency = 8);

inline constexpr std::string_view kProviderKeyVariable = "WEBSCAPE_PROVIDER_KEY";

std::optional<std::string> provider_key_from_env(std::string_view variable = kProviderKeyVariable);

struct GeolocationReport {
    ResultSet set;
    std::size_t hits = 0;
    std::size_t misses = 0;
    std::size_t sentinels = 0;
    std::size_t unresolved = 0;  // no address and the resolver had none either
};

/// Fills each record's location from the range table. Records without an
/// address are resolved through `resolver` when one is given. Misses,
/// placeholder locations and unresolvable hosts end up with no location;
/// accuracy codes are re-derived from stored evidence.
GeolocationReport geolocate_records(const ResultSet& set, const IpRangeTable& table,
                                    const SentinelPolicy& policy = SentinelPolicy::us_default(),
                                    const Resolver* resolver = nullptr);

}  // namespace webscape
