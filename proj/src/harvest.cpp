#include "webscape/harvest.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <future>
#include <thread>

#include "webscape/classify.hpp"
#include "webscape/csv.hpp"
#include "webscape/table.hpp"
#include "webscape/url.hpp"

namespace webscape {

namespace {

std::string lowered(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void pause(const Timer& timer, std::chrono::steady_clock::duration d) {
    if (d <= std::chrono::steady_clock::duration::zero()) return;
    if (timer.sleep)
        timer.sleep(d);
    else
        std::this_thread::sleep_for(d);
}

// One page, with retries. Returns the records or throws.
std::vector<WebPageRecord> fetch_with_retry(const SearchProvider& provider,
                                            const PageRequest& request,
                                            const HarvestOptions& options, TokenBucket& bucket) {
    auto backoff = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        options.initial_backoff);
    const auto cap =
        std::chrono::duration_cast<std::chrono::steady_clock::duration>(options.max_backoff);
    const std::string where = provider.name() + " page at offset " + std::to_string(request.offset);
    for (int attempt = 1;; ++attempt) {
        bucket.acquire();
        PageResponse response;
        try {
            response = provider.fetch_page(request);
        } catch (const std::exception& e) {
            response.status = PageStatus::Failed;
            response.message = e.what();
        }
        if (response.status == PageStatus::Ok) return std::move(response.records);

        const bool limited = response.status == PageStatus::RateLimited;
        const std::string reason =
            where + (limited ? ": rate limited" : ": " + (response.message.empty()
                                                              ? std::string("request failed")
                                                              : response.message));
        if (!limited && !response.retryable) throw HarvestError(reason, attempt);
        if (attempt >= options.max_attempts) {
            if (limited) throw RateLimitError(reason, attempt);
            throw HarvestError(reason, attempt);
        }
        auto wait = backoff;
        if (limited)
            wait = std::max(wait, std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      response.retry_after));
        pause(options.timer, std::min(wait, cap));
        backoff = std::min(backoff * 2, cap);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// FixtureProvider

FixtureProvider::FixtureProvider(std::filesystem::path dir, Date date, int page_size,
                                 int max_results)
    : dir_(std::move(dir)), date_(date), page_size_(page_size), max_results_(max_results) {
    if (page_size < 1 || max_results < 1)
        throw ValidationError("fixture provider needs positive page size and result cap");
}

std::filesystem::path FixtureProvider::snapshot_path(std::string_view keyword) const {
    return dir_ / keyword_slug(keyword) / (format_date(date_) + ".csv");
}

const ResultSet* FixtureProvider::load(std::string_view keyword) const {
    const std::string slug = keyword_slug(keyword);
    std::lock_guard lock(mutex_);
    auto it = cache_.find(slug);
    if (it == cache_.end()) {
        const auto path = snapshot_path(keyword);
        if (!std::filesystem::exists(path)) return nullptr;
        it = cache_.emplace(slug, std::make_shared<ResultSet>(read_result_file(path))).first;
    }
    return it->second.get();
}

Engine FixtureProvider::engine() const {
    std::lock_guard lock(mutex_);
    return cache_.empty() ? Engine::Other : cache_.begin()->second->engine();
}

PageResponse FixtureProvider::fetch_page(const PageRequest& request) const {
    PageResponse response;
    const ResultSet* set = nullptr;
    try {
        set = load(request.keyword);
    } catch (const Error& e) {
        response.status = PageStatus::Failed;
        response.retryable = false;
        response.message = e.what();
        return response;
    }
    if (!set) {
        response.status = PageStatus::Failed;
        response.retryable = false;
        response.message = "no fixture snapshot at " + snapshot_path(request.keyword).string();
        return response;
    }
    const auto records = set->records();
    const auto begin = std::min<std::size_t>(static_cast<std::size_t>(request.offset), records.size());
    const auto end = std::min<std::size_t>(begin + static_cast<std::size_t>(request.count),
                                           records.size());
    response.records.assign(records.begin() + static_cast<std::ptrdiff_t>(begin),
                            records.begin() + static_cast<std::ptrdiff_t>(end));
    return response;
}

// ---------------------------------------------------------------------------
// Rate limiting

TokenBucket::TokenBucket(double rate_per_second, double burst, Timer timer)
    : rate_(rate_per_second), burst_(burst), tokens_(burst), timer_(std::move(timer)) {
    if (!(rate_ > 0)) throw ValidationError("rate limit must be > 0 requests/second");
    if (!(burst_ >= 1)) throw ValidationError("rate-limit burst must be >= 1");
    last_ = timer_.now();
}

void TokenBucket::acquire() {
    std::lock_guard lock(mutex_);
    for (;;) {
        const auto now = timer_.now();
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
        last_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        // Holding the lock while waiting keeps request starts serialized.
        const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
        pause(timer_, std::chrono::ceil<std::chrono::steady_clock::duration>(wait));
    }
}

// ---------------------------------------------------------------------------
// fetch_results

void HarvestOptions::validate() const {
    if (max_results < 1) throw ValidationError("max_results must be >= 1");
    if (concurrency < 1) throw ValidationError("concurrency must be >= 1");
    if (max_attempts < 1) throw ValidationError("max_attempts must be >= 1");
    if (!(requests_per_second > 0)) throw ValidationError("requests_per_second must be > 0");
    if (initial_backoff.count() < 0 || max_backoff < initial_backoff)
        throw ValidationError("backoff settings must satisfy 0 <= initial <= max");
}

ResultSet fetch_results(const SearchProvider& provider, std::string_view keyword,
                        const HarvestOptions& options) {
    options.validate();
    if (keyword.empty()) throw ValidationError("keyword must not be empty");
    const int page_size = provider.page_size();
    if (page_size < 1) throw ValidationError("provider page size must be >= 1");
    const int wanted = std::min(options.max_results, provider.max_results());

    TokenBucket bucket(options.requests_per_second, options.burst, options.timer);
    std::vector<WebPageRecord> records;
    bool exhausted = false;
    int offset = 0;
    while (!exhausted && offset < wanted) {
        // One wave of up to `concurrency` pages, consumed in page order.
        std::vector<PageRequest> wave;
        for (unsigned i = 0; i < options.concurrency && offset < wanted; ++i) {
            const int count = std::min(page_size, wanted - offset);
            wave.push_back(PageRequest{std::string(keyword), offset, count});
            offset += count;
        }
        std::vector<std::future<std::vector<WebPageRecord>>> pending;
        for (const auto& req : wave) {
            pending.push_back(std::async(wave.size() == 1 ? std::launch::deferred : std::launch::async,
                                         [&, req] {
                                             return fetch_with_retry(provider, req, options, bucket);
                                         }));
        }
        std::vector<std::vector<WebPageRecord>> pages;
        for (auto& f : pending) f.wait();
        for (auto& f : pending) pages.push_back(f.get());  // first failure in page order wins

        for (std::size_t p = 0; p < wave.size() && !exhausted; ++p) {
            auto& page = pages[p];
            if (static_cast<int>(page.size()) > wave[p].count)
                throw HarvestError(provider.name() + " returned more results than requested", 1);
            for (std::size_t i = 0; i < page.size(); ++i) {
                const int expected = wave[p].offset + static_cast<int>(i) + 1;
                if (page[i].rank != expected)
                    throw HarvestError(provider.name() + " returned rank " +
                                           std::to_string(page[i].rank) + " where rank " +
                                           std::to_string(expected) + " was expected",
                                       1);
                records.push_back(std::move(page[i]));
            }
            if (static_cast<int>(page.size()) < wave[p].count) exhausted = true;
        }
    }

    // Keyword spelling comes from the provider's records when there are any.
    const std::string set_keyword = records.empty() ? std::string(keyword) : records.front().keyword;
    const Engine engine = records.empty() ? provider.engine() : records.front().engine;
    const Date date = records.empty() ? provider.search_date() : records.front().search_date;
    return ResultSet(set_keyword, engine, date, std::move(records));
}

// ---------------------------------------------------------------------------
// Hosts and name resolution

std::string extract_host(std::string_view url) { return parse_url(url).host; }

std::string display_host(std::string_view url) { return strip_www(extract_host(url)); }

bool is_valid_hostname(std::string_view host) {
    if (host.empty() || host.size() > 253) return false;
    std::size_t start = 0;
    while (start <= host.size()) {
        const auto dot = host.find('.', start);
        const auto label = host.substr(start, dot == std::string_view::npos ? dot : dot - start);
        if (label.empty() || label.size() > 63 || label.front() == '-' || label.back() == '-')
            return false;
        for (char c : label) {
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') return false;
        }
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return true;
}

StaticResolver::StaticResolver(std::map<std::string, Ipv4Address> entries) {
    for (auto& [host, ip] : entries) entries_.emplace(lowered(host), ip);
}

StaticResolver StaticResolver::parse(std::string_view text) {
    std::map<std::string, Ipv4Address> entries;
    const auto rows = csv::parse(text);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& f = rows[i].fields;
        if (i == 0 && csv::header_matches(f, {"host", "ip"})) continue;
        if (f.size() != 2) throw ParseError(i + 1, "expected host,ip");
        const auto ip = Ipv4Address::try_parse(f[1]);
        if (!ip) throw ParseError(i + 1, "invalid IPv4 address '" + f[1] + "'");
        if (!is_valid_hostname(f[0])) throw ParseError(i + 1, "invalid host '" + f[0] + "'");
        entries[lowered(f[0])] = *ip;
    }
    return StaticResolver(std::move(entries));
}

std::optional<Ipv4Address> StaticResolver::resolve(std::string_view host) const {
    auto it = entries_.find(lowered(host));
    if (it == entries_.end()) it = entries_.find(lowered(strip_www(host)));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::optional<Ipv4Address> SystemResolver::resolve(std::string_view host) const {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const std::string name(host);
    if (getaddrinfo(name.c_str(), nullptr, &hints, &found) != 0 || !found) return std::nullopt;
    std::optional<Ipv4Address> ip;
    for (const addrinfo* p = found; p; p = p->ai_next) {
        if (p->ai_family == AF_INET) {
            const auto* sin = reinterpret_cast<const sockaddr_in*>(p->ai_addr);
            ip = Ipv4Address{ntohl(sin->sin_addr.s_addr)};
            break;
        }
    }
    freeaddrinfo(found);
    return ip;
}

Ipv4Address resolve_ip(std::string_view host, const Resolver& resolver) {
    if (!is_valid_hostname(host)) throw ValidationError("invalid host name '" + std::string(host) + "'");
    if (auto ip = resolver.resolve(host)) return *ip;
    throw UnresolvableError("cannot resolve '" + std::string(host) + "'");
}

std::vector<std::optional<Ipv4Address>> resolve_hosts(const std::vector<std::string>& hosts,
                                                      const Resolver& resolver,
                                                      unsigned concurrency) {
    std::vector<std::optional<Ipv4Address>> out(hosts.size());
    const auto one = [&](std::size_t i) {
        try {
            out[i] = resolve_ip(hosts[i], resolver);
        } catch (const Error&) {
            out[i] = std::nullopt;
        }
    };
    concurrency = std::max(1u, concurrency);
    for (std::size_t begin = 0; begin < hosts.size(); begin += concurrency) {
        const std::size_t end = std::min(hosts.size(), begin + concurrency);
        std::vector<std::thread> workers;
        for (std::size_t i = begin + 1; i < end; ++i) workers.emplace_back(one, i);
        one(begin);
        for (auto& w : workers) w.join();
    }
    return out;
}

std::optional<std::string> provider_key_from_env(std::string_view variable) {
    const char* value = std::getenv(std::string(variable).c_str());
    if (!value || !*value) return std::nullopt;
    return std::string(value);
}

// ---------------------------------------------------------------------------
// Geolocation of a whole set

GeolocationReport geolocate_records(const ResultSet& set, const IpRangeTable& table,
                                    const SentinelPolicy& policy, const Resolver* resolver) {
    std::vector<WebPageRecord> records(set.records().begin(), set.records().end());

    std::vector<std::string> to_resolve;
    std::vector<std::size_t> index;
    if (resolver) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (!records[i].ip) {
                to_resolve.push_back(records[i].host);
                index.push_back(i);
            }
        }
        const auto resolved = resolve_hosts(to_resolve, *resolver);
        for (std::size_t k = 0; k < index.size(); ++k) records[index[k]].ip = resolved[k];
    }

    std::size_t hits = 0, misses = 0, sentinels = 0, unresolved = 0;
    for (auto& r : records) {
        r.location.reset();
        if (!r.ip) {
            ++unresolved;
        } else {
            const auto found = table.lookup_detailed(*r.ip, policy);
            switch (found.status) {
                case LookupStatus::Hit:
                    r.location = found.location;
                    ++hits;
                    break;
                case LookupStatus::Sentinel: ++sentinels; break;
                case LookupStatus::Miss: ++misses; break;
            }
        }
        if (r.evidence)
            r.accuracy = derive_accuracy_code(*r.evidence, r.location, policy);
        else if (r.accuracy && !r.location)
            r.accuracy = AccuracyCode::NA;
    }
    return GeolocationReport{ResultSet(set.keyword(), set.engine(), set.search_date(), std::move(records)),
                             hits, misses, sentinels, unresolved};
}

}  // namespace webscape
