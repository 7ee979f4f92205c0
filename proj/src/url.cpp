#include "webscape/url.hpp"

#include <cctype>
#include <charconv>

#include "webscape/errors.hpp"

namespace webscape {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool valid_scheme(std::string_view scheme) {
    if (scheme.empty() || !std::isalpha(static_cast<unsigned char>(scheme.front()))) return false;
    for (char c : scheme) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return false;
    }
    return true;
}

bool valid_host(std::string_view host) {
    if (host.empty() || host.front() == '.' || host.front() == '-') return false;
    for (char c : host) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.' && c != '_')
            return false;
    }
    return true;
}

}  // namespace

std::optional<Url> try_parse_url(std::string_view text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)) || std::iscntrl(static_cast<unsigned char>(c)))
            return std::nullopt;
    }
    const auto sep = text.find("://");
    if (sep == std::string_view::npos) return std::nullopt;
    const auto scheme = text.substr(0, sep);
    if (!valid_scheme(scheme)) return std::nullopt;

    Url url;
    url.scheme = lower(scheme);
    std::string_view rest = text.substr(sep + 3);

    const auto authority_end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, authority_end);
    rest = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

    if (const auto at = authority.rfind('@'); at != std::string_view::npos)
        authority = authority.substr(at + 1);
    if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
        const auto port_text = authority.substr(colon + 1);
        authority = authority.substr(0, colon);
        if (!port_text.empty()) {
            int port = 0;
            const auto [ptr, ec] =
                std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
            if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port <= 0 ||
                port > 65535)
                return std::nullopt;
            url.port = port;
        }
    }
    if (!valid_host(authority)) return std::nullopt;
    url.host = lower(authority);

    if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
        url.fragment = std::string(rest.substr(hash + 1));
        url.has_fragment = true;
        rest = rest.substr(0, hash);
    }
    if (const auto q = rest.find('?'); q != std::string_view::npos) {
        url.query = std::string(rest.substr(q + 1));
        url.has_query = true;
        rest = rest.substr(0, q);
    }
    url.path = std::string(rest);
    return url;
}

Url parse_url(std::string_view text) {
    auto url = try_parse_url(text);
    if (!url) throw ValidationError("not an absolute URL: '" + std::string(text) + "'");
    return *std::move(url);
}

std::optional<int> default_port(std::string_view scheme) {
    if (scheme == "http") return 80;
    if (scheme == "https") return 443;
    if (scheme == "ftp") return 21;
    return std::nullopt;
}

std::string strip_www(std::string_view host) {
    if (host.size() > 4 && lower(host.substr(0, 4)) == "www.") host.remove_prefix(4);
    return std::string(host);
}

std::string normalize_url(std::string_view text) {
    const auto url = try_parse_url(text);
    if (!url) return std::string(text);

    std::string out = url->scheme + "://" + url->host;
    if (url->port && url->port != default_port(url->scheme)) out += ":" + std::to_string(*url->port);
    std::string_view path = url->path;
    if (!path.empty() && path.back() == '/') path.remove_suffix(1);
    out += path;
    if (url->has_query) out += "?" + url->query;
    if (url->has_fragment) out += "#" + url->fragment;
    return out;
}

}  // namespace webscape
