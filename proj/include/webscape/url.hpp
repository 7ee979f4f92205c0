#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace webscape {

/// Components of an absolute hierarchical URL (`scheme://host[:port]/path?query#fragment`).
struct Url {
    std::string scheme;  // lowercased
    std::string host;    // lowercased
    std::optional<int> port;
    std::string path;  // includes the leading '/', may be empty
    std::string query;  // without the '?'
    std::string fragment;
    bool has_query = false;
    bool has_fragment = false;
};

/// Throws ValidationError for relative or malformed input.
Url parse_url(std::string_view text);
std::optional<Url> try_parse_url(std::string_view text);

/// Default port for http/https/ftp, or nullopt for other schemes.
std::optional<int> default_port(std::string_view scheme);

/// Drops one leading "www." label ("www.sandiego.gov" -> "sandiego.gov").
std::string strip_www(std::string_view host);

/// Join key for comparing URLs across snapshots: lowercase scheme and host,
/// default port dropped, one trailing slash removed from the path, path,
/// query and fragment otherwise kept verbatim. Unparseable input is returned
/// unchanged so it still joins against an identical string.
std::string normalize_url(std::string_view text);

}  // namespace webscape
