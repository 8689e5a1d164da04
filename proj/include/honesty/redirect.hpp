#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace honesty::trust {

struct CacheEntry {
    std::string url;
    std::string resolved;
    std::string fetched_at;  // RFC 3339 UTC
};

/// Append-only map original URL -> resolved URL, persisted as JSON-Lines
/// ({"url","resolved","fetched_at"}). The first entry for a URL wins.
class RedirectCache {
public:
    RedirectCache() = default;
    /// Loads path if it exists; later inserts are appended to it.
    explicit RedirectCache(std::string path);

    std::optional<CacheEntry> lookup(std::string_view url) const;
    /// No-op when url is already cached.
    void insert(CacheEntry entry);
    std::size_t size() const;
    const std::string& path() const { return path_; }

private:
    std::string path_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, CacheEntry> entries_;
};

/// One HTTP hop: the absolute Location target of a redirect response, or
/// nullopt when the response is not a redirect. Throws NetworkError.
class HttpClient {
public:
    virtual ~HttpClient() = default;
    virtual std::optional<std::string> redirect_target(const std::string& url) = 0;
};

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// cpp-httplib client: HEAD first, GET when HEAD fails or is rejected.
std::unique_ptr<HttpClient> make_http_client(std::chrono::seconds timeout = std::chrono::seconds{5});

/// Hosts treated as link shorteners when no list is configured.
const std::unordered_set<std::string>& default_shorteners();

enum class ResolveStatus {
    NotShortener,      // left as is, 0 hops
    CacheHit,
    Resolved,          // followed over the network and cached
    OfflineMiss,       // offline and not cached
    NetworkError,
    TooManyRedirects,
};

std::string_view to_string(ResolveStatus status);

struct ResolveResult {
    std::string original_url;
    std::optional<std::string> resolved_url;  // set for NotShortener, CacheHit and Resolved
    ResolveStatus status = ResolveStatus::NotShortener;
    std::size_t hops = 0;

    bool unresolved() const { return !resolved_url.has_value(); }
};

struct ResolverOptions {
    std::size_t max_hops = 10;
    bool offline = true;
    std::unordered_set<std::string> shorteners = default_shorteners();
};

/// Follows redirects of shortened links. Only hosts in the shortener set are
/// resolved; everything else resolves to itself. Failures never throw.
class RedirectResolver {
public:
    RedirectResolver(ResolverOptions options, RedirectCache& cache,
                     std::unique_ptr<HttpClient> client = nullptr);

    ResolveResult resolve(const std::string& url);

private:
    ResolverOptions options_;
    RedirectCache& cache_;
    std::unique_ptr<HttpClient> client_;
};

/// Lowercase host of a URL without port or userinfo; empty when none.
std::string url_host(std::string_view url);

}  // namespace honesty::trust
