#include "honesty/redirect.hpp"

#include "honesty/corpus.hpp"
#include "honesty/error.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

namespace honesty::trust {

namespace {

struct UrlParts {
    std::string scheme;  // lowercase, without "://"
    std::string origin;  // scheme://authority
    std::string path;    // starts with '/', includes query
};

std::optional<UrlParts> split_url(std::string_view url) {
    auto sep = url.find("://");
    if (sep == std::string_view::npos || sep == 0) return std::nullopt;
    UrlParts parts;
    parts.scheme = std::string(url.substr(0, sep));
    for (auto& c : parts.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto rest = url.substr(sep + 3);
    auto slash = rest.find_first_of("/?#");
    auto authority = rest.substr(0, slash);
    if (authority.empty()) return std::nullopt;
    parts.origin = parts.scheme + "://" + std::string(authority);
    if (slash == std::string_view::npos) {
        parts.path = "/";
    } else {
        auto tail = rest.substr(slash);
        if (auto hash = tail.find('#'); hash != std::string_view::npos) tail = tail.substr(0, hash);
        parts.path = tail.empty() || tail.front() != '/' ? "/" + std::string(tail) : std::string(tail);
    }
    return parts;
}

std::string absolute_location(const UrlParts& base, const std::string& location) {
    if (location.find("://") != std::string::npos) return location;
    if (location.starts_with("//")) return base.scheme + ":" + location;
    if (location.starts_with("/")) return base.origin + location;
    auto dir = base.path.substr(0, base.path.rfind('/') + 1);
    return base.origin + dir + location;
}

bool is_redirect(int status) {
    return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

class HttplibClient final : public HttpClient {
public:
    explicit HttplibClient(std::chrono::seconds timeout) : timeout_(timeout) {}

    std::optional<std::string> redirect_target(const std::string& url) override {
        auto parts = split_url(url);
        if (!parts || (parts->scheme != "http" && parts->scheme != "https")) {
            throw NetworkError("unsupported URL " + url);
        }
        httplib::Client client(parts->origin);
        client.set_follow_location(false);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        client.set_write_timeout(timeout_);

        auto res = client.Head(parts->path);
        if (!res || res->status == 405 || res->status == 403 || res->status == 501) {
            res = client.Get(parts->path);
        }
        if (!res) {
            throw NetworkError("request to " + url + " failed: " + httplib::to_string(res.error()));
        }
        if (!is_redirect(res->status)) return std::nullopt;
        auto location = res->get_header_value("Location");
        if (location.empty()) return std::nullopt;
        return absolute_location(*parts, location);
    }

private:
    std::chrono::seconds timeout_;
};

std::string now_rfc3339() {
    return corpus::format_timestamp(
        std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

}  // namespace

std::string url_host(std::string_view url) {
    auto sep = url.find("://");
    auto rest = sep == std::string_view::npos ? url : url.substr(sep + 3);
    auto authority = rest.substr(0, rest.find_first_of("/?#"));
    if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
    if (!authority.empty() && authority.front() == '[') {
        auto close = authority.find(']');
        return close == std::string_view::npos ? std::string{} : std::string(authority.substr(0, close + 1));
    }
    authority = authority.substr(0, authority.find(':'));
    std::string host(authority);
    for (auto& c : host) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    while (!host.empty() && host.back() == '.') host.pop_back();
    return host;
}

RedirectCache::RedirectCache(std::string path) : path_(std::move(path)) {
    if (path_.empty() || !std::filesystem::exists(path_)) return;
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw ConfigError("cannot read redirect cache " + path_);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto obj = nlohmann::json::parse(line);
            CacheEntry entry{obj.at("url").get<std::string>(), obj.at("resolved").get<std::string>(),
                             obj.value("fetched_at", std::string{})};
            entries_.try_emplace(entry.url, entry);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("redirect cache line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::optional<CacheEntry> RedirectCache::lookup(std::string_view url) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(std::string(url));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void RedirectCache::insert(CacheEntry entry) {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = entries_.try_emplace(entry.url, entry);
    if (!inserted || path_.empty()) return;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw ConfigError("cannot append to redirect cache " + path_);
    nlohmann::ordered_json obj;
    obj["url"] = entry.url;
    obj["resolved"] = entry.resolved;
    obj["fetched_at"] = entry.fetched_at;
    out << obj.dump() << '\n';
}

std::size_t RedirectCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::unique_ptr<HttpClient> make_http_client(std::chrono::seconds timeout) {
    return std::make_unique<HttplibClient>(timeout);
}

const std::unordered_set<std::string>& default_shorteners() {
    static const std::unordered_set<std::string> hosts = {
        "bit.ly",   "bitly.com", "j.mp",     "t.co",      "ow.ly",    "tinyurl.com", "goo.gl",
        "buff.ly",  "dlvr.it",   "fb.me",    "ift.tt",    "trib.al",  "youtu.be",    "is.gd",
        "tiny.cc",  "lnkd.in",   "wp.me",    "amzn.to",   "nyti.ms",  "wapo.st",     "politi.co",
        "hill.cm",  "cnn.it",    "reut.rs",  "bloom.bg",  "n.pr",     "go.usa.gov",  "rebrand.ly",
        "shar.es",  "instagr.am", "fb.watch", "apple.co", "spoti.fi", "po.st",       "ln.is",
        "mailchi.mp", "conta.cc", "hubs.ly", "bddy.me",  "owl.li",   "cbsn.ws",     "abcn.ws",
        "nbcnews.to", "foxs.pt", "usat.ly",  "on.wsj.com"};
    return hosts;
}

std::string_view to_string(ResolveStatus status) {
    switch (status) {
        case ResolveStatus::NotShortener: return "not_shortener";
        case ResolveStatus::CacheHit: return "cache_hit";
        case ResolveStatus::Resolved: return "resolved";
        case ResolveStatus::OfflineMiss: return "offline_miss";
        case ResolveStatus::NetworkError: return "network_error";
        case ResolveStatus::TooManyRedirects: return "too_many_redirects";
    }
    return "unknown";
}

RedirectResolver::RedirectResolver(ResolverOptions options, RedirectCache& cache,
                                   std::unique_ptr<HttpClient> client)
    : options_(std::move(options)), cache_(cache), client_(std::move(client)) {
    if (options_.max_hops == 0) throw ConfigError("max_hops must be at least 1");
    if (!client_ && !options_.offline) client_ = make_http_client();
}

ResolveResult RedirectResolver::resolve(const std::string& url) {
    ResolveResult result;
    result.original_url = url;

    auto host = url_host(url);
    if (host.starts_with("www.")) host.erase(0, 4);
    if (!options_.shorteners.contains(host)) {
        result.resolved_url = url;
        result.status = ResolveStatus::NotShortener;
        return result;
    }
    if (auto hit = cache_.lookup(url)) {
        result.resolved_url = hit->resolved;
        result.status = ResolveStatus::CacheHit;
        return result;
    }
    if (options_.offline || !client_) {
        result.status = ResolveStatus::OfflineMiss;
        return result;
    }

    std::string current = url;
    try {
        for (std::size_t hop = 0;; ++hop) {
            auto next = client_->redirect_target(current);
            if (!next) break;
            if (hop + 1 > options_.max_hops) {
                result.status = ResolveStatus::TooManyRedirects;
                result.hops = hop;
                return result;
            }
            current = *next;
            result.hops = hop + 1;
        }
    } catch (const NetworkError&) {
        result.status = ResolveStatus::NetworkError;
        return result;
    }
    result.resolved_url = current;
    result.status = ResolveStatus::Resolved;
    cache_.insert({url, current, now_rfc3339()});
    return result;
}

}  // namespace honesty::trust
