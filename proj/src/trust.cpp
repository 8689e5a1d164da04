#include "honesty/trust.hpp"

#include "honesty/csv.hpp"
#include "honesty/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>

namespace honesty::trust {

namespace {

bool is_ipv4(std::string_view host) {
    int parts = 0;
    std::size_t pos = 0;
    while (pos <= host.size()) {
        auto dot = host.find('.', pos);
        auto part = host.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
        if (part.empty() || part.size() > 3 ||
            !std::all_of(part.begin(), part.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            return false;
        }
        if (std::stoi(std::string(part)) > 255) return false;
        ++parts;
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
    }
    return parts == 4;
}

bool valid_ascii_host(std::string_view host) {
    if (host.empty() || host.front() == '.' || host.front() == '-') return false;
    if (host.find("..") != std::string_view::npos) return false;
    return std::all_of(host.begin(), host.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_';
    });
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string optional_to_cell(const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string{};
}

std::string optional_to_cell(const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string{};
}

std::string optional_to_cell(const std::optional<bool>& v) {
    return v ? (*v ? "true" : "false") : std::string{};
}

ResolveStatus parse_status(std::string_view s) {
    for (auto st : {ResolveStatus::NotShortener, ResolveStatus::CacheHit, ResolveStatus::Resolved,
                    ResolveStatus::OfflineMiss, ResolveStatus::NetworkError,
                    ResolveStatus::TooManyRedirects}) {
        if (to_string(st) == s) return st;
    }
    throw DataError("unknown resolve status '" + std::string(s) + "'");
}

}  // namespace

std::string normalize_domain(std::string_view url, const PublicSuffixList& psl) {
    auto text = trim(url);
    if (text.empty() || text.find_first_of(" \t\r\n") != std::string::npos) {
        throw UnparseableUrl(std::string(url));
    }
    if (auto sep = text.find("://"); sep != std::string::npos) {
        if (sep == 0 || !std::isalpha(static_cast<unsigned char>(text[0])) ||
            !std::all_of(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(sep), [](char c) {
                return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
            })) {
            throw UnparseableUrl(std::string(url));
        }
    }
    auto raw_host = url_host(text);
    if (raw_host.starts_with("[")) return raw_host;  // IPv6 literal
    auto host = host_to_ascii(raw_host);
    if (!valid_ascii_host(host) || host.find('.') == std::string::npos) {
        throw UnparseableUrl(std::string(url));
    }
    if (is_ipv4(host)) return host;

    auto domain = psl.registrable_domain(host);
    if (domain.starts_with("www.") && domain.find('.', 4) != std::string::npos) domain.erase(0, 4);
    return domain;
}

void RatingDatabase::add(DomainRating rating) {
    if (rating.newsguard_score && !(*rating.newsguard_score >= 0.0 && *rating.newsguard_score <= 100.0)) {
        throw DataError("score for " + rating.domain + " outside [0, 100]");
    }
    if (rating.accuracy && (*rating.accuracy < 1 || *rating.accuracy > 5)) {
        throw DataError("accuracy for " + rating.domain + " outside 1..5");
    }
    if (rating.transparency && (*rating.transparency < 1 || *rating.transparency > 3)) {
        throw DataError("transparency for " + rating.domain + " outside 1..3");
    }
    if (rating.empty()) return;
    auto& slot = ratings_[rating.domain];
    slot.domain = rating.domain;
    if (rating.newsguard_score) slot.newsguard_score = rating.newsguard_score;
    if (rating.accuracy) slot.accuracy = rating.accuracy;
    if (rating.transparency) slot.transparency = rating.transparency;
}

void RatingDatabase::load_csv(std::istream& in, const std::string& source) {
    auto table = csv::read(in);
    const auto domain_col = table.column("domain");
    auto score_col = table.find("score");
    if (!score_col) score_col = table.find("newsguard_score");
    const auto accuracy_col = table.find("accuracy");
    const auto transparency_col = table.find("transparency");
    if (!score_col && !accuracy_col && !transparency_col) {
        throw DataError(source + ": ratings need a score, accuracy or transparency column");
    }
    for (const auto& row : table.rows) {
        DomainRating rating;
        try {
            rating.domain = normalize_domain(row[domain_col]);
        } catch (const UnparseableUrl&) {
            throw DataError(source + ": unparseable domain '" + row[domain_col] + "'");
        }
        if (score_col && !row[*score_col].empty()) rating.newsguard_score = csv::parse_double(row[*score_col]);
        if (accuracy_col && !row[*accuracy_col].empty()) {
            rating.accuracy = static_cast<int>(csv::parse_int(row[*accuracy_col]));
        }
        if (transparency_col && !row[*transparency_col].empty()) {
            rating.transparency = static_cast<int>(csv::parse_int(row[*transparency_col]));
        }
        add(std::move(rating));
    }
}

void RatingDatabase::load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open ratings file " + path);
    load_csv(in, path);
}

const DomainRating* RatingDatabase::find(std::string_view domain) const {
    auto it = ratings_.find(std::string(domain));
    return it == ratings_.end() ? nullptr : &it->second;
}

const std::unordered_set<std::string>& default_exclusions() {
    static const std::unordered_set<std::string> domains = {
        "twitter.com", "facebook.com", "youtube.com", "instagram.com", "google.com", "yahoo.com"};
    return domains;
}

std::unordered_set<std::string> load_exclusions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open exclusion list " + path);
    std::unordered_set<std::string> out;
    for (std::string line; std::getline(in, line);) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto domain = trim(line);
        if (domain.empty()) continue;
        for (auto& c : domain) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.insert(std::move(domain));
    }
    return out;
}

bool is_excluded(std::string_view domain, const std::unordered_set<std::string>& exclusions) {
    return exclusions.contains(std::string(domain));
}

double rescale_score(double newsguard_score) {
    if (!(newsguard_score >= 0.0 && newsguard_score <= 100.0)) {
        throw DataError("NewsGuard score " + csv::format_double(newsguard_score) + " outside [0, 100]");
    }
    return newsguard_score / 100.0;
}

double rescale_accuracy(int accuracy) {
    if (accuracy < 1 || accuracy > 5) throw DataError("accuracy outside 1..5");
    return (accuracy - 1) / 4.0;
}

double rescale_transparency(int transparency) {
    if (transparency < 1 || transparency > 3) throw DataError("transparency outside 1..3");
    return (transparency - 1) / 2.0;
}

TrustLabels trust_labels(const DomainRating& rating) {
    TrustLabels labels;
    if (rating.newsguard_score) labels.trustworthy = *rating.newsguard_score >= kTrustworthyThreshold;
    if (rating.accuracy || rating.transparency) {
        labels.unreliable = (rating.accuracy && *rating.accuracy <= 2) ||
                            (rating.transparency && *rating.transparency == 1);
    }
    return labels;
}

std::vector<LinkRecord> expand_to_links(std::span<const ScoredDocument> docs,
                                        const ExpandOptions& options) {
    const auto& exclusions = options.exclusions ? *options.exclusions : default_exclusions();
    const auto& psl = options.psl ? *options.psl : PublicSuffixList::bundled();
    std::vector<LinkRecord> records;
    for (const auto& scored : docs) {
        const auto& doc = *scored.doc;
        for (std::size_t i = 0; i < doc.links.size(); ++i) {
            LinkRecord rec;
            rec.doc_id = doc.id;
            rec.link_index = i;
            rec.created_at = doc.created_at;
            rec.account_id = doc.account_id;
            rec.party = doc.party;
            rec.original_url = doc.links[i];
            rec.belief_corrected = scored.belief_corrected;
            rec.truth_corrected = scored.truth_corrected;
            if (options.resolver) {
                auto res = options.resolver->resolve(rec.original_url);
                rec.resolved_url = res.resolved_url;
                rec.resolve_status = res.status;
            } else {
                rec.resolved_url = rec.original_url;
            }
            try {
                rec.domain = normalize_domain(rec.resolved_url.value_or(rec.original_url), psl);
            } catch (const UnparseableUrl&) {
                rec.domain.clear();
            }
            rec.excluded = !rec.domain.empty() && is_excluded(rec.domain, exclusions);
            if (!rec.excluded && !rec.domain.empty() && options.ratings) {
                if (const auto* rating = options.ratings->find(rec.domain)) rec.rating = *rating;
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

std::string month_of(corpus::Timestamp ts) {
    std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(ts)};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", int(ymd.year()), unsigned(ymd.month()));
    return buf;
}

std::vector<CoveragePoint> coverage_share(std::span<const LinkRecord> records, RatingSource source) {
    std::map<std::string, CoveragePoint> by_month;
    for (const auto& rec : records) {
        if (rec.excluded) continue;
        auto& point = by_month[month_of(rec.created_at)];
        ++point.links;
        if (!rec.rating) continue;
        const bool rated = source == RatingSource::NewsGuard ? rec.rating->newsguard_score.has_value()
                           : source == RatingSource::AccuracyTransparency
                               ? (rec.rating->accuracy || rec.rating->transparency)
                               : !rec.rating->empty();
        if (rated) ++point.rated;
    }
    std::vector<CoveragePoint> out;
    for (auto& [month, point] : by_month) {
        point.period = month;
        point.share = static_cast<double>(point.rated) / static_cast<double>(point.links);
        out.push_back(point);
    }
    return out;
}

ArticleDedup dedup_articles(std::vector<corpus::Document> articles) {
    corpus::sort_documents(articles);
    struct Group {
        std::size_t first = 0;
        std::set<corpus::Party> parties;
    };
    std::map<std::string, Group> groups;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < articles.size(); ++i) {
        const auto& doc = articles[i];
        auto key = doc.links.empty() ? "text:" + doc.text : "url:" + doc.links.front();
        auto [it, inserted] = groups.try_emplace(key, Group{i, {}});
        if (inserted) order.push_back(key);
        it->second.parties.insert(doc.party);
    }
    ArticleDedup out;
    for (const auto& key : order) {
        const auto& group = groups[key];
        auto& doc = articles[group.first];
        const bool dem = group.parties.contains(corpus::Party::Democrat);
        const bool rep = group.parties.contains(corpus::Party::Republican);
        if (dem && rep) {
            out.bipartisan.push_back(std::move(doc));
        } else if (!dem && !rep) {
            out.independent_only.push_back(std::move(doc));
        } else {
            // The kept copy carries the single major party that shared it.
            doc.party = dem ? corpus::Party::Democrat : corpus::Party::Republican;
            out.kept.push_back(std::move(doc));
        }
    }
    return out;
}

void write_link_records_csv(std::ostream& out, std::span<const LinkRecord> records) {
    csv::write_row(out, {"doc_id", "link_index", "created_at", "account_id", "party", "original_url",
                         "resolved_url", "resolve_status", "domain", "excluded", "newsguard_score",
                         "accuracy", "transparency", "trustworthy", "unreliable", "D_b_corr",
                         "D_t_corr"});
    for (const auto& rec : records) {
        TrustLabels labels;
        if (rec.rating) labels = trust_labels(*rec.rating);
        csv::write_row(out, {rec.doc_id,
                             std::to_string(rec.link_index),
                             corpus::format_timestamp(rec.created_at),
                             rec.account_id,
                             std::string(corpus::to_string(rec.party)),
                             rec.original_url,
                             rec.resolved_url.value_or(""),
                             std::string(to_string(rec.resolve_status)),
                             rec.domain,
                             rec.excluded ? "true" : "false",
                             rec.rating ? optional_to_cell(rec.rating->newsguard_score) : "",
                             rec.rating ? optional_to_cell(rec.rating->accuracy) : "",
                             rec.rating ? optional_to_cell(rec.rating->transparency) : "",
                             optional_to_cell(labels.trustworthy),
                             optional_to_cell(labels.unreliable),
                             optional_to_cell(rec.belief_corrected),
                             optional_to_cell(rec.truth_corrected)});
    }
}

std::vector<LinkRecord> read_link_records_csv(std::istream& in) {
    auto table = csv::read(in);
    const auto c_doc = table.column("doc_id");
    const auto c_idx = table.column("link_index");
    const auto c_time = table.column("created_at");
    const auto c_account = table.column("account_id");
    const auto c_party = table.column("party");
    const auto c_url = table.column("original_url");
    const auto c_resolved = table.column("resolved_url");
    const auto c_status = table.column("resolve_status");
    const auto c_domain = table.column("domain");
    const auto c_excluded = table.column("excluded");
    const auto c_score = table.column("newsguard_score");
    const auto c_acc = table.column("accuracy");
    const auto c_trans = table.column("transparency");
    const auto c_db = table.column("D_b_corr");
    const auto c_dt = table.column("D_t_corr");

    std::vector<LinkRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        LinkRecord rec;
        rec.doc_id = row[c_doc];
        rec.link_index = static_cast<std::size_t>(csv::parse_int(row[c_idx]));
        rec.created_at = corpus::parse_timestamp(row[c_time]);
        rec.account_id = row[c_account];
        rec.party = corpus::parse_party(row[c_party]);
        rec.original_url = row[c_url];
        if (!row[c_resolved].empty()) rec.resolved_url = row[c_resolved];
        rec.resolve_status = parse_status(row[c_status]);
        rec.domain = row[c_domain];
        rec.excluded = row[c_excluded] == "true";
        DomainRating rating;
        rating.domain = rec.domain;
        if (!row[c_score].empty()) rating.newsguard_score = csv::parse_double(row[c_score]);
        if (!row[c_acc].empty()) rating.accuracy = static_cast<int>(csv::parse_int(row[c_acc]));
        if (!row[c_trans].empty()) rating.transparency = static_cast<int>(csv::parse_int(row[c_trans]));
        if (!rating.empty()) rec.rating = rating;
        if (!row[c_db].empty()) rec.belief_corrected = csv::parse_double(row[c_db]);
        if (!row[c_dt].empty()) rec.truth_corrected = csv::parse_double(row[c_dt]);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace honesty::trust
