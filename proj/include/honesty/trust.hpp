#pragma once

#include "honesty/corpus.hpp"
#include "honesty/public_suffix.hpp"
#include "honesty/redirect.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace honesty::trust {

/// Lowercased registrable domain of a URL (scheme optional), "www." removed.
/// Throws UnparseableUrl.
std::string normalize_domain(std::string_view url,
                             const PublicSuffixList& psl = PublicSuffixList::bundled());

struct DomainRating {
    std::string domain;
    std::optional<double> newsguard_score;  // 0..100
    std::optional<int> accuracy;            // 1..5
    std::optional<int> transparency;        // 1..3

    bool empty() const { return !newsguard_score && !accuracy && !transparency; }
};

/// Ratings keyed by normalized domain. Several CSV files may be merged; a
/// field set by a later file overrides an earlier value.
class RatingDatabase {
public:
    /// Header must contain "domain" and at least one of "score" (or
    /// "newsguard_score"), "accuracy", "transparency". Empty cells are absent values.
    void load_csv(const std::string& path);
    void load_csv(std::istream& in, const std::string& source = "ratings");
    void add(DomainRating rating);

    const DomainRating* find(std::string_view domain) const;
    std::size_t size() const { return ratings_.size(); }

private:
    std::unordered_map<std::string, DomainRating> ratings_;
};

const std::unordered_set<std::string>& default_exclusions();
/// One domain per line; '#' starts a comment.
std::unordered_set<std::string> load_exclusions(const std::string& path);

bool is_excluded(std::string_view domain,
                 const std::unordered_set<std::string>& exclusions = default_exclusions());

/// S_NG / 100. Throws DataError outside [0, 100].
double rescale_score(double newsguard_score);
/// (accuracy - 1) / 4, throws outside 1..5.
double rescale_accuracy(int accuracy);
/// (transparency - 1) / 2, throws outside 1..3.
double rescale_transparency(int transparency);

struct TrustLabels {
    std::optional<bool> trustworthy;  // newsguard_score >= 60
    std::optional<bool> unreliable;   // accuracy <= 2 or transparency == 1
};

inline constexpr double kTrustworthyThreshold = 60.0;

TrustLabels trust_labels(const DomainRating& rating);

struct LinkRecord {
    std::string doc_id;
    std::size_t link_index = 0;
    corpus::Timestamp created_at{};
    std::string account_id;
    corpus::Party party = corpus::Party::Other;
    std::string original_url;
    std::optional<std::string> resolved_url;
    ResolveStatus resolve_status = ResolveStatus::NotShortener;
    std::string domain;  // empty when the URL could not be parsed
    bool excluded = false;
    std::optional<DomainRating> rating;
    std::optional<double> belief_corrected;
    std::optional<double> truth_corrected;
};

struct ScoredDocument {
    const corpus::Document* doc = nullptr;
    std::optional<double> belief_corrected;
    std::optional<double> truth_corrected;
};

struct ExpandOptions {
    const RatingDatabase* ratings = nullptr;
    const std::unordered_set<std::string>* exclusions = nullptr;  // default_exclusions() when null
    RedirectResolver* resolver = nullptr;                         // no resolution when null
    const PublicSuffixList* psl = nullptr;                        // bundled when null
};

/// One record per link occurrence, in document order. Excluded domains carry
/// no rating.
std::vector<LinkRecord> expand_to_links(std::span<const ScoredDocument> docs,
                                        const ExpandOptions& options);

enum class RatingSource { NewsGuard, AccuracyTransparency, Any };

struct CoveragePoint {
    std::string period;  // YYYY-MM
    double share = 0.0;
    std::size_t links = 0;
    std::size_t rated = 0;
};

/// "YYYY-MM" of a timestamp.
std::string month_of(corpus::Timestamp ts);

/// Monthly share of non-excluded links whose domain is rated. Months without
/// any non-excluded link produce no point.
std::vector<CoveragePoint> coverage_share(std::span<const LinkRecord> records,
                                          RatingSource source = RatingSource::NewsGuard);

struct ArticleDedup {
    std::vector<corpus::Document> kept;
    std::vector<corpus::Document> bipartisan;        // shared by Democrats and Republicans
    std::vector<corpus::Document> independent_only;  // shared only by Other-party accounts
};

/// One document per article (keyed by its first link, else its text).
/// Articles shared by both parties move to the bipartisan bucket.
ArticleDedup dedup_articles(std::vector<corpus::Document> articles);

void write_link_records_csv(std::ostream& out, std::span<const LinkRecord> records);
std::vector<LinkRecord> read_link_records_csv(std::istream& in);

}  // namespace honesty::trust
