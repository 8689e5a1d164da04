#pragma once

#include "honesty/corpus.hpp"
#include "honesty/scoring.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace honesty::keyness {

/// Term occurrence counts per category.
class TermCategoryCounts {
public:
    explicit TermCategoryCounts(std::vector<std::string> categories);

    void add(std::string_view term, std::size_t category, std::uint64_t count = 1);
    /// Adds every count of other (same category list) into this table.
    void merge(const TermCategoryCounts& other);

    const std::vector<std::string>& categories() const { return categories_; }
    std::size_t category_index(std::string_view name) const;

    /// Per-category counts of a term; nullptr when the term never occurred.
    const std::vector<std::uint64_t>* find(std::string_view term) const;
    std::uint64_t count(std::string_view term, std::size_t category) const;
    std::uint64_t total(std::size_t category) const { return totals_.at(category); }
    std::uint64_t term_total(std::string_view term) const;

    /// Terms in lexicographic order.
    const std::map<std::string, std::vector<std::uint64_t>, std::less<>>& terms() const {
        return counts_;
    }

private:
    std::vector<std::string> categories_;
    std::map<std::string, std::vector<std::uint64_t>, std::less<>> counts_;
    std::vector<std::uint64_t> totals_;
};

/// count(term, category) / sum over categories. Throws UnknownTerm.
double precision(const TermCategoryCounts& counts, std::string_view term, std::size_t category);
/// count(term, category) / total(category). Throws EmptyCategory.
double frequency(const TermCategoryCounts& counts, std::string_view term, std::size_t category);

/// Standard normal CDF.
double normal_cdf(double z);

/// Harmonic mean; 0 when either argument is 0.
double harmonic_mean(double a, double b);

struct SfsTable {
    std::map<std::string, double, std::less<>> scores;
    /// A statistic had zero variance across the vocabulary; its z-scores were
    /// taken as 0 (Phi = 0.5).
    bool degenerate = false;
};

/// Scaled F-Score of every term for one category: harmonic mean of
/// Phi(z(precision)) and Phi(z(frequency)), where z standardizes each
/// statistic over all terms of the table (population standard deviation).
SfsTable scaled_f_scores(const TermCategoryCounts& counts, std::size_t category);
double scaled_f_score(const TermCategoryCounts& counts, std::string_view term,
                      std::size_t category);

/// Maps two [0,1] scores to [-1,1]: positive when sfs_x wins, negative when sfs_y wins.
double bipolar_sfs(double sfs_x, double sfs_y);

struct KeynessDocument {
    std::vector<std::string> tokens;
    corpus::Party party = corpus::Party::Other;
    scoring::HonestyLabel label = scoring::HonestyLabel::Neither;
};

struct ScatterPoint {
    std::string term;
    double sfs_party = 0.0;    // +1 Democrat, -1 Republican
    double sfs_honesty = 0.0;  // +1 belief-speaking, -1 truth-seeking
    std::uint64_t count_democrat = 0;
    std::uint64_t count_republican = 0;
    std::uint64_t count_belief = 0;
    std::uint64_t count_truth = 0;
    bool label_flag = false;  // |sfs_party| or |sfs_honesty| above the label threshold
};

struct ScatterOptions {
    /// Terms need at least this many occurrences on each axis.
    std::uint64_t min_count = 5;
    double label_threshold = 0.65;
};

struct ScatterResult {
    std::vector<ScatterPoint> points;  // sorted by term
    bool degenerate = false;
};

/// Party axis: Democrat vs Republican documents (Other ignored). Honesty axis:
/// belief vs truth labelled documents (Neither ignored). Throws DataError when
/// a side of either axis has no tokens or no term survives the count filter.
ScatterResult scatter_coords(std::span<const KeynessDocument> docs, const ScatterOptions& options = {});

}  // namespace honesty::keyness
