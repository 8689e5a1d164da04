#include "honesty/keyness.hpp"

#include "honesty/error.hpp"

#include <algorithm>
#include <cmath>

namespace honesty::keyness {

TermCategoryCounts::TermCategoryCounts(std::vector<std::string> categories)
    : categories_(std::move(categories)), totals_(categories_.size(), 0) {
    if (categories_.empty()) throw DataError("term counts need at least one category");
}

void TermCategoryCounts::add(std::string_view term, std::size_t category, std::uint64_t count) {
    if (category >= categories_.size()) throw DataError("category index out of range");
    auto it = counts_.find(term);
    if (it == counts_.end()) {
        it = counts_.emplace(std::string(term), std::vector<std::uint64_t>(categories_.size(), 0))
                 .first;
    }
    it->second[category] += count;
    totals_[category] += count;
}

void TermCategoryCounts::merge(const TermCategoryCounts& other) {
    if (other.categories_ != categories_) throw DataError("cannot merge counts over different categories");
    for (const auto& [term, per_category] : other.counts_) {
        for (std::size_t c = 0; c < per_category.size(); ++c) {
            if (per_category[c]) add(term, c, per_category[c]);
        }
    }
}

std::size_t TermCategoryCounts::category_index(std::string_view name) const {
    for (std::size_t i = 0; i < categories_.size(); ++i) {
        if (categories_[i] == name) return i;
    }
    throw DataError("unknown category '" + std::string(name) + "'");
}

const std::vector<std::uint64_t>* TermCategoryCounts::find(std::string_view term) const {
    auto it = counts_.find(term);
    return it == counts_.end() ? nullptr : &it->second;
}

std::uint64_t TermCategoryCounts::count(std::string_view term, std::size_t category) const {
    const auto* row = find(term);
    return row ? row->at(category) : 0;
}

std::uint64_t TermCategoryCounts::term_total(std::string_view term) const {
    const auto* row = find(term);
    if (!row) return 0;
    std::uint64_t sum = 0;
    for (auto c : *row) sum += c;
    return sum;
}

double precision(const TermCategoryCounts& counts, std::string_view term, std::size_t category) {
    const auto total = counts.term_total(term);
    if (total == 0) throw UnknownTerm(std::string(term));
    return static_cast<double>(counts.count(term, category)) / static_cast<double>(total);
}

double frequency(const TermCategoryCounts& counts, std::string_view term, std::size_t category) {
    const auto total = counts.total(category);
    if (total == 0) throw EmptyCategory(counts.categories().at(category));
    return static_cast<double>(counts.count(term, category)) / static_cast<double>(total);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double harmonic_mean(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return 2.0 * a * b / (a + b);
}

namespace {

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(xs.size()));
    return m;
}

}  // namespace

SfsTable scaled_f_scores(const TermCategoryCounts& counts, std::size_t category) {
    if (counts.terms().empty()) throw DataError("no terms to score");
    if (counts.total(category) == 0) throw EmptyCategory(counts.categories().at(category));

    std::vector<double> prec, freq;
    prec.reserve(counts.terms().size());
    freq.reserve(counts.terms().size());
    for (const auto& [term, _] : counts.terms()) {
        prec.push_back(precision(counts, term, category));
        freq.push_back(frequency(counts, term, category));
    }
    const auto mp = moments(prec);
    const auto mf = moments(freq);

    SfsTable table;
    table.degenerate = mp.sd == 0.0 || mf.sd == 0.0;
    std::size_t i = 0;
    for (const auto& [term, _] : counts.terms()) {
        const double zp = mp.sd == 0.0 ? 0.0 : (prec[i] - mp.mean) / mp.sd;
        const double zf = mf.sd == 0.0 ? 0.0 : (freq[i] - mf.mean) / mf.sd;
        table.scores.emplace(term, harmonic_mean(normal_cdf(zp), normal_cdf(zf)));
        ++i;
    }
    return table;
}

double scaled_f_score(const TermCategoryCounts& counts, std::string_view term,
                      std::size_t category) {
    if (!counts.find(term)) throw UnknownTerm(std::string(term));
    auto table = scaled_f_scores(counts, category);
    return table.scores.find(term)->second;
}

double bipolar_sfs(double sfs_x, double sfs_y) {
    if (sfs_x > sfs_y) return 2.0 * (-0.5 + sfs_x);
    if (sfs_x < sfs_y) return 2.0 * (0.5 - sfs_y);
    return 0.0;
}

ScatterResult scatter_coords(std::span<const KeynessDocument> docs, const ScatterOptions& options) {
    TermCategoryCounts party_all({"Democrat", "Republican"});
    TermCategoryCounts honesty_all({"belief", "truth"});
    for (const auto& doc : docs) {
        if (doc.party != corpus::Party::Other) {
            const std::size_t c = doc.party == corpus::Party::Democrat ? 0 : 1;
            for (const auto& t : doc.tokens) party_all.add(t, c);
        }
        if (doc.label != scoring::HonestyLabel::Neither) {
            const std::size_t c = doc.label == scoring::HonestyLabel::Belief ? 0 : 1;
            for (const auto& t : doc.tokens) honesty_all.add(t, c);
        }
    }
    for (std::size_t c = 0; c < 2; ++c) {
        if (party_all.total(c) == 0) {
            throw DataError("party axis has no " + party_all.categories()[c] + " tokens");
        }
        if (honesty_all.total(c) == 0) {
            throw DataError("honesty axis has no " + honesty_all.categories()[c] + " tokens");
        }
    }

    // Vocabulary: terms frequent enough on both axes. Both standardization
    // populations are restricted to it.
    const std::uint64_t min_count = std::max<std::uint64_t>(options.min_count, 1);
    TermCategoryCounts party({"Democrat", "Republican"});
    TermCategoryCounts honesty({"belief", "truth"});
    for (const auto& [term, per_party] : party_all.terms()) {
        const auto* per_label = honesty_all.find(term);
        if (!per_label) continue;
        if (per_party[0] + per_party[1] < min_count) continue;
        if ((*per_label)[0] + (*per_label)[1] < min_count) continue;
        for (std::size_t c = 0; c < 2; ++c) {
            if (per_party[c]) party.add(term, c, per_party[c]);
            if ((*per_label)[c]) honesty.add(term, c, (*per_label)[c]);
        }
    }
    if (party.terms().empty()) throw DataError("no term reaches the minimum count on both axes");
    for (std::size_t c = 0; c < 2; ++c) {
        if (party.total(c) == 0 || honesty.total(c) == 0) {
            throw DataError("an axis category has no tokens after the minimum-count filter");
        }
    }

    const auto sfs_dem = scaled_f_scores(party, 0);
    const auto sfs_rep = scaled_f_scores(party, 1);
    const auto sfs_belief = scaled_f_scores(honesty, 0);
    const auto sfs_truth = scaled_f_scores(honesty, 1);

    ScatterResult result;
    result.degenerate = sfs_dem.degenerate || sfs_rep.degenerate || sfs_belief.degenerate ||
                        sfs_truth.degenerate;
    for (const auto& [term, per_party] : party.terms()) {
        ScatterPoint p;
        p.term = term;
        p.sfs_party = bipolar_sfs(sfs_dem.scores.find(term)->second, sfs_rep.scores.find(term)->second);
        p.sfs_honesty =
            bipolar_sfs(sfs_belief.scores.find(term)->second, sfs_truth.scores.find(term)->second);
        p.count_democrat = per_party[0];
        p.count_republican = per_party[1];
        p.count_belief = honesty.count(term, 0);
        p.count_truth = honesty.count(term, 1);
        p.label_flag = std::abs(p.sfs_party) > options.label_threshold ||
                       std::abs(p.sfs_honesty) > options.label_threshold;
        result.points.push_back(std::move(p));
    }
    return result;
}

}  // namespace honesty::keyness
