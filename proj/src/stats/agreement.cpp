#include "honesty/stats.hpp"

#include "honesty/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace honesty::stats {

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
    RocResult out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw DataError("ROC labels must be 0 or 1");
        if (std::isnan(scores[i])) throw DataError("ROC scores must not be NaN");
        (labels[i] == 1 ? out.positives : out.negatives) += 1;
    }
    if (out.positives == 0 || out.negatives == 0) {
        throw InsufficientData("ROC needs at least one positive and one negative label");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return scores[i] > scores[j]; });

    // Descending sweep: one curve point per distinct threshold; the rank sum
    // of positives follows from the same tie blocks.
    const double np = static_cast<double>(out.positives), nn = static_cast<double>(out.negatives);
    out.curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    double u = 0.0;
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start;
        std::size_t block_pos = 0, block_neg = 0;
        while (end < order.size() && scores[order[end]] == scores[order[start]]) {
            (labels[order[end]] == 1 ? block_pos : block_neg) += 1;
            ++end;
        }
        // Positives in this block beat every negative ranked below it and tie with the block's negatives.
        u += static_cast<double>(block_pos) *
             (static_cast<double>(out.negatives - fp - block_neg) + 0.5 * static_cast<double>(block_neg));
        tp += block_pos;
        fp += block_neg;
        out.curve.push_back({scores[order[start]], static_cast<double>(fp) / nn, static_cast<double>(tp) / np});
        start = end;
    }
    out.auc = u / (np * nn);
    return out;
}

std::map<std::string, GroupDeviation> group_mean_deviation(std::span<const double> values,
                                                           std::span<const std::string> groups) {
    if (values.size() != groups.size()) throw DataError("values and group keys differ in length");
    const double overall = mean(values);
    std::map<std::string, GroupDeviation> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto& g = out[groups[i]];
        g.mean += values[i];
        g.n += 1;
    }
    for (auto& [key, g] : out) {
        g.mean /= static_cast<double>(g.n);
        g.deviation = g.mean - overall;
    }
    return out;
}

double krippendorff_alpha(std::span<const int> coder_a, std::span<const int> coder_b) {
    if (coder_a.size() != coder_b.size()) throw DataError("coders rated different numbers of items");
    if (coder_a.empty()) throw InsufficientData("agreement needs at least one item");

    // Coincidence matrix over the label values; each item contributes both ordered pairs.
    std::map<int, std::size_t> index;
    for (int v : coder_a) index.try_emplace(v, 0);
    for (int v : coder_b) index.try_emplace(v, 0);
    std::size_t k = 0;
    for (auto& [v, i] : index) i = k++;
    if (k < 2) throw DataError("agreement is undefined when every label is the same");

    std::vector<double> o(k * k, 0.0);
    for (std::size_t u = 0; u < coder_a.size(); ++u) {
        const auto a = index[coder_a[u]], b = index[coder_b[u]];
        o[a * k + b] += 1.0;
        o[b * k + a] += 1.0;
    }
    std::vector<double> marg(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) marg[i] += o[i * k + j];
    const double n = 2.0 * static_cast<double>(coder_a.size());

    double observed = 0.0, expected = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            observed += o[i * k + j];
            expected += marg[i] * marg[j];
        }
    }
    return 1.0 - (n - 1.0) * observed / expected;
}

}  // namespace honesty::stats
