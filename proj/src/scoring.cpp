#include "honesty/scoring.hpp"

#include "honesty/error.hpp"
#include "honesty/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace honesty::embedded {
extern const std::string_view belief_speaking_words;
extern const std::string_view truth_seeking_words;
}  // namespace honesty::embedded

namespace honesty::scoring {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

void validate(const Dictionary& dict) {
    if (dict.keywords.empty()) throw DataError("dictionary '" + dict.name + "' is empty");
    std::unordered_set<std::string> seen;
    for (const auto& kw : dict.keywords) {
        if (!seen.insert(kw).second) {
            throw DataError("dictionary '" + dict.name + "' repeats keyword '" + kw + "'");
        }
    }
}

Dictionary parse_dictionary(std::string_view content, std::string name) {
    Dictionary dict{std::move(name), {}};
    std::size_t pos = 0;
    while (pos <= content.size()) {
        auto nl = content.find('\n', pos);
        auto line = trim(content.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                          : nl - pos));
        if (!line.empty()) dict.keywords.push_back(std::move(line));
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    validate(dict);
    return dict;
}

Dictionary load_dictionary(const std::string& path, std::string name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open dictionary " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_dictionary(buffer.str(), std::move(name));
}

const Dictionary& belief_speaking_dictionary() {
    static const Dictionary dict = parse_dictionary(embedded::belief_speaking_words, kBeliefSpeaking);
    return dict;
}

const Dictionary& truth_seeking_dictionary() {
    static const Dictionary dict = parse_dictionary(embedded::truth_seeking_words, kTruthSeeking);
    return dict;
}

std::vector<std::string> dictionary_tokens(const Dictionary& dict) {
    std::vector<std::string> tokens;
    for (const auto& kw : dict.keywords) {
        auto parts = corpus::tokenize(kw);
        tokens.insert(tokens.end(), std::make_move_iterator(parts.begin()),
                      std::make_move_iterator(parts.end()));
    }
    return tokens;
}

embeddings::Vector dictionary_embedding(const Dictionary& dict,
                                        const embeddings::EmbeddingTable& table) {
    auto tokens = dictionary_tokens(dict);
    return embeddings::mean_embedding(tokens, table).vector;
}

double score_document(std::span<const std::string> tokens, std::span<const double> dict_vec,
                      const embeddings::EmbeddingTable& table) {
    auto doc = embeddings::mean_embedding(tokens, table);
    return embeddings::cosine(doc.vector, dict_vec);
}

std::string_view to_string(LengthKind kind) {
    return kind == LengthKind::Characters ? "characters" : "words";
}

LengthKind length_kind_for(corpus::Kind kind) {
    return kind == corpus::Kind::Tweet ? LengthKind::Characters : LengthKind::Words;
}

LengthModel fit_length_correction(std::span<const double> lengths, std::span<const double> scores,
                                  std::string component, LengthKind kind) {
    if (lengths.size() != scores.size()) throw DataError("length and score counts differ");
    if (lengths.empty()) throw InsufficientData("length correction needs at least one document");
    const double n = static_cast<double>(lengths.size());
    const double mean_x = std::accumulate(lengths.begin(), lengths.end(), 0.0) / n;
    const double mean_y = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const double dx = lengths[i] - mean_x;
        sxx += dx * dx;
        sxy += dx * (scores[i] - mean_y);
    }
    LengthModel model;
    model.component = std::move(component);
    model.length_kind = kind;
    model.n = lengths.size();
    if (sxx == 0.0) {
        model.degenerate = true;
        model.slope = 0.0;
        model.intercept = mean_y;
        return model;
    }
    model.slope = sxy / sxx;
    model.intercept = mean_y - model.slope * mean_x;
    return model;
}

double apply_length_correction(double score, double length, const LengthModel& model) {
    return score - (model.intercept + model.slope * length);
}

DocumentVectors embed_documents(std::span<const corpus::TokenizedDocument> docs,
                                const embeddings::EmbeddingTable& table, LengthKind length_kind) {
    DocumentVectors out;
    out.length_kind = length_kind;
    for (const auto& doc : docs) {
        embeddings::MeanEmbedding mean;
        try {
            mean = embeddings::mean_embedding(doc.tokens, table);
        } catch (const NoTokensInVocabulary&) {
            out.unscorable.push_back(doc.doc_id);
            continue;
        }
        if (std::all_of(mean.vector.begin(), mean.vector.end(), [](double v) { return v == 0.0; })) {
            out.unscorable.push_back(doc.doc_id);
            continue;
        }
        out.ids.push_back(doc.doc_id);
        out.lengths.push_back(static_cast<double>(
            length_kind == LengthKind::Characters ? doc.char_length : doc.word_length));
        out.vectors.push_back(std::move(mean.vector));
    }
    return out;
}

CorpusScores score_vectors(const DocumentVectors& docs, std::span<const double> belief_vec,
                           std::span<const double> truth_vec) {
    if (docs.ids.empty()) throw DataError("no scorable documents");
    CorpusScores out;
    out.unscorable = docs.unscorable;
    std::vector<double> belief, truth;
    belief.reserve(docs.ids.size());
    truth.reserve(docs.ids.size());
    for (std::size_t i = 0; i < docs.ids.size(); ++i) {
        HonestyScores s;
        s.doc_id = docs.ids[i];
        s.length = docs.lengths[i];
        s.belief = embeddings::cosine(docs.vectors[i], belief_vec);
        s.truth = embeddings::cosine(docs.vectors[i], truth_vec);
        belief.push_back(s.belief);
        truth.push_back(s.truth);
        out.scores.push_back(std::move(s));
    }
    out.belief_model = fit_length_correction(docs.lengths, belief, kBeliefSpeaking, docs.length_kind);
    out.truth_model = fit_length_correction(docs.lengths, truth, kTruthSeeking, docs.length_kind);
    for (auto& s : out.scores) {
        s.belief_corrected = apply_length_correction(s.belief, s.length, out.belief_model);
        s.truth_corrected = apply_length_correction(s.truth, s.length, out.truth_model);
    }
    return out;
}

CorpusScores score_corpus(std::span<const corpus::TokenizedDocument> docs,
                          std::span<const double> belief_vec, std::span<const double> truth_vec,
                          const embeddings::EmbeddingTable& table, LengthKind length_kind) {
    return score_vectors(embed_documents(docs, table, length_kind), belief_vec, truth_vec);
}

double quantile(std::span<const double> values, double p) {
    if (values.empty()) throw InsufficientData("quantile of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string_view to_string(HonestyLabel label) {
    switch (label) {
        case HonestyLabel::Belief: return "belief";
        case HonestyLabel::Truth: return "truth";
        case HonestyLabel::Neither: return "neither";
    }
    return "neither";
}

std::vector<HonestyLabel> quantile_labels(std::span<const double> belief_scores,
                                          std::span<const double> truth_scores,
                                          double top_fraction, QuantileThresholds* thresholds) {
    if (!(top_fraction > 0.0 && top_fraction < 1.0)) {
        throw DataError("top_fraction must lie strictly between 0 and 1");
    }
    if (belief_scores.empty() || truth_scores.empty()) {
        throw InsufficientData("quantile labels need nonempty score lists");
    }
    if (belief_scores.size() != truth_scores.size()) {
        throw DataError("belief and truth score lists differ in length");
    }
    const double qb = quantile(belief_scores, 1.0 - top_fraction);
    const double qt = quantile(truth_scores, 1.0 - top_fraction);
    if (thresholds) *thresholds = {qb, qt};

    std::vector<HonestyLabel> labels(belief_scores.size(), HonestyLabel::Neither);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool b = belief_scores[i] >= qb;
        const bool t = truth_scores[i] >= qt;
        if (b && t) {
            labels[i] = truth_scores[i] > belief_scores[i] ? HonestyLabel::Truth : HonestyLabel::Belief;
        } else if (b) {
            labels[i] = HonestyLabel::Belief;
        } else if (t) {
            labels[i] = HonestyLabel::Truth;
        }
    }
    return labels;
}

Dictionary perturb_dictionary(const Dictionary& dict, std::size_t remove_count,
                              std::uint64_t seed) {
    const std::size_t n = dict.keywords.size();
    if (remove_count == 0 || remove_count >= n) {
        throw DataError("remove_count must satisfy 0 < remove_count < " + std::to_string(n));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng::Engine engine(seed);
    // Partial Fisher-Yates: the first remove_count slots are the removed keywords.
    for (std::size_t i = 0; i < remove_count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(engine)]);
    }
    std::vector<std::size_t> kept(order.begin() + static_cast<std::ptrdiff_t>(remove_count),
                                  order.end());
    std::sort(kept.begin(), kept.end());
    Dictionary out{dict.name, {}};
    out.keywords.reserve(kept.size());
    for (auto idx : kept) out.keywords.push_back(dict.keywords[idx]);
    return out;
}

}  // namespace honesty::scoring
