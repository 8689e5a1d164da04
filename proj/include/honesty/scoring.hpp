#pragma once

#include "honesty/corpus.hpp"
#include "honesty/embeddings.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace honesty::scoring {

inline constexpr const char* kBeliefSpeaking = "belief_speaking";
inline constexpr const char* kTruthSeeking = "truth_seeking";

struct Dictionary {
    std::string name;
    std::vector<std::string> keywords;
};

/// Throws DataError for an empty keyword list or duplicate keywords.
void validate(const Dictionary& dict);

/// The 37-keyword dictionaries bundled with the library.
const Dictionary& belief_speaking_dictionary();
const Dictionary& truth_seeking_dictionary();

/// Newline-separated UTF-8 keywords. Blank lines and surrounding whitespace ignored.
Dictionary parse_dictionary(std::string_view content, std::string name);
Dictionary load_dictionary(const std::string& path, std::string name);

/// Every keyword tokenized with corpus::tokenize and concatenated, so a phrase
/// such as "of course" contributes its constituent tokens.
std::vector<std::string> dictionary_tokens(const Dictionary& dict);

/// Mean over all in-vocabulary constituent-token vectors of all keywords.
embeddings::Vector dictionary_embedding(const Dictionary& dict,
                                        const embeddings::EmbeddingTable& table);

/// Cosine between the document's mean token embedding and the dictionary
/// embedding. Throws NoTokensInVocabulary for an unscorable document.
double score_document(std::span<const std::string> tokens, std::span<const double> dict_vec,
                      const embeddings::EmbeddingTable& table);

enum class LengthKind { Characters, Words };

std::string_view to_string(LengthKind kind);
LengthKind length_kind_for(corpus::Kind kind);

struct LengthModel {
    std::string component;
    double slope = 0.0;
    double intercept = 0.0;
    LengthKind length_kind = LengthKind::Characters;
    std::size_t n = 0;
    /// All lengths were equal: slope is 0 and intercept the mean score.
    bool degenerate = false;
};

/// Least-squares fit of score ~ length. Throws InsufficientData for an empty sample.
LengthModel fit_length_correction(std::span<const double> lengths, std::span<const double> scores,
                                  std::string component = {},
                                  LengthKind kind = LengthKind::Characters);

/// score - (intercept + slope * length)
double apply_length_correction(double score, double length, const LengthModel& model);

struct HonestyScores {
    std::string doc_id;
    double length = 0.0;
    double belief = 0.0;            // D_b
    double truth = 0.0;             // D_t
    double belief_corrected = 0.0;  // D'_b
    double truth_corrected = 0.0;   // D'_t
};

struct CorpusScores {
    std::vector<HonestyScores> scores;  // scorable documents, input order
    std::vector<std::string> unscorable;
    LengthModel belief_model;
    LengthModel truth_model;
};

/// Mean token embeddings of the scorable documents (input order). Documents
/// without in-vocabulary tokens or with a zero mean vector are listed as unscorable.
struct DocumentVectors {
    std::vector<std::string> ids;
    std::vector<double> lengths;
    std::vector<embeddings::Vector> vectors;
    std::vector<std::string> unscorable;
    LengthKind length_kind = LengthKind::Characters;
};

DocumentVectors embed_documents(std::span<const corpus::TokenizedDocument> docs,
                                const embeddings::EmbeddingTable& table, LengthKind length_kind);

/// Cosine scores against both dictionary embeddings plus pooled length correction.
/// Throws DataError when no document is scorable.
CorpusScores score_vectors(const DocumentVectors& docs, std::span<const double> belief_vec,
                           std::span<const double> truth_vec);

/// Scores tokenized documents against both dictionary embeddings, then fits one
/// length model per component on the pooled scorable documents and applies it.
CorpusScores score_corpus(std::span<const corpus::TokenizedDocument> docs,
                          std::span<const double> belief_vec, std::span<const double> truth_vec,
                          const embeddings::EmbeddingTable& table, LengthKind length_kind);

/// Empirical quantile with linear interpolation between order statistics
/// (position p * (n - 1)). Throws InsufficientData for an empty sample.
double quantile(std::span<const double> values, double p);

enum class HonestyLabel { Neither, Belief, Truth };

std::string_view to_string(HonestyLabel label);

struct QuantileThresholds {
    double belief = 0.0;
    double truth = 0.0;
};

/// A document is a belief [truth] candidate when its score is at or above the
/// (1 - top_fraction) quantile of its component. Candidates for both go to the
/// component with the larger score; an exact tie goes to belief.
std::vector<HonestyLabel> quantile_labels(std::span<const double> belief_scores,
                                          std::span<const double> truth_scores,
                                          double top_fraction,
                                          QuantileThresholds* thresholds = nullptr);

/// Uniformly random subset with remove_count keywords dropped. Kept keywords
/// retain their original order. Deterministic per seed.
Dictionary perturb_dictionary(const Dictionary& dict, std::size_t remove_count,
                              std::uint64_t seed);

}  // namespace honesty::scoring
