#pragma once

#include "honesty/corpus.hpp"
#include "honesty/embeddings.hpp"
#include "honesty/trust.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace honesty::synthetic {

/// Coefficients of the rescaled rating model in design-matrix order:
/// Intercept, D_b, D_t, Republican, D_b:D_t, D_b:Republican, D_t:Republican,
/// D_b:D_t:Republican. The slopes follow the published fixed effects; the
/// intercept is lowered to 0.5 so that noise fits inside [0, 1].
inline constexpr std::array<double, 8> kDefaultCoefficients = {
    0.5, -0.0037, 0.0215, -0.0694, -0.0074, -0.1282, 0.0851, -0.0852};

struct SyntheticSpec {
    std::size_t n_docs = 1000;        // original (non-retweet) documents
    double republican_share = 0.5;    // among major-party accounts
    double other_share = 0.0;         // accounts outside both parties
    std::size_t n_accounts = 100;
    std::array<double, 8> coefficients = kDefaultCoefficients;
    double noise_sd = 0.1;            // on the rescaled [0, 1] rating
    std::size_t vocab_size = 2000;    // neutral words
    std::size_t dim = 32;
    double coverage = 1.0;            // share of link domains that get a rating
    double retweet_share = 0.0;       // extra retweet documents per original
    double excluded_share = 0.0;      // originals with an additional excluded link
    std::uint64_t seed = 0;
};

/// Throws ConfigError for an infeasible spec.
void validate(const SyntheticSpec& spec);

struct SyntheticData {
    std::vector<corpus::Document> documents;
    embeddings::EmbeddingTable table;
    std::vector<trust::DomainRating> ratings;
    nlohmann::ordered_json truth;
};

/// Documents mix neutral words with belief-speaking and truth-seeking keywords,
/// whose vectors cluster around two orthogonal directions. Each original
/// document links one unique domain; rated domains get
/// 100 * (x'beta + e) where x is the design row built from the document's
/// corrected scores and e is Gaussian noise truncated symmetrically so the
/// rating stays inside [0, 100]. Throws ConfigError when x'beta leaves [0, 1].
SyntheticData build_synthetic(const SyntheticSpec& spec);

struct SyntheticFiles {
    std::string corpus;      // corpus.jsonl
    std::string embeddings;  // embeddings.txt
    std::string ratings;     // ratings.csv
    std::string truth;       // truth.json
};

SyntheticFiles write_synthetic(const SyntheticData& data, const std::string& output_dir);

}  // namespace honesty::synthetic
