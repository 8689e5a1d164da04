#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace honesty::embeddings {

using Vector = std::vector<double>;

/// Token -> dense vector map. Immutable once built; safe to share between threads.
/// Components are stored as 32-bit floats, arithmetic is done in double.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    EmbeddingTable(std::size_t dim, std::string source_name);

    /// Adds a token (lowercased). Returns false and ignores the record when the
    /// token is already present. Throws DataError on a dimension mismatch or a
    /// non-finite component.
    bool add(std::string_view token, std::span<const float> components);
    bool add(std::string_view token, std::span<const double> components);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return tokens_.size(); }
    const std::string& source_name() const { return source_name_; }

    bool contains(std::string_view token) const;
    /// Case-normalized lookup; empty span when absent.
    std::span<const float> find(std::string_view token) const;

    /// Tokens in insertion order.
    const std::vector<std::string>& tokens() const { return tokens_; }

private:
    std::optional<std::size_t> index_of(std::string_view token) const;

    std::size_t dim_ = 0;
    std::string source_name_;
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<float> data_;
};

struct LoadOptions {
    /// Keep at most this many records (0 = no limit).
    std::size_t vocab_limit = 0;
};

struct LoadReport {
    std::size_t records = 0;
    std::size_t duplicates = 0;
    std::size_t malformed = 0;
    std::vector<std::size_t> malformed_lines;  // first few, 1-based
};

/// Plain-text vector file: optional "count dim" header, then "token v1 ... vD".
/// Throws ConfigError for an unreadable file and DataError for inconsistent
/// dimensions or when no valid record exists. Lines whose components do not
/// parse as finite numbers are skipped and counted as malformed.
EmbeddingTable load_embeddings(const std::string& path, const LoadOptions& options = {},
                               LoadReport* report = nullptr);
EmbeddingTable parse_embeddings(std::string_view content, std::string source_name,
                                const LoadOptions& options = {}, LoadReport* report = nullptr);

/// Writes "count dim" followed by one record per token using the shortest
/// decimal form of each float, so a reload reproduces the table exactly.
void save_embeddings(const EmbeddingTable& table, const std::string& path);

struct MeanEmbedding {
    Vector vector;
    std::size_t contributing = 0;
    std::size_t out_of_vocabulary = 0;
};

/// Mean of the vectors of in-vocabulary tokens. Throws NoTokensInVocabulary
/// when none of the tokens is present (including an empty token list).
MeanEmbedding mean_embedding(std::span<const std::string> tokens, const EmbeddingTable& table);

/// u.v / (|u||v|) clamped to [-1, 1]. Throws ZeroNormVector or DataError on a
/// length mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

}  // namespace honesty::embeddings
