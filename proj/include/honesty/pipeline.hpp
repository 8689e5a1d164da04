#pragma once

#include "honesty/corpus.hpp"
#include "honesty/keyness.hpp"
#include "honesty/scoring.hpp"
#include "honesty/stats.hpp"
#include "honesty/trust.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace honesty::pipeline {

inline constexpr std::string_view kToolName = "honesty";
inline constexpr std::string_view kToolVersion = "1.0.0";

/// Flat key = value settings. Lines starting with '#' are comments. Keys are
/// checked against the known set; values set later (flag overrides) win.
class Config {
public:
    Config() = default;
    static Config load(const std::string& path);
    static Config parse(std::string_view content, const std::string& source = "config");

    void set(const std::string& key, std::string value);
    bool has(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;
    std::string get_or(std::string_view key, std::string fallback) const;
    /// Throws ConfigError when the key is not set.
    std::string require(std::string_view key) const;

    double get_double(std::string_view key, double fallback) const;
    std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
    std::size_t get_size(std::string_view key, std::size_t fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;
    /// Comma-separated list; empty when unset.
    std::vector<std::string> get_list(std::string_view key) const;

    std::uint64_t seed() const;
    std::string output_dir() const;
    /// Value of key, or output_dir/default_name when unset.
    std::string output_path(std::string_view key, std::string_view default_name) const;

    /// Throws ConfigError when a set path-valued key names a missing file.
    void check_input_files() const;

    const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

    static const std::vector<std::string>& known_keys();

private:
    std::map<std::string, std::string, std::less<>> values_;
};

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Provenance record written next to every command's outputs.
class RunManifest {
public:
    RunManifest(std::string command, const Config& config);

    void add_input(const std::string& path);
    void add_output(const std::string& path);
    void set_row_order(std::string rule) { row_order_ = std::move(rule); }
    nlohmann::ordered_json& details() { return details_; }

    nlohmann::ordered_json to_json() const;
    /// Writes output_dir/<command>.manifest.json.
    std::string write() const;

private:
    std::string command_;
    const Config& config_;
    std::chrono::steady_clock::time_point started_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::string> outputs_;
    std::string row_order_;
    nlohmann::ordered_json details_ = nlohmann::ordered_json::object();
};

/// Manifest JSON without the "timing" member.
nlohmann::ordered_json strip_timing(nlohmann::ordered_json manifest);

// ---------------------------------------------------------------------------
// Shared steps

corpus::Kind configured_kind(const Config& config);
corpus::FilterOptions filter_options(const Config& config, corpus::Kind kind);
scoring::Dictionary belief_dictionary(const Config& config);
scoring::Dictionary truth_dictionary(const Config& config);

struct ScoredCorpus {
    std::vector<corpus::Document> documents;  // filtered, ordered by (created_at, id)
    corpus::FilterReport filter;
    std::size_t other_kind = 0;               // documents of the other kind, ignored
    scoring::CorpusScores scores;
};

/// Filter, tokenize, embed and score documents of one kind.
ScoredCorpus score_documents(std::vector<corpus::Document> docs, corpus::Kind kind,
                             const corpus::FilterOptions& filter,
                             const embeddings::EmbeddingTable& table,
                             const scoring::Dictionary& belief, const scoring::Dictionary& truth);

/// One row of scores.csv.
struct ScoreRow {
    std::string doc_id;
    corpus::Kind kind = corpus::Kind::Tweet;
    corpus::Timestamp created_at{};
    std::string account_id;
    corpus::Party party = corpus::Party::Other;
    double length = 0.0;
    double belief = 0.0;
    double truth = 0.0;
    double belief_corrected = 0.0;
    double truth_corrected = 0.0;
};

void write_scores_csv(const std::string& path, const std::vector<ScoreRow>& rows);
std::vector<ScoreRow> read_scores_csv(const std::string& path);

enum class Response { NewsGuard, Accuracy, Transparency };
Response parse_response(std::string_view text);
std::string_view to_string(Response response);

struct RegressionData {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> term_names;
    std::vector<std::string> accounts;
};

/// Link records usable for regression: not excluded, rated for the response,
/// both corrected scores present, Democrat or Republican. Rows are ordered by
/// (created_at, doc_id, link_index).
RegressionData regression_data(std::vector<trust::LinkRecord> records, Response response,
                               corpus::Party baseline);

void write_regression_csv(const std::string& path, const stats::RegressionResult& result);
nlohmann::ordered_json regression_json(const stats::RegressionResult& result);
nlohmann::ordered_json mediation_json(const stats::MediationResult& result);

// ---------------------------------------------------------------------------
// Subcommands. Each writes its outputs plus a manifest into output_dir.

struct ScoreSummary {
    std::size_t scored = 0;
    std::size_t unscorable = 0;
    scoring::LengthModel belief_model;
    scoring::LengthModel truth_model;
};

ScoreSummary cmd_score(const Config& config);
keyness::ScatterResult cmd_keyness(const Config& config);
std::vector<trust::LinkRecord> cmd_trust_join(const Config& config);
stats::RegressionResult cmd_regress(const Config& config);
/// Keyed by "<component>|<party>".
std::map<std::string, std::vector<stats::TimeSeriesPoint>> cmd_timeline(const Config& config);

struct RocReport {
    stats::RocResult belief;
    stats::RocResult truth;
    std::size_t matched = 0;
    std::size_t missing = 0;
};

RocReport cmd_validate_roc(const Config& config);
stats::MediationResult cmd_mediate(const Config& config);

struct PerturbRun {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> removed_belief;
    std::vector<std::string> removed_truth;
    stats::RegressionResult result;
};

std::vector<PerturbRun> cmd_perturb(const Config& config);
void cmd_synth(const Config& config);

}  // namespace honesty::pipeline
