#pragma once

#include <chrono>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace honesty::corpus {

using Timestamp = std::chrono::sys_seconds;

enum class Party { Democrat, Republican, Other };
enum class Kind { Tweet, Article };

std::string_view to_string(Party party);
std::string_view to_string(Kind kind);
/// Accepts the canonical names case-insensitively plus "D"/"R"/"I" and "Independent".
Party parse_party(std::string_view text);
Kind parse_kind(std::string_view text);

/// RFC 3339 timestamps with optional fractional seconds and zone offset.
/// Date-only values and values without a zone are read as UTC.
Timestamp parse_timestamp(std::string_view text);
/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp ts);

struct Document {
    std::string id;
    std::string text;
    Timestamp created_at{};
    std::string account_id;
    Party party = Party::Other;
    bool is_retweet = false;
    Kind kind = Kind::Tweet;
    std::vector<std::string> links;
    std::map<std::string, double> external_scores;
};

struct TokenizedDocument {
    std::string doc_id;
    std::vector<std::string> tokens;
    std::size_t char_length = 0;  // code points of the preprocessed text
    std::size_t word_length = 0;  // == tokens.size()
};

/// Removes http(s) URLs, replaces @-handles with "user" and collapses the
/// whitespace left behind.
std::string preprocess(std::string_view text);

/// Lowercased UAX #29 word segments. Punctuation and whitespace segments are dropped.
std::vector<std::string> tokenize(std::string_view text);

/// Every http/https URL in order of appearance, duplicates kept. Trailing
/// sentence punctuation is not part of the URL.
std::vector<std::string> extract_links(std::string_view text);

/// Number of Unicode code points in a UTF-8 string.
std::size_t code_point_length(std::string_view text);

TokenizedDocument tokenize_document(const Document& doc);

/// How the minimum-length rule compares word counts.
enum class LengthRule {
    MoreThan,  // keep word_length > min_words ("more than 10 words")
    AtLeast,   // keep word_length >= min_words ("less than 100 words" are removed)
};

struct FilterOptions {
    std::size_t min_words = 10;
    LengthRule rule = LengthRule::MoreThan;

    static FilterOptions for_kind(Kind kind);
};

struct FilterReport {
    std::size_t input = 0;
    std::size_t retweets = 0;
    std::size_t duplicates = 0;
    std::size_t too_short = 0;
    std::size_t kept = 0;
};

/// Sorts by (created_at, id), drops retweets, exact duplicate texts (first
/// occurrence kept) and documents failing the length rule.
std::vector<Document> filter_corpus(std::vector<Document> docs, const FilterOptions& options,
                                    FilterReport* report = nullptr);

/// Orders documents by (created_at, id).
void sort_documents(std::vector<Document>& docs);

// JSON-Lines: one object per line with the Document field names. Articles may
// carry a "url" field instead of "links". Tweets without "links" get them
// extracted from the text.
std::vector<Document> read_jsonl(std::istream& in);
void write_jsonl(std::ostream& out, const std::vector<Document>& docs);

// CSV header: id,text,created_at,account_id,party,is_retweet,kind,links[,score:<name>...]
// links are space separated.
std::vector<Document> read_csv(std::istream& in);
void write_csv(std::ostream& out, const std::vector<Document>& docs);

/// Chooses the reader by extension (.csv, otherwise JSON-Lines).
std::vector<Document> read_corpus_file(const std::string& path);
void write_corpus_file(const std::string& path, const std::vector<Document>& docs);

}  // namespace honesty::corpus
