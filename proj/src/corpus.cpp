#include "honesty/corpus.hpp"

#include "honesty/csv.hpp"
#include "honesty/error.hpp"

#include <nlohmann/json.hpp>
#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_set>

namespace honesty::corpus {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_handle_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_';
}

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
    if (pos + prefix.size() > text.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[pos + i])) != prefix[i]) return false;
    }
    return true;
}

// Start and end offsets of every URL in text.
std::vector<std::pair<std::size_t, std::size_t>> find_urls(std::string_view text) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t scheme_len = 0;
        if (starts_with_ci(text, pos, "https://")) {
            scheme_len = 8;
        } else if (starts_with_ci(text, pos, "http://")) {
            scheme_len = 7;
        }
        if (scheme_len == 0) {
            ++pos;
            continue;
        }
        std::size_t end = pos + scheme_len;
        while (end < text.size() && !is_space(text[end]) && text[end] != '<' && text[end] != '>' &&
               text[end] != '"') {
            ++end;
        }
        // Trailing sentence punctuation and an ellipsis are not part of the URL.
        int open_parens = 0;
        for (std::size_t i = pos; i < end; ++i) {
            if (text[i] == '(') ++open_parens;
            if (text[i] == ')') --open_parens;
        }
        while (end > pos + scheme_len) {
            char last = text[end - 1];
            if (last == ')' && open_parens < 0) {
                ++open_parens;
                --end;
            } else if (std::string_view(".,;:!?'").find(last) != std::string_view::npos) {
                --end;
            } else if (end - pos >= scheme_len + 3 && text.substr(end - 3, 3) == "\xE2\x80\xA6") {
                end -= 3;
            } else {
                break;
            }
        }
        if (end > pos + scheme_len) spans.emplace_back(pos, end);
        pos = std::max(end, pos + scheme_len);
    }
    return spans;
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

icu::BreakIterator& word_breaker() {
    thread_local std::unique_ptr<icu::BreakIterator> breaker = [] {
        UErrorCode status = U_ZERO_ERROR;
        std::unique_ptr<icu::BreakIterator> it(
            icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
        if (U_FAILURE(status) || !it) throw Error("cannot create ICU word break iterator");
        return it;
    }();
    return *breaker;
}

std::string json_string_field(const nlohmann::json& obj, const char* key, bool required) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (required) throw DataError(std::string("document is missing field '") + key + "'");
        return {};
    }
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return it->dump();
    throw DataError(std::string("field '") + key + "' must be a string");
}

Document document_from_json(const nlohmann::json& obj) {
    if (!obj.is_object()) throw DataError("JSON-Lines record is not an object");
    Document doc;
    doc.id = json_string_field(obj, "id", true);
    doc.text = json_string_field(obj, "text", true);
    doc.created_at = parse_timestamp(json_string_field(obj, "created_at", true));
    doc.account_id = json_string_field(obj, "account_id", false);
    doc.party = parse_party(json_string_field(obj, "party", true));
    if (auto it = obj.find("is_retweet"); it != obj.end() && !it->is_null()) {
        doc.is_retweet = it->get<bool>();
    }
    if (auto kind = json_string_field(obj, "kind", false); !kind.empty()) {
        doc.kind = parse_kind(kind);
    }
    if (auto it = obj.find("links"); it != obj.end() && !it->is_null()) {
        doc.links = it->get<std::vector<std::string>>();
    } else if (auto url = json_string_field(obj, "url", false); !url.empty()) {
        doc.links = {url};
    } else if (doc.kind == Kind::Tweet) {
        doc.links = extract_links(doc.text);
    }
    if (auto it = obj.find("external_scores"); it != obj.end() && !it->is_null()) {
        for (auto& [name, value] : it->items()) doc.external_scores[name] = value.get<double>();
    }
    return doc;
}

std::string file_extension(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return {};
    return ascii_lower(path.substr(dot + 1));
}

}  // namespace

std::string_view to_string(Party party) {
    switch (party) {
        case Party::Democrat: return "Democrat";
        case Party::Republican: return "Republican";
        case Party::Other: return "Other";
    }
    return "Other";
}

std::string_view to_string(Kind kind) { return kind == Kind::Tweet ? "tweet" : "article"; }

Party parse_party(std::string_view text) {
    auto lower = ascii_lower(text);
    if (lower == "democrat" || lower == "democratic" || lower == "d") return Party::Democrat;
    if (lower == "republican" || lower == "r") return Party::Republican;
    if (lower == "other" || lower == "independent" || lower == "i") return Party::Other;
    throw DataError("unknown party '" + std::string(text) + "'");
}

Kind parse_kind(std::string_view text) {
    auto lower = ascii_lower(text);
    if (lower == "tweet") return Kind::Tweet;
    if (lower == "article") return Kind::Article;
    throw DataError("unknown document kind '" + std::string(text) + "'");
}

Timestamp parse_timestamp(std::string_view text) {
    auto fail = [&]() -> Timestamp {
        throw DataError("cannot parse timestamp '" + std::string(text) + "'");
    };
    auto number = [&](std::size_t pos, std::size_t len) {
        if (pos + len > text.size()) fail();
        int value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
        if (ec != std::errc{} || ptr != text.data() + pos + len) fail();
        return value;
    };
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') return fail();
    std::chrono::year_month_day date{std::chrono::year{number(0, 4)},
                                     std::chrono::month{static_cast<unsigned>(number(5, 2))},
                                     std::chrono::day{static_cast<unsigned>(number(8, 2))}};
    if (!date.ok()) return fail();
    Timestamp ts{std::chrono::sys_days{date}};
    if (text.size() == 10) return ts;

    char sep = text[10];
    if (sep != 'T' && sep != 't' && sep != ' ') return fail();
    if (text.size() < 19 || text[13] != ':' || text[16] != ':') return fail();
    int hh = number(11, 2), mm = number(14, 2), ss = number(17, 2);
    if (hh > 23 || mm > 59 || ss > 60) return fail();
    ts += std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss};

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) return fail();
    }
    if (pos == text.size()) return ts;
    char zone = text[pos];
    if ((zone == 'Z' || zone == 'z') && pos + 1 == text.size()) return ts;
    if ((zone == '+' || zone == '-') && pos + 6 == text.size() && text[pos + 3] == ':') {
        int oh = number(pos + 1, 2), om = number(pos + 4, 2);
        auto offset = std::chrono::hours{oh} + std::chrono::minutes{om};
        return zone == '+' ? ts - offset : ts + offset;
    }
    return fail();
}

std::string format_timestamp(Timestamp ts) {
    auto days = std::chrono::floor<std::chrono::days>(ts);
    std::chrono::year_month_day ymd{days};
    std::chrono::hh_mm_ss hms{ts - days};
    char buf[96];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()), long(hms.hours().count()),
                  long(hms.minutes().count()), static_cast<long long>(hms.seconds().count()));
    return buf;
}

std::string preprocess(std::string_view text) {
    std::string without_urls;
    without_urls.reserve(text.size());
    std::size_t pos = 0;
    for (auto [start, end] : find_urls(text)) {
        without_urls.append(text.substr(pos, start - pos));
        without_urls.push_back(' ');
        pos = end;
    }
    without_urls.append(text.substr(pos));

    std::string out;
    out.reserve(without_urls.size());
    for (std::size_t i = 0; i < without_urls.size(); ++i) {
        char c = without_urls[i];
        bool handle_start = c == '@' && i + 1 < without_urls.size() &&
                            is_handle_char(without_urls[i + 1]) &&
                            (i == 0 || (!is_handle_char(without_urls[i - 1]) &&
                                        without_urls[i - 1] != '@'));
        if (!handle_start) {
            out.push_back(c);
            continue;
        }
        std::size_t j = i + 1;
        while (j < without_urls.size() && is_handle_char(without_urls[j])) ++j;
        out.append("user");
        i = j - 1;
    }
    return collapse_whitespace(out);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    if (text.empty()) return tokens;
    icu::UnicodeString ustr = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    ustr.toLower(icu::Locale::getRoot());

    auto& breaker = word_breaker();
    breaker.setText(ustr);
    int32_t start = breaker.first();
    for (int32_t end = breaker.next(); end != icu::BreakIterator::DONE;
         start = end, end = breaker.next()) {
        if (breaker.getRuleStatus() < UBRK_WORD_NONE_LIMIT) continue;
        std::string token;
        ustr.tempSubStringBetween(start, end).toUTF8String(token);
        tokens.push_back(std::move(token));
    }
    return tokens;
}

std::vector<std::string> extract_links(std::string_view text) {
    std::vector<std::string> links;
    for (auto [start, end] : find_urls(text)) links.emplace_back(text.substr(start, end - start));
    return links;
}

std::size_t code_point_length(std::string_view text) {
    return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

TokenizedDocument tokenize_document(const Document& doc) {
    TokenizedDocument out;
    out.doc_id = doc.id;
    auto clean = preprocess(doc.text);
    out.char_length = code_point_length(clean);
    out.tokens = tokenize(clean);
    out.word_length = out.tokens.size();
    return out;
}

FilterOptions FilterOptions::for_kind(Kind kind) {
    if (kind == Kind::Article) return {100, LengthRule::AtLeast};
    return {10, LengthRule::MoreThan};
}

void sort_documents(std::vector<Document>& docs) {
    std::stable_sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) {
        if (a.created_at != b.created_at) return a.created_at < b.created_at;
        return a.id < b.id;
    });
}

std::vector<Document> filter_corpus(std::vector<Document> docs, const FilterOptions& options,
                                    FilterReport* report) {
    FilterReport local;
    local.input = docs.size();
    sort_documents(docs);

    std::vector<Document> kept;
    std::unordered_set<std::string> seen_texts;
    for (auto& doc : docs) {
        if (doc.is_retweet) {
            ++local.retweets;
            continue;
        }
        if (!seen_texts.insert(doc.text).second) {
            ++local.duplicates;
            continue;
        }
        auto words = tokenize(preprocess(doc.text)).size();
        bool long_enough = options.rule == LengthRule::MoreThan ? words > options.min_words
                                                                : words >= options.min_words;
        if (!long_enough) {
            ++local.too_short;
            continue;
        }
        kept.push_back(std::move(doc));
    }
    local.kept = kept.size();
    if (report) *report = local;
    return kept;
}

std::vector<Document> read_jsonl(std::istream& in) {
    std::vector<Document> docs;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        Document doc;
        try {
            doc = document_from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!ids.insert(doc.id).second) throw DataError("duplicate document id '" + doc.id + "'");
        docs.push_back(std::move(doc));
    }
    return docs;
}

void write_jsonl(std::ostream& out, const std::vector<Document>& docs) {
    for (const auto& doc : docs) {
        nlohmann::ordered_json obj;
        obj["id"] = doc.id;
        obj["text"] = doc.text;
        obj["created_at"] = format_timestamp(doc.created_at);
        obj["account_id"] = doc.account_id;
        obj["party"] = to_string(doc.party);
        obj["is_retweet"] = doc.is_retweet;
        obj["kind"] = to_string(doc.kind);
        obj["links"] = doc.links;
        if (!doc.external_scores.empty()) obj["external_scores"] = doc.external_scores;
        out << obj.dump() << '\n';
    }
}

std::vector<Document> read_csv(std::istream& in) {
    auto table = csv::read(in);
    const auto id = table.column("id");
    const auto text = table.column("text");
    const auto created = table.column("created_at");
    const auto party = table.column("party");
    const auto account = table.find("account_id");
    const auto retweet = table.find("is_retweet");
    const auto kind = table.find("kind");
    const auto links = table.find("links");
    std::vector<std::pair<std::size_t, std::string>> score_columns;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i].rfind("score:", 0) == 0) {
            score_columns.emplace_back(i, table.header[i].substr(6));
        }
    }

    std::vector<Document> docs;
    std::unordered_set<std::string> ids;
    for (const auto& row : table.rows) {
        Document doc;
        doc.id = row[id];
        doc.text = row[text];
        doc.created_at = parse_timestamp(row[created]);
        doc.party = parse_party(row[party]);
        if (account) doc.account_id = row[*account];
        if (retweet) {
            auto v = ascii_lower(row[*retweet]);
            doc.is_retweet = v == "true" || v == "1";
        }
        if (kind && !row[*kind].empty()) doc.kind = parse_kind(row[*kind]);
        if (links && !row[*links].empty()) {
            std::istringstream ss(row[*links]);
            for (std::string url; ss >> url;) doc.links.push_back(url);
        } else if (doc.kind == Kind::Tweet) {
            doc.links = extract_links(doc.text);
        }
        for (const auto& [col, name] : score_columns) {
            if (!row[col].empty()) doc.external_scores[name] = csv::parse_double(row[col]);
        }
        if (!ids.insert(doc.id).second) throw DataError("duplicate document id '" + doc.id + "'");
        docs.push_back(std::move(doc));
    }
    return docs;
}

void write_csv(std::ostream& out, const std::vector<Document>& docs) {
    std::vector<std::string> score_names;
    for (const auto& doc : docs) {
        for (const auto& [name, _] : doc.external_scores) score_names.push_back(name);
    }
    std::sort(score_names.begin(), score_names.end());
    score_names.erase(std::unique(score_names.begin(), score_names.end()), score_names.end());

    csv::Row header{"id", "text", "created_at", "account_id", "party", "is_retweet", "kind", "links"};
    for (const auto& name : score_names) header.push_back("score:" + name);
    csv::write_row(out, header);
    for (const auto& doc : docs) {
        std::string links;
        for (const auto& url : doc.links) {
            if (!links.empty()) links.push_back(' ');
            links += url;
        }
        csv::Row row{doc.id,
                     doc.text,
                     format_timestamp(doc.created_at),
                     doc.account_id,
                     std::string(to_string(doc.party)),
                     doc.is_retweet ? "true" : "false",
                     std::string(to_string(doc.kind)),
                     links};
        for (const auto& name : score_names) {
            auto it = doc.external_scores.find(name);
            row.push_back(it == doc.external_scores.end() ? "" : csv::format_double(it->second));
        }
        csv::write_row(out, row);
    }
}

std::vector<Document> read_corpus_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open corpus " + path);
    return file_extension(path) == "csv" ? read_csv(in) : read_jsonl(in);
}

void write_corpus_file(const std::string& path, const std::vector<Document>& docs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    if (file_extension(path) == "csv") {
        write_csv(out, docs);
    } else {
        write_jsonl(out, docs);
    }
}

}  // namespace honesty::corpus
