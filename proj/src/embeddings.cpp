#include "honesty/embeddings.hpp"

#include "honesty/error.hpp"

#include <unicode/locid.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace honesty::embeddings {

namespace {

std::string lowercase(std::string_view token) {
    bool ascii = std::all_of(token.begin(), token.end(),
                             [](char c) { return static_cast<unsigned char>(c) < 0x80; });
    if (ascii) {
        std::string out(token);
        for (auto& c : out) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        return out;
    }
    auto ustr = icu::UnicodeString::fromUTF8(
        icu::StringPiece(token.data(), static_cast<int32_t>(token.size())));
    ustr.toLower(icu::Locale::getRoot());
    std::string out;
    ustr.toUTF8String(out);
    return out;
}

// Splits on ASCII spaces and tabs.
void split_fields(std::string_view line, std::vector<std::string_view>& fields) {
    fields.clear();
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        if (pos >= line.size()) break;
        std::size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
        fields.push_back(line.substr(pos, end - pos));
        pos = end;
    }
}

bool parse_size(std::string_view s, std::size_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim, std::string source_name)
    : dim_(dim), source_name_(std::move(source_name)) {
    if (dim_ == 0) throw DataError("embedding dimension must be positive");
}

std::optional<std::size_t> EmbeddingTable::index_of(std::string_view token) const {
    auto it = index_.find(lowercase(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool EmbeddingTable::add(std::string_view token, std::span<const float> components) {
    if (components.size() != dim_) {
        throw DataError("vector for '" + std::string(token) + "' has " +
                        std::to_string(components.size()) + " components, expected " +
                        std::to_string(dim_));
    }
    if (!std::all_of(components.begin(), components.end(),
                     [](float x) { return std::isfinite(x); })) {
        throw DataError("vector for '" + std::string(token) + "' has a non-finite component");
    }
    auto key = lowercase(token);
    if (index_.contains(key)) return false;
    index_.emplace(key, tokens_.size());
    tokens_.push_back(std::move(key));
    data_.insert(data_.end(), components.begin(), components.end());
    return true;
}

bool EmbeddingTable::add(std::string_view token, std::span<const double> components) {
    std::vector<float> narrowed(components.begin(), components.end());
    return add(token, std::span<const float>(narrowed));
}

bool EmbeddingTable::contains(std::string_view token) const { return index_of(token).has_value(); }

std::span<const float> EmbeddingTable::find(std::string_view token) const {
    auto idx = index_of(token);
    if (!idx) return {};
    return std::span<const float>(data_).subspan(*idx * dim_, dim_);
}

EmbeddingTable parse_embeddings(std::string_view content, std::string source_name,
                                const LoadOptions& options, LoadReport* report) {
    LoadReport local;
    EmbeddingTable table;
    std::size_t dim = 0;
    std::vector<std::string_view> fields;
    std::vector<float> values;
    std::size_t line_no = 0;
    std::size_t pos = 0;

    while (pos < content.size()) {
        auto nl = content.find('\n', pos);
        auto line = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                     : nl - pos);
        pos = nl == std::string_view::npos ? content.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        split_fields(line, fields);
        if (fields.empty()) continue;

        if (line_no == 1 && fields.size() == 2) {
            std::size_t count = 0, header_dim = 0;
            if (parse_size(fields[0], count) && parse_size(fields[1], header_dim)) {
                if (header_dim == 0) throw DataError("header declares dimension 0");
                dim = header_dim;
                continue;
            }
        }
        if (fields.size() < 2) {
            ++local.malformed;
            if (local.malformed_lines.size() < 10) local.malformed_lines.push_back(line_no);
            continue;
        }
        std::size_t record_dim = fields.size() - 1;
        if (dim == 0) dim = record_dim;
        if (record_dim != dim) {
            throw DataError("line " + std::to_string(line_no) + " has " +
                            std::to_string(record_dim) + " components, expected " +
                            std::to_string(dim));
        }
        values.clear();
        bool ok = true;
        for (std::size_t i = 1; i < fields.size() && ok; ++i) {
            float v = 0.0f;
            auto [ptr, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
            ok = ec == std::errc{} && ptr == fields[i].data() + fields[i].size() && std::isfinite(v);
            values.push_back(v);
        }
        if (!ok) {
            ++local.malformed;
            if (local.malformed_lines.size() < 10) local.malformed_lines.push_back(line_no);
            continue;
        }
        if (table.dim() == 0) table = EmbeddingTable(dim, source_name);
        if (table.add(fields[0], std::span<const float>(values))) {
            ++local.records;
        } else {
            ++local.duplicates;
        }
        if (options.vocab_limit != 0 && local.records >= options.vocab_limit) break;
    }
    if (local.records == 0) throw DataError("no valid embedding records in " + source_name);
    if (report) *report = local;
    return table;
}

EmbeddingTable load_embeddings(const std::string& path, const LoadOptions& options,
                               LoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open embedding file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_embeddings(buffer.str(), path, options, report);
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << table.size() << ' ' << table.dim() << '\n';
    char buf[32];
    for (const auto& token : table.tokens()) {
        out << token;
        for (float v : table.find(token)) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
        }
        out << '\n';
    }
}

MeanEmbedding mean_embedding(std::span<const std::string> tokens, const EmbeddingTable& table) {
    MeanEmbedding result;
    result.vector.assign(table.dim(), 0.0);
    for (const auto& token : tokens) {
        auto vec = table.find(token);
        if (vec.empty()) {
            ++result.out_of_vocabulary;
            continue;
        }
        for (std::size_t i = 0; i < vec.size(); ++i) result.vector[i] += vec[i];
        ++result.contributing;
    }
    if (result.contributing == 0) throw NoTokensInVocabulary();
    const double n = static_cast<double>(result.contributing);
    for (auto& x : result.vector) x /= n;
    return result;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw DataError("cosine of vectors with different lengths");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw ZeroNormVector();
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

}  // namespace honesty::embeddings
