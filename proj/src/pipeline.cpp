#include "honesty/pipeline.hpp"

#include "honesty/csv.hpp"
#include "honesty/embeddings.hpp"
#include "honesty/error.hpp"
#include "honesty/redirect.hpp"
#include "honesty/rng.hpp"
#include "honesty/synthetic.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace honesty::pipeline {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

const std::vector<std::string>& path_keys() {
    static const std::vector<std::string> keys = {"corpus",     "embeddings", "belief_dictionary",
                                                  "truth_dictionary", "ratings", "exclusions",
                                                  "shorteners", "rated",      "mediate_input"};
    return keys;
}

std::ofstream open_output(const std::string& path) {
    if (auto parent = fs::path(path).parent_path(); !parent.empty()) {
        std::error_code ec;
        fs::create_directories(parent, ec);
        if (ec) throw ConfigError("cannot create directory " + parent.string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path);
    return out;
}

void require_upstream(const std::string& path, std::string_view producer) {
    if (!fs::exists(path)) {
        throw ConfigError("missing upstream output " + path + " (run '" + std::string(producer) + "' first)");
    }
}

double rounded_seconds(std::chrono::steady_clock::duration d) {
    return std::chrono::duration<double>(d).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

const std::vector<std::string>& Config::known_keys() {
    static const std::vector<std::string> keys = {
        "corpus", "embeddings", "vocab_limit", "belief_dictionary", "truth_dictionary", "ratings",
        "exclusions", "shorteners", "redirect_cache", "offline", "max_hops", "http_timeout",
        "kind", "min_words", "length_rule", "top_fraction", "seed", "workers", "output_dir",
        "scores", "links", "response", "absorb", "baseline", "n_boot", "window",
        "keyness_min_count", "keyness_label_threshold", "keyness_scores", "timeline_scores", "rated", "roc_scores",
        "mediate_input", "x", "m", "y", "group_by", "n_runs", "remove_count",
        "synth_n_docs", "synth_republican_share", "synth_other_share", "synth_n_accounts",
        "synth_coefficients", "synth_noise_sd", "synth_vocab_size", "synth_dim", "synth_coverage",
        "synth_retweet_share", "synth_excluded_share"};
    return keys;
}

Config Config::parse(std::string_view content, const std::string& source) {
    Config config;
    std::istringstream in{std::string(content)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
        }
        config.set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    }
    return config;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path);
}

void Config::set(const std::string& key, std::string value) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = std::move(value);
}

bool Config::has(std::string_view key) const {
    auto it = values_.find(key);
    return it != values_.end() && !it->second.empty();
}

std::optional<std::string> Config::get(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return values_.find(key)->second;
}

std::string Config::get_or(std::string_view key, std::string fallback) const {
    auto v = get(key);
    return v ? *v : std::move(fallback);
}

std::string Config::require(std::string_view key) const {
    auto v = get(key);
    if (!v) throw ConfigError("config key '" + std::string(key) + "' is required");
    return *v;
}

double Config::get_double(std::string_view key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        return csv::parse_double(*v);
    } catch (const Error&) {
        throw ConfigError("config key '" + std::string(key) + "' is not a number: " + *v);
    }
}

std::int64_t Config::get_int(std::string_view key, std::int64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        return csv::parse_int(*v);
    } catch (const Error&) {
        throw ConfigError("config key '" + std::string(key) + "' is not an integer: " + *v);
    }
}

std::size_t Config::get_size(std::string_view key, std::size_t fallback) const {
    const auto v = get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw ConfigError("config key '" + std::string(key) + "' must not be negative");
    return static_cast<std::size_t>(v);
}

bool Config::get_bool(std::string_view key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    const auto s = lower(*v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("config key '" + std::string(key) + "' is not a boolean: " + *v);
}

std::vector<std::string> Config::get_list(std::string_view key) const {
    std::vector<std::string> out;
    auto v = get(key);
    if (!v) return out;
    std::size_t pos = 0;
    while (pos <= v->size()) {
        auto comma = v->find(',', pos);
        auto item = trim(std::string_view(*v).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::uint64_t Config::seed() const {
    auto v = get("seed");
    if (!v) return 0;
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), seed);
    if (ec != std::errc{} || ptr != v->data() + v->size()) throw ConfigError("seed must be an unsigned integer: " + *v);
    return seed;
}

std::string Config::output_dir() const { return get_or("output_dir", "."); }

std::string Config::output_path(std::string_view key, std::string_view default_name) const {
    if (auto v = get(key)) return *v;
    return (fs::path(output_dir()) / default_name).string();
}

void Config::check_input_files() const {
    for (const auto& key : path_keys()) {
        for (const auto& path : get_list(key)) {
            if (!fs::is_regular_file(path)) throw ConfigError("config key '" + key + "': file not found: " + path);
        }
    }
}

// ---------------------------------------------------------------------------
// Manifest

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 initialisation failed");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

RunManifest::RunManifest(std::string command, const Config& config)
    : command_(std::move(command)), config_(config), started_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::string& path) { inputs_.emplace_back(path, sha256_file(path)); }

void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = command_;
    j["seed"] = config_.seed();
    auto& cfg = j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config_.values()) cfg[k] = v;
    auto& inputs = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : inputs_) inputs.push_back({{"path", path}, {"sha256", digest}});
    auto& outputs = j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& path : outputs_) outputs.push_back({{"path", path}, {"sha256", sha256_file(path)}});
    j["row_order"] = row_order_;
    j["details"] = details_;
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    j["timing"] = {{"finished_at", corpus::format_timestamp(now)},
                   {"elapsed_seconds", rounded_seconds(std::chrono::steady_clock::now() - started_)}};
    return j;
}

std::string RunManifest::write() const {
    const auto path = (fs::path(config_.output_dir()) / (command_ + ".manifest.json")).string();
    auto j = to_json();
    auto out = open_output(path);
    out << j.dump(2) << '\n';
    return path;
}

nlohmann::ordered_json strip_timing(nlohmann::ordered_json manifest) {
    manifest.erase("timing");
    return manifest;
}

// ---------------------------------------------------------------------------
// Shared steps

corpus::Kind configured_kind(const Config& config) {
    try {
        return corpus::parse_kind(config.get_or("kind", "tweet"));
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

corpus::FilterOptions filter_options(const Config& config, corpus::Kind kind) {
    auto options = corpus::FilterOptions::for_kind(kind);
    options.min_words = config.get_size("min_words", options.min_words);
    if (auto rule = config.get("length_rule")) {
        const auto r = lower(*rule);
        if (r == "more_than") options.rule = corpus::LengthRule::MoreThan;
        else if (r == "at_least") options.rule = corpus::LengthRule::AtLeast;
        else throw ConfigError("length_rule must be more_than or at_least");
    }
    return options;
}

scoring::Dictionary belief_dictionary(const Config& config) {
    if (auto path = config.get("belief_dictionary")) return scoring::load_dictionary(*path, scoring::kBeliefSpeaking);
    return scoring::belief_speaking_dictionary();
}

scoring::Dictionary truth_dictionary(const Config& config) {
    if (auto path = config.get("truth_dictionary")) return scoring::load_dictionary(*path, scoring::kTruthSeeking);
    return scoring::truth_seeking_dictionary();
}

ScoredCorpus score_documents(std::vector<corpus::Document> docs, corpus::Kind kind,
                             const corpus::FilterOptions& filter, const embeddings::EmbeddingTable& table,
                             const scoring::Dictionary& belief, const scoring::Dictionary& truth) {
    ScoredCorpus out;
    const auto before = docs.size();
    std::erase_if(docs, [&](const corpus::Document& d) { return d.kind != kind; });
    out.other_kind = before - docs.size();
    out.documents = corpus::filter_corpus(std::move(docs), filter, &out.filter);

    std::vector<corpus::TokenizedDocument> tokenized;
    tokenized.reserve(out.documents.size());
    for (const auto& d : out.documents) tokenized.push_back(corpus::tokenize_document(d));
    const auto vectors = scoring::embed_documents(tokenized, table, scoring::length_kind_for(kind));
    const auto bvec = scoring::dictionary_embedding(belief, table);
    const auto tvec = scoring::dictionary_embedding(truth, table);
    out.scores = scoring::score_vectors(vectors, bvec, tvec);
    return out;
}

namespace {

const csv::Row kScoreHeader = {"doc_id", "kind", "created_at", "account_id", "party", "length",
                               "D_b", "D_t", "D_b_corr", "D_t_corr"};

std::vector<ScoreRow> score_rows(const ScoredCorpus& scored) {
    std::unordered_map<std::string_view, const corpus::Document*> by_id;
    for (const auto& d : scored.documents) by_id.emplace(d.id, &d);
    std::vector<ScoreRow> rows;
    rows.reserve(scored.scores.scores.size());
    for (const auto& s : scored.scores.scores) {
        const auto& d = *by_id.at(s.doc_id);
        rows.push_back({d.id, d.kind, d.created_at, d.account_id, d.party, s.length, s.belief, s.truth,
                        s.belief_corrected, s.truth_corrected});
    }
    return rows;
}

nlohmann::ordered_json length_model_json(const scoring::LengthModel& m) {
    return {{"component", m.component}, {"slope", m.slope},     {"intercept", m.intercept},
            {"length_kind", scoring::to_string(m.length_kind)}, {"n", m.n},
            {"degenerate", m.degenerate}};
}

nlohmann::ordered_json filter_json(const corpus::FilterReport& r) {
    return {{"input", r.input}, {"retweets", r.retweets}, {"duplicates", r.duplicates},
            {"too_short", r.too_short}, {"kept", r.kept}};
}

embeddings::EmbeddingTable load_table(const Config& config, RunManifest& manifest) {
    const auto path = config.require("embeddings");
    embeddings::LoadOptions options;
    options.vocab_limit = config.get_size("vocab_limit", 0);
    embeddings::LoadReport report;
    auto table = embeddings::load_embeddings(path, options, &report);
    manifest.add_input(path);
    manifest.details()["embeddings"] = {{"records", report.records},
                                        {"duplicates", report.duplicates},
                                        {"malformed", report.malformed},
                                        {"dim", table.dim()}};
    return table;
}

std::vector<corpus::Document> load_corpus(const Config& config, RunManifest& manifest) {
    const auto path = config.require("corpus");
    auto docs = corpus::read_corpus_file(path);
    manifest.add_input(path);
    return docs;
}

void add_dictionary_inputs(const Config& config, RunManifest& manifest) {
    for (const auto* key : {"belief_dictionary", "truth_dictionary"}) {
        if (auto p = config.get(key)) manifest.add_input(*p);
    }
}

std::string scores_path(const Config& config) {
    auto path = config.output_path("scores", "scores.csv");
    require_upstream(path, "score");
    return path;
}

std::string links_path(const Config& config) {
    auto path = config.output_path("links", "links.csv");
    require_upstream(path, "trust-join");
    return path;
}

corpus::Party configured_baseline(const Config& config) {
    const auto p = corpus::parse_party(config.get_or("baseline", "Democrat"));
    if (p == corpus::Party::Other) throw ConfigError("baseline must be Democrat or Republican");
    return p;
}

bool use_corrected(const Config& config, std::string_view key) {
    const auto v = lower(config.get_or(std::string(key), "corrected"));
    if (v == "corrected") return true;
    if (v == "raw") return false;
    throw ConfigError(std::string(key) + " must be corrected or raw");
}

std::vector<trust::LinkRecord> read_links(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    return trust::read_link_records_csv(in);
}

stats::RegressionResult fit(const RegressionData& data, const Config& config) {
    const auto absorb = lower(config.get_or("absorb", "none"));
    if (absorb == "none") return stats::ols(data.x, data.y, data.term_names);
    if (absorb == "account") return stats::fixed_effects_ols(data.x, data.y, data.accounts, data.term_names);
    throw ConfigError("absorb must be none or account");
}

}  // namespace

void write_scores_csv(const std::string& path, const std::vector<ScoreRow>& rows) {
    auto out = open_output(path);
    csv::write_row(out, kScoreHeader);
    for (const auto& r : rows) {
        csv::write_row(out, {r.doc_id, std::string(corpus::to_string(r.kind)), corpus::format_timestamp(r.created_at),
                             r.account_id, std::string(corpus::to_string(r.party)), csv::format_double(r.length),
                             csv::format_double(r.belief), csv::format_double(r.truth),
                             csv::format_double(r.belief_corrected), csv::format_double(r.truth_corrected)});
    }
    if (!out) throw ConfigError("failed writing " + path);
}

std::vector<ScoreRow> read_scores_csv(const std::string& path) {
    const auto table = csv::read_file(path);
    std::vector<std::size_t> idx;
    for (const auto& name : kScoreHeader) idx.push_back(table.column(name));
    std::vector<ScoreRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        ScoreRow r;
        r.doc_id = row[idx[0]];
        r.kind = corpus::parse_kind(row[idx[1]]);
        r.created_at = corpus::parse_timestamp(row[idx[2]]);
        r.account_id = row[idx[3]];
        r.party = corpus::parse_party(row[idx[4]]);
        r.length = csv::parse_double(row[idx[5]]);
        r.belief = csv::parse_double(row[idx[6]]);
        r.truth = csv::parse_double(row[idx[7]]);
        r.belief_corrected = csv::parse_double(row[idx[8]]);
        r.truth_corrected = csv::parse_double(row[idx[9]]);
        rows.push_back(std::move(r));
    }
    return rows;
}

Response parse_response(std::string_view text) {
    const auto s = lower(std::string(text));
    if (s == "newsguard" || s == "score") return Response::NewsGuard;
    if (s == "accuracy") return Response::Accuracy;
    if (s == "transparency") return Response::Transparency;
    throw ConfigError("response must be newsguard, accuracy or transparency");
}

std::string_view to_string(Response response) {
    switch (response) {
        case Response::NewsGuard: return "newsguard";
        case Response::Accuracy: return "accuracy";
        case Response::Transparency: return "transparency";
    }
    return "newsguard";
}

RegressionData regression_data(std::vector<trust::LinkRecord> records, Response response, corpus::Party baseline) {
    std::erase_if(records, [&](const trust::LinkRecord& r) {
        if (r.excluded || r.domain.empty() || !r.rating || !r.belief_corrected || !r.truth_corrected) return true;
        if (r.party == corpus::Party::Other) return true;
        switch (response) {
            case Response::NewsGuard: return !r.rating->newsguard_score;
            case Response::Accuracy: return !r.rating->accuracy;
            case Response::Transparency: return !r.rating->transparency;
        }
        return true;
    });
    if (records.empty()) throw InsufficientData("no rated link records for regression");
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.created_at != b.created_at) return a.created_at < b.created_at;
        if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
        return a.link_index < b.link_index;
    });

    std::vector<stats::DesignRow> rows;
    RegressionData data;
    data.y.resize(static_cast<Eigen::Index>(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        rows.push_back({*r.belief_corrected, *r.truth_corrected, r.party});
        data.accounts.push_back(r.account_id);
        double y = 0.0;
        switch (response) {
            case Response::NewsGuard: y = trust::rescale_score(*r.rating->newsguard_score); break;
            case Response::Accuracy: y = trust::rescale_accuracy(*r.rating->accuracy); break;
            case Response::Transparency: y = trust::rescale_transparency(*r.rating->transparency); break;
        }
        data.y(static_cast<Eigen::Index>(i)) = y;
    }
    auto design = stats::build_design_matrix(rows, baseline);
    data.x = std::move(design.x);
    data.term_names = std::move(design.term_names);
    return data;
}

void write_regression_csv(const std::string& path, const stats::RegressionResult& r) {
    auto out = open_output(path);
    csv::write_row(out, {"term", "coef", "std_err", "t", "p", "ci_low", "ci_high"});
    for (std::size_t i = 0; i < r.term_names.size(); ++i) {
        csv::write_row(out, {r.term_names[i], csv::format_double(r.coefficients[i]), csv::format_double(r.std_errors[i]),
                             csv::format_double(r.t_values[i]), csv::format_double(r.p_values[i]),
                             csv::format_double(r.ci_low[i]), csv::format_double(r.ci_high[i])});
    }
}

namespace {

// JSON has no infinities or NaN; those become strings.
nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    return csv::format_double(v);
}

nlohmann::ordered_json numbers(const std::vector<double>& vs) {
    auto arr = nlohmann::ordered_json::array();
    for (double v : vs) arr.push_back(number(v));
    return arr;
}

}  // namespace

nlohmann::ordered_json regression_json(const stats::RegressionResult& r) {
    return {{"term_names", r.term_names},
            {"coefficients", numbers(r.coefficients)},
            {"std_errors", numbers(r.std_errors)},
            {"t_values", numbers(r.t_values)},
            {"p_values", numbers(r.p_values)},
            {"ci_low", numbers(r.ci_low)},
            {"ci_high", numbers(r.ci_high)},
            {"n_obs", r.n_obs},
            {"df_resid", number(r.df_resid)},
            {"r_squared", number(r.r_squared)},
            {"adj_r_squared", number(r.adj_r_squared)},
            {"log_likelihood", number(r.log_likelihood)},
            {"aic", number(r.aic)},
            {"bic", number(r.bic)},
            {"durbin_watson", number(r.durbin_watson)}};
}

nlohmann::ordered_json mediation_json(const stats::MediationResult& r) {
    auto quantity = [](double est, const stats::Interval& ci, double p) {
        return nlohmann::ordered_json{{"estimate", number(est)}, {"ci_low", number(ci.low)},
                                      {"ci_high", number(ci.high)}, {"p_value", number(p)}};
    };
    return {{"acme", quantity(r.acme, r.acme_ci, r.acme_p)},
            {"ade", quantity(r.ade, r.ade_ci, r.ade_p)},
            {"total_effect", quantity(r.total_effect, r.total_ci, r.total_p)},
            {"prop_mediated", quantity(r.prop_mediated, r.prop_ci, r.prop_p)},
            {"n_boot", r.n_boot},
            {"n_obs", r.n_obs},
            {"treatment_aliased", r.treatment_aliased}};
}

// ---------------------------------------------------------------------------
// Subcommands

ScoreSummary cmd_score(const Config& config) {
    config.check_input_files();
    RunManifest manifest("score", config);
    auto docs = load_corpus(config, manifest);
    const auto table = load_table(config, manifest);
    add_dictionary_inputs(config, manifest);
    const auto kind = configured_kind(config);
    const auto scored = score_documents(std::move(docs), kind, filter_options(config, kind), table,
                                        belief_dictionary(config), truth_dictionary(config));

    const auto path = config.output_path("scores", "scores.csv");
    write_scores_csv(path, score_rows(scored));
    manifest.add_output(path);

    const auto unscorable_path = (fs::path(config.output_dir()) / "unscorable.csv").string();
    {
        auto out = open_output(unscorable_path);
        csv::write_row(out, {"doc_id"});
        for (const auto& id : scored.scores.unscorable) csv::write_row(out, {id});
    }
    manifest.add_output(unscorable_path);

    manifest.set_row_order("(created_at, id)");
    auto& d = manifest.details();
    d["kind"] = corpus::to_string(kind);
    d["filter"] = filter_json(scored.filter);
    d["other_kind_ignored"] = scored.other_kind;
    d["scored"] = scored.scores.scores.size();
    d["unscorable"] = scored.scores.unscorable.size();
    d["length_models"] = {length_model_json(scored.scores.belief_model), length_model_json(scored.scores.truth_model)};
    manifest.write();
    return {scored.scores.scores.size(), scored.scores.unscorable.size(), scored.scores.belief_model,
            scored.scores.truth_model};
}

keyness::ScatterResult cmd_keyness(const Config& config) {
    config.check_input_files();
    RunManifest manifest("keyness", config);
    const auto spath = scores_path(config);
    const auto rows = read_scores_csv(spath);
    manifest.add_input(spath);
    if (rows.empty()) throw InsufficientData("scores file has no rows");
    const auto docs = load_corpus(config, manifest);
    std::unordered_map<std::string_view, const corpus::Document*> by_id;
    for (const auto& d : docs) by_id.emplace(d.id, &d);

    const bool corrected = use_corrected(config, "keyness_scores");
    std::vector<double> b, t;
    for (const auto& r : rows) {
        b.push_back(corrected ? r.belief_corrected : r.belief);
        t.push_back(corrected ? r.truth_corrected : r.truth);
    }
    scoring::QuantileThresholds thresholds;
    const double top = config.get_double("top_fraction", 0.2);
    const auto labels = scoring::quantile_labels(b, t, top, &thresholds);

    std::vector<keyness::KeynessDocument> kdocs;
    kdocs.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto it = by_id.find(rows[i].doc_id);
        if (it == by_id.end()) throw DataError("scored document " + rows[i].doc_id + " is not in the corpus");
        kdocs.push_back({corpus::tokenize_document(*it->second).tokens, rows[i].party, labels[i]});
    }
    keyness::ScatterOptions options;
    options.min_count = config.get_size("keyness_min_count", options.min_count);
    options.label_threshold = config.get_double("keyness_label_threshold", options.label_threshold);
    auto result = keyness::scatter_coords(kdocs, options);

    const auto path = (fs::path(config.output_dir()) / "keyness.csv").string();
    {
        auto out = open_output(path);
        csv::write_row(out, {"term", "sfs_party", "sfs_honesty", "count_democrat", "count_republican", "count_belief",
                             "count_truth", "label"});
        for (const auto& p : result.points) {
            csv::write_row(out, {p.term, csv::format_double(p.sfs_party), csv::format_double(p.sfs_honesty),
                                 std::to_string(p.count_democrat), std::to_string(p.count_republican),
                                 std::to_string(p.count_belief), std::to_string(p.count_truth),
                                 p.label_flag ? "1" : "0"});
        }
    }
    manifest.add_output(path);
    const auto labels_path = (fs::path(config.output_dir()) / "labels.csv").string();
    {
        auto out = open_output(labels_path);
        csv::write_row(out, {"doc_id", "label"});
        for (std::size_t i = 0; i < rows.size(); ++i) {
            csv::write_row(out, {rows[i].doc_id, std::string(scoring::to_string(labels[i]))});
        }
    }
    manifest.add_output(labels_path);

    manifest.set_row_order("keyness.csv by term; labels.csv as scores.csv");
    auto& d = manifest.details();
    d["scores"] = corrected ? "corrected" : "raw";
    d["top_fraction"] = top;
    d["thresholds"] = {{"belief", thresholds.belief}, {"truth", thresholds.truth}};
    d["min_count"] = options.min_count;
    d["label_threshold"] = options.label_threshold;
    d["terms"] = result.points.size();
    d["degenerate"] = result.degenerate;
    manifest.write();
    return result;
}

std::vector<trust::LinkRecord> cmd_trust_join(const Config& config) {
    config.check_input_files();
    RunManifest manifest("trust-join", config);
    auto docs = load_corpus(config, manifest);
    const auto spath = scores_path(config);
    const auto rows = read_scores_csv(spath);
    manifest.add_input(spath);

    const auto kind = configured_kind(config);
    std::erase_if(docs, [&](const corpus::Document& d) { return d.kind != kind; });
    corpus::FilterReport report;
    docs = corpus::filter_corpus(std::move(docs), filter_options(config, kind), &report);

    std::unordered_map<std::string_view, const ScoreRow*> score_by_id;
    for (const auto& r : rows) score_by_id.emplace(r.doc_id, &r);
    std::vector<trust::ScoredDocument> scored;
    scored.reserve(docs.size());
    for (const auto& d : docs) {
        trust::ScoredDocument s{&d, std::nullopt, std::nullopt};
        if (auto it = score_by_id.find(d.id); it != score_by_id.end()) {
            s.belief_corrected = it->second->belief_corrected;
            s.truth_corrected = it->second->truth_corrected;
        }
        scored.push_back(s);
    }

    const auto rating_paths = config.get_list("ratings");
    if (rating_paths.empty()) throw ConfigError("config key 'ratings' is required");
    trust::RatingDatabase ratings;
    for (const auto& p : rating_paths) {
        ratings.load_csv(p);
        manifest.add_input(p);
    }
    std::unordered_set<std::string> exclusions = trust::default_exclusions();
    if (auto p = config.get("exclusions")) {
        exclusions = trust::load_exclusions(*p);
        manifest.add_input(*p);
    }

    trust::ResolverOptions ropts;
    ropts.offline = config.get_bool("offline", true);
    ropts.max_hops = config.get_size("max_hops", ropts.max_hops);
    if (auto p = config.get("shorteners")) {
        ropts.shorteners = trust::load_exclusions(*p);
        manifest.add_input(*p);
    }
    const auto cache_path = config.get_or("redirect_cache", "");
    if (!cache_path.empty() && fs::exists(cache_path)) manifest.add_input(cache_path);
    trust::RedirectCache cache(cache_path);
    std::unique_ptr<trust::HttpClient> client;
    if (!ropts.offline) client = trust::make_http_client(std::chrono::seconds(config.get_size("http_timeout", 5)));
    trust::RedirectResolver resolver(ropts, cache, std::move(client));

    trust::ExpandOptions eopts;
    eopts.ratings = &ratings;
    eopts.exclusions = &exclusions;
    eopts.resolver = &resolver;
    auto records = trust::expand_to_links(scored, eopts);

    const auto path = config.output_path("links", "links.csv");
    {
        auto out = open_output(path);
        trust::write_link_records_csv(out, records);
    }
    manifest.add_output(path);
    const auto coverage_path = (fs::path(config.output_dir()) / "coverage.csv").string();
    {
        auto out = open_output(coverage_path);
        csv::write_row(out, {"period", "share", "links", "rated"});
        for (const auto& c : trust::coverage_share(records, trust::RatingSource::NewsGuard)) {
            csv::write_row(out, {c.period, csv::format_double(c.share), std::to_string(c.links), std::to_string(c.rated)});
        }
    }
    manifest.add_output(coverage_path);

    std::map<std::string, std::size_t> statuses;
    std::size_t excluded = 0, rated = 0, unparseable = 0;
    for (const auto& r : records) {
        ++statuses[std::string(trust::to_string(r.resolve_status))];
        excluded += r.excluded;
        rated += r.rating.has_value();
        unparseable += r.domain.empty();
    }
    manifest.set_row_order("(created_at, id), then link position");
    auto& d = manifest.details();
    d["filter"] = filter_json(report);
    d["links"] = records.size();
    d["excluded"] = excluded;
    d["rated"] = rated;
    d["unparseable"] = unparseable;
    d["resolve_status"] = statuses;
    d["offline"] = ropts.offline;
    manifest.write();
    return records;
}

stats::RegressionResult cmd_regress(const Config& config) {
    config.check_input_files();
    RunManifest manifest("regress", config);
    const auto lpath = links_path(config);
    auto records = read_links(lpath);
    manifest.add_input(lpath);
    const auto response = parse_response(config.get_or("response", "newsguard"));
    const auto data = regression_data(std::move(records), response, configured_baseline(config));
    auto result = fit(data, config);

    const auto csv_path = (fs::path(config.output_dir()) / "regression.csv").string();
    write_regression_csv(csv_path, result);
    manifest.add_output(csv_path);
    const auto json_path = (fs::path(config.output_dir()) / "regression.json").string();
    {
        auto out = open_output(json_path);
        out << regression_json(result).dump(2) << '\n';
    }
    manifest.add_output(json_path);
    manifest.set_row_order("(created_at, doc_id, link_index)");
    manifest.details()["response"] = to_string(response);
    manifest.details()["absorb"] = config.get_or("absorb", "none");
    manifest.details()["n_obs"] = result.n_obs;
    manifest.write();
    return result;
}

std::map<std::string, std::vector<stats::TimeSeriesPoint>> cmd_timeline(const Config& config) {
    config.check_input_files();
    RunManifest manifest("timeline", config);
    const auto spath = scores_path(config);
    const auto rows = read_scores_csv(spath);
    manifest.add_input(spath);

    stats::TimelineOptions options;
    options.window = config.get_size("window", 3);
    options.n_boot = config.get_size("n_boot", 1000);
    options.workers = config.get_size("workers", 1);
    const bool corrected = use_corrected(config, "timeline_scores");

    std::map<std::string, std::vector<stats::TimeSeriesPoint>> out;
    for (const auto* component : {scoring::kBeliefSpeaking, scoring::kTruthSeeking}) {
        const bool is_belief = std::string_view(component) == scoring::kBeliefSpeaking;
        std::vector<stats::TimelineObservation> obs;
        obs.reserve(rows.size());
        for (const auto& r : rows) {
            const double v = is_belief ? (corrected ? r.belief_corrected : r.belief)
                                       : (corrected ? r.truth_corrected : r.truth);
            obs.push_back({r.created_at, std::string(corpus::to_string(r.party)), v});
        }
        options.seed = rng::substream(config.seed(), std::string("timeline|") + component);
        for (auto& [party, series] : stats::rolling_timeline(obs, options)) {
            const auto path = (fs::path(config.output_dir()) /
                               ("timeline_" + std::string(component) + "_" + lower(party) + ".csv")).string();
            auto file = open_output(path);
            csv::write_row(file, {"period", "mean", "ci_low", "ci_high", "n"});
            for (const auto& p : series) {
                csv::write_row(file, {p.period, csv::format_double(p.mean), csv::format_double(p.ci_low),
                                      csv::format_double(p.ci_high), std::to_string(p.n)});
            }
            file.close();
            manifest.add_output(path);
            out[std::string(component) + "|" + party] = std::move(series);
        }
    }
    manifest.set_row_order("calendar month");
    manifest.details()["window"] = options.window;
    manifest.details()["n_boot"] = options.n_boot;
    manifest.details()["scores"] = corrected ? "corrected" : "raw";
    manifest.write();
    return out;
}

RocReport cmd_validate_roc(const Config& config) {
    config.check_input_files();
    RunManifest manifest("validate-roc", config);
    const auto spath = scores_path(config);
    const auto rows = read_scores_csv(spath);
    manifest.add_input(spath);
    const auto rated_path = config.require("rated");
    const auto rated = csv::read_file(rated_path);
    manifest.add_input(rated_path);

    const bool corrected = use_corrected(config, "roc_scores");
    std::unordered_map<std::string_view, const ScoreRow*> by_id;
    for (const auto& r : rows) by_id.emplace(r.doc_id, &r);
    const auto c_id = rated.column("doc_id"), c_b = rated.column("belief"), c_t = rated.column("truth");
    std::vector<double> sb, st;
    std::vector<int> lb, lt;
    RocReport report;
    auto label = [](const std::string& cell) {
        const auto v = csv::parse_int(cell);
        if (v != 0 && v != 1) throw DataError("rated labels must be 0 or 1, got " + cell);
        return static_cast<int>(v);
    };
    for (const auto& row : rated.rows) {
        auto it = by_id.find(row[c_id]);
        if (it == by_id.end()) {
            ++report.missing;
            continue;
        }
        ++report.matched;
        const auto& s = *it->second;
        sb.push_back(corrected ? s.belief_corrected : s.belief);
        st.push_back(corrected ? s.truth_corrected : s.truth);
        lb.push_back(label(row[c_b]));
        lt.push_back(label(row[c_t]));
    }
    if (report.matched == 0) throw InsufficientData("no rated document has a score");
    report.belief = stats::roc_auc(sb, lb);
    report.truth = stats::roc_auc(st, lt);

    nlohmann::ordered_json j;
    for (const auto& [name, roc] : {std::pair{"belief_speaking", &report.belief}, std::pair{"truth_seeking", &report.truth}}) {
        j[name] = {{"auc", roc->auc}, {"positives", roc->positives}, {"negatives", roc->negatives}};
        const auto path = (fs::path(config.output_dir()) / ("roc_curve_" + std::string(name) + ".csv")).string();
        auto out = open_output(path);
        csv::write_row(out, {"threshold", "fpr", "tpr"});
        for (const auto& p : roc->curve) {
            csv::write_row(out, {csv::format_double(p.threshold), csv::format_double(p.fpr), csv::format_double(p.tpr)});
        }
        out.close();
        manifest.add_output(path);
    }
    j["matched"] = report.matched;
    j["missing"] = report.missing;
    j["scores"] = corrected ? "corrected" : "raw";
    const auto path = (fs::path(config.output_dir()) / "roc.json").string();
    {
        auto out = open_output(path);
        out << j.dump(2) << '\n';
    }
    manifest.add_output(path);
    manifest.set_row_order("rated file order; curves by descending threshold");
    manifest.write();
    return report;
}

stats::MediationResult cmd_mediate(const Config& config) {
    config.check_input_files();
    RunManifest manifest("mediate", config);
    const auto input = config.require("mediate_input");
    const auto table = csv::read_file(input);
    manifest.add_input(input);
    const auto cx = table.column(config.require("x")), cm = table.column(config.require("m")),
               cy = table.column(config.require("y"));

    std::vector<double> x, m, y;
    if (auto group = config.get("group_by")) {
        const auto cg = table.column(*group);
        std::map<std::string, std::array<double, 4>> sums;
        for (const auto& row : table.rows) {
            auto& s = sums[row[cg]];
            s[0] += csv::parse_double(row[cx]);
            s[1] += csv::parse_double(row[cm]);
            s[2] += csv::parse_double(row[cy]);
            s[3] += 1.0;
        }
        for (const auto& [key, s] : sums) {
            x.push_back(s[0] / s[3]);
            m.push_back(s[1] / s[3]);
            y.push_back(s[2] / s[3]);
        }
        manifest.set_row_order("group means ordered by " + *group);
    } else {
        for (const auto& row : table.rows) {
            x.push_back(csv::parse_double(row[cx]));
            m.push_back(csv::parse_double(row[cm]));
            y.push_back(csv::parse_double(row[cy]));
        }
        manifest.set_row_order("input order");
    }

    stats::MediationOptions options;
    options.n_boot = config.get_size("n_boot", 10000);
    options.workers = config.get_size("workers", 1);
    options.seed = rng::substream(config.seed(), "mediate");
    const auto result = stats::mediation(x, m, y, options);

    const auto json_path = (fs::path(config.output_dir()) / "mediation.json").string();
    {
        auto out = open_output(json_path);
        out << mediation_json(result).dump(2) << '\n';
    }
    manifest.add_output(json_path);
    const auto csv_path = (fs::path(config.output_dir()) / "mediation.csv").string();
    {
        auto out = open_output(csv_path);
        csv::write_row(out, {"quantity", "estimate", "ci_low", "ci_high", "p_value"});
        auto row = [&](const char* name, double est, const stats::Interval& ci, double p) {
            csv::write_row(out, {name, csv::format_double(est), csv::format_double(ci.low), csv::format_double(ci.high),
                                 csv::format_double(p)});
        };
        row("acme", result.acme, result.acme_ci, result.acme_p);
        row("ade", result.ade, result.ade_ci, result.ade_p);
        row("total_effect", result.total_effect, result.total_ci, result.total_p);
        row("prop_mediated", result.prop_mediated, result.prop_ci, result.prop_p);
    }
    manifest.add_output(csv_path);
    manifest.details()["n_obs"] = result.n_obs;
    manifest.details()["n_boot"] = result.n_boot;
    manifest.write();
    return result;
}

std::vector<PerturbRun> cmd_perturb(const Config& config) {
    config.check_input_files();
    RunManifest manifest("perturb", config);
    auto docs = load_corpus(config, manifest);
    const auto table = load_table(config, manifest);
    add_dictionary_inputs(config, manifest);
    const auto lpath = links_path(config);
    const auto records = read_links(lpath);
    manifest.add_input(lpath);

    const auto kind = configured_kind(config);
    std::erase_if(docs, [&](const corpus::Document& d) { return d.kind != kind; });
    docs = corpus::filter_corpus(std::move(docs), filter_options(config, kind));
    std::vector<corpus::TokenizedDocument> tokenized;
    tokenized.reserve(docs.size());
    for (const auto& d : docs) tokenized.push_back(corpus::tokenize_document(d));
    const auto vectors = scoring::embed_documents(tokenized, table, scoring::length_kind_for(kind));

    const auto belief = belief_dictionary(config);
    const auto truth = truth_dictionary(config);
    const auto n_runs = config.get_size("n_runs", 100);
    const auto remove = config.get_size("remove_count", 7);
    const auto response = parse_response(config.get_or("response", "newsguard"));
    const auto baseline = configured_baseline(config);

    std::vector<PerturbRun> runs(n_runs);
    stats::parallel_for(n_runs, config.get_size("workers", 1), [&](std::size_t i) {
        auto& run = runs[i];
        run.run = i;
        run.seed = rng::substream(config.seed(), "perturb|" + std::to_string(i));
        const auto pb = scoring::perturb_dictionary(belief, remove, rng::substream(run.seed, "belief"));
        const auto pt = scoring::perturb_dictionary(truth, remove, rng::substream(run.seed, "truth"));
        auto removed = [](const scoring::Dictionary& full, const scoring::Dictionary& kept) {
            std::vector<std::string> out;
            for (const auto& w : full.keywords) {
                if (std::find(kept.keywords.begin(), kept.keywords.end(), w) == kept.keywords.end()) out.push_back(w);
            }
            return out;
        };
        run.removed_belief = removed(belief, pb);
        run.removed_truth = removed(truth, pt);

        const auto scores = scoring::score_vectors(vectors, scoring::dictionary_embedding(pb, table),
                                                   scoring::dictionary_embedding(pt, table));
        std::unordered_map<std::string_view, const scoring::HonestyScores*> by_id;
        for (const auto& s : scores.scores) by_id.emplace(s.doc_id, &s);
        auto copy = records;
        for (auto& r : copy) {
            auto it = by_id.find(r.doc_id);
            if (it == by_id.end()) {
                r.belief_corrected.reset();
                r.truth_corrected.reset();
            } else {
                r.belief_corrected = it->second->belief_corrected;
                r.truth_corrected = it->second->truth_corrected;
            }
        }
        run.result = fit(regression_data(std::move(copy), response, baseline), config);
    });

    const auto path = (fs::path(config.output_dir()) / "perturb.csv").string();
    {
        auto out = open_output(path);
        csv::Row header = {"run", "seed"};
        if (!runs.empty()) {
            for (const auto& t : runs.front().result.term_names) header.push_back(t);
            for (const auto& t : runs.front().result.term_names) header.push_back(t + "_se");
        }
        header.push_back("removed_belief");
        header.push_back("removed_truth");
        csv::write_row(out, header);
        auto join = [](const std::vector<std::string>& ws) {
            std::string s;
            for (const auto& w : ws) s += (s.empty() ? "" : ";") + w;
            return s;
        };
        for (const auto& run : runs) {
            csv::Row row = {std::to_string(run.run), std::to_string(run.seed)};
            for (double c : run.result.coefficients) row.push_back(csv::format_double(c));
            for (double s : run.result.std_errors) row.push_back(csv::format_double(s));
            row.push_back(join(run.removed_belief));
            row.push_back(join(run.removed_truth));
            csv::write_row(out, row);
        }
    }
    manifest.add_output(path);
    manifest.set_row_order("run index; regression rows by (created_at, doc_id, link_index)");
    manifest.details()["n_runs"] = n_runs;
    manifest.details()["remove_count"] = remove;
    manifest.details()["response"] = to_string(response);
    manifest.write();
    return runs;
}

void cmd_synth(const Config& config) {
    RunManifest manifest("synth", config);
    synthetic::SyntheticSpec spec;
    spec.n_docs = config.get_size("synth_n_docs", spec.n_docs);
    spec.republican_share = config.get_double("synth_republican_share", spec.republican_share);
    spec.other_share = config.get_double("synth_other_share", spec.other_share);
    spec.n_accounts = config.get_size("synth_n_accounts", spec.n_accounts);
    spec.noise_sd = config.get_double("synth_noise_sd", spec.noise_sd);
    spec.vocab_size = config.get_size("synth_vocab_size", spec.vocab_size);
    spec.dim = config.get_size("synth_dim", spec.dim);
    spec.coverage = config.get_double("synth_coverage", spec.coverage);
    spec.retweet_share = config.get_double("synth_retweet_share", spec.retweet_share);
    spec.excluded_share = config.get_double("synth_excluded_share", spec.excluded_share);
    if (config.has("synth_coefficients")) {
        const auto items = config.get_list("synth_coefficients");
        if (items.size() != spec.coefficients.size()) throw ConfigError("synth_coefficients needs 8 values");
        for (std::size_t i = 0; i < items.size(); ++i) {
            try {
                spec.coefficients[i] = csv::parse_double(items[i]);
            } catch (const Error&) {
                throw ConfigError("synth_coefficients: not a number: " + items[i]);
            }
        }
    }
    spec.seed = rng::substream(config.seed(), "synth");

    const auto data = synthetic::build_synthetic(spec);
    const auto files = synthetic::write_synthetic(data, config.output_dir());
    for (const auto& p : {files.corpus, files.embeddings, files.ratings, files.truth}) manifest.add_output(p);
    manifest.set_row_order("document id");
    manifest.details()["documents"] = data.documents.size();
    manifest.details()["rated_domains"] = data.ratings.size();
    manifest.write();
}

}  // namespace honesty::pipeline
