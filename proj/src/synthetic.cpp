#include "honesty/synthetic.hpp"

#include "honesty/csv.hpp"
#include "honesty/error.hpp"
#include "honesty/pipeline.hpp"
#include "honesty/rng.hpp"
#include "honesty/scoring.hpp"
#include "honesty/stats.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace honesty::synthetic {

namespace {

constexpr std::array<std::string_view, 16> kSyllables = {"ba", "ko", "mi", "ru", "te", "lo", "za", "ne",
                                                         "fi", "go", "pu", "sha", "vo", "de", "ki", "ma"};
constexpr std::array<std::string_view, 5> kSuffixes = {".com", ".org", ".net", ".co.uk", ".com.au"};

/// Distinct pronounceable word for every index (at least three syllables).
std::string pseudo_word(std::size_t index) {
    std::string word;
    std::size_t n = index;
    for (int i = 0; i < 3 || n > 0; ++i) {
        word += kSyllables[n % kSyllables.size()];
        n /= kSyllables.size();
    }
    return word;
}

std::string padded(char prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%07zu", prefix, i);
    return buf;
}

double uniform(rng::Engine& engine) { return std::uniform_real_distribution<double>(0.0, 1.0)(engine); }

std::size_t pick(rng::Engine& engine, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine);
}

void check_share(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void validate(const SyntheticSpec& spec) {
    if (spec.n_docs == 0) throw ConfigError("synthetic corpus needs at least one document");
    if (spec.n_accounts == 0) throw ConfigError("synthetic corpus needs at least one account");
    if (spec.dim < 2) throw ConfigError("embedding dimension must be at least 2");
    if (spec.vocab_size < 16) throw ConfigError("vocabulary needs at least 16 neutral words");
    if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) throw ConfigError("noise SD must be finite and non-negative");
    check_share(spec.republican_share, "republican_share");
    check_share(spec.other_share, "other_share");
    check_share(spec.coverage, "coverage");
    check_share(spec.retweet_share, "retweet_share");
    check_share(spec.excluded_share, "excluded_share");
    for (double c : spec.coefficients) {
        if (!std::isfinite(c)) throw ConfigError("planted coefficients must be finite");
    }
}

SyntheticData build_synthetic(const SyntheticSpec& spec) {
    validate(spec);
    SyntheticData data;
    data.table = embeddings::EmbeddingTable(spec.dim, "synthetic");

    // Keyword tokens sit near two orthogonal directions, neutral words are isotropic.
    const auto& belief = scoring::belief_speaking_dictionary();
    const auto& truth = scoring::truth_seeking_dictionary();
    const auto belief_tokens = scoring::dictionary_tokens(belief);
    const auto truth_tokens = scoring::dictionary_tokens(truth);
    rng::Engine emb(rng::substream(spec.seed, "embeddings"));
    std::normal_distribution<double> keyword_noise(0.0, 0.2);
    std::normal_distribution<double> neutral(0.0, 1.0 / std::sqrt(static_cast<double>(spec.dim)));
    std::vector<double> vec(spec.dim);
    auto add_keyword = [&](const std::string& token, std::size_t axis) {
        for (std::size_t d = 0; d < spec.dim; ++d) vec[d] = (d == axis ? 1.0 : 0.0) + keyword_noise(emb);
        data.table.add(token, std::span<const double>(vec));
    };
    for (const auto& t : belief_tokens) add_keyword(t, 0);
    for (const auto& t : truth_tokens) add_keyword(t, 1);

    std::vector<std::string> vocab;
    vocab.reserve(spec.vocab_size);
    for (std::size_t i = 0; vocab.size() < spec.vocab_size; ++i) {
        auto w = pseudo_word(i);
        if (data.table.contains(w)) continue;
        for (auto& v : vec) v = neutral(emb);
        data.table.add(w, std::span<const double>(vec));
        vocab.push_back(std::move(w));
    }

    // Accounts with fixed party; counts follow the requested shares exactly.
    rng::Engine acc(rng::substream(spec.seed, "accounts"));
    const auto n_other = static_cast<std::size_t>(std::llround(spec.other_share * static_cast<double>(spec.n_accounts)));
    const auto n_major = spec.n_accounts - n_other;
    const auto n_rep = static_cast<std::size_t>(std::llround(spec.republican_share * static_cast<double>(n_major)));
    std::vector<corpus::Party> account_party;
    account_party.insert(account_party.end(), n_major - n_rep, corpus::Party::Democrat);
    account_party.insert(account_party.end(), n_rep, corpus::Party::Republican);
    account_party.insert(account_party.end(), n_other, corpus::Party::Other);
    std::shuffle(account_party.begin(), account_party.end(), acc);

    const auto t0 = std::chrono::sys_days{std::chrono::year{2010} / 1 / 1};
    const auto t1 = std::chrono::sys_days{std::chrono::year{2023} / 1 / 1};
    const auto span_seconds = std::chrono::duration_cast<std::chrono::seconds>(t1 - t0).count();

    rng::Engine gen(rng::substream(spec.seed, "documents"));
    std::unordered_set<std::string> texts;
    std::vector<std::string> domains;
    std::size_t excluded_links = 0;
    for (std::size_t i = 0; i < spec.n_docs; ++i) {
        corpus::Document doc;
        doc.id = padded('d', i);
        const auto account = pick(gen, spec.n_accounts);
        doc.account_id = padded('a', account);
        doc.party = account_party[account];
        doc.created_at = std::chrono::sys_seconds{t0} +
                         std::chrono::seconds{std::uniform_int_distribution<long long>(0, span_seconds - 1)(gen)};

        std::string body;
        do {
            const std::size_t len = 12 + pick(gen, 19);
            const std::size_t kb = pick(gen, len / 3 + 1), kt = pick(gen, len / 3 + 1);
            std::vector<std::string> words;
            for (std::size_t k = 0; k < kb; ++k) words.push_back(belief_tokens[pick(gen, belief_tokens.size())]);
            for (std::size_t k = 0; k < kt; ++k) words.push_back(truth_tokens[pick(gen, truth_tokens.size())]);
            while (words.size() < len) words.push_back(vocab[pick(gen, vocab.size())]);
            std::shuffle(words.begin(), words.end(), gen);
            body.clear();
            for (const auto& w : words) body += (body.empty() ? "" : " ") + w;
        } while (!texts.insert(body).second);

        const auto domain = pseudo_word(i) + "news" + std::string(kSuffixes[i % kSuffixes.size()]);
        static constexpr std::array<std::string_view, 3> prefixes = {"https://www.", "https://", "http://edition."};
        const auto url = std::string(prefixes[i % prefixes.size()]) + domain + "/story/" + std::to_string(i);
        if (uniform(gen) < spec.excluded_share) {
            doc.links.push_back("https://twitter.com/" + doc.account_id + "/status/" + std::to_string(i));
            ++excluded_links;
        }
        doc.links.push_back(url);
        doc.text = body;
        for (const auto& l : doc.links) doc.text += " " + l;
        domains.push_back(domain);
        data.documents.push_back(std::move(doc));
    }

    rng::Engine rt(rng::substream(spec.seed, "retweets"));
    const auto n_retweets = static_cast<std::size_t>(std::llround(spec.retweet_share * static_cast<double>(spec.n_docs)));
    for (std::size_t i = 0; i < n_retweets; ++i) {
        const auto& src = data.documents[pick(rt, spec.n_docs)];
        corpus::Document doc = src;
        doc.id = padded('r', i);
        const auto account = pick(rt, spec.n_accounts);
        doc.account_id = padded('a', account);
        doc.party = account_party[account];
        doc.is_retweet = true;
        doc.text = "RT @" + src.account_id + ": " + src.text;
        data.documents.push_back(std::move(doc));
    }

    // Score exactly as the score command does, then plant the rating model.
    const auto scored = pipeline::score_documents(data.documents, corpus::Kind::Tweet,
                                                  corpus::FilterOptions::for_kind(corpus::Kind::Tweet), data.table,
                                                  belief, truth);
    std::unordered_map<std::string_view, const scoring::HonestyScores*> by_id;
    for (const auto& s : scored.scores.scores) by_id.emplace(s.doc_id, &s);

    rng::Engine rate(rng::substream(spec.seed, "ratings"));
    boost::math::normal_distribution<double> unit;
    const auto& b = spec.coefficients;
    std::size_t truncated = 0;
    for (std::size_t i = 0; i < spec.n_docs; ++i) {
        const auto& doc = data.documents[i];
        const bool rated = uniform(rate) < spec.coverage;
        const double u = uniform(rate);
        if (!rated) continue;
        auto it = by_id.find(doc.id);
        if (it == by_id.end()) continue;
        const double db = it->second->belief_corrected, dt = it->second->truth_corrected;
        const double p = doc.party == corpus::Party::Republican ? 1.0 : 0.0;
        const double mean = b[0] + b[1] * db + b[2] * dt + b[3] * p + b[4] * db * dt + b[5] * db * p +
                            b[6] * dt * p + b[7] * db * dt * p;
        if (!(mean >= 0.0 && mean <= 1.0)) {
            throw ConfigError("infeasible synthetic spec: planted model predicts a rescaled rating of " +
                              csv::format_double(mean) + " outside [0, 1]");
        }
        double noise = 0.0;
        const double limit = std::min({3.0 * spec.noise_sd, mean, 1.0 - mean});
        if (spec.noise_sd > 0.0 && limit > 0.0) {
            if (limit < 3.0 * spec.noise_sd) ++truncated;
            const double hi = boost::math::cdf(unit, limit / spec.noise_sd);
            const double lo = 1.0 - hi;
            const double q = std::clamp(lo + u * (hi - lo), lo, hi);
            noise = spec.noise_sd * boost::math::quantile(unit, q);
            noise = std::clamp(noise, -limit, limit);
        }
        const double y = mean + noise;
        trust::DomainRating r;
        r.domain = domains[i];
        r.newsguard_score = std::clamp(100.0 * y, 0.0, 100.0);
        r.accuracy = static_cast<int>(std::clamp(1.0 + std::round(4.0 * y), 1.0, 5.0));
        r.transparency = static_cast<int>(std::clamp(1.0 + std::round(2.0 * y), 1.0, 3.0));
        data.ratings.push_back(std::move(r));
    }

    auto& t = data.truth;
    t["seed"] = spec.seed;
    t["n_docs"] = spec.n_docs;
    t["republican_share"] = spec.republican_share;
    t["other_share"] = spec.other_share;
    t["n_accounts"] = spec.n_accounts;
    t["noise_sd"] = spec.noise_sd;
    t["noise_truncation"] = "symmetric at min(3 sd, distance of the mean to 0 or 1)";
    t["vocab_size"] = spec.vocab_size;
    t["dim"] = spec.dim;
    t["coverage"] = spec.coverage;
    t["retweet_share"] = spec.retweet_share;
    t["excluded_share"] = spec.excluded_share;
    auto& coef = t["coefficients"] = nlohmann::ordered_json::object();
    const std::array<std::string_view, 8> names = {"Intercept", "D_b", "D_t", "Republican",
                                                   "D_b:D_t", "D_b:Republican", "D_t:Republican",
                                                   "D_b:D_t:Republican"};
    for (std::size_t i = 0; i < names.size(); ++i) coef[std::string(names[i])] = spec.coefficients[i];
    t["baseline"] = "Democrat";
    t["realized"] = {{"documents", spec.n_docs},
                     {"retweets", n_retweets},
                     {"excluded_links", excluded_links},
                     {"rated_domains", data.ratings.size()},
                     {"scored", scored.scores.scores.size()},
                     {"truncated_noise_draws", truncated}};
    return data;
}

SyntheticFiles write_synthetic(const SyntheticData& data, const std::string& output_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw ConfigError("cannot create " + output_dir + ": " + ec.message());
    SyntheticFiles files{(fs::path(output_dir) / "corpus.jsonl").string(),
                         (fs::path(output_dir) / "embeddings.txt").string(),
                         (fs::path(output_dir) / "ratings.csv").string(),
                         (fs::path(output_dir) / "truth.json").string()};
    corpus::write_corpus_file(files.corpus, data.documents);
    embeddings::save_embeddings(data.table, files.embeddings);
    {
        std::ofstream out(files.ratings, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + files.ratings);
        csv::write_row(out, {"domain", "score", "accuracy", "transparency"});
        for (const auto& r : data.ratings) {
            csv::write_row(out, {r.domain, csv::format_double(*r.newsguard_score), std::to_string(*r.accuracy),
                                 std::to_string(*r.transparency)});
        }
    }
    {
        std::ofstream out(files.truth, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + files.truth);
        out << data.truth.dump(2) << '\n';
    }
    return files;
}

}  // namespace honesty::synthetic
