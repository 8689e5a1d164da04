#include "honesty/error.hpp"
#include "honesty/pipeline.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using honesty::pipeline::Config;

struct Flag {
    std::string name;
    std::string key;
    std::string help;
};

struct Command {
    std::string name;
    std::string help;
    std::vector<Flag> flags;
    std::function<void(const Config&)> run;
};

const std::vector<Flag> kCorpusFlags = {
    {"--corpus", "corpus", "corpus file (.jsonl or .csv)"},
    {"--kind", "kind", "document kind: tweet or article"},
    {"--min-words", "min_words", "minimum word count"},
    {"--length-rule", "length_rule", "more_than or at_least"},
};

const std::vector<Flag> kScoringFlags = {
    {"--embeddings", "embeddings", "word vector text file"},
    {"--vocab-limit", "vocab_limit", "keep only the first N vectors"},
    {"--belief-dictionary", "belief_dictionary", "belief-speaking keyword file"},
    {"--truth-dictionary", "truth_dictionary", "truth-seeking keyword file"},
};

const std::vector<Flag> kModelFlags = {
    {"--response", "response", "newsguard, accuracy or transparency"},
    {"--absorb", "absorb", "none or account"},
    {"--baseline", "baseline", "baseline party (Democrat or Republican)"},
};

std::vector<Flag> join(std::initializer_list<std::vector<Flag>> groups) {
    std::vector<Flag> out;
    for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
    return out;
}

std::vector<Command> commands() {
    using namespace honesty::pipeline;
    return {
        {"score", "score documents against both dictionaries",
         join({kCorpusFlags, kScoringFlags, {{"--scores", "scores", "output scores CSV"}}}),
         [](const Config& c) {
             auto s = cmd_score(c);
             std::cout << "scored " << s.scored << " documents, " << s.unscorable << " unscorable\n";
         }},
        {"keyness", "scaled F-score scatter of party and honesty keyness",
         join({kCorpusFlags,
               {{"--scores", "scores", "scores CSV"},
                {"--top-fraction", "top_fraction", "share of top documents per component"},
                {"--min-count", "keyness_min_count", "minimum occurrences per axis"},
                {"--label-threshold", "keyness_label_threshold", "label flag threshold on |SFS|"},
                {"--score-variant", "keyness_scores", "corrected or raw"}}}),
         [](const Config& c) {
             auto r = cmd_keyness(c);
             std::cout << r.points.size() << " terms\n";
         }},
        {"trust-join", "expand documents to links and join domain ratings",
         join({kCorpusFlags,
               {{"--scores", "scores", "scores CSV"},
                {"--ratings", "ratings", "comma-separated ratings CSV files"},
                {"--exclusions", "exclusions", "excluded domain list"},
                {"--shorteners", "shorteners", "link shortener host list"},
                {"--redirect-cache", "redirect_cache", "redirect cache (JSON-Lines)"},
                {"--max-hops", "max_hops", "maximum redirects per link"},
                {"--http-timeout", "http_timeout", "seconds per request"},
                {"--links", "links", "output link records CSV"}}}),
         [](const Config& c) {
             auto r = cmd_trust_join(c);
             std::cout << r.size() << " link records\n";
         }},
        {"regress", "OLS of the rescaled rating on scores and party",
         join({kModelFlags, {{"--links", "links", "link records CSV"}}}),
         [](const Config& c) {
             auto r = cmd_regress(c);
             std::cout << "n=" << r.n_obs << " R2=" << r.r_squared << '\n';
         }},
        {"timeline", "monthly rolling means per party",
         {{"--scores", "scores", "scores CSV"},
          {"--window", "window", "window in months (odd)"},
          {"--n-boot", "n_boot", "bootstrap iterations"},
          {"--score-variant", "timeline_scores", "corrected or raw"}},
         [](const Config& c) {
             auto r = cmd_timeline(c);
             std::cout << r.size() << " series\n";
         }},
        {"validate-roc", "ROC/AUC of scores against human labels",
         {{"--scores", "scores", "scores CSV"},
          {"--rated", "rated", "CSV with doc_id, belief, truth (0/1)"},
          {"--score-variant", "roc_scores", "corrected or raw"}},
         [](const Config& c) {
             auto r = cmd_validate_roc(c);
             std::cout << "AUC belief=" << r.belief.auc << " truth=" << r.truth.auc << '\n';
         }},
        {"mediate", "mediation analysis with bootstrap intervals",
         {{"--input", "mediate_input", "input CSV"},
          {"--x", "x", "treatment column"},
          {"--m", "m", "mediator column"},
          {"--y", "y", "outcome column"},
          {"--group-by", "group_by", "aggregate to group means first"},
          {"--n-boot", "n_boot", "bootstrap iterations"}},
         [](const Config& c) {
             auto r = cmd_mediate(c);
             std::cout << "ACME=" << r.acme << " ADE=" << r.ade << '\n';
         }},
        {"perturb", "regressions with randomly reduced dictionaries",
         join({kCorpusFlags, kScoringFlags, kModelFlags,
               {{"--links", "links", "link records CSV"},
                {"--n-runs", "n_runs", "number of perturbations"},
                {"--remove-count", "remove_count", "keywords removed per dictionary"}}}),
         [](const Config& c) {
             auto r = cmd_perturb(c);
             std::cout << r.size() << " runs\n";
         }},
        {"synth", "generate a synthetic corpus, vectors and ratings",
         {{"--n-docs", "synth_n_docs", "original documents"},
          {"--republican-share", "synth_republican_share", "Republican share of major-party accounts"},
          {"--other-share", "synth_other_share", "share of accounts outside both parties"},
          {"--n-accounts", "synth_n_accounts", "number of accounts"},
          {"--coefficients", "synth_coefficients", "8 comma-separated planted coefficients"},
          {"--noise-sd", "synth_noise_sd", "noise SD of the rescaled rating"},
          {"--vocab-size", "synth_vocab_size", "neutral vocabulary size"},
          {"--dim", "synth_dim", "embedding dimension"},
          {"--coverage", "synth_coverage", "share of rated domains"},
          {"--retweet-share", "synth_retweet_share", "retweets per original"},
          {"--excluded-share", "synth_excluded_share", "share of documents with an excluded link"}},
         [](const Config& c) {
             cmd_synth(c);
             std::cout << "synthetic corpus written to " << c.output_dir() << '\n';
         }},
    };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Belief-speaking and truth-seeking analysis of political text"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(honesty::pipeline::kToolVersion));

    const auto cmds = commands();
    struct Bound {
        std::string config_path, seed, output_dir, workers;
        bool offline = false, online = false;
        std::vector<std::string> sets;
        std::map<std::string, std::string> values;
    };
    std::vector<Bound> bound(cmds.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        auto* sub = app.add_subcommand(cmds[i].name, cmds[i].help);
        auto& b = bound[i];
        sub->add_option("--config", b.config_path, "key = value configuration file");
        sub->add_option("--seed", b.seed, "master seed");
        sub->add_option("--output-dir", b.output_dir, "output directory");
        sub->add_option("--workers", b.workers, "worker threads");
        sub->add_option("--set", b.sets, "override any config key (key=value)");
        if (cmds[i].name == "trust-join") {
            sub->add_flag("--offline", b.offline, "never touch the network (default)");
            sub->add_flag("--online", b.online, "resolve uncached shortened links over HTTP");
        }
        for (const auto& f : cmds[i].flags) sub->add_option(f.name, b.values[f.key], f.help);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        for (std::size_t i = 0; i < cmds.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            auto& b = bound[i];
            Config config = b.config_path.empty() ? Config{} : Config::load(b.config_path);
            for (const auto& s : b.sets) {
                auto eq = s.find('=');
                if (eq == std::string::npos) throw honesty::ConfigError("--set expects key=value, got " + s);
                config.set(s.substr(0, eq), s.substr(eq + 1));
            }
            for (const auto& [key, value] : b.values) {
                if (!value.empty()) config.set(key, value);
            }
            if (!b.seed.empty()) config.set("seed", b.seed);
            if (!b.output_dir.empty()) config.set("output_dir", b.output_dir);
            if (!b.workers.empty()) config.set("workers", b.workers);
            if (b.offline && b.online) throw honesty::ConfigError("--offline and --online are exclusive");
            if (b.offline) config.set("offline", "true");
            if (b.online) config.set("offline", "false");
            cmds[i].run(config);
        }
    } catch (const honesty::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const honesty::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
