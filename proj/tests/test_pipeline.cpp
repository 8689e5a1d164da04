#include "honesty/csv.hpp"
#include "honesty/error.hpp"
#include "honesty/pipeline.hpp"

#include "test_support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace honesty;
using namespace honesty::pipeline;
namespace fs = std::filesystem;
using Catch::Approx;

namespace {

/// Small synthetic corpus in dir; returns a config pointing at it.
Config synth_config(const fs::path& dir, std::size_t n_docs = 400) {
    Config c;
    c.set("seed", "17");
    c.set("output_dir", dir.string());
    c.set("synth_n_docs", std::to_string(n_docs));
    c.set("synth_n_accounts", "20");
    c.set("synth_vocab_size", "200");
    c.set("synth_dim", "16");
    c.set("synth_other_share", "0.1");
    c.set("synth_retweet_share", "0.1");
    c.set("synth_excluded_share", "0.2");
    cmd_synth(c);
    Config run;
    run.set("seed", "17");
    run.set("output_dir", dir.string());
    run.set("corpus", (dir / "corpus.jsonl").string());
    run.set("embeddings", (dir / "embeddings.txt").string());
    run.set("ratings", (dir / "ratings.csv").string());
    run.set("n_boot", "50");
    return run;
}

}  // namespace

TEST_CASE("config parsing, overrides and validation") {
    auto c = Config::parse("# comment\nseed = 5\nworkers=2\noffline = false\nratings = a.csv, b.csv\n");
    CHECK(c.seed() == 5);
    CHECK(c.get_size("workers", 1) == 2);
    CHECK_FALSE(c.get_bool("offline", true));
    CHECK(c.get_list("ratings") == std::vector<std::string>{"a.csv", "b.csv"});
    CHECK(c.get_double("top_fraction", 0.2) == 0.2);
    c.set("seed", "9");
    CHECK(c.seed() == 9);
    CHECK(c.output_dir() == ".");
    CHECK_THROWS_AS(c.set("no_such_key", "1"), ConfigError);
    CHECK_THROWS_AS(Config::parse("missing equals\n"), ConfigError);
    CHECK_THROWS_AS(c.require("corpus"), ConfigError);
    c.set("workers", "many");
    CHECK_THROWS_AS(c.get_size("workers", 1), ConfigError);
    c.set("corpus", "/nonexistent/corpus.jsonl");
    CHECK_THROWS_AS(c.check_input_files(), ConfigError);
    CHECK_THROWS_AS(Config::load("/nonexistent/honesty.conf"), ConfigError);
}

TEST_CASE("sha256 of a known file") {
    auto dir = support::temp_dir("sha");
    support::write_file(dir / "abc.txt", "abc");
    CHECK(sha256_file((dir / "abc.txt").string()) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("dictionary-only documents score 1 before correction") {
    auto dir = support::temp_dir("keywords");
    support::write_file(dir / "belief.txt", "feel\ngut\n");
    support::write_file(dir / "truth.txt", "data\nproof\n");
    support::write_file(dir / "emb.txt", "feel 1 0 0\ngut 0.8 0.2 0\ndata 0 1 0\nproof 0 0.7 0.3\nother 0 0 1\n");
    support::write_file(dir / "corpus.jsonl",
                        R"({"id":"1","text":"feel gut","created_at":"2020-01-01","account_id":"a","party":"D"})" "\n"
                        R"({"id":"2","text":"data proof other","created_at":"2020-01-02","account_id":"b","party":"R"})" "\n"
                        R"({"id":"3","text":"unknown words","created_at":"2020-01-03","account_id":"b","party":"R"})" "\n");
    Config c;
    c.set("output_dir", dir.string());
    c.set("corpus", (dir / "corpus.jsonl").string());
    c.set("embeddings", (dir / "emb.txt").string());
    c.set("belief_dictionary", (dir / "belief.txt").string());
    c.set("truth_dictionary", (dir / "truth.txt").string());
    c.set("min_words", "0");
    auto summary = cmd_score(c);
    CHECK(summary.scored == 2);
    CHECK(summary.unscorable == 1);
    auto rows = read_scores_csv((dir / "scores.csv").string());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].belief == Approx(1.0).margin(1e-6));
    CHECK(rows[0].party == corpus::Party::Democrat);
    CHECK(support::read_file(dir / "unscorable.csv") == "doc_id\n3\n");

    auto manifest = nlohmann::json::parse(support::read_file(dir / "score.manifest.json"));
    CHECK(manifest["tool"] == "honesty");
    CHECK(manifest["inputs"].size() == 4);
    CHECK(manifest["details"]["length_models"].size() == 2);
    CHECK(manifest.contains("timing"));
    CHECK(manifest["row_order"] == "(created_at, id)");

    support::write_file(dir / "empty.jsonl", "");
    c.set("corpus", (dir / "empty.jsonl").string());
    CHECK_THROWS_AS(cmd_score(c), DataError);
}

TEST_CASE("missing upstream outputs are config errors") {
    auto dir = support::temp_dir("upstream");
    Config c;
    c.set("output_dir", dir.string());
    CHECK_THROWS_AS(cmd_regress(c), ConfigError);
    CHECK_THROWS_AS(cmd_timeline(c), ConfigError);
}

TEST_CASE("pipeline composition equals direct library calls") {
    auto dir = support::temp_dir("compose");
    auto c = synth_config(dir);
    cmd_score(c);
    auto records = cmd_trust_join(c);
    auto via_cmd = cmd_regress(c);

    std::ifstream in(dir / "links.csv", std::ios::binary);
    auto from_file = trust::read_link_records_csv(in);
    CHECK(from_file.size() == records.size());
    auto data = regression_data(from_file, Response::NewsGuard, corpus::Party::Democrat);
    auto direct = stats::ols(data.x, data.y, data.term_names);
    CHECK(via_cmd.term_names == direct.term_names);
    CHECK(via_cmd.coefficients == direct.coefficients);
    CHECK(via_cmd.std_errors == direct.std_errors);
    CHECK(via_cmd.n_obs == direct.n_obs);

    c.set("absorb", "account");
    auto fe = cmd_regress(c);
    CHECK(std::find(fe.term_names.begin(), fe.term_names.end(), "Intercept") == fe.term_names.end());

    c.set("response", "accuracy");
    c.set("absorb", "none");
    auto acc = cmd_regress(c);
    CHECK(acc.n_obs == via_cmd.n_obs);
}

TEST_CASE("commands are byte-reproducible") {
    auto dir = support::temp_dir("repro");
    auto c = synth_config(dir, 300);
    cmd_score(c);
    const auto first = support::read_file(dir / "scores.csv");
    const auto first_manifest = nlohmann::ordered_json::parse(support::read_file(dir / "score.manifest.json"));
    cmd_score(c);
    CHECK(support::read_file(dir / "scores.csv") == first);
    auto second_manifest = nlohmann::ordered_json::parse(support::read_file(dir / "score.manifest.json"));
    CHECK(strip_timing(first_manifest) == strip_timing(second_manifest));

    cmd_trust_join(c);
    cmd_timeline(c);
    const auto tl = support::read_file(dir / "timeline_belief_speaking_democrat.csv");
    cmd_timeline(c);
    CHECK(support::read_file(dir / "timeline_belief_speaking_democrat.csv") == tl);
}

TEST_CASE("timeline of constant scores is flat") {
    auto dir = support::temp_dir("flat");
    std::vector<ScoreRow> rows;
    for (int m = 1; m <= 9; ++m) {
        for (int k = 0; k < 3; ++k) {
            ScoreRow r;
            r.doc_id = std::to_string(m * 10 + k);
            r.created_at = corpus::parse_timestamp("2020-0" + std::to_string(m) + "-10");
            r.account_id = "a";
            r.party = k == 0 ? corpus::Party::Republican : corpus::Party::Democrat;
            r.belief_corrected = 0.125;
            r.truth_corrected = -0.25;
            rows.push_back(r);
        }
    }
    write_scores_csv((dir / "scores.csv").string(), rows);
    Config c;
    c.set("output_dir", dir.string());
    c.set("n_boot", "20");
    auto series = cmd_timeline(c);
    CHECK(series.size() == 4);
    for (const auto& p : series.at("belief_speaking|Democrat")) {
        CHECK(p.mean == 0.125);
        CHECK(p.ci_low == 0.125);
    }
    for (const auto& p : series.at("truth_seeking|Republican")) CHECK(p.mean == -0.25);
    CHECK(fs::exists(dir / "timeline_truth_seeking_republican.csv"));
}

TEST_CASE("validate-roc and mediate commands") {
    auto dir = support::temp_dir("roc");
    std::vector<ScoreRow> rows;
    const double b[] = {0.9, 0.4, 0.35, 0.1};
    for (int i = 0; i < 4; ++i) {
        ScoreRow r;
        r.doc_id = "d" + std::to_string(i);
        r.created_at = corpus::parse_timestamp("2020-01-01");
        r.party = corpus::Party::Democrat;
        r.belief_corrected = b[i];
        r.truth_corrected = -b[i];
        rows.push_back(r);
    }
    write_scores_csv((dir / "scores.csv").string(), rows);
    support::write_file(dir / "rated.csv", "doc_id,belief,truth\nd0,1,0\nd1,0,1\nd2,1,0\nd3,0,1\nmissing,1,1\n");
    Config c;
    c.set("output_dir", dir.string());
    c.set("rated", (dir / "rated.csv").string());
    auto roc = cmd_validate_roc(c);
    CHECK(roc.belief.auc == 0.75);
    CHECK(roc.truth.auc == 0.75);
    CHECK(roc.matched == 4);
    CHECK(roc.missing == 1);
    CHECK(fs::exists(dir / "roc.json"));

    std::string med = "x,m,y,g\n";
    for (int i = 0; i < 40; ++i) {
        const double x = i * 0.1;
        med += std::to_string(x) + "," + std::to_string(x) + "," + std::to_string(x) + ",g" + std::to_string(i % 20) + "\n";
    }
    support::write_file(dir / "med.csv", med);
    c.set("mediate_input", (dir / "med.csv").string());
    c.set("x", "x");
    c.set("m", "m");
    c.set("y", "y");
    c.set("n_boot", "100");
    auto r = cmd_mediate(c);
    CHECK(r.acme == Approx(1.0));
    CHECK(r.ade == Approx(0.0).margin(1e-12));
    CHECK(r.n_obs == 40);
    c.set("group_by", "g");
    CHECK(cmd_mediate(c).n_obs == 20);
}

TEST_CASE("perturb writes one row per run") {
    auto dir = support::temp_dir("perturb");
    auto c = synth_config(dir, 300);
    cmd_score(c);
    cmd_trust_join(c);
    c.set("n_runs", "5");
    c.set("workers", "2");
    auto runs = cmd_perturb(c);
    REQUIRE(runs.size() == 5);
    for (const auto& r : runs) {
        CHECK(r.removed_belief.size() == 7);
        CHECK(r.removed_truth.size() == 7);
        CHECK(r.result.coefficients.size() == 8);
    }
    auto table = csv::read_file((dir / "perturb.csv").string());
    CHECK(table.rows.size() == 5);
    CHECK(table.column("D_b:Republican_se") > 0);
    c.set("workers", "1");
    auto serial = cmd_perturb(c);
    CHECK(serial[3].result.coefficients == runs[3].result.coefficients);
}
