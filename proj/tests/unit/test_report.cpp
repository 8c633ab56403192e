#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "project.hpp"
#include "stereotax/digest.hpp"
#include "stereotax/error.hpp"
#include "stereotax/report.hpp"
#include "stereotax/tsv.hpp"

using namespace stereotax;
using namespace stereotax::report;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

std::map<std::string, std::string> key_values(const std::filesystem::path& p) {
  std::map<std::string, std::string> kv;
  for (const auto& line : lines_of(e2e::slurp(p))) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    kv[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return kv;
}

}  // namespace

TEST_CASE("config validation lists every problem") {
  e2e::Project p("config");
  p.config["clusterr"] = 3;
  p.config["stimuli"] = "missing.tsv";
  p.config["analysis"]["folds"] = "ten";
  p.save();
  try {
    RunConfig::load(p.config_path());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
    const std::string what = e.what();
    CHECK(what.find("clusterr") != std::string::npos);
    CHECK(what.find("missing.tsv") != std::string::npos);
    CHECK(what.find("folds") != std::string::npos);
  }

  e2e::Project ok("config_ok");
  ok.save();
  const auto c = RunConfig::load(ok.config_path());
  CHECK(c.output_dir == ok.root / "out");
  CHECK(c.embeddings->location == (ok.root / "embeddings.txt").string());
  CHECK(c.seeds.stats == 11);
  CHECK(c.analysis.folds == 10);
  auto other = ok;
  other.config["seeds"]["stats"] = 12;
  other.config_path();
  CHECK(c.digest() == RunConfig::load(ok.config_path()).digest());
}

TEST_CASE("baseline fixture correlations") {
  const auto reg = lexicon::DimensionRegistry::load(e2e::kData / "registry.tsv");
  const auto fx = load_baseline(e2e::kData / "fixtures" / "human_baseline.tsv", reg);
  CHECK(fx.tables.at(stats::Metric::kPrevalence).at("human").size() == 14);
  CHECK(fx.tables.at(stats::Metric::kDirection).at("human").size() == 8);
  const auto& prev = fx.tables.at(stats::Metric::kPrevalence);
  CHECK(column_correlation(prev.at("human"), prev.at("human")) == doctest::Approx(1.0));
  CHECK(std::fabs(column_correlation(prev.at("chatgpt"), prev.at("human")) - 0.942) <= 0.02);
}

TEST_CASE("end-to-end run") {
  e2e::Project p("full");
  p.run_all();
  const auto out = p.out();
  for (const char* f : {"manifest.json", "corpus.json", "failures.tsv", "parse_log.tsv", "codings.tsv",
                        "coverage.tsv", "cluster_scores.tsv", "cluster_vote.tsv", "cluster_assignments.tsv",
                        "prototypes.tsv", "table2_prevalence.tsv", "table3_direction.tsv", "table4_valence.tsv",
                        "omnibus.tsv", "pairwise.tsv", "baseline_correlations.tsv", "mean_valence.tsv",
                        "predictive_internal.tsv", "table5_internal.tsv", "predictive_human.tsv",
                        "table5_human.tsv", "trends.tsv", "trend_by_order.tsv", "profiles.tsv",
                        "category_profiles.tsv"}) {
    CAPTURE(f);
    CHECK(std::filesystem::exists(out / f));
  }
  CHECK(std::filesystem::exists(p.root / "cache" / "exchanges.jsonl"));

  const auto manifest = RunManifest::from_json(e2e::slurp(out / "manifest.json"));
  CHECK(manifest.seeds.stats == 11);
  CHECK(manifest.created == "2023-11-14T22:13:20Z");
  const std::string id_tag = "# manifest_id=" + manifest.run_id;
  for (const auto& [name, digest] : manifest.artifacts) {
    CHECK(digest == sha256_file(out / name));
    if (name.ends_with(".tsv")) {
      const auto first = lines_of(e2e::slurp(out / name)).front();
      CHECK(first.starts_with(id_tag));
      CHECK(first.find("seed_stats=11") != std::string::npos);
      CHECK(first.find("toolkit_version=") != std::string::npos);
    }
  }

  // Coverage file against the brute-force oracle on the audited corpus.
  const auto corpus = harness::read_corpus(out / "corpus.json");
  const auto reg = lexicon::DimensionRegistry::load(e2e::kData / "registry.tsv");
  const std::vector<std::filesystem::path> lex_paths{e2e::kData / "lexicon" / "mini_lexicon.tsv"};
  const auto lex = lexicon::Lexicon::load(lex_paths, reg);
  std::size_t misses = 0;
  for (const auto& r : corpus.records) misses += oracle::brute_force_code(r.normalized, lex).no_match;
  const auto cov = parse_tsv(e2e::slurp(out / "coverage.tsv"));
  const auto col = cov.column("coverage");
  bool saw_overall = false, saw_wc = false;
  double overall = 0, wc = 0;
  for (const auto& row : cov.rows) {
    if (row.cells[0] == "overall") {
      saw_overall = true;
      overall = std::stod(row.cells[col]);
    }
    if (row.cells[0] == "warmth_competence") {
      saw_wc = true;
      wc = std::stod(row.cells[col]);
    }
  }
  CHECK(saw_overall);
  CHECK(saw_wc);
  CHECK(overall == doctest::Approx(1.0 - static_cast<double>(misses) / corpus.records.size()).epsilon(1e-12));
  CHECK(wc <= overall);

  const auto human = key_values(out / "predictive_human.tsv");
  CHECK(human.at("status") == "unavailable");
  const auto internal = key_values(out / "predictive_internal.tsv");
  CHECK(internal.at("status") == "ok");

  const auto corr = parse_tsv(e2e::slurp(out / "baseline_correlations.tsv"));
  REQUIRE(corr.rows.size() == 9);
  CHECK(corr.rows[0].cells[1] == "chatgpt");
  CHECK(std::fabs(std::stod(corr.rows[0].cells[2]) - 0.942) <= 0.02);

  const auto protos = parse_tsv(e2e::slurp(out / "prototypes.tsv"));
  CHECK(!protos.rows.empty());

  SUBCASE("rerun with warm cache is byte-identical") {
    const auto before = e2e::snapshot(out);
    auto silent = p;
    silent.endpoint.calls->store(0);
    silent.run_all();
    CHECK(*silent.endpoint.calls == 0);
    CHECK(e2e::snapshot(out) == before);

    auto elsewhere = p;
    elsewhere.config["output_dir"] = "out2";
    elsewhere.run_all();
    CHECK(e2e::snapshot(elsewhere.out()) == before);
  }

  SUBCASE("a changed seed is refused against an existing manifest") {
    auto changed = p;
    changed.config["seeds"]["stats"] = 99;
    auto ctx = changed.context();
    try {
      cmd_analyze(ctx);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kConfig);
    }
  }

  SUBCASE("a tampered artifact is detected") {
    std::ofstream(out / "codings.tsv", std::ios::app) << "tampered\n";
    auto ctx = p.context();
    CHECK_THROWS_AS(cmd_analyze(ctx), Error);
  }

  SUBCASE("codings round-trip") {
    const auto coded = codings_from_tsv(out / "codings.tsv", reg);
    CHECK(coded.size() == corpus.records.size());
    const auto again = codings_to_tsv(coded, reg, lines_of(e2e::slurp(out / "codings.tsv")).front());
    CHECK(again == e2e::slurp(out / "codings.tsv"));
  }
}

TEST_CASE("graceful degradation without ratings") {
  e2e::Project p("no_ratings");
  p.config["collect_ratings"] = false;
  p.run_all();
  const auto kv = key_values(p.out() / "predictive_internal.tsv");
  CHECK(kv.at("status") == "unavailable");
  CHECK(std::filesystem::exists(p.out() / "table2_prevalence.tsv"));
  CHECK(std::filesystem::exists(p.out() / "trends.tsv"));
  CHECK(*p.endpoint.calls == 87 + 2);
}

TEST_CASE("missing embedding names the text") {
  e2e::Project p("missing_embedding");
  auto ctx = p.context();
  cmd_audit(ctx);
  cmd_code(ctx);
  const std::vector<std::string> texts{"only this"};
  clustering::Matrix m(1, 2);
  m(0, 0) = 1;
  clustering::write_embedding_file(p.root / "embeddings.txt", texts, m);
  try {
    cmd_cluster(ctx);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("missing text") != std::string::npos);
  }
}

TEST_CASE("empty corpus is refused by code") {
  e2e::Project p("empty");
  std::ofstream(p.root / "blocked.tsv") << "term\tcategory\nblocked a\tX\nblocked b\tY\n";
  p.config["stimuli"] = "blocked.tsv";
  p.config.erase("categories");
  auto ctx = p.context();
  cmd_audit(ctx);
  const auto manifest = RunManifest::from_json(e2e::slurp(p.out() / "manifest.json"));
  CHECK(manifest.excluded.size() == 2);
  try {
    cmd_code(ctx);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSchema);
  }
}

TEST_CASE("CLI exit codes") {
  e2e::Project p("cli");
  p.save();
  CHECK(e2e::run_cli("--version") == 0);
  CHECK(e2e::run_cli("audit -c " + p.config_path().string() + " --offline") == kExitTransport);
  CHECK(!std::filesystem::exists(p.out() / "corpus.json"));
  CHECK(e2e::run_cli("audit -c " + (p.root / "nope.json").string()) == kExitConfig);
  CHECK(e2e::run_cli("frobnicate") == kExitConfig);
  CHECK(e2e::run_cli("analyze -c " + p.config_path().string()) != 0);
  CHECK(exit_code_for(ErrorKind::kAnalysis) == kExitAnalysis);
  CHECK(exit_code_for(ErrorKind::kSchema) == kExitData);
  CHECK(exit_code_for(ErrorKind::kParse) == kExitData);
  CHECK(exit_code_for(ErrorKind::kAuth) == kExitTransport);
}
