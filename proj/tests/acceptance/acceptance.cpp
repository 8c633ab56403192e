// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when
// any criterion fails. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "project.hpp"
#include "stereotax/clustering.hpp"
#include "stereotax/lexicon.hpp"
#include "stereotax/report.hpp"
#include "stereotax/rng.hpp"
#include "stereotax/stats.hpp"

using namespace stereotax;

namespace {

constexpr double kCorrelationTolerance = 0.02;
constexpr double kFixtureSeconds = 1.0;
constexpr double kClusterSeconds = 30.0;
constexpr double kSelectKShare = 0.95;
constexpr double kLassoOlsTolerance = 1e-4;
constexpr double kNormalEquationTolerance = 1e-10;
constexpr double kKsThreshold = 0.01;
constexpr double kSeparatedP = 0.001;
constexpr double kTrendRelative = 0.20;
constexpr double kTrendCoverage = 0.90;
constexpr double kMoralityShare = 0.90;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

const lexicon::DimensionRegistry& registry() {
  static const auto r = lexicon::DimensionRegistry::load(e2e::kData / "registry.tsv");
  return r;
}

const lexicon::Lexicon& mini_lexicon() {
  static const auto lex = [] {
    const std::vector<std::filesystem::path> paths{e2e::kData / "lexicon" / "mini_lexicon.tsv"};
    return lexicon::Lexicon::load(paths, registry());
  }();
  return lex;
}

std::vector<std::string> fixture_responses() {
  std::ifstream in(e2e::kData / "fixtures" / "responses_500.txt");
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

Outcome baseline_correlations() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto fx = report::load_baseline(e2e::kData / "fixtures" / "human_baseline.tsv", registry());
  struct Target {
    stats::Metric metric;
    const char* column;
    double r;
  };
  const std::vector<Target> targets{
      {stats::Metric::kPrevalence, "chatgpt", 0.942}, {stats::Metric::kPrevalence, "mixtral", 0.958},
      {stats::Metric::kPrevalence, "llama3", 0.935},  {stats::Metric::kDirection, "chatgpt", 0.555},
      {stats::Metric::kDirection, "mixtral", 0.600},  {stats::Metric::kDirection, "llama3", 0.601},
      {stats::Metric::kValence, "chatgpt", 0.230},    {stats::Metric::kValence, "mixtral", 0.267},
      {stats::Metric::kValence, "llama3", 0.108}};
  for (const auto& t : targets) {
    const auto& cols = fx.tables.at(t.metric);
    const double r = report::column_correlation(cols.at(t.column), cols.at("human"));
    const std::string label = std::string(stats::to_string(t.metric)) + "/" + t.column;
    o.note(label + " r=" + fmt(r, 3));
    o.require(std::fabs(r - t.r) <= kCorrelationTolerance, label + " off target " + fmt(t.r, 3));
  }
  const double s = seconds_since(t0);
  o.note("time " + fmt(s, 3) + "s");
  o.require(s < kFixtureSeconds, "too slow");
  return o;
}

Outcome coding_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto responses = fixture_responses();
  std::vector<lexicon::DimensionCoding> codings;
  std::size_t mismatches = 0, misses = 0;
  for (const auto& raw : responses) {
    const auto text = lexicon::normalize(raw);
    auto c = lexicon::code_response(text, mini_lexicon());
    mismatches += !(c == oracle::brute_force_code(text, mini_lexicon()));
    misses += c.no_match;
    codings.push_back(std::move(c));
  }
  const double cov = lexicon::coverage(codings);
  const double expect = 1.0 - static_cast<double>(misses) / codings.size();
  const double s = seconds_since(t0);
  o.require(responses.size() == 500, "fixture has " + std::to_string(responses.size()) + " responses");
  o.require(mismatches == 0, std::to_string(mismatches) + " codings differ from the oracle");
  o.require(cov == expect, "coverage " + fmt(cov, 6) + " != " + fmt(expect, 6));
  o.require(s < kFixtureSeconds, "too slow");
  o.note("500 responses, coverage " + fmt(cov) + ", time " + fmt(s, 3) + "s");
  return o;
}

Outcome coverage_monotonicity() {
  Outcome o;
  const std::vector<std::string> wc_names{"Sociability", "Morality", "Ability", "Assertiveness"};
  const auto wc = registry().indices(wc_names);
  std::vector<std::vector<lexicon::DimensionCoding>> corpora;

  std::vector<lexicon::DimensionCoding> fixture;
  for (const auto& raw : fixture_responses()) fixture.push_back(lexicon::code_response(lexicon::normalize(raw), mini_lexicon()));
  corpora.push_back(fixture);

  // Mock-endpoint corpus over the full label roster.
  e2e::Project p("acceptance_coverage");
  auto ctx = p.context();
  report::cmd_audit(ctx);
  std::vector<lexicon::DimensionCoding> audited;
  for (const auto& r : harness::read_corpus(p.out() / "corpus.json").records) {
    audited.push_back(lexicon::code_response(r.normalized, mini_lexicon()));
  }
  corpora.push_back(audited);

  // Random draws of dictionary surfaces and non-words.
  const auto entries = mini_lexicon().entries();
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    std::vector<lexicon::DimensionCoding> synthetic;
    for (int i = 0; i < 200; ++i) {
      std::string text = rng.uniform() < 0.3 ? "qzx" + std::to_string(rng.below(50))
                                             : entries[rng.below(entries.size())].surface;
      if (rng.uniform() < 0.3) text += " " + std::string(entries[rng.below(entries.size())].surface);
      synthetic.push_back(lexicon::code_response(lexicon::normalize(text), mini_lexicon()));
    }
    corpora.push_back(synthetic);
  }

  std::size_t violations = 0;
  double gap_min = 1.0;
  for (const auto& c : corpora) {
    const double full = lexicon::coverage(c);
    const double sub = lexicon::coverage(c, wc);
    violations += sub > full;
    gap_min = std::min(gap_min, full - sub);
  }
  o.require(violations == 0, std::to_string(violations) + " corpora violate the bound");
  o.note(std::to_string(corpora.size()) + " corpora, smallest gap " + fmt(gap_min));
  return o;
}

Outcome clustering_recovery() {
  Outcome o;
  const auto t0 = Clock::now();
  int hits = 0;
  bool monotone = true;
  const int seeds = 20;
  for (int s = 1; s <= seeds; ++s) {
    // Unit sigma; centres 5 apart along separate axes, 7.07 sigma pairwise.
    const auto b = gen::gaussian_blobs(300, 3, 5, 5.0, 100 + s);
    clustering::SelectKOptions opts;
    opts.seed = s;
    const auto vote = clustering::select_k(b.points, opts);
    hits += vote.winner == 3;
    for (std::size_t k = 2; k <= 10; ++k) {
      const auto sol = clustering::kmeans(b.points, k, mix_seed(s, k), opts.restarts);
      for (const auto& trace : sol.inertia_traces) {
        for (std::size_t i = 1; i < trace.size(); ++i) monotone = monotone && trace[i] <= trace[i - 1];
      }
    }
  }
  const auto small = gen::gaussian_blobs(40, 3, 5, 5.0, 1);
  const double zero = clustering::kmeans(small.points, 40, 1, 2).inertia;
  const double s = seconds_since(t0);
  const double share = static_cast<double>(hits) / seeds;
  o.require(share >= kSelectKShare, "k=3 chosen in only " + fmt(share, 2));
  o.require(monotone, "inertia increased within a restart");
  o.require(zero == 0.0, "k=N inertia " + fmt(zero, 12));
  o.require(s < kClusterSeconds, "too slow");
  o.note("k=3 in " + std::to_string(hits) + "/" + std::to_string(seeds) + " seeds, time " + fmt(s, 1) + "s");
  return o;
}

Outcome regression_kernels() {
  Outcome o;
  Rng rng(2024);
  const int n = 200, p = 10;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
    y(i) = 0.5 + 0.2 * rng.normal();
    for (int j = 0; j < p; ++j) y(i) += 0.1 * (j + 1) * (j % 2 ? -1 : 1) * x(i, j);
  }
  const auto ols = stats::ols_robust(y, x);
  const auto lasso = stats::elastic_net(y, x, 1e-10);
  double worst = std::fabs(lasso.intercept - ols.coefficients(0));
  for (int j = 0; j < p; ++j) worst = std::max(worst, std::fabs(lasso.coefficients(j) - ols.coefficients(j + 1)));
  o.require(worst <= kLassoOlsTolerance, "lasso vs OLS " + sci(worst));

  const auto zero = stats::elastic_net(y, x, stats::lambda_max(y, x, 1.0) * 1.0001);
  o.require(zero.coefficients.cwiseAbs().maxCoeff() == 0.0, "slopes nonzero above the threshold");

  const std::vector<std::vector<double>> rows{{1}, {2}, {3}, {4}, {5}, {6}, {7}, {8}, {9}, {10}};
  const std::vector<double> yy{2.3, 4.1, 6.2, 8.4, 9.7, 12.5, 13.9, 16.2, 18.1, 19.8};
  Eigen::MatrixXd xx(10, 1);
  for (int i = 0; i < 10; ++i) xx(i, 0) = rows[i][0];
  const auto fit = stats::ols_robust(Eigen::Map<const Eigen::VectorXd>(yy.data(), 10), xx);
  const auto hand = oracle::normal_equations(rows, yy);
  const double err = std::max(std::fabs(fit.coefficients(0) - hand[0]), std::fabs(fit.coefficients(1) - hand[1]));
  o.require(err <= kNormalEquationTolerance, "OLS vs normal equations " + sci(err));

  double lr_min = INFINITY;
  std::size_t lr_runs = 0;
  for (std::uint64_t s = 1; s <= 50; ++s) {
    auto ps = gen::profiles(40, std::vector<double>(14, 0.2), 0.05, s);
    Rng noise(s * 7);
    std::vector<std::optional<double>> outcome;
    for (std::size_t i = 0; i < ps.size(); ++i) outcome.push_back(noise.normal());
    stats::PredictiveOptions opts;
    opts.net.seed = s;
    const auto cmp = stats::predictive_comparison(ps, outcome, registry(), opts);
    if (cmp.lr_chi2) {
      lr_min = std::min(lr_min, *cmp.lr_chi2);
      ++lr_runs;
    }
  }
  o.require(lr_runs == 50, "LR statistic missing in " + std::to_string(50 - lr_runs) + " runs");
  o.require(lr_min >= 0.0, "negative LR statistic");
  o.note("lasso-OLS max diff " + sci(worst) + ", OLS-hand max diff " + sci(err) + ", min LR " + fmt(lr_min));
  return o;
}

Outcome inference_calibration() {
  Outcome o;
  std::vector<double> ps;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    const auto profiles = gen::profiles(40, std::vector<double>(6, 0.3), 0.05, 5000 + s);
    ps.push_back(stats::omnibus_dimension_test(profiles, stats::Metric::kPrevalence, s, 9999).p);
  }
  const double ks = oracle::ks_uniform_p(ps);
  o.require(ks > kKsThreshold, "KS p " + fmt(ks));

  bool shared = true;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    auto profiles = gen::profiles(30, {0.2, 0.2, 0.5, 0.35}, 0.1, 600 + s);
    for (auto& p : profiles) p.prevalence[1] = p.prevalence[0];
    const auto g = stats::pairwise_letters(profiles, stats::Metric::kPrevalence, 0.05, s);
    const auto a = g.letters_of(0), b = g.letters_of(1);
    shared = shared && std::any_of(a.begin(), a.end(), [&](char c) { return b.find(c) != std::string::npos; });
  }
  o.require(shared, "identical dimensions without a common letter");

  const auto strong = gen::profiles(50, {0.1, 0.5}, 0.02, 77);
  const auto t = stats::omnibus_dimension_test(strong, stats::Metric::kPrevalence, 1, 9999);
  const auto g = stats::pairwise_letters(strong, stats::Metric::kPrevalence, 0.05, 1);
  o.require(t.p < kSeparatedP, "separated omnibus p " + fmt(t.p, 5));
  o.require(g.letters_of(0) != g.letters_of(1) && g.pairs.front().p_adjusted < kSeparatedP,
            "separated dimensions share letters");
  o.note("KS p " + fmt(ks) + " over 200 null runs; separated p " + fmt(t.p, 5) + ", letters " + g.letters_of(1) +
         "/" + g.letters_of(0));
  return o;
}

Outcome trend_recovery() {
  Outcome o;
  const auto soc = *registry().resolve("Sociability");
  const double truth = (0.18 - 0.08) / 49.0;
  int covered = 0, within = 0;
  double mean_slope = 0;
  const int seeds = 50;
  for (int s = 1; s <= seeds; ++s) {
    const auto corpus = gen::ramp_corpus(87, 16, registry().size(), soc, 0.08, 0.18, 900 + s);
    stats::TrendOptions opts;
    opts.seed = s;
    const auto fit = stats::trend_over_responses(corpus, registry(), opts)[soc];
    covered += fit.lower <= truth && truth <= fit.upper;
    within += std::fabs(fit.slope - truth) <= kTrendRelative * truth;
    mean_slope += fit.slope / seeds;
  }
  const double coverage = static_cast<double>(covered) / seeds;
  o.require(within == seeds, "slope outside 20% in " + std::to_string(seeds - within) + " seeds");
  o.require(coverage >= kTrendCoverage, "interval coverage " + fmt(coverage, 2));
  o.note("truth " + fmt(truth, 6) + ", mean slope " + fmt(mean_slope, 6) + ", coverage " + fmt(coverage, 2));
  return o;
}

Outcome predictive_sanity() {
  Outcome o;
  const auto morality = *registry().resolve("Morality");
  int good = 0;
  const int seeds = 50;
  for (int s = 1; s <= seeds; ++s) {
    auto ps = gen::profiles(87, std::vector<double>(registry().size(), 0.2), 0.08, 300 + s);
    Rng noise(s);
    std::vector<std::optional<double>> outcome;
    for (const auto& p : ps) outcome.push_back(0.5 * p.prevalence[morality] + 0.01 * noise.normal());
    stats::PredictiveOptions opts;
    opts.net.seed = s;
    const auto cmp = stats::predictive_comparison(ps, outcome, registry(), opts);
    const auto& names = cmp.full.names;
    const auto at = std::find(names.begin(), names.end(), "prevalence:Morality") - names.begin();
    good += cmp.full.model.coefficients(at) > 0.0 && cmp.delta_r2 > 0.0;
  }
  const double share = static_cast<double>(good) / seeds;
  o.require(share >= kMoralityShare, "Morality retained positively in only " + fmt(share, 2));
  o.note(std::to_string(good) + "/" + std::to_string(seeds) + " seeds");
  return o;
}

Outcome end_to_end() {
  Outcome o;
  e2e::Project first("acceptance_e2e");
  first.run_all();
  const auto a = e2e::snapshot(first.out());

  auto second = first;
  second.config["output_dir"] = "out_rerun";
  second.endpoint.calls->store(0);
  second.run_all();
  const auto b = e2e::snapshot(second.out());
  o.require(*second.endpoint.calls == 0, "warm-cache run called the endpoint");
  o.require(a == b, "outputs differ between runs");
  o.require(a.size() >= 20, "only " + std::to_string(a.size()) + " output files");

  e2e::Project cold("acceptance_cold");
  cold.save();
  const int code = e2e::run_cli("report-all -c " + cold.config_path().string() + " --offline");
  o.require(code == report::kExitTransport, "offline cold cache exit " + std::to_string(code));
  o.note(std::to_string(a.size()) + " files identical; offline cold-cache exit " + std::to_string(code));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "baseline correlations", baseline_correlations},
      {2, "coding oracle equivalence", coding_oracle},
      {3, "coverage subset monotonicity", coverage_monotonicity},
      {4, "clustering recovery", clustering_recovery},
      {5, "regression kernels", regression_kernels},
      {6, "inference calibration", inference_calibration},
      {7, "trend recovery", trend_recovery},
      {8, "predictive comparison", predictive_sanity},
      {9, "end-to-end determinism", end_to_end},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
