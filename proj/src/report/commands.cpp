#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "stereotax/digest.hpp"
#include "stereotax/error.hpp"
#include "stereotax/report.hpp"
#include "stereotax/rng.hpp"
#include "stereotax/tsv.hpp"

namespace stereotax::report {
namespace {

constexpr const char* kNa = "NA";

struct Run {
  lexicon::DimensionRegistry registry;
  std::optional<lexicon::Lexicon> lex;
  RunManifest manifest;
};

void say(const Context& ctx, const std::string& msg) {
  if (ctx.log) *ctx.log << msg << '\n';
}

Run open_run(const RunConfig& c, bool need_lexicon) {
  Run run;
  run.registry = c.registry ? lexicon::DimensionRegistry::load(*c.registry) : lexicon::DimensionRegistry::standard();
  if (!c.lexicon.empty()) run.lex = lexicon::Lexicon::load(c.lexicon, run.registry);
  if (need_lexicon && !run.lex) throw Error(ErrorKind::kConfig, "config.lexicon lists no dictionary files");
  run.manifest = open_manifest(c.output_dir, make_manifest(c, run.lex ? run.lex->digest() : std::string()));
  return run;
}

harness::StimulusSet load_roster(const RunConfig& c) {
  if (c.categories) {
    const auto declared = harness::load_category_list(*c.categories);
    return harness::load_stimuli(c.stimuli, std::span<const std::string>(declared));
  }
  return harness::load_stimuli(c.stimuli);
}

harness::Corpus load_verified_corpus(const RunConfig& c, const RunManifest& m) {
  verify_artifact(c.output_dir, m, "corpus.json");
  return harness::corpus_from_json(read_file(c.output_dir / "corpus.json"));
}

std::string num(double v) { return format_double(v); }
std::string num(const std::optional<double>& v) { return v ? format_double(*v) : kNa; }

class Table {
 public:
  explicit Table(const RunManifest& m, std::vector<std::string> extra = {}) {
    out_ << provenance_line(m) << '\n';
    for (const auto& e : extra) out_ << "# " << e << '\n';
  }
  Table& header(std::initializer_list<std::string> cells) { return row(std::vector<std::string>(cells)); }
  Table& row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "\t" : "") << cells[i];
    out_ << '\n';
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) { return mix_seed(seed, stream); }

// ---------------------------------------------------------------- analysis

void emit_metric_table(const Context& ctx, Run& run, const std::string& file, stats::Metric metric,
                       std::span<const stats::CategoryProfile> profiles,
                       const std::vector<stats::DimensionSummary>& summaries, const BaselineFixture* baseline,
                       std::uint64_t stream, Table& omnibus_rows, Table& pair_rows) {
  const auto& cfg = ctx.config.analysis;
  const auto seed = ctx.config.seeds.stats;
  const std::string metric_name(stats::to_string(metric));

  std::optional<stats::StatTest> omnibus;
  std::string omnibus_note;
  try {
    omnibus = stats::omnibus_dimension_test(profiles, metric, stream_seed(seed, stream), cfg.permutations);
  } catch (const Error& e) {
    omnibus_note = e.what();
  }
  if (omnibus) {
    omnibus_rows.row({metric_name, num(omnibus->statistic), num(omnibus->df), std::to_string(omnibus->resamples),
                      num(omnibus->p), omnibus->method, std::to_string(omnibus->seed)});
  } else {
    omnibus_rows.row({metric_name, kNa, kNa, "0", kNa, "unavailable: " + omnibus_note, std::to_string(seed)});
  }

  const auto letters = stats::pairwise_letters(profiles, metric, cfg.letter_alpha, stream_seed(seed, stream + 100),
                                               cfg.bootstrap);
  for (const auto& p : letters.pairs) {
    pair_rows.row({metric_name, run.registry.name(p.a), run.registry.name(p.b), num(p.difference), num(p.se), num(p.p),
                   num(p.p_adjusted), p.rejected ? "1" : "0"});
  }

  const BaselineColumn* human = nullptr;
  if (baseline) {
    const auto t = baseline->tables.find(metric);
    if (t != baseline->tables.end()) {
      const auto h = t->second.find("human");
      if (h != t->second.end()) human = &h->second;
    }
  }

  Table table(run.manifest, {"metric=" + metric_name, "letters: Holm-corrected cluster-bootstrap pairwise tests, alpha=" +
                                                          num(cfg.letter_alpha) + ", resamples=" +
                                                          std::to_string(cfg.bootstrap)});
  if (metric == stats::Metric::kPrevalence) {
    table.header({"dimension", "mean", "se", "n", "letters", "response_rate_mean", "response_rate_se", "human_baseline"});
  } else {
    table.header({"dimension", "mean", "se", "n", "letters", "human_baseline"});
  }
  BaselineColumn model_column;
  for (const auto& s : stats::sorted_by_mean(summaries, metric)) {
    const auto& m = s.get(metric);
    if (!m.mean) continue;
    model_column[s.dimension] = *m.mean;
    std::optional<double> h;
    if (human && human->count(s.dimension)) h = human->at(s.dimension);
    std::vector<std::string> cells{s.name, num(m.mean), num(m.se), std::to_string(m.n), letters.letters_of(s.dimension)};
    if (metric == stats::Metric::kPrevalence) {
      cells.push_back(num(s.response_rate.mean));
      cells.push_back(num(s.response_rate.se));
    }
    cells.push_back(num(h));
    table.row(cells);
  }
  std::string r = kNa;
  if (human) {
    try {
      r = num(column_correlation(model_column, *human));
    } catch (const Error&) {
    }
  }
  std::vector<std::string> last{"correlation_to_human_baseline", r, "", "", ""};
  if (metric == stats::Metric::kPrevalence) last.insert(last.end(), {"", ""});
  last.push_back("");
  table.row(last);
  emit(ctx.config.output_dir, run.manifest, file, table.str());
}

void emit_predictive(const Context& ctx, Run& run, const std::string& stem, const std::string& outcome_name,
                     std::span<const stats::CategoryProfile> profiles,
                     std::span<const std::optional<double>> outcome, std::uint64_t stream,
                     const std::string& unavailable_reason) {
  const auto& cfg = ctx.config.analysis;
  Table summary(run.manifest, {"outcome=" + outcome_name});
  Table t5(run.manifest, {"outcome=" + outcome_name,
                          "r_*: correlation of the outcome with each metric; max_metric has the largest |r|; "
                          "retained: any predictor of the dimension kept by the regularized model; stars: "
                          "significance in the unregularized robust regression"});
  t5.header({"dimension", "r_prevalence", "r_direction", "r_valence", "max_metric", "max_r", "retained", "stars"});

  std::optional<stats::PredictiveComparison> cmp;
  std::string reason = unavailable_reason;
  if (reason.empty()) {
    try {
      stats::PredictiveOptions opts;
      opts.net.alpha = cfg.alpha;
      opts.net.folds = cfg.folds;
      opts.net.seed = stream_seed(ctx.config.seeds.stats, stream);
      opts.min_categories = cfg.min_categories;
      cmp = stats::predictive_comparison(profiles, outcome, run.registry, opts);
    } catch (const Error& e) {
      reason = e.what();
    }
  }
  summary.header({"key", "value"});
  if (!cmp) {
    summary.row({"status", "unavailable"});
    summary.row({"reason", reason});
    emit(ctx.config.output_dir, run.manifest, stem + ".tsv", summary.str());
    emit(ctx.config.output_dir, run.manifest, "table5_" + outcome_name + ".tsv", t5.str());
    return;
  }
  const auto& b = cmp->baseline;
  const auto& f = cmp->full;
  summary.row({"status", "ok"});
  summary.row({"n_categories", std::to_string(cmp->n)});
  summary.row({"baseline_r2", num(b.r2)});
  summary.row({"baseline_aic", num(b.aic)});
  for (Eigen::Index j = 0; j < b.coefficients.size(); ++j) {
    const auto& name = b.names[static_cast<std::size_t>(j)];
    summary.row({"baseline_coef:" + name, num(b.coefficients(j))});
    summary.row({"baseline_robust_se:" + name, num(b.robust_se(j))});
    summary.row({"baseline_p:" + name, num(b.p_values(j))});
  }
  summary.row({"full_r2", num(f.r2)});
  summary.row({"full_alpha", num(f.alpha)});
  summary.row({"full_lambda", num(f.model.lambda)});
  summary.row({"full_folds", std::to_string(f.folds)});
  summary.row({"full_cv_seed", std::to_string(f.seed)});
  summary.row({"full_cv_error", num(f.cv_error[f.selected])});
  summary.row({"full_nonzero", std::to_string(f.nonzero.size())});
  summary.row({"full_intercept", num(f.model.intercept)});
  for (std::size_t j = 0; j < f.names.size(); ++j) {
    summary.row({"full_coef:" + f.names[j], num(f.model.coefficients(static_cast<Eigen::Index>(j)))});
  }
  summary.row({"delta_r2", num(cmp->delta_r2)});
  summary.row({"nested_lr_chi2", num(cmp->lr_chi2)});
  summary.row({"nested_lr_df", num(cmp->lr_df)});
  summary.row({"nested_lr_p", num(cmp->lr_p)});
  summary.row({"imputed_values", std::to_string(cmp->imputed_values)});
  if (!cmp->stars_note.empty()) summary.row({"stars_note", cmp->stars_note});
  emit(ctx.config.output_dir, run.manifest, stem + ".tsv", summary.str());

  for (const auto& row : cmp->table5) {
    std::optional<double> max_r;
    if (row.max_metric == "prevalence") max_r = row.r_prevalence;
    if (row.max_metric == "direction") max_r = row.r_direction;
    if (row.max_metric == "valence") max_r = row.r_valence;
    t5.row({row.name, num(row.r_prevalence), num(row.r_direction), num(row.r_valence),
            row.max_metric.empty() ? kNa : row.max_metric, num(max_r), row.retained ? "retained" : "dropped",
            row.stars});
  }
  t5.row({"baseline_r2", num(b.r2), "", "", "", "", "", ""});
  t5.row({"full_r2", num(f.r2), "", "", "", "", "", ""});
  emit(ctx.config.output_dir, run.manifest, "table5_" + outcome_name + ".tsv", t5.str());
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return kExitConfig;
    case ErrorKind::kTransport:
    case ErrorKind::kAuth:
    case ErrorKind::kRateLimit:
    case ErrorKind::kMalformedReply:
    case ErrorKind::kOfflineCacheMiss: return kExitTransport;
    case ErrorKind::kSchema:
    case ErrorKind::kIo:
    case ErrorKind::kParse: return kExitData;
    case ErrorKind::kAnalysis:
    case ErrorKind::kInvalidArgument: return kExitAnalysis;
  }
  return kExitGeneric;
}

void cmd_audit(Context& ctx) {
  const auto& c = ctx.config;
  auto run = open_run(c, false);
  const auto stimuli = load_roster(c);
  std::filesystem::create_directories(c.cache_dir);
  harness::ExchangeCache cache(c.cache_dir / "exchanges.jsonl");
  std::optional<harness::ChatClient> client;
  if (!c.offline) client.emplace(c.endpoint, cache, ctx.post, ctx.sleep);

  harness::ElicitationOptions opts;
  opts.parse = c.parse;
  opts.offline = c.offline;
  opts.collect_ratings = c.collect_ratings;
  say(ctx, "audit: " + std::to_string(stimuli.terms.size()) + " terms in " + std::to_string(stimuli.categories.size()) +
               " categories against " + c.endpoint.endpoint_id());
  const auto corpus = harness::run_elicitation(stimuli, c.endpoint, client ? &*client : nullptr, cache, opts);

  emit(c.output_dir, run.manifest, "corpus.json", harness::corpus_to_json(corpus));
  Table failures(run.manifest);
  failures.header({"category", "term", "reason"});
  for (const auto& f : corpus.failures) failures.row({f.category, f.term, std::string(harness::to_string(f.reason))});
  emit(c.output_dir, run.manifest, "failures.tsv", failures.str());
  Table log(run.manifest);
  log.header({"category", "term", "why", "text"});
  for (const auto& l : corpus.parse_log) {
    std::string text = l.text;
    std::replace(text.begin(), text.end(), '\t', ' ');
    log.row({l.category, l.term, l.why, text});
  }
  emit(c.output_dir, run.manifest, "parse_log.tsv", log.str());
  for (const auto& cat : corpus.excluded_categories) run.manifest.excluded[cat] = "every term failed";
  write_manifest(c.output_dir, run.manifest);
  say(ctx, "audit: " + std::to_string(corpus.records.size()) + " responses, " +
               std::to_string(corpus.failures.size()) + " failed terms, " +
               std::to_string(corpus.excluded_categories.size()) + " excluded categories");
}

void cmd_code(Context& ctx) {
  const auto& c = ctx.config;
  auto run = open_run(c, true);
  const auto corpus = load_verified_corpus(c, run.manifest);
  if (corpus.records.empty()) throw Error(ErrorKind::kSchema, "corpus has no responses to code");

  std::vector<stats::CodedResponse> coded;
  coded.reserve(corpus.records.size());
  std::vector<lexicon::DimensionCoding> codings;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& r = corpus.records[i];
    auto coding = lexicon::code_response(r.normalized, *run.lex);
    coding.response_id = i;
    codings.push_back(coding);
    coded.push_back({r.category, r.term, r.order, r.normalized, std::move(coding)});
  }
  emit(c.output_dir, run.manifest, "codings.tsv", codings_to_tsv(coded, run.registry, provenance_line(run.manifest)));

  Table cov(run.manifest, {"lexicon_digest=" + run.lex->digest(), "lexicon_entries=" + std::to_string(run.lex->size())});
  cov.header({"scope", "dimensions", "responses", "matched", "coverage"});
  auto add_row = [&](const std::string& scope, std::span<const lexicon::DimensionCoding> subset,
                     std::optional<std::vector<std::size_t>> dims) {
    const double share = dims ? lexicon::coverage(subset, *dims) : lexicon::coverage(subset);
    std::string dim_names = "all";
    if (dims) {
      dim_names.clear();
      for (const auto d : *dims) dim_names += (dim_names.empty() ? "" : ",") + run.registry.name(d);
    }
    std::size_t matched = 0;
    for (const auto& cd : subset) {
      bool hit = false;
      if (dims) {
        for (const auto d : *dims) hit = hit || cd.presence[d];
      } else {
        hit = !cd.no_match;
      }
      matched += hit;
    }
    cov.row({scope, dim_names, std::to_string(subset.size()), std::to_string(matched), num(share)});
  };
  add_row("overall", codings, std::nullopt);
  const std::vector<std::string> wc{"Sociability", "Morality", "Ability", "Assertiveness"};
  bool have_wc = true;
  for (const auto& n : wc) have_wc = have_wc && run.registry.resolve(n).has_value();
  if (have_wc) add_row("warmth_competence", codings, run.registry.indices(wc));
  std::vector<std::string> cats;
  for (const auto& r : corpus.records) {
    if (std::find(cats.begin(), cats.end(), r.category) == cats.end()) cats.push_back(r.category);
  }
  for (const auto& cat : cats) {
    std::vector<lexicon::DimensionCoding> subset;
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
      if (corpus.records[i].category == cat) subset.push_back(codings[i]);
    }
    add_row("category:" + cat, subset, std::nullopt);
  }
  emit(c.output_dir, run.manifest, "coverage.tsv", cov.str());
  write_manifest(c.output_dir, run.manifest);
  say(ctx, "code: " + std::to_string(coded.size()) + " responses coded, coverage " + num(lexicon::coverage(codings)));
}

void cmd_cluster(Context& ctx) {
  const auto& c = ctx.config;
  if (!c.embeddings) throw Error(ErrorKind::kConfig, "config.embeddings is required for clustering");
  auto run = open_run(c, false);
  const auto corpus = load_verified_corpus(c, run.manifest);
  if (corpus.records.empty()) throw Error(ErrorKind::kSchema, "corpus has no responses to cluster");
  const auto texts = clustering::unique_responses(corpus.records);
  const auto emb = clustering::fetch_embeddings(texts, *c.embeddings, ctx.post);
  say(ctx, "cluster: " + std::to_string(texts.size()) + " unique responses, d=" + std::to_string(emb.vectors.cols()));

  clustering::SelectKOptions opts;
  opts.k_min = c.cluster.k_min;
  opts.k_max = c.cluster.k_max;
  opts.seed = c.seeds.clustering;
  opts.restarts = c.cluster.restarts;
  opts.gap_references = c.cluster.gap_references;
  const auto vote = clustering::select_k(emb.vectors, opts);
  // Same per-k seed select_k used, so the sheet describes the scored solution.
  const auto solution = clustering::kmeans(emb.vectors, vote.winner, mix_seed(opts.seed, vote.winner), opts.restarts);
  const auto protos = clustering::prototypes(solution, emb.vectors, emb.texts, c.cluster.top_n);

  const std::vector<std::string> extra{"embeddings=" + emb.source, "embedding_digest=" + emb.digest,
                                       "unique_responses=" + std::to_string(texts.size())};
  Table scores(run.manifest, extra);
  scores.header({"k", "inertia", "silhouette", "calinski_harabasz", "davies_bouldin", "dunn", "gap", "gap_se", "elbow"});
  for (const auto& s : vote.scores) {
    scores.row({std::to_string(s.k), num(s.inertia), num(s.silhouette), num(s.calinski_harabasz), num(s.davies_bouldin),
                num(s.dunn), num(s.gap), num(s.gap_se), num(s.elbow)});
  }
  emit(c.output_dir, run.manifest, "cluster_scores.tsv", scores.str());

  Table votes(run.manifest, extra);
  votes.header({"kind", "name", "k"});
  for (const auto& [index, k] : vote.best_k) votes.row({"index", index, std::to_string(k)});
  for (const auto& [k, n] : vote.tally) votes.row({"tally", std::to_string(n), std::to_string(k)});
  votes.row({"winner", "", std::to_string(vote.winner)});
  emit(c.output_dir, run.manifest, "cluster_vote.tsv", votes.str());

  Table assign(run.manifest, extra);
  assign.header({"text", "cluster"});
  for (std::size_t i = 0; i < emb.texts.size(); ++i) assign.row({emb.texts[i], std::to_string(solution.labels[i])});
  emit(c.output_dir, run.manifest, "cluster_assignments.tsv", assign.str());

  std::vector<std::size_t> sizes(solution.k, 0);
  for (const auto l : solution.labels) ++sizes[l];
  Table sheet(run.manifest, extra);
  sheet.header({"cluster", "size", "rank", "text", "similarity"});
  for (std::size_t k = 0; k < protos.size(); ++k) {
    for (std::size_t r = 0; r < protos[k].size(); ++r) {
      sheet.row({std::to_string(k), std::to_string(sizes[k]), std::to_string(r + 1), protos[k][r].text,
                 num(protos[k][r].similarity)});
    }
  }
  emit(c.output_dir, run.manifest, "prototypes.tsv", sheet.str());
  write_manifest(c.output_dir, run.manifest);
  say(ctx, "cluster: k=" + std::to_string(vote.winner) + " by vote");
}

void cmd_analyze(Context& ctx) {
  const auto& c = ctx.config;
  auto run = open_run(c, false);
  const auto corpus = load_verified_corpus(c, run.manifest);
  verify_artifact(c.output_dir, run.manifest, "codings.tsv");
  const auto responses = codings_from_tsv(c.output_dir / "codings.tsv", run.registry);
  const auto stimuli = load_roster(c);

  std::vector<stats::TermRating> ratings;
  for (const auto& r : corpus.ratings) ratings.push_back({r.category, r.term, r.rating});
  const auto agg = stats::aggregate(responses, ratings, run.registry.size(), stimuli.categories);
  for (const auto& cat : corpus.excluded_categories) run.manifest.excluded[cat] = "every term failed";
  for (const auto& e : agg.excluded) run.manifest.excluded.emplace(e.category, e.reason);
  const auto& profiles = agg.profiles;
  if (profiles.size() < 2) {
    throw Error(ErrorKind::kAnalysis, "analysis needs at least two categories with coded responses, got " +
                                          std::to_string(profiles.size()));
  }
  const auto summaries = stats::summarize_dimensions(profiles, run.registry);

  std::optional<BaselineFixture> baseline;
  if (c.human_baseline) baseline = load_baseline(*c.human_baseline, run.registry);

  Table omnibus(run.manifest, {"permutation test of equal dimension means; values shuffled within category"});
  omnibus.header({"metric", "statistic", "df", "resamples", "p", "method", "seed"});
  Table pairs(run.manifest);
  pairs.header({"metric", "a", "b", "difference", "se", "p", "p_holm", "rejected"});
  emit_metric_table(ctx, run, "table2_prevalence.tsv", stats::Metric::kPrevalence, profiles, summaries,
                    baseline ? &*baseline : nullptr, 1, omnibus, pairs);
  emit_metric_table(ctx, run, "table3_direction.tsv", stats::Metric::kDirection, profiles, summaries,
                    baseline ? &*baseline : nullptr, 2, omnibus, pairs);
  emit_metric_table(ctx, run, "table4_valence.tsv", stats::Metric::kValence, profiles, summaries,
                    baseline ? &*baseline : nullptr, 3, omnibus, pairs);
  emit(c.output_dir, run.manifest, "omnibus.tsv", omnibus.str());
  emit(c.output_dir, run.manifest, "pairwise.tsv", pairs.str());

  if (baseline) {
    Table corr(run.manifest, {"Pearson r against the human baseline column, dimension means as observations"});
    corr.header({"metric", "column", "r", "n_dimensions"});
    for (const auto& [metric, columns] : baseline->tables) {
      const auto h = columns.find("human");
      if (h == columns.end()) continue;
      for (const auto& name : baseline->columns) {
        if (name == "human" || !columns.count(name)) continue;
        std::string r = kNa;
        try {
          r = num(column_correlation(columns.at(name), h->second));
        } catch (const Error&) {
        }
        corr.row({std::string(stats::to_string(metric)), name, r, std::to_string(columns.at(name).size())});
      }
    }
    emit(c.output_dir, run.manifest, "baseline_correlations.tsv", corr.str());
  }

  Table mv(run.manifest, {"one-sample t of category overall valence against 0"});
  mv.header({"mean", "t", "df", "p", "n_categories"});
  try {
    const auto t = stats::mean_valence_test(profiles);
    std::size_t n = 0;
    for (const auto& p : profiles) n += p.overall_valence.has_value();
    mv.row({num(t.estimate), num(t.statistic), num(t.df), num(t.p), std::to_string(n)});
  } catch (const Error& e) {
    mv.row({kNa, kNa, kNa, kNa, std::string("unavailable: ") + e.what()});
  }
  emit(c.output_dir, run.manifest, "mean_valence.tsv", mv.str());

  std::vector<std::optional<double>> internal;
  std::size_t rated = 0;
  for (const auto& p : profiles) {
    internal.push_back(p.internal_valence);
    rated += p.internal_valence.has_value();
  }
  emit_predictive(ctx, run, "predictive_internal", "internal", profiles, internal, 4,
                  rated == 0 ? "corpus has no valence ratings" : "");
  std::vector<std::optional<double>> human(profiles.size());
  std::string human_reason = "no human category ratings fixture configured";
  if (c.human_ratings) {
    const auto table = load_category_ratings(*c.human_ratings);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      if (const auto it = table.find(profiles[i].category); it != table.end()) human[i] = it->second;
    }
    human_reason.clear();
  }
  emit_predictive(ctx, run, "predictive_human", "human", profiles, human, 5, human_reason);

  stats::TrendOptions topts;
  topts.resamples = c.analysis.trend_resamples;
  topts.seed = stream_seed(c.seeds.stats, 6);
  Table trends(run.manifest, {"slope of per-category prevalence per response order; cluster-bootstrap interval"});
  trends.header({"dimension", "slope", "se", "lower", "upper", "p", "n_categories", "prevalence_first", "prevalence_last"});
  Table by_order(run.manifest, {"mean prevalence across categories at each response order"});
  try {
    const auto fits = stats::trend_over_responses(responses, run.registry, topts);
    for (const auto& f : fits) {
      std::optional<double> first, last;
      for (const auto& v : f.by_order) {
        if (v && !first) first = v;
        if (v) last = v;
      }
      trends.row({f.name, num(f.slope), num(f.se), num(f.lower), num(f.upper), num(f.p), std::to_string(f.n_categories),
                  num(first), num(last)});
    }
    std::vector<std::string> head{"order"};
    for (const auto& f : fits) head.push_back(f.name);
    by_order.row(head);
    for (std::size_t o = 0; o < static_cast<std::size_t>(topts.max_order); ++o) {
      std::vector<std::string> cells{std::to_string(o + 1)};
      bool any = false;
      for (const auto& f : fits) {
        cells.push_back(num(f.by_order[o]));
        any = any || f.by_order[o].has_value();
      }
      if (any) by_order.row(cells);
    }
  } catch (const Error& e) {
    trends.row({"unavailable", e.what(), "", "", "", "", "", "", ""});
  }
  emit(c.output_dir, run.manifest, "trends.tsv", trends.str());
  emit(c.output_dir, run.manifest, "trend_by_order.tsv", by_order.str());

  Table sheet(run.manifest, {"per-category profile rows sorted by prevalence; second value is direction where the "
                             "dimension has one, valence otherwise"});
  sheet.header({"category", "rank", "dimension", "prevalence", "response_rate", "value_kind", "value"});
  Table wide(run.manifest);
  std::vector<std::string> head{"category", "n_terms", "n_responses", "overall_valence", "internal_valence"};
  for (std::size_t d = 0; d < run.registry.size(); ++d) {
    for (const char* k : {"prevalence:", "response_rate:", "direction:", "valence:"}) head.push_back(k + run.registry.name(d));
  }
  wide.row(head);
  for (const auto& p : profiles) {
    std::vector<std::size_t> order(run.registry.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p.prevalence[a] > p.prevalence[b]; });
    for (std::size_t r = 0; r < order.size(); ++r) {
      const auto d = order[r];
      const bool dir = run.registry.has_direction(d);
      sheet.row({p.category, std::to_string(r + 1), run.registry.name(d), num(p.prevalence[d]), num(p.response_rate[d]),
                 dir ? "direction" : "valence", num(dir ? p.direction[d] : p.valence[d])});
    }
    std::vector<std::string> cells{p.category, std::to_string(p.n_terms), std::to_string(p.n_responses),
                                   num(p.overall_valence), num(p.internal_valence)};
    for (std::size_t d = 0; d < run.registry.size(); ++d) {
      cells.push_back(num(p.prevalence[d]));
      cells.push_back(num(p.response_rate[d]));
      cells.push_back(num(p.direction[d]));
      cells.push_back(num(p.valence[d]));
    }
    wide.row(cells);
  }
  emit(c.output_dir, run.manifest, "profiles.tsv", sheet.str());
  emit(c.output_dir, run.manifest, "category_profiles.tsv", wide.str());
  write_manifest(c.output_dir, run.manifest);
  say(ctx, "analyze: " + std::to_string(profiles.size()) + " categories, " + std::to_string(agg.excluded.size()) +
               " excluded");
}

void cmd_report_all(Context& ctx) {
  cmd_audit(ctx);
  cmd_code(ctx);
  if (ctx.config.embeddings) {
    cmd_cluster(ctx);
  } else {
    say(ctx, "cluster: skipped (no embeddings configured)");
  }
  cmd_analyze(ctx);
}

}  // namespace stereotax::report
