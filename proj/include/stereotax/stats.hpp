#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "stereotax/lexicon.hpp"

namespace stereotax::stats {

/// One coded response with the stimulus it answered.
struct CodedResponse {
  std::string category;
  std::string term;
  int order = 0;
  std::string normalized;
  lexicon::DimensionCoding coding;
};

struct TermRating {
  std::string category;
  std::string term;
  std::optional<int> rating;  // 1..5
};

struct CategoryProfile {
  std::string category;
  std::vector<double> prevalence;     // per dimension, in [0,1]
  std::vector<double> response_rate;  // prevalence x mean responses per term
  std::vector<std::optional<double>> direction;
  std::vector<std::optional<double>> valence;
  std::optional<double> overall_valence;   // mean over matched responses
  std::optional<double> internal_valence;  // mean 1..5 rating over terms
  std::size_t n_terms = 0;
  std::size_t n_responses = 0;

  bool operator==(const CategoryProfile&) const = default;
};

struct Exclusion {
  std::string category;
  std::string reason;

  bool operator==(const Exclusion&) const = default;
};

struct Aggregation {
  std::vector<CategoryProfile> profiles;
  std::vector<Exclusion> excluded;
};

/// Per term, then mean over terms. Categories follow `categories` when
/// given (those without coded terms are excluded), else first appearance.
Aggregation aggregate(std::span<const CodedResponse> responses, std::span<const TermRating> ratings,
                      std::size_t n_dimensions, std::span<const std::string> categories = {});

enum class Metric { kPrevalence, kDirection, kValence };

std::string_view to_string(Metric metric);
std::optional<double> metric_value(const CategoryProfile& profile, Metric metric, std::size_t dim);

struct MetricSummary {
  std::optional<double> mean;
  std::optional<double> se;  // sd (n-1) / sqrt(n); needs n >= 2
  std::size_t n = 0;

  bool operator==(const MetricSummary&) const = default;
};

struct DimensionSummary {
  std::size_t dimension = 0;
  std::string name;
  MetricSummary prevalence;
  MetricSummary response_rate;
  MetricSummary direction;
  MetricSummary valence;

  const MetricSummary& get(Metric metric) const;
};

/// Across-category mean and SE per dimension, in registry order.
std::vector<DimensionSummary> summarize_dimensions(std::span<const CategoryProfile> profiles,
                                                   const lexicon::DimensionRegistry& registry);

/// Summary rows ordered by the metric's mean, descending; rows without a
/// mean go last in registry order.
std::vector<DimensionSummary> sorted_by_mean(std::vector<DimensionSummary> rows, Metric metric);

struct StatTest {
  double statistic = 0.0;
  std::optional<double> df;
  std::size_t resamples = 0;
  double p = 1.0;
  std::string method;  // permutation | cluster-bootstrap | t
  std::optional<double> estimate;
  std::uint64_t seed = 0;
};

/// Permutation test of equal dimension means: values are shuffled across
/// the non-missing dimensions within each category. The statistic is the
/// variance of the dimension means; p = (1 + #{T* >= T}) / (1 + B).
StatTest omnibus_dimension_test(std::span<const CategoryProfile> profiles, Metric metric, std::uint64_t seed,
                                std::size_t resamples = 9999);

struct PairTest {
  std::size_t a = 0;
  std::size_t b = 0;
  double difference = 0.0;  // mean(a) - mean(b)
  double se = 0.0;
  double p = 1.0;
  double p_adjusted = 1.0;  // Holm
  bool rejected = false;
};

struct LetterGroups {
  std::vector<std::size_t> dimensions;  // tested dimensions, mean descending
  std::vector<std::string> letters;     // aligned with `dimensions`
  std::vector<PairTest> pairs;
  double alpha = 0.05;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;

  /// Letters for a registry dimension; empty when it was not tested.
  std::string letters_of(std::size_t dimension) const;
};

/// Holm-adjusted p-values, same order as the input.
std::vector<double> holm(std::span<const double> p);

/// Compact letter display from the rejection relation among `n` items
/// listed in display order; items share a letter iff not rejected.
std::vector<std::string> compact_letters(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> rejected);

/// Pairwise differences of dimension means with cluster-bootstrap standard
/// errors (categories resampled), Wald p-values, Holm correction.
LetterGroups pairwise_letters(std::span<const CategoryProfile> profiles, Metric metric, double alpha, std::uint64_t seed,
                              std::size_t resamples = 2000);

/// One-sample t of the values against zero; estimate = mean.
StatTest one_sample_t(std::span<const double> values);

/// One-sample t of category overall valences against zero.
StatTest mean_valence_test(std::span<const CategoryProfile> profiles);

/// Pearson correlation over complete pairs; throws on n < 3 or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);
double pearson(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y);

struct RegressionFit {
  std::vector<std::string> names;  // "(intercept)" first
  Eigen::VectorXd coefficients;
  Eigen::VectorXd robust_se;  // HC3
  Eigen::VectorXd p_values;   // t with n - p df on the robust SE
  double r2 = 0.0;
  double ssr = 0.0;
  double log_likelihood = 0.0;
  double aic = 0.0;
  std::size_t n = 0;
};

/// OLS with intercept. Throws Error(kAnalysis) when n <= p + 1 or X is
/// rank deficient after adding the intercept.
RegressionFit ols_robust(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, std::vector<std::string> names = {});

struct ElasticNetOptions {
  double alpha = 1.0;  // mixing: 1 = lasso, 0 = ridge
  std::size_t folds = 10;
  std::size_t n_lambda = 100;
  double lambda_min_ratio = 1e-4;
  double tolerance = 1e-12;
  std::size_t max_sweeps = 100000;
  std::uint64_t seed = 1;
};

struct ElasticNetModel {
  double lambda = 0.0;
  double intercept = 0.0;
  Eigen::VectorXd coefficients;  // original predictor scale
  std::size_t sweeps = 0;
};

/// Minimizes (1/2n)|y - b0 - Xb|^2 + lambda (alpha |b|_1 + (1 - alpha)/2 |b|^2)
/// on standardized predictors; constant predictors get coefficient 0.
ElasticNetModel elastic_net(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, double lambda,
                            const ElasticNetOptions& options = {});

/// Smallest penalty at which every slope is zero.
double lambda_max(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, double alpha);

struct RegularizedFit {
  std::vector<std::string> names;
  std::vector<double> lambdas;  // descending
  std::vector<double> cv_error;
  std::vector<double> cv_se;
  std::vector<std::size_t> path_nonzero;  // full-data fit at each lambda
  std::size_t selected = 0;
  ElasticNetModel model;
  std::vector<std::size_t> nonzero;
  double r2 = 0.0;
  double alpha = 1.0;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
};

/// Penalty grid from lambda_max down n_lambda log-spaced steps, seeded
/// k-fold CV; the selected penalty minimizes mean CV error (ties go to the
/// larger penalty). Throws on zero-variance y or n < folds.
RegularizedFit cv_regularized(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const ElasticNetOptions& options,
                              std::vector<std::string> names = {});

struct Table5Row {
  std::size_t dimension = 0;
  std::string name;
  std::optional<double> r_prevalence;
  std::optional<double> r_direction;
  std::optional<double> r_valence;
  std::string max_metric;  // metric with the largest |r|
  bool retained = false;   // any of the dimension's predictors nonzero
  std::string stars;       // from the unregularized robust OLS; empty if unavailable
};

struct PredictiveComparison {
  std::size_t n = 0;
  RegressionFit baseline;
  RegularizedFit full;
  double delta_r2 = 0.0;
  std::optional<double> lr_chi2;
  std::optional<double> lr_df;
  std::optional<double> lr_p;
  std::vector<Table5Row> table5;
  std::size_t imputed_values = 0;
  std::string stars_note;
};

struct PredictiveOptions {
  ElasticNetOptions net;
  std::size_t min_categories = 30;
};

/// Baseline: outcome ~ overall valence (robust OLS). Full: CV-regularized
/// outcome ~ overall valence + every prevalence + direction (directional
/// dimensions) or valence (others); missing predictors are mean-imputed.
/// `outcome` is aligned with `profiles`; categories with no outcome or no
/// overall valence are skipped.
PredictiveComparison predictive_comparison(std::span<const CategoryProfile> profiles,
                                           std::span<const std::optional<double>> outcome,
                                           const lexicon::DimensionRegistry& registry,
                                           const PredictiveOptions& options = {});

struct TrendFit {
  std::size_t dimension = 0;
  std::string name;
  double slope = 0.0;  // mean over categories of per-category slopes
  double se = 0.0;     // cluster bootstrap
  double lower = 0.0;
  double upper = 0.0;
  double p = 1.0;
  std::size_t n_categories = 0;
  std::vector<std::optional<double>> by_order;  // mean prevalence across categories, orders 1..max
};

struct TrendOptions {
  int max_order = 50;
  std::size_t resamples = 2000;
  double level = 0.95;
  std::uint64_t seed = 1;
};

/// Per category and order o, the share of terms whose order-o response
/// matches the dimension; least-squares slope over o per category; mean
/// slope across categories with a cluster-bootstrap interval and Wald p.
std::vector<TrendFit> trend_over_responses(std::span<const CodedResponse> responses,
                                           const lexicon::DimensionRegistry& registry, const TrendOptions& options = {});

}  // namespace stereotax::stats
