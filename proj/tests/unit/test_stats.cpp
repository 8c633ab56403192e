#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "stereotax/error.hpp"
#include "stereotax/rng.hpp"
#include "stereotax/stats.hpp"

using namespace stereotax;
using namespace stereotax::stats;
using lexicon::DimensionRegistry;

namespace {

const DimensionRegistry& reg() {
  static const auto r = DimensionRegistry::standard();
  return r;
}

std::size_t dim(const char* name) { return *reg().resolve(name); }

CodedResponse response(const std::string& cat, const std::string& term, int order,
                       lexicon::DimensionCoding coding) {
  return {cat, term, order, "w" + std::to_string(order), std::move(coding)};
}

lexicon::DimensionCoding directed(std::size_t d, double direction, double valence) {
  auto c = gen::coding_with(14, {d}, valence);
  c.direction[d] = direction;
  return c;
}

CategoryProfile flat_profile(const std::string& name, std::vector<double> prevalence) {
  CategoryProfile p;
  p.category = name;
  p.prevalence = prevalence;
  p.response_rate = prevalence;
  p.direction.assign(prevalence.size(), std::nullopt);
  p.valence.assign(prevalence.size(), std::nullopt);
  p.overall_valence = 0.0;
  return p;
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

TEST_CASE("aggregate examples") {
  const auto soc = dim("Sociability");
  std::vector<CodedResponse> rs;
  for (int o = 1; o <= 50; ++o) rs.push_back(response("A", "a1", o, o <= 10 ? directed(soc, 1, 0.5) : gen::coding_with(14, {})));
  for (int o = 1; o <= 10; ++o) rs.push_back(response("B", "b1", o, o <= 2 ? directed(soc, 1, 1) : gen::coding_with(14, {})));
  for (int o = 1; o <= 10; ++o) rs.push_back(response("B", "b2", o, o <= 4 ? directed(soc, -1, 0) : gen::coding_with(14, {})));
  std::vector<TermRating> ratings{{"A", "a1", 4}, {"B", "b1", 2}, {"B", "b2", std::nullopt}};
  const auto agg = aggregate(rs, ratings, 14);
  REQUIRE(agg.profiles.size() == 2);
  const auto& a = agg.profiles[0];
  CHECK(a.prevalence[soc] == doctest::Approx(0.2));
  CHECK(a.response_rate[soc] == doctest::Approx(10.0));
  CHECK(a.direction[soc] == 1.0);
  CHECK(a.internal_valence == 4.0);
  CHECK(a.n_terms == 1);
  CHECK(a.n_responses == 50);
  const auto& b = agg.profiles[1];
  CHECK(b.prevalence[soc] == doctest::Approx(0.3));
  CHECK(*b.direction[soc] == doctest::Approx(0.0));
  CHECK(*b.valence[soc] == doctest::Approx(0.5));
  // Pooled over the six matched responses: (2 * 1 + 4 * 0) / 6.
  CHECK(*b.overall_valence == doctest::Approx(1.0 / 3.0));
  CHECK(b.internal_valence == 2.0);
  CHECK(!b.prevalence.empty());
  CHECK(b.prevalence[dim("Morality")] == 0.0);
  CHECK(!b.direction[dim("Morality")]);

  const std::vector<std::string> declared{"A", "B", "Empty"};
  const auto with_empty = aggregate(rs, ratings, 14, declared);
  REQUIRE(with_empty.excluded.size() == 1);
  CHECK(with_empty.excluded[0].category == "Empty");

  const std::vector<std::string> only_a{"A"};
  CHECK_THROWS_AS(aggregate(rs, ratings, 14, only_a), Error);
}

TEST_CASE("aggregation oracle, bounds and duplication invariance") {
  Rng rng(5);
  std::vector<CodedResponse> rs;
  for (int c = 0; c < 6; ++c) {
    for (int t = 0; t < 1 + c % 3; ++t) {
      const auto n = 5 + static_cast<int>(rng.below(20));
      for (int o = 1; o <= n; ++o) {
        std::vector<std::size_t> present;
        for (std::size_t d = 0; d < 14; ++d) {
          if (rng.uniform() < 0.15) present.push_back(d);
        }
        auto coding = gen::coding_with(14, present, rng.uniform() * 2 - 1);
        for (const auto d : present) {
          if (reg().has_direction(d)) coding.direction[d] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        }
        rs.push_back(response("c" + std::to_string(c), "t" + std::to_string(t), o, coding));
      }
    }
  }
  const auto agg = aggregate(rs, {}, 14);

  // Independent recomputation: per term shares, then the mean over terms.
  for (const auto& p : agg.profiles) {
    std::map<std::string, std::pair<std::vector<double>, double>> terms;
    for (const auto& r : rs) {
      if (r.category != p.category) continue;
      auto& [hits, n] = terms[r.term];
      hits.resize(14, 0.0);
      for (std::size_t d = 0; d < 14; ++d) hits[d] += r.coding.presence[d];
      n += 1;
    }
    for (std::size_t d = 0; d < 14; ++d) {
      double sum = 0;
      for (const auto& [t, hn] : terms) sum += hn.first[d] / hn.second;
      CHECK(p.prevalence[d] == doctest::Approx(sum / terms.size()).epsilon(1e-12));
      CHECK(p.prevalence[d] >= 0.0);
      CHECK(p.prevalence[d] <= 1.0);
      if (p.direction[d]) CHECK(std::fabs(*p.direction[d]) <= 1.0);
      if (p.valence[d]) CHECK(std::fabs(*p.valence[d]) <= 1.0);
    }
  }

  auto doubled = rs;
  for (const auto& r : rs) {
    auto copy = r;
    copy.term += "_copy";
    doubled.push_back(copy);
  }
  const auto agg2 = aggregate(doubled, {}, 14);
  REQUIRE(agg2.profiles.size() == agg.profiles.size());
  for (std::size_t i = 0; i < agg.profiles.size(); ++i) {
    const auto& p = agg.profiles[i];
    const auto& q = agg2.profiles[i];
    for (std::size_t d = 0; d < 14; ++d) {
      CHECK(q.prevalence[d] == doctest::Approx(p.prevalence[d]).epsilon(1e-12));
      CHECK(q.response_rate[d] == doctest::Approx(p.response_rate[d]).epsilon(1e-12));
      CHECK(q.direction[d].has_value() == p.direction[d].has_value());
      if (p.direction[d]) CHECK(*q.direction[d] == doctest::Approx(*p.direction[d]).epsilon(1e-12));
      if (p.valence[d]) CHECK(*q.valence[d] == doctest::Approx(*p.valence[d]).epsilon(1e-12));
    }
    CHECK(*q.overall_valence == doctest::Approx(*p.overall_valence).epsilon(1e-12));
  }
}

TEST_CASE("summarize_dimensions") {
  std::vector<double> a(14, 0.1), b(14, 0.3);
  std::vector<CategoryProfile> two{flat_profile("x", a), flat_profile("y", b)};
  const auto rows = summarize_dimensions(two, reg());
  REQUIRE(rows.size() == 14);
  CHECK(*rows[0].prevalence.mean == doctest::Approx(0.2));
  CHECK(*rows[0].prevalence.se == doctest::Approx(0.1));
  CHECK(!rows[0].direction.mean);

  std::vector<CategoryProfile> same{flat_profile("x", a), flat_profile("y", a), flat_profile("z", a)};
  CHECK(*summarize_dimensions(same, reg())[3].prevalence.se == 0.0);

  std::vector<double> c(14, 0.2);
  c[dim("Morality")] = 0.9;
  std::vector<CategoryProfile> ranked{flat_profile("x", c), flat_profile("y", c)};
  const auto sorted = sorted_by_mean(summarize_dimensions(ranked, reg()), Metric::kPrevalence);
  CHECK(sorted.front().name == "Morality");
}

TEST_CASE("omnibus permutation test") {
  std::vector<CategoryProfile> equal;
  Rng rng(3);
  for (int c = 0; c < 30; ++c) equal.push_back(flat_profile("c" + std::to_string(c), std::vector<double>(5, rng.uniform())));
  const auto null = omnibus_dimension_test(equal, Metric::kPrevalence, 1, 999);
  CHECK(null.p >= 0.9);
  CHECK(null.method == "permutation");
  CHECK(null.df == 4.0);

  const auto strong = gen::profiles(50, {0.1, 0.5, 0.1, 0.5}, 0.02, 8);
  const auto t = omnibus_dimension_test(strong, Metric::kPrevalence, 2, 9999);
  CHECK(t.p < 0.001);
  CHECK(t.p >= 1.0 / 10000);
  CHECK(t.resamples == 9999);
  const auto again = omnibus_dimension_test(strong, Metric::kPrevalence, 2, 9999);
  CHECK(again.p == t.p);
  CHECK(again.statistic == t.statistic);

  std::vector<CategoryProfile> one_dim{flat_profile("a", {0.1}), flat_profile("b", {0.2})};
  CHECK_THROWS_AS(omnibus_dimension_test(one_dim, Metric::kPrevalence, 1, 99), Error);
}

TEST_CASE("Holm adjustment") {
  const std::vector<double> p{0.01, 0.04, 0.03};
  const auto adj = holm(p);
  CHECK(adj[0] == doctest::Approx(0.03));
  CHECK(adj[1] == doctest::Approx(0.06));
  CHECK(adj[2] == doctest::Approx(0.06));
  const std::vector<double> big{0.5, 0.9};
  CHECK(holm(big)[1] == 1.0);
}

TEST_CASE("compact letters") {
  const std::vector<std::pair<std::size_t, std::size_t>> ac{{0, 2}};
  CHECK(compact_letters(3, ac) == std::vector<std::string>{"a", "ab", "b"});
  CHECK(compact_letters(3, {}) == std::vector<std::string>{"a", "a", "a"});
  const std::vector<std::pair<std::size_t, std::size_t>> all{{0, 1}, {0, 2}, {1, 2}};
  CHECK(compact_letters(3, all) == std::vector<std::string>{"a", "b", "c"});
  const std::vector<std::pair<std::size_t, std::size_t>> chain{{0, 2}, {0, 3}, {1, 3}};
  CHECK(compact_letters(4, chain) == std::vector<std::string>{"a", "ab", "bc", "c"});
}

TEST_CASE("pairwise letters") {
  SUBCASE("overlap pattern") {
    // A - C is a constant 0.04; B carries symmetric noise around the base.
    std::vector<CategoryProfile> ps;
    for (int c = 0; c < 50; ++c) {
      const double base = 0.4 + 0.002 * c;
      const double v = (c % 2 ? 0.1 : -0.1);
      ps.push_back(flat_profile("c" + std::to_string(c), {base + 0.02, base + v, base - 0.02}));
    }
    const auto g = pairwise_letters(ps, Metric::kPrevalence, 0.05, 3, 2000);
    CHECK(g.dimensions == std::vector<std::size_t>{0, 1, 2});
    CHECK(g.letters == std::vector<std::string>{"a", "ab", "b"});
    for (const auto& pair : g.pairs) {
      const bool shares = std::any_of(g.letters_of(pair.a).begin(), g.letters_of(pair.a).end(),
                                      [&](char l) { return g.letters_of(pair.b).find(l) != std::string::npos; });
      CHECK(shares == !pair.rejected);
    }
  }

  SUBCASE("identical dimensions share, separated ones do not") {
    const auto ps = gen::profiles(40, {0.3, 0.3, 0.3, 0.8}, 0.03, 12);
    std::vector<CategoryProfile> ident = ps;
    for (auto& p : ident) p.prevalence[1] = p.prevalence[0];
    const auto g = pairwise_letters(ident, Metric::kPrevalence, 0.05, 4, 2000);
    const auto l0 = g.letters_of(0), l1 = g.letters_of(1), l3 = g.letters_of(3);
    CHECK(std::any_of(l0.begin(), l0.end(), [&](char c) { return l1.find(c) != std::string::npos; }));
    CHECK(std::none_of(l0.begin(), l0.end(), [&](char c) { return l3.find(c) != std::string::npos; }));
  }
}

TEST_CASE("one-sample t") {
  const std::vector<double> zeros(10, 0.0);
  const auto z = one_sample_t(zeros);
  CHECK(z.statistic == 0.0);
  CHECK(z.p == 1.0);
  const std::vector<double> ones(10, 1.0);
  CHECK(one_sample_t(ones).p < 0.001);
  const std::vector<double> v{1, 2, 3, 4, 5};
  const auto t = one_sample_t(v);
  CHECK(t.statistic == doctest::Approx(3.0 / std::sqrt(2.5 / 5.0)));
  CHECK(t.df == 4.0);
  CHECK(t.p == doctest::Approx(0.0132355995636827).epsilon(1e-9));
  CHECK(*t.estimate == 3.0);
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(one_sample_t(one), Error);
}

TEST_CASE("Pearson") {
  const std::vector<double> x{1, 2, 3, 4, 6}, y{2, 1, 4, 3, 7};
  CHECK(pearson(x, x) == doctest::Approx(1.0));
  std::vector<double> scaled;
  for (double v : y) scaled.push_back(3.5 * v - 2);
  CHECK(pearson(x, scaled) == doctest::Approx(pearson(x, y)).epsilon(1e-12));
  // Hand value: sxy 15.6, sxx 14.8, syy 21.2.
  CHECK(pearson(x, y) == doctest::Approx(15.6 / std::sqrt(14.8 * 21.2)));
  const std::vector<double> flat(5, 1.0);
  CHECK_THROWS_AS(pearson(x, flat), Error);
  const std::vector<double> two{1, 2};
  CHECK_THROWS_AS(pearson(two, two), Error);
  const std::vector<std::optional<double>> ox{1, std::nullopt, 3, 4, 6}, oy{2, 5, 4, 3, 7};
  const std::vector<double> cx{1, 3, 4, 6}, cy{2, 4, 3, 7};
  CHECK(pearson(ox, oy) == doctest::Approx(pearson(cx, cy)));
}

TEST_CASE("OLS with robust errors") {
  // Ten points, two predictors, against the normal-equation oracle.
  const std::vector<std::vector<double>> xr{{1, 3}, {2, 1}, {3, 4}, {4, 1}, {5, 5}, {6, 9}, {7, 2}, {8, 6}, {9, 5}, {10, 3}};
  const std::vector<double> yv{3.1, 4.2, 6.8, 7.1, 9.9, 13.2, 12.1, 15.8, 17.2, 18.1};
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(yv.data(), 10);
  const auto fit = ols_robust(y, to_matrix(xr), {"a", "b"});
  const auto expect = oracle::normal_equations(xr, yv);
  REQUIRE(fit.coefficients.size() == 3);
  for (int j = 0; j < 3; ++j) CHECK(std::fabs(fit.coefficients(j) - expect[j]) <= 1e-10);
  CHECK(fit.names == std::vector<std::string>{"(intercept)", "a", "b"});
  CHECK(fit.r2 >= 0.0);
  CHECK(fit.r2 <= 1.0);
  CHECK(std::isfinite(fit.aic));
  CHECK(fit.aic == doctest::Approx(2.0 * 4 - 2.0 * fit.log_likelihood));
  CHECK(fit.log_likelihood == doctest::Approx(-5.0 * (std::log(2 * M_PI * fit.ssr / 10) + 1)));

  // HC3 by direct formula.
  Eigen::MatrixXd X(10, 3);
  X.col(0).setOnes();
  X.rightCols(2) = to_matrix(xr);
  const Eigen::MatrixXd inv = (X.transpose() * X).inverse();
  const Eigen::VectorXd e = y - X * fit.coefficients;
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < 10; ++i) {
    const double h = X.row(i) * inv * X.row(i).transpose();
    meat += X.row(i).transpose() * X.row(i) * (e(i) * e(i) / ((1 - h) * (1 - h)));
  }
  const Eigen::MatrixXd cov = inv * meat * inv;
  for (int j = 0; j < 3; ++j) CHECK(fit.robust_se(j) == doctest::Approx(std::sqrt(cov(j, j))).epsilon(1e-9));

  // Exact linear data.
  Eigen::VectorXd exact(10);
  for (int i = 0; i < 10; ++i) exact(i) = 2.0 + 0.5 * xr[i][0] - xr[i][1];
  const auto perfect = ols_robust(exact, to_matrix(xr));
  CHECK(perfect.r2 == doctest::Approx(1.0));
  CHECK(perfect.robust_se.maxCoeff() < 1e-6);

  Eigen::MatrixXd constant = to_matrix(xr);
  constant.col(1).setConstant(4.0);
  CHECK_THROWS_AS(ols_robust(y, constant), Error);
  CHECK_THROWS_AS(ols_robust(y.head(3), to_matrix(xr).topRows(3)), Error);
}

TEST_CASE("elastic net and lasso") {
  Rng rng(41);
  const int n = 200, p = 10;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
    y(i) = 1.0 + 0.3 * rng.normal();
    for (int j = 0; j < p; ++j) y(i) += (j - 4.5) * 0.2 * x(i, j);
  }
  const auto ols = ols_robust(y, x);
  ElasticNetOptions opts;
  const auto tiny = elastic_net(y, x, 1e-10, opts);
  CHECK(std::fabs(tiny.intercept - ols.coefficients(0)) <= 1e-4);
  for (int j = 0; j < p; ++j) CHECK(std::fabs(tiny.coefficients(j) - ols.coefficients(j + 1)) <= 1e-4);

  const double top = lambda_max(y, x, 1.0);
  const auto zero = elastic_net(y, x, top * 1.0001, opts);
  CHECK(zero.coefficients.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.intercept == doctest::Approx(y.mean()));
  CHECK(elastic_net(y, x, top * 0.9, opts).coefficients.cwiseAbs().maxCoeff() > 0.0);

  ElasticNetOptions ridge;
  ridge.alpha = 0.0;
  const auto r = elastic_net(y, x, 1e-10, ridge);
  for (int j = 0; j < p; ++j) CHECK(std::fabs(r.coefficients(j) - ols.coefficients(j + 1)) <= 1e-4);

  Eigen::VectorXd flat = Eigen::VectorXd::Constant(n, 2.0);
  CHECK_THROWS_AS(cv_regularized(flat, x, opts), Error);
  opts.folds = 2;
  CHECK_THROWS_AS(cv_regularized(y, x, opts), Error);
}

TEST_CASE("cross-validated lasso recovers a sparse support") {
  int covered = 0;
  const int seeds = 50;
  for (int s = 1; s <= seeds; ++s) {
    Rng rng(1000 + s);
    const int n = 200, p = 15;
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
      y(i) = 2.0 * x(i, 0) - 1.5 * x(i, 4) + 1.0 * x(i, 9) + 0.3 * rng.normal();
    }
    ElasticNetOptions opts;
    opts.seed = s;
    opts.tolerance = 1e-9;
    const auto fit = cv_regularized(y, x, opts);
    const auto& nz = fit.nonzero;
    covered += std::find(nz.begin(), nz.end(), 0) != nz.end() && std::find(nz.begin(), nz.end(), 4) != nz.end() &&
               std::find(nz.begin(), nz.end(), 9) != nz.end();
    CHECK(fit.lambdas.size() == 100);
    CHECK(fit.lambdas.front() / fit.lambdas.back() == doctest::Approx(1e4));
    CHECK(fit.cv_error[fit.selected] == *std::min_element(fit.cv_error.begin(), fit.cv_error.end()));
    CHECK(fit.nonzero.size() <= 15);
    for (std::size_t i = 1; i < fit.path_nonzero.size(); ++i) CHECK(fit.path_nonzero[i] >= fit.path_nonzero[i - 1]);
    CHECK(fit.path_nonzero.front() == 0);
  }
  CHECK(covered >= 45);
}

TEST_CASE("predictive comparison") {
  const std::vector<double> means(14, 0.2);
  auto ps = gen::profiles(60, means, 0.08, 77);
  const auto morality = dim("Morality");

  SUBCASE("outcome equal to overall valence") {
    std::vector<std::optional<double>> outcome;
    for (const auto& p : ps) outcome.push_back(p.overall_valence);
    const auto cmp = predictive_comparison(ps, outcome, reg());
    CHECK(cmp.baseline.r2 == doctest::Approx(1.0));
    CHECK(std::fabs(cmp.delta_r2) < 0.01);
    CHECK(cmp.n == 60);
  }

  SUBCASE("Morality-driven outcome") {
    Rng rng(5);
    std::vector<std::optional<double>> outcome;
    for (const auto& p : ps) outcome.push_back(0.5 * p.prevalence[morality] + 0.01 * rng.normal());
    const auto cmp = predictive_comparison(ps, outcome, reg());
    CHECK(cmp.delta_r2 > 0.0);
    REQUIRE(cmp.table5.size() == 14);
    for (std::size_t d = 0; d < 14; ++d) CHECK(cmp.table5[d].dimension == d);
    CHECK(cmp.table5[morality].retained);
    CHECK(*cmp.table5[morality].r_prevalence > 0.9);
    CHECK(cmp.table5[morality].max_metric == "prevalence");
    const auto& names = cmp.full.names;
    const auto at = std::find(names.begin(), names.end(), "prevalence:Morality") - names.begin();
    CHECK(cmp.full.model.coefficients(at) > 0.0);
    REQUIRE(cmp.lr_chi2.has_value());
    CHECK(*cmp.lr_chi2 >= 0.0);
    CHECK(*cmp.lr_p < 0.001);
    CHECK(cmp.table5[morality].stars == "***");
  }

  SUBCASE("too few categories or outcomes") {
    std::vector<std::optional<double>> sparse(ps.size());
    for (std::size_t i = 0; i < 10; ++i) sparse[i] = 1.0 * i;
    CHECK_THROWS_AS(predictive_comparison(ps, sparse, reg()), Error);
    std::vector<std::optional<double>> short_outcome(3, 1.0);
    CHECK_THROWS_AS(predictive_comparison(ps, short_outcome, reg()), Error);
  }
}

TEST_CASE("nested LR statistic is never negative") {
  for (std::uint64_t s = 1; s <= 20; ++s) {
    auto ps = gen::profiles(40, std::vector<double>(14, 0.2), 0.05, s);
    Rng rng(s);
    std::vector<std::optional<double>> outcome;
    for (std::size_t i = 0; i < ps.size(); ++i) outcome.push_back(rng.normal());
    const auto cmp = predictive_comparison(ps, outcome, reg());
    if (cmp.lr_chi2) CHECK(*cmp.lr_chi2 >= 0.0);
  }
}

TEST_CASE("trend over responses") {
  const auto soc = dim("Sociability");
  TrendOptions opts;
  opts.resamples = 500;

  SUBCASE("linear ramp") {
    const auto corpus = gen::ramp_corpus(87, 16, 14, soc, 0.08, 0.18, 3);
    const auto fits = trend_over_responses(corpus, reg(), opts);
    REQUIRE(fits.size() == 14);
    const double truth = 0.10 / 49.0;
    CHECK(std::fabs(fits[soc].slope - truth) <= 0.2 * truth);
    CHECK(fits[soc].lower <= truth);
    CHECK(fits[soc].upper >= truth);
    CHECK(fits[soc].p < 0.001);
    CHECK(fits[soc].n_categories == 87);
    CHECK(fits[soc].by_order.size() == 50);
    CHECK(fits[dim("Morality")].slope == 0.0);
  }

  SUBCASE("order-independent corpus") {
    const auto corpus = gen::ramp_corpus(40, 10, 14, soc, 0.2, 0.2, 9);
    const auto fits = trend_over_responses(corpus, reg(), opts);
    CHECK(std::fabs(fits[soc].slope) < 0.001);
    CHECK(fits[soc].p > 0.05);
  }

  SUBCASE("all-match dimension") {
    const auto corpus = gen::ramp_corpus(10, 4, 14, soc, 1.0, 1.0, 1);
    CHECK(trend_over_responses(corpus, reg(), opts)[soc].slope == 0.0);
  }

  SUBCASE("a single order is an error") {
    auto corpus = gen::ramp_corpus(5, 3, 14, soc, 0.1, 0.2, 1);
    for (auto& r : corpus) r.order = 1;
    CHECK_THROWS_AS(trend_over_responses(corpus, reg(), opts), Error);
  }

  SUBCASE("seeded determinism") {
    const auto corpus = gen::ramp_corpus(20, 4, 14, soc, 0.1, 0.3, 2);
    const auto a = trend_over_responses(corpus, reg(), opts);
    const auto b = trend_over_responses(corpus, reg(), opts);
    CHECK(a[soc].lower == b[soc].lower);
    CHECK(a[soc].p == b[soc].p);
  }
}
