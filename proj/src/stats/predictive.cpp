#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "stereotax/error.hpp"
#include "stereotax/stats.hpp"

namespace stereotax::stats {
namespace {

struct Column {
  std::string name;
  std::vector<std::optional<double>> raw;  // before imputation, aligned with rows
  Eigen::VectorXd values;
  std::size_t imputed = 0;
};

Column make_column(std::string name, std::vector<std::optional<double>> raw) {
  Column c;
  c.name = std::move(name);
  c.raw = std::move(raw);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : c.raw) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  const double fill = n > 0 ? sum / static_cast<double>(n) : 0.0;
  c.values.resize(static_cast<Eigen::Index>(c.raw.size()));
  for (std::size_t i = 0; i < c.raw.size(); ++i) {
    c.values(static_cast<Eigen::Index>(i)) = c.raw[i].value_or(fill);
    if (!c.raw[i]) ++c.imputed;
  }
  return c;
}

bool is_constant(const Eigen::VectorXd& v) { return v.size() == 0 || (v.array() == v(0)).all(); }

std::optional<double> safe_pearson(const std::vector<std::optional<double>>& x, const Eigen::VectorXd& y) {
  std::vector<std::optional<double>> yy(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) yy[static_cast<std::size_t>(i)] = y(i);
  try {
    return pearson(x, yy);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string stars_for(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

}  // namespace

PredictiveComparison predictive_comparison(std::span<const CategoryProfile> profiles,
                                           std::span<const std::optional<double>> outcome,
                                           const lexicon::DimensionRegistry& registry,
                                           const PredictiveOptions& options) {
  if (outcome.size() != profiles.size()) {
    throw Error(ErrorKind::kInvalidArgument, "outcome column must align with category profiles");
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (outcome[i] && profiles[i].overall_valence) rows.push_back(i);
  }
  if (rows.size() < options.min_categories) {
    throw Error(ErrorKind::kAnalysis, "outcome available for " + std::to_string(rows.size()) +
                                          " categories; the predictive comparison needs " +
                                          std::to_string(options.min_categories));
  }
  const std::size_t n = rows.size();
  const std::size_t dims = registry.size();
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) y(static_cast<Eigen::Index>(r)) = *outcome[rows[r]];

  auto gather = [&](auto getter) {
    std::vector<std::optional<double>> v;
    v.reserve(n);
    for (const auto i : rows) v.push_back(getter(profiles[i]));
    return v;
  };

  PredictiveComparison out;
  out.n = n;
  std::vector<Column> columns;
  columns.push_back(make_column("overall_valence", gather([](const CategoryProfile& p) { return p.overall_valence; })));
  std::vector<std::size_t> prevalence_col(dims), second_col(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    prevalence_col[d] = columns.size();
    columns.push_back(make_column("prevalence:" + registry.name(d),
                                  gather([d](const CategoryProfile& p) -> std::optional<double> { return p.prevalence.at(d); })));
  }
  for (std::size_t d = 0; d < dims; ++d) {
    second_col[d] = columns.size();
    if (registry.has_direction(d)) {
      columns.push_back(make_column("direction:" + registry.name(d),
                                    gather([d](const CategoryProfile& p) { return p.direction.at(d); })));
    } else {
      columns.push_back(make_column("valence:" + registry.name(d),
                                    gather([d](const CategoryProfile& p) { return p.valence.at(d); })));
    }
  }
  for (const auto& c : columns) out.imputed_values += c.imputed;

  auto design = [&](std::span<const std::size_t> which) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(which.size()));
    for (std::size_t j = 0; j < which.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = columns[which[j]].values;
    return x;
  };
  auto names_of = [&](std::span<const std::size_t> which) {
    std::vector<std::string> names;
    for (const auto j : which) names.push_back(columns[j].name);
    return names;
  };

  const std::vector<std::size_t> baseline_cols{0};
  out.baseline = ols_robust(y, design(baseline_cols), names_of(baseline_cols));

  std::vector<std::size_t> all_cols(columns.size());
  for (std::size_t j = 0; j < all_cols.size(); ++j) all_cols[j] = j;
  out.full = cv_regularized(y, design(all_cols), options.net, names_of(all_cols));
  out.delta_r2 = out.full.r2 - out.baseline.r2;

  // Nested OLS: baseline plus every non-constant prevalence.
  std::vector<std::size_t> nested_cols{0};
  for (std::size_t d = 0; d < dims; ++d) {
    if (!is_constant(columns[prevalence_col[d]].values)) nested_cols.push_back(prevalence_col[d]);
  }
  try {
    const auto nested = ols_robust(y, design(nested_cols), names_of(nested_cols));
    const double ratio = nested.ssr > 0.0 ? out.baseline.ssr / nested.ssr : 0.0;
    const double lr = ratio > 0.0 ? std::max(0.0, static_cast<double>(n) * std::log(ratio)) : 0.0;
    const double df = static_cast<double>(nested_cols.size() - 1);
    out.lr_chi2 = lr;
    out.lr_df = df;
    if (df > 0.0) {
      const boost::math::chi_squared dist(df);
      out.lr_p = std::clamp(boost::math::cdf(boost::math::complement(dist, lr)), 0.0, 1.0);
    }
  } catch (const Error&) {
    // Left unset: the nested model could not be estimated.
  }

  // Unregularized multiple regression for significance marks.
  std::vector<std::size_t> ols_cols;
  for (const auto j : all_cols) {
    if (!is_constant(columns[j].values)) ols_cols.push_back(j);
  }
  std::vector<double> col_p(columns.size(), 1.0);
  bool have_stars = false;
  try {
    const auto multiple = ols_robust(y, design(ols_cols), names_of(ols_cols));
    for (std::size_t k = 0; k < ols_cols.size(); ++k) col_p[ols_cols[k]] = multiple.p_values(static_cast<Eigen::Index>(k + 1));
    have_stars = true;
  } catch (const Error& e) {
    out.stars_note = e.what();
  }

  for (std::size_t d = 0; d < dims; ++d) {
    Table5Row row;
    row.dimension = d;
    row.name = registry.name(d);
    row.r_prevalence = safe_pearson(columns[prevalence_col[d]].raw, y);
    row.r_direction = safe_pearson(gather([d](const CategoryProfile& p) { return p.direction.at(d); }), y);
    row.r_valence = safe_pearson(gather([d](const CategoryProfile& p) { return p.valence.at(d); }), y);
    double best = -1.0;
    const std::pair<const char*, const std::optional<double>*> candidates[] = {
        {"prevalence", &row.r_prevalence}, {"direction", &row.r_direction}, {"valence", &row.r_valence}};
    for (const auto& [label, r] : candidates) {
      if (*r && std::fabs(**r) > best) {
        best = std::fabs(**r);
        row.max_metric = label;
      }
    }
    const auto& coef = out.full.model.coefficients;
    row.retained = coef(static_cast<Eigen::Index>(prevalence_col[d])) != 0.0 ||
                   coef(static_cast<Eigen::Index>(second_col[d])) != 0.0;
    if (have_stars) row.stars = stars_for(std::min(col_p[prevalence_col[d]], col_p[second_col[d]]));
    out.table5.push_back(std::move(row));
  }
  return out;
}

}  // namespace stereotax::stats
