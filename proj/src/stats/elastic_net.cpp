#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "stereotax/error.hpp"
#include "stereotax/kernels.hpp"
#include "stereotax/rng.hpp"
#include "stereotax/stats.hpp"

namespace stereotax::stats {
namespace {

struct Standardized {
  Eigen::MatrixXd x;  // column-major, centered, unit population sd
  Eigen::VectorXd means;
  Eigen::VectorXd scales;  // 0 for constant columns
  Eigen::VectorXd y;       // centered
  double y_mean = 0.0;
  double y_scale = 0.0;
};

Standardized standardize(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
  Standardized s;
  const double n = static_cast<double>(x.rows());
  s.means = x.colwise().mean().transpose();
  s.x = x.rowwise() - s.means.transpose();
  s.scales.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double sd = std::sqrt(s.x.col(j).squaredNorm() / n);
    // Treat numerically constant columns as constant.
    const double ref = std::max(1.0, std::fabs(s.means(j)));
    if (sd > 1e-12 * ref) {
      s.scales(j) = sd;
      s.x.col(j) /= sd;
    } else {
      s.scales(j) = 0.0;
      s.x.col(j).setZero();
    }
  }
  s.y_mean = y.mean();
  s.y = y.array() - s.y_mean;
  s.y_scale = std::sqrt(s.y.squaredNorm() / n);
  return s;
}

double soft_threshold(double z, double g) {
  if (z > g) return z - g;
  if (z < -g) return z + g;
  return 0.0;
}

// Coordinate descent on standardized data; `beta` is a warm start and is
// updated in place. Returns the number of sweeps.
std::size_t descend(const Standardized& s, double lambda, const ElasticNetOptions& options, Eigen::VectorXd& beta) {
  const auto n = static_cast<std::size_t>(s.x.rows());
  const double nd = static_cast<double>(n);
  const double l1 = lambda * options.alpha;
  const double denom = 1.0 + lambda * (1.0 - options.alpha);
  Eigen::VectorXd residual = s.y - s.x * beta;
  const double tol = options.tolerance * std::max(1.0, s.y_scale);
  std::size_t sweeps = 0;
  while (sweeps < options.max_sweeps) {
    ++sweeps;
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < s.x.cols(); ++j) {
      if (s.scales(j) == 0.0) continue;
      const std::span<const double> col(s.x.col(j).data(), n);
      const std::span<double> res(residual.data(), n);
      const double old = beta(j);
      const double z = kernels::dot(col, res) / nd + old;
      const double updated = soft_threshold(z, l1) / denom;
      if (updated != old) {
        kernels::axpy(old - updated, col, res);
        beta(j) = updated;
        max_change = std::max(max_change, std::fabs(updated - old));
      }
    }
    if (max_change <= tol) break;
  }
  return sweeps;
}

ElasticNetModel to_original_scale(const Standardized& s, const Eigen::VectorXd& beta, double lambda,
                                  std::size_t sweeps) {
  ElasticNetModel m;
  m.lambda = lambda;
  m.sweeps = sweeps;
  m.coefficients = Eigen::VectorXd::Zero(beta.size());
  m.intercept = s.y_mean;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (s.scales(j) == 0.0 || beta(j) == 0.0) continue;
    m.coefficients(j) = beta(j) / s.scales(j);
    m.intercept -= m.coefficients(j) * s.means(j);
  }
  return m;
}

double lambda_max_standardized(const Standardized& s, double alpha) {
  const double nd = static_cast<double>(s.x.rows());
  const auto rows = static_cast<std::size_t>(s.x.rows());
  const std::span<const double> y(s.y.data(), rows);
  double top = 0.0;
  for (Eigen::Index j = 0; j < s.x.cols(); ++j) {
    // Same reduction as the first coordinate update, padded so rounding in
    // the mixing factor cannot leave a slope at +-1 ulp.
    top = std::max(top, std::fabs(kernels::dot(std::span<const double>(s.x.col(j).data(), rows), y)));
  }
  return top / (nd * std::max(alpha, 1e-3)) * (1.0 + 1e-12);
}

void check_inputs(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const ElasticNetOptions& options) {
  if (x.rows() != y.size()) throw Error(ErrorKind::kInvalidArgument, "elastic net: X and y differ in rows");
  if (y.size() < 2) throw Error(ErrorKind::kAnalysis, "elastic net needs at least two observations");
  if (!(options.alpha >= 0.0 && options.alpha <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "elastic net mixing parameter must lie in [0, 1]");
  }
}

}  // namespace

ElasticNetModel elastic_net(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, double lambda,
                            const ElasticNetOptions& options) {
  check_inputs(y, x, options);
  if (!(lambda >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "penalty weight must be non-negative");
  const auto s = standardize(y, x);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  const auto sweeps = descend(s, lambda, options, beta);
  return to_original_scale(s, beta, lambda, sweeps);
}

double lambda_max(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, double alpha) {
  ElasticNetOptions options;
  options.alpha = alpha;
  check_inputs(y, x, options);
  return lambda_max_standardized(standardize(y, x), alpha);
}

RegularizedFit cv_regularized(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const ElasticNetOptions& options,
                              std::vector<std::string> names) {
  check_inputs(y, x, options);
  const auto n = static_cast<std::size_t>(y.size());
  const auto p = static_cast<std::size_t>(x.cols());
  if (options.folds < 3 || n < options.folds) {
    throw Error(ErrorKind::kAnalysis, "cross-validation needs n >= folds >= 3 (n = " + std::to_string(n) +
                                          ", folds = " + std::to_string(options.folds) + ")");
  }
  if (options.n_lambda < 2) throw Error(ErrorKind::kInvalidArgument, "penalty grid needs at least two values");
  if (!names.empty() && names.size() != p) throw Error(ErrorKind::kInvalidArgument, "one name per predictor");
  const auto full = standardize(y, x);
  if (full.y_scale == 0.0) throw Error(ErrorKind::kAnalysis, "outcome has zero variance");

  RegularizedFit fit;
  fit.names = std::move(names);
  fit.alpha = options.alpha;
  fit.folds = options.folds;
  fit.seed = options.seed;
  fit.n = n;
  const double top = lambda_max_standardized(full, options.alpha);
  const double hi = top > 0.0 ? top : 1.0;
  for (std::size_t i = 0; i < options.n_lambda; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(options.n_lambda - 1);
    fit.lambdas.push_back(hi * std::pow(options.lambda_min_ratio, frac));
  }

  // Full-data path.
  std::vector<ElasticNetModel> path;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (const double lambda : fit.lambdas) {
    const auto sweeps = descend(full, lambda, options, beta);
    path.push_back(to_original_scale(full, beta, lambda, sweeps));
    fit.path_nonzero.push_back(static_cast<std::size_t>((path.back().coefficients.array() != 0.0).count()));
  }

  // Seeded fold assignment.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(options.seed);
  rng.shuffle(perm.begin(), perm.end());
  std::vector<std::size_t> fold_of(n);
  for (std::size_t i = 0; i < n; ++i) fold_of[perm[i]] = i % options.folds;

  std::vector<std::vector<double>> fold_mse(options.folds, std::vector<double>(fit.lambdas.size(), 0.0));
  for (std::size_t f = 0; f < options.folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? test : train).push_back(static_cast<Eigen::Index>(i));
    const Eigen::MatrixXd x_train = x(train, Eigen::all);
    const Eigen::VectorXd y_train = y(train);
    const Eigen::MatrixXd x_test = x(test, Eigen::all);
    const Eigen::VectorXd y_test = y(test);
    const auto s = standardize(y_train, x_train);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    for (std::size_t l = 0; l < fit.lambdas.size(); ++l) {
      const auto sweeps = descend(s, fit.lambdas[l], options, b);
      const auto m = to_original_scale(s, b, fit.lambdas[l], sweeps);
      const Eigen::VectorXd pred = (x_test * m.coefficients).array() + m.intercept;
      fold_mse[f][l] = (y_test - pred).squaredNorm() / static_cast<double>(test.size());
    }
  }
  const double k = static_cast<double>(options.folds);
  for (std::size_t l = 0; l < fit.lambdas.size(); ++l) {
    double mean = 0.0;
    for (std::size_t f = 0; f < options.folds; ++f) mean += fold_mse[f][l];
    mean /= k;
    double ss = 0.0;
    for (std::size_t f = 0; f < options.folds; ++f) ss += (fold_mse[f][l] - mean) * (fold_mse[f][l] - mean);
    fit.cv_error.push_back(mean);
    fit.cv_se.push_back(std::sqrt(ss / (k - 1.0)) / std::sqrt(k));
  }
  // Grid is descending, so the first minimizer is the larger penalty.
  fit.selected = 0;
  for (std::size_t l = 1; l < fit.cv_error.size(); ++l) {
    if (fit.cv_error[l] < fit.cv_error[fit.selected]) fit.selected = l;
  }
  fit.model = path[fit.selected];
  for (std::size_t j = 0; j < p; ++j) {
    if (fit.model.coefficients(static_cast<Eigen::Index>(j)) != 0.0) fit.nonzero.push_back(j);
  }
  const Eigen::VectorXd fitted = (x * fit.model.coefficients).array() + fit.model.intercept;
  const double ssr = (y - fitted).squaredNorm();
  const double sst = (y.array() - y.mean()).square().sum();
  fit.r2 = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
  return fit;
}

}  // namespace stereotax::stats
