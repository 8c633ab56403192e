#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>

#include "stereotax/error.hpp"
#include "stereotax/stats.hpp"

namespace stereotax::stats {

RegressionFit ols_robust(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, std::vector<std::string> names) {
  const auto n = static_cast<std::size_t>(y.size());
  const auto p = static_cast<std::size_t>(x.cols());
  if (static_cast<std::size_t>(x.rows()) != n) throw Error(ErrorKind::kInvalidArgument, "ols: X and y differ in rows");
  if (n <= p + 1) {
    throw Error(ErrorKind::kAnalysis,
                "ols needs more than " + std::to_string(p + 1) + " observations, got " + std::to_string(n));
  }
  if (!names.empty() && names.size() != p) throw Error(ErrorKind::kInvalidArgument, "ols: one name per column");
  if (names.empty()) {
    for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  }

  Eigen::MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = x;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (static_cast<std::size_t>(qr.rank()) < p + 1) {
    throw Error(ErrorKind::kAnalysis, "ols: design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                                          " of " + std::to_string(p + 1) + ")");
  }

  RegressionFit fit;
  fit.n = n;
  fit.names.push_back("(intercept)");
  fit.names.insert(fit.names.end(), names.begin(), names.end());
  fit.coefficients = qr.solve(y);
  const Eigen::VectorXd residuals = y - design * fit.coefficients;
  fit.ssr = residuals.squaredNorm();
  const double sst = (y.array() - y.mean()).square().sum();
  fit.r2 = sst > 0.0 ? std::clamp(1.0 - fit.ssr / sst, 0.0, 1.0) : 1.0;

  const double nd = static_cast<double>(n);
  const double sigma2 = std::max(fit.ssr / nd, std::numeric_limits<double>::min());
  fit.log_likelihood = -0.5 * nd * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
  fit.aic = 2.0 * static_cast<double>(p + 2) - 2.0 * fit.log_likelihood;

  // HC3 sandwich.
  const Eigen::MatrixXd bread = (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(p + 1, p + 1));
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p + 1, p + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = design.row(static_cast<Eigen::Index>(i)).transpose();
    const double h = xi.dot(bread * xi);
    const double e = residuals(static_cast<Eigen::Index>(i));
    double w = 0.0;
    if (e != 0.0) {
      const double one_minus = 1.0 - h;
      w = one_minus > 1e-12 ? (e * e) / (one_minus * one_minus) : std::numeric_limits<double>::infinity();
    }
    meat.noalias() += w * xi * xi.transpose();
  }
  const Eigen::MatrixXd cov = bread * meat * bread;
  fit.robust_se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();

  const double df = nd - static_cast<double>(p + 1);
  const boost::math::students_t dist(df);
  fit.p_values.resize(static_cast<Eigen::Index>(p + 1));
  for (Eigen::Index j = 0; j < fit.p_values.size(); ++j) {
    const double se = fit.robust_se(j);
    const double b = fit.coefficients(j);
    if (!(se > 0.0) || !std::isfinite(se)) {
      fit.p_values(j) = (se == 0.0 && b != 0.0) ? 0.0 : 1.0;
      continue;
    }
    fit.p_values(j) = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(b / se))), 0.0, 1.0);
  }
  return fit;
}

}  // namespace stereotax::stats
