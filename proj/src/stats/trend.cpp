#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "stereotax/error.hpp"
#include "stereotax/parallel.hpp"
#include "stereotax/rng.hpp"
#include "stereotax/stats.hpp"

namespace stereotax::stats {
namespace {

// Least-squares slope of y on x; 0 when x has no spread.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

std::vector<TrendFit> trend_over_responses(std::span<const CodedResponse> responses,
                                           const lexicon::DimensionRegistry& registry, const TrendOptions& options) {
  if (responses.empty()) throw Error(ErrorKind::kAnalysis, "trend analysis needs coded responses");
  if (options.max_order < 2) throw Error(ErrorKind::kInvalidArgument, "trend analysis needs max_order >= 2");
  if (options.resamples < 2) throw Error(ErrorKind::kInvalidArgument, "trend analysis needs at least two resamples");
  const std::size_t dims = registry.size();
  const auto orders = static_cast<std::size_t>(options.max_order);

  // Per category: per order, response count and per-dimension hit count.
  struct Cell {
    std::size_t total = 0;
    std::vector<std::size_t> hits;
  };
  std::vector<std::string> category_order;
  std::map<std::string, std::vector<Cell>> grid;
  int lowest = options.max_order + 1, highest = 0;
  for (const auto& r : responses) {
    if (r.order < 1) throw Error(ErrorKind::kAnalysis, "response order must be >= 1 for '" + r.term + "'");
    if (r.order > options.max_order) continue;
    if (r.coding.presence.size() != dims) throw Error(ErrorKind::kAnalysis, "coding dimension count mismatch");
    auto it = grid.find(r.category);
    if (it == grid.end()) {
      category_order.push_back(r.category);
      it = grid.emplace(r.category, std::vector<Cell>(orders, Cell{0, std::vector<std::size_t>(dims, 0)})).first;
    }
    auto& cell = it->second[static_cast<std::size_t>(r.order - 1)];
    ++cell.total;
    for (std::size_t d = 0; d < dims; ++d) cell.hits[d] += r.coding.presence[d];
    lowest = std::min(lowest, r.order);
    highest = std::max(highest, r.order);
  }
  if (highest <= lowest) throw Error(ErrorKind::kAnalysis, "trend analysis needs more than one response order");

  // slopes[d][category]; categories with a single observed order are skipped.
  std::vector<std::vector<double>> slopes(dims);
  std::vector<TrendFit> fits(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    fits[d].dimension = d;
    fits[d].name = registry.name(d);
    fits[d].by_order.assign(orders, std::nullopt);
  }
  std::vector<std::vector<double>> order_sum(dims, std::vector<double>(orders, 0.0));
  std::vector<std::size_t> order_n(orders, 0);
  for (const auto& name : category_order) {
    const auto& cells = grid.at(name);
    std::vector<double> x;
    for (std::size_t o = 0; o < orders; ++o) {
      if (cells[o].total > 0) {
        x.push_back(static_cast<double>(o + 1));
        ++order_n[o];
      }
    }
    for (std::size_t d = 0; d < dims; ++d) {
      std::vector<double> y;
      for (std::size_t o = 0; o < orders; ++o) {
        if (cells[o].total == 0) continue;
        const double share = static_cast<double>(cells[o].hits[d]) / static_cast<double>(cells[o].total);
        y.push_back(share);
        order_sum[d][o] += share;
      }
      if (x.size() >= 2) slopes[d].push_back(slope(x, y));
    }
  }
  for (std::size_t d = 0; d < dims; ++d) {
    for (std::size_t o = 0; o < orders; ++o) {
      if (order_n[o] > 0) fits[d].by_order[o] = order_sum[d][o] / static_cast<double>(order_n[o]);
    }
  }

  for (std::size_t d = 0; d < dims; ++d) {
    auto& fit = fits[d];
    const auto& s = slopes[d];
    fit.n_categories = s.size();
    if (s.empty()) continue;
    const double m = static_cast<double>(s.size());
    fit.slope = std::accumulate(s.begin(), s.end(), 0.0) / m;
    std::vector<double> boot(options.resamples, 0.0);
    parallel_for(options.resamples, [&](std::size_t b) {
      Rng rng(mix_seed(mix_seed(options.seed, d), b));
      double sum = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) sum += s[static_cast<std::size_t>(rng.below(s.size()))];
      boot[b] = sum / m;
    });
    const double bm = std::accumulate(boot.begin(), boot.end(), 0.0) / static_cast<double>(boot.size());
    double ss = 0.0;
    for (const double v : boot) ss += (v - bm) * (v - bm);
    fit.se = std::sqrt(ss / static_cast<double>(boot.size() - 1));
    const double df = std::max(1.0, m - 1.0);
    const double q = boost::math::quantile(boost::math::students_t(df), 0.5 + options.level / 2.0);
    fit.lower = fit.slope - q * fit.se;
    fit.upper = fit.slope + q * fit.se;
    if (fit.se > 0.0) {
      fit.p = std::erfc(std::fabs(fit.slope / fit.se) / std::sqrt(2.0));
    } else {
      fit.p = fit.slope == 0.0 ? 1.0 : 0.0;
    }
  }
  return fits;
}

}  // namespace stereotax::stats
