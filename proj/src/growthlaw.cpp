#include "cxg/growthlaw.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "cxg/errors.hpp"
#include "cxg/rng.hpp"

namespace cxg {

FitResult fit_growth(const GrowthCurve& curve) {
  const auto& pts = curve.points;
  if (pts.size() < 3) throw DataError("fit_growth needs at least 3 points");
  for (const auto& [x, y] : pts) {
    if (x <= 0 || y <= 0.0) throw DataError("fit_growth needs positive token and type counts");
  }

  const std::size_t n = pts.size();
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pts) {
    sx += std::log(static_cast<double>(x));
    sy += std::log(y);
  }
  const double mx = sx / n;
  const double my = sy / n;

  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : pts) {
    const double dx = std::log(static_cast<double>(x)) - mx;
    const double dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DataError("fit_growth: degenerate token grid");

  FitResult fit;
  fit.n_points = static_cast<int>(n);
  fit.alpha = sxy / sxx;
  fit.intercept = my - fit.alpha * mx;

  double ss_res = 0.0;
  for (const auto& [x, y] : pts) {
    const double pred = fit.intercept + fit.alpha * std::log(static_cast<double>(x));
    const double e = std::log(y) - pred;
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;  // flat curve: r2 is 0 by convention

  const double df = static_cast<double>(n) - 2.0;
  const double se = std::sqrt(std::max(0.0, ss_res / df) / sxx);
  const boost::math::students_t dist(df);
  const double tq = boost::math::quantile(dist, 0.975);
  fit.ci_low = fit.alpha - tq * se;
  fit.ci_high = fit.alpha + tq * se;
  return fit;
}

GrowthCurve synthesize_heaps(double alpha, double c, const std::vector<std::int64_t>& sizes,
                             double noise_sigma, std::uint64_t rng_seed) {
  if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("synthesize_heaps: alpha must lie in (0, 1]");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) throw ConfigError("synthesize_heaps: sizes must increase");
  }

  Rng rng(rng_seed);
  GrowthCurve curve;
  double running_max = 0.0;
  for (auto size : sizes) {
    const double eps = noise_sigma > 0.0 ? rng.normal(0.0, noise_sigma) : 0.0;
    double types = std::round(std::exp(c) * std::pow(static_cast<double>(size), alpha) * std::exp(eps));
    running_max = std::max(running_max, types);
    curve.points.emplace_back(size, running_max);
  }
  return curve;
}

GrowthCurve mean_curve(const std::vector<GrowthCurve>& curves) {
  if (curves.empty()) throw DataError("mean_curve over an empty list");
  const auto& grid = curves.front().points;
  for (const auto& c : curves) {
    if (c.points.size() != grid.size()) throw DataError("mean_curve: mismatched token grids");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (c.points[i].first != grid[i].first) throw DataError("mean_curve: mismatched token grids");
    }
  }
  GrowthCurve out;
  out.kind = curves.front().kind;
  out.condition = curves.front().condition;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double sum = 0.0;
    for (const auto& c : curves) sum += c.points[i].second;
    out.points.emplace_back(grid[i].first, sum / static_cast<double>(curves.size()));
  }
  return out;
}

}  // namespace cxg
