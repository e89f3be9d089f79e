// Power-law growth fitting on log-log data, curve averaging, and synthetic
// vocabulary-growth data for validation.

#pragma once

#include <cstdint>
#include <vector>

#include "cxg/analytics.hpp"

namespace cxg {

struct FitResult {
  double alpha = 0.0;      // log-log slope
  double intercept = 0.0;  // natural-log intercept
  double ci_low = 0.0;     // 95% interval on alpha
  double ci_high = 0.0;
  double r2 = 0.0;
  int n_points = 0;
};

// OLS of log(types) on log(tokens); CI = slope +- t(0.025, n-2) * SE.
// Requires >= 3 points with positive coordinates. A flat curve fits with
// slope 0 and r2 defined as 0.
FitResult fit_growth(const GrowthCurve& curve);

// types_k = round(exp(c) * size_k^alpha * exp(eps)), eps ~ N(0, sigma^2),
// monotonicity enforced by cumulative max.
GrowthCurve synthesize_heaps(double alpha, double c, const std::vector<std::int64_t>& sizes,
                             double noise_sigma, std::uint64_t rng_seed);

// Pointwise mean of curves sharing one token grid.
GrowthCurve mean_curve(const std::vector<GrowthCurve>& curves);

}  // namespace cxg
