// Welch's t-test and Bayesian normal summaries.

#pragma once

#include <vector>

namespace cxg {

struct TestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Welch's unequal-variance test with Welch-Satterthwaite degrees of freedom.
// Two zero-variance samples: equal means give t = 0, p = 1; unequal means
// give p = 0.
TestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

struct BayesEstimate {
  double mean = 0.0;
  double mean_low = 0.0;
  double mean_high = 0.0;
  double variance = 0.0;
  double variance_low = 0.0;
  double variance_high = 0.0;
  double credibility = 0.99;
};

// Normal likelihood under the Jeffreys prior: the posterior mean is
// Student-t around the sample mean, the posterior variance is scaled
// inverse-chi-square. Point estimates are posterior means; intervals are
// central credible intervals.
BayesEstimate bayes_normal_estimate(const std::vector<double>& sample, double credibility);

}  // namespace cxg
