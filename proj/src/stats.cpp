#include "cxg/stats.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "cxg/errors.hpp"

namespace cxg {

namespace {

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double var = 0.0;  // unbiased
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  m.n = static_cast<double>(v.size());
  for (double x : v) m.mean += x;
  m.mean /= m.n;
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= (m.n - 1.0);
  return m;
}

}  // namespace

TestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw DataError("welch_t_test needs >= 2 values per sample");
  const Moments ma = moments(a);
  const Moments mb = moments(b);

  TestResult res;
  const double va = ma.var / ma.n;
  const double vb = mb.var / mb.n;
  if (va + vb == 0.0) {
    res.df = ma.n + mb.n - 2.0;
    if (ma.mean == mb.mean) {
      res.t = 0.0;
      res.p = 1.0;
    } else {
      res.t = ma.mean > mb.mean ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
      res.p = 0.0;
    }
    return res;
  }

  res.t = (ma.mean - mb.mean) / std::sqrt(va + vb);
  res.df = (va + vb) * (va + vb) /
           (va * va / (ma.n - 1.0) + vb * vb / (mb.n - 1.0));
  const boost::math::students_t dist(res.df);
  res.p = 2.0 * boost::math::cdf(dist, -std::abs(res.t));
  return res;
}

BayesEstimate bayes_normal_estimate(const std::vector<double>& sample, double credibility) {
  if (sample.size() < 2) throw DataError("bayes_normal_estimate needs >= 2 values");
  if (credibility <= 0.0 || credibility >= 1.0) {
    throw ConfigError("credibility must lie in (0, 1)");
  }
  const Moments m = moments(sample);
  const double n = m.n;
  const double nu = n - 1.0;

  BayesEstimate est;
  est.credibility = credibility;
  est.mean = m.mean;

  if (m.var == 0.0) {
    est.mean_low = est.mean_high = m.mean;
    est.variance = est.variance_low = est.variance_high = 0.0;
    return est;
  }

  const double upper = (1.0 + credibility) / 2.0;
  const double lower = (1.0 - credibility) / 2.0;

  const boost::math::students_t tdist(nu);
  const double tq = boost::math::quantile(tdist, upper);
  const double scale = std::sqrt(m.var / n);
  est.mean_low = m.mean - tq * scale;
  est.mean_high = m.mean + tq * scale;

  // Scaled inverse-chi-square posterior for the variance; posterior mean
  // exists for n > 3, otherwise the sample variance stands in.
  est.variance = n > 3.0 ? nu * m.var / (nu - 2.0) : m.var;
  const boost::math::chi_squared chi(nu);
  est.variance_low = nu * m.var / boost::math::quantile(chi, upper);
  est.variance_high = nu * m.var / boost::math::quantile(chi, lower);
  return est;
}

}  // namespace cxg
