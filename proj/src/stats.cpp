#include "mcpsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mcpsim/errors.hpp"

namespace mcpsim::stats {

double poisson_tail(double mean, std::int64_t k) {
  if (k <= 0) return 1.0;
  if (mean <= 0.0) return 0.0;
  // P(N >= k) = P(Gamma(k,1) <= mean).
  return boost::math::gamma_p(static_cast<double>(k), mean);
}

std::int64_t poisson_quantile(double mean, double q) {
  if (mean <= 0.0) return 0;
  std::int64_t k = 0;
  while (1.0 - poisson_tail(mean, k + 1) < q) ++k;
  return k;
}

Proportion proportion(std::uint64_t count, std::uint64_t trials, double z) {
  Proportion out{count, trials, 0.0, 0.0};
  if (trials == 0) return out;
  const double n = static_cast<double>(trials);
  out.estimate = static_cast<double>(count) / n;
  out.half_width = z * std::sqrt(out.estimate * (1.0 - out.estimate) / n) + 0.5 / n;
  return out;
}

double kolmogorov_q(double t) {
  if (t < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_exponential_pvalue(std::span<const double> samples, double rate) {
  if (samples.empty()) throw DomainError("KS test needs samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = -std::expm1(-rate * x[i]);
    d = std::max({d, (i + 1) / n - cdf, cdf - i / n});
  }
  const double sn = std::sqrt(n);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

double chi_square_poisson_pvalue(std::span<const std::int64_t> samples, double mean) {
  if (samples.empty()) throw DomainError("chi-square test needs samples");
  const double n = static_cast<double>(samples.size());
  boost::math::poisson_distribution<double> pois(mean);

  // Bins [lo, hi] with expected count >= 5; outermost bins absorb the tails.
  std::int64_t lo = 0;
  while (n * boost::math::cdf(pois, static_cast<double>(lo)) < 5.0) ++lo;
  std::int64_t hi = lo;
  while (n * boost::math::cdf(boost::math::complement(pois, static_cast<double>(hi))) >= 5.0) ++hi;
  if (hi <= lo) throw DomainError("too few samples for a chi-square test");

  const std::size_t bins = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> observed(bins, 0.0);
  for (std::int64_t s : samples) {
    const std::int64_t b = std::clamp(s, lo, hi) - lo;
    observed[static_cast<std::size_t>(b)] += 1.0;
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    const double k = static_cast<double>(lo) + static_cast<double>(i);
    double p;
    if (i == 0) p = boost::math::cdf(pois, k);
    else if (i + 1 == bins) p = boost::math::cdf(boost::math::complement(pois, k - 1.0));
    else p = boost::math::pdf(pois, k);
    const double expected = n * p;
    stat += (observed[i] - expected) * (observed[i] - expected) / expected;
  }
  boost::math::chi_squared_distribution<double> chi(static_cast<double>(bins - 1));
  return boost::math::cdf(boost::math::complement(chi, stat));
}

}  // namespace mcpsim::stats
