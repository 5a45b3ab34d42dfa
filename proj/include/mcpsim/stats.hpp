#pragma once

#include <cstdint>
#include <span>

namespace mcpsim::stats {

// P(Poisson(mean) >= k).
double poisson_tail(double mean, std::int64_t k);

// Smallest k with P(Poisson(mean) <= k) >= q.
std::int64_t poisson_quantile(double mean, double q);

// Binomial proportion with a normal-approximation confidence half-width.
struct Proportion {
  std::uint64_t count = 0;
  std::uint64_t trials = 0;
  double estimate = 0.0;
  double half_width = 0.0;
};

// 95% half-width 1.96*sqrt(p(1-p)/n) + 1/(2n) (continuity correction, so a
// zero or full count still gets a nonzero width).
Proportion proportion(std::uint64_t count, std::uint64_t trials, double z = 1.959963984540054);

// Two-sided Kolmogorov-Smirnov p-value of samples against Exp(rate).
double ks_exponential_pvalue(std::span<const double> samples, double rate);

// Asymptotic Kolmogorov distribution complement Q(t) = P(K > t).
double kolmogorov_q(double t);

// Pearson chi-square goodness of fit of integer samples against
// Poisson(mean); bins with expected count < 5 are pooled into the tails.
double chi_square_poisson_pvalue(std::span<const std::int64_t> samples, double mean);

}  // namespace mcpsim::stats
