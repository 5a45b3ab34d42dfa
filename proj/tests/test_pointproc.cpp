#include <doctest.h>

#include <cmath>
#include <vector>

#include "mcpsim/errors.hpp"
#include "mcpsim/pointproc.hpp"
#include "mcpsim/stats.hpp"

using namespace mcpsim;

TEST_CASE("zero arrival rates give no arrivals") {
  const auto tr = simulate_modulated({0, 0, 3.0, 0.4}, 100.0, std::uint64_t{5});
  CHECK(tr.arrivals.empty());
  CHECK_FALSE(tr.background_flips.empty());
}

TEST_CASE("modulated trajectory is deterministic and well formed") {
  const BromanParams b{0.5, 4.0, 2.0, 0.3};
  const auto a = simulate_modulated(b, 50.0, std::uint64_t{9});
  const auto c = simulate_modulated(b, 50.0, std::uint64_t{9});
  CHECK(a.arrivals == c.arrivals);
  CHECK(a.initial_state == c.initial_state);
  REQUIRE(a.background_flips.size() == c.background_flips.size());
  int state = a.initial_state;
  double last = 0.0;
  for (std::size_t i = 0; i < a.background_flips.size(); ++i) {
    CHECK(a.background_flips[i].time == c.background_flips[i].time);
    CHECK(a.background_flips[i].state == 1 - state);
    CHECK(a.background_flips[i].time > last);
    state = a.background_flips[i].state;
    last = a.background_flips[i].time;
  }
  CHECK(std::is_sorted(a.arrivals.begin(), a.arrivals.end()));
  CHECK(a.arrivals.back() <= 50.0);
  CHECK(a.time_in_state(0) + a.time_in_state(1) == doctest::Approx(50.0));
  CHECK(a.count_at(50.0) == a.arrivals.size());
  CHECK(a.count_at(0.0) == 0);
}

TEST_CASE("fixed background starts") {
  const BromanParams b{0, 1, 1, 0.5};
  CHECK(simulate_modulated(b, 1.0, std::uint64_t{1}, BackgroundInit::fixed0).initial_state == 0);
  CHECK(simulate_modulated(b, 1.0, std::uint64_t{1}, BackgroundInit::fixed1).initial_state == 1);
  CHECK_THROWS_AS(simulate_modulated(b, 0.0, std::uint64_t{1}), DomainError);
}

TEST_CASE("fast switching averages the arrival rate") {
  // gamma large: arrivals/horizon -> p * alpha1.
  const BromanParams b{0.0, 24.0, 1e4, 1.0 / 9.0};
  const double horizon = 1.0;
  const int n = 10000;
  double sum = 0.0;
  double sum2 = 0.0;
  Rng rng = make_rng(21, 0, Stream::modulated);
  for (int i = 0; i < n; ++i) {
    const double r = simulate_modulated(b, horizon, rng).arrivals.size() / horizon;
    sum += r;
    sum2 += r * r;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::fabs(mean - b.p * b.alpha1) < 3.0 * se);
}

TEST_CASE("equilibrium start is stationary") {
  const BromanParams b{0.0, 1.0, 2.0, 0.3};
  const int n = 10000;
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
  std::vector<int> ones(grid.size());
  Rng rng = make_rng(22, 0, Stream::modulated);
  for (int i = 0; i < n; ++i) {
    const auto tr = simulate_modulated(b, 10.0, rng);
    for (std::size_t j = 0; j < grid.size(); ++j) ones[j] += tr.state_at(grid[j]);
  }
  const double se = std::sqrt(b.p * (1 - b.p) / n);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(std::fabs(ones[j] / double(n) - b.p) < 3.0 * se);
  }
}

TEST_CASE("ergodic time fraction in state 1") {
  const BromanParams b{0.0, 1.0, 1.0, 0.3};
  // 20 independent long runs; the spread of their averages gives the error.
  std::vector<double> frac;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto tr = simulate_modulated(b, 1000.0, s);
    frac.push_back(tr.time_in_state(1) / 1000.0);
  }
  double m = 0.0;
  for (double f : frac) m += f;
  m /= frac.size();
  double v = 0.0;
  for (double f : frac) v += (f - m) * (f - m);
  const double se = std::sqrt(v / (frac.size() - 1) / frac.size());
  CHECK(std::fabs(m - b.p) < 3.0 * se + 1e-3);
}

TEST_CASE("arrivals on the state-1 clock are a poisson process") {
  // alpha0 = 0; measured in time spent in state 1, arrivals have rate alpha1.
  const BromanParams b{0.0, 5.0, 0.5, 0.5};
  std::vector<double> gaps;
  Rng rng = make_rng(23, 0, Stream::modulated);
  while (gaps.size() < 10000) {
    const auto tr = simulate_modulated(b, 200.0, rng, BackgroundInit::fixed1);
    double clock = 0.0;
    double last = 0.0;
    double prev = 0.0;
    int state = tr.initial_state;
    std::size_t fi = 0;
    for (double t : tr.arrivals) {
      while (fi < tr.background_flips.size() && tr.background_flips[fi].time < t) {
        if (state == 1) clock += tr.background_flips[fi].time - last;
        last = tr.background_flips[fi].time;
        state = tr.background_flips[fi].state;
        ++fi;
      }
      REQUIRE(state == 1);
      clock += t - last;
      last = t;
      gaps.push_back(clock - prev);
      prev = clock;
    }
  }
  gaps.resize(10000);
  CHECK(stats::ks_exponential_pvalue(gaps, b.alpha1) > 1e-3);
}

TEST_CASE("poisson arrivals") {
  CHECK(simulate_poisson(0.0, 10.0, std::uint64_t{1}).empty());
  CHECK_THROWS_AS(simulate_poisson(-1.0, 10.0, std::uint64_t{1}), DomainError);

  const int n = 10000;
  std::vector<std::int64_t> counts(n);
  Rng rng = make_rng(24, 0, Stream::poisson);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto a = simulate_poisson(2.0, 50.0, rng);
    CHECK(std::is_sorted(a.begin(), a.end()));
    counts[i] = static_cast<std::int64_t>(a.size());
    sum += counts[i];
  }
  const double mean = sum / n;
  CHECK(std::fabs(mean - 100.0) < 3.0 * std::sqrt(100.0 / n));
  CHECK(stats::chi_square_poisson_pvalue(counts, 100.0) > 1e-3);
  // The test must also reject a wrong mean.
  CHECK(stats::chi_square_poisson_pvalue(counts, 104.0) < 1e-3);
}

TEST_CASE("poisson tail and quantile") {
  CHECK(stats::poisson_tail(2.0, 0) == 1.0);
  CHECK(stats::poisson_tail(0.0, 1) == 0.0);
  CHECK(stats::poisson_tail(2.0, 1) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
  CHECK(stats::poisson_tail(2.0, 3) ==
        doctest::Approx(1.0 - std::exp(-2.0) * (1 + 2 + 2)).epsilon(1e-13));
  const auto q = stats::poisson_quantile(10.0, 0.9999);
  CHECK(1.0 - stats::poisson_tail(10.0, q + 1) >= 0.9999);
  CHECK(1.0 - stats::poisson_tail(10.0, q) < 0.9999);
}

TEST_CASE("KS test rejects a wrong rate") {
  Rng rng = make_rng(25, 0, Stream::poisson);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = exponential(rng, 2.0);
  CHECK(stats::ks_exponential_pvalue(xs, 2.0) > 1e-3);
  CHECK(stats::ks_exponential_pvalue(xs, 2.3) < 1e-3);
  CHECK(stats::kolmogorov_q(0.0) == doctest::Approx(1.0));
  CHECK(stats::kolmogorov_q(1.36) == doctest::Approx(0.049).epsilon(0.02));
}

TEST_CASE("dominance test: grids and trivial lambda") {
  DominanceOptions o;
  o.replicas = 2000;
  o.seed = 3;
  const BromanParams b{0, 24, 72, 1.0 / 9.0};
  const auto r = tail_dominance_test(b, 0.0, o);
  CHECK(r.violations.empty());
  CHECK(r.time_grid == default_time_grid());
  CHECK(r.count_grid == std::vector<std::int64_t>{1});
  CHECK(r.cell_count() == 5);
  CHECK_FALSE(r.lambda_exceeds_bar());
  CHECK(r.bonferroni_note().find("5 cells") != std::string::npos);

  o.replicas = 999;
  CHECK_THROWS_AS(tail_dominance_test(b, 1.0, o), DomainError);
  o.replicas = 1000;
  CHECK_THROWS_AS(tail_dominance_test(b, -1.0, o), DomainError);
}

TEST_CASE("dominance test: empirical tails are nonincreasing in k") {
  DominanceOptions o;
  o.replicas = 5000;
  o.seed = 4;
  const BromanParams b{0, 24, 72, 1.0 / 9.0};
  const auto r = tail_dominance_test(b, lambda_bar_broman(b), o);
  for (const auto& row : r.empirical_tail) {
    for (std::size_t k = 1; k < row.size(); ++k) CHECK(row[k] <= row[k - 1]);
  }
  CHECK(r.violations.empty());
}

TEST_CASE("dominance test detects violations above lambda_bar") {
  DominanceOptions o;
  o.replicas = 20000;
  o.seed = 5;
  const BromanParams b{0, 24, 72, 1.0 / 9.0};
  const auto r = tail_dominance_test(b, b.alpha1, o);
  REQUIRE_FALSE(r.violations.empty());
  CHECK(r.lambda_exceeds_bar());
  bool small_t_k1 = false;
  for (const auto& v : r.violations) small_t_k1 |= (v.time == 0.5 && v.k == 1);
  CHECK(small_t_k1);
}

TEST_CASE("dominance test is reproducible and thread count independent") {
  DominanceOptions o;
  o.replicas = 3000;
  o.seed = 6;
  const BromanParams b{0.2, 3.0, 1.5, 0.4};
  const auto a = tail_dominance_test(b, 1.0, o);
  o.threads = 3;
  const auto c = tail_dominance_test(b, 1.0, o);
  CHECK(a.empirical_tail == c.empirical_tail);
}
