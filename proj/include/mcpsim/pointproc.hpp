#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcpsim/rng.hpp"
#include "mcpsim/thresholds.hpp"

namespace mcpsim {

enum class BackgroundInit { equilibrium, fixed0, fixed1 };

struct BackgroundFlip {
  double time = 0.0;
  int state = 0;  // state entered at `time`
};

// One realisation of the modulated counting process on (0, horizon].
struct ModulatedTrajectory {
  double horizon = 0.0;
  int initial_state = 0;
  std::vector<BackgroundFlip> background_flips;
  std::vector<double> arrivals;

  int state_at(double t) const;
  std::size_t count_at(double t) const;
  // Total time in (0, horizon] spent with background == state.
  double time_in_state(int state) const;
};

ModulatedTrajectory simulate_modulated(const BromanParams& b, double horizon, Rng& rng,
                                       BackgroundInit init = BackgroundInit::equilibrium);
ModulatedTrajectory simulate_modulated(const BromanParams& b, double horizon,
                                       std::uint64_t seed,
                                       BackgroundInit init = BackgroundInit::equilibrium);

// Homogeneous Poisson arrival times on (0, horizon].
std::vector<double> simulate_poisson(double rate, double horizon, Rng& rng);
std::vector<double> simulate_poisson(double rate, double horizon, std::uint64_t seed);

struct DominanceViolation {
  double time = 0.0;
  std::int64_t k = 0;
  double deficit = 0.0;
  double std_error = 0.0;
};

// Marginal check of X_t >= Poisson(lambda*t): per (t, k) cell the empirical
// P(X_t >= k) against the exact Poisson tail. Row index is the time, column
// the count.
struct DominanceReport {
  BromanParams params;
  double lambda = 0.0;
  double lambda_bar = 0.0;
  double z = 4.0;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  std::vector<double> time_grid;
  std::vector<std::int64_t> count_grid;
  std::vector<std::vector<double>> empirical_tail;
  std::vector<std::vector<double>> reference_tail;
  std::vector<std::vector<double>> std_error;
  std::vector<DominanceViolation> violations;

  // lambda above lambda_bar: domination is not guaranteed.
  bool lambda_exceeds_bar() const { return lambda > lambda_bar; }
  std::size_t cell_count() const { return time_grid.size() * count_grid.size(); }
  // Family-wise false-positive bound for the configured z over the grid.
  std::string bonferroni_note() const;
};

struct DominanceOptions {
  std::vector<double> time_grid;         // empty: default_time_grid()
  std::vector<std::int64_t> count_grid;  // empty: default_count_grid()
  std::uint64_t replicas = 100000;
  std::uint64_t seed = 0;
  double z = 4.0;
  unsigned threads = 1;  // 0: hardware concurrency
};

std::vector<double> default_time_grid();
// 1..max(1, q) where q is the 99.99% quantile of Poisson(lambda * t_max).
std::vector<std::int64_t> default_count_grid(double lambda, double t_max);

// Background starts in equilibrium. Throws DomainError for lambda < 0 or
// fewer than 1000 replicas.
DominanceReport tail_dominance_test(const BromanParams& b, double lambda,
                                    const DominanceOptions& options);

}  // namespace mcpsim
