#include "mcpsim/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mcpsim/errors.hpp"
#include "mcpsim/stats.hpp"
#include "parallel.hpp"

namespace mcpsim {
namespace {

void require_horizon(double horizon) {
  if (!std::isfinite(horizon) || !(horizon > 0.0)) throw DomainError("horizon must be > 0");
}

}  // namespace

int ModulatedTrajectory::state_at(double t) const {
  auto it = std::upper_bound(background_flips.begin(), background_flips.end(), t,
                             [](double v, const BackgroundFlip& f) { return v < f.time; });
  return it == background_flips.begin() ? initial_state : std::prev(it)->state;
}

std::size_t ModulatedTrajectory::count_at(double t) const {
  return static_cast<std::size_t>(std::upper_bound(arrivals.begin(), arrivals.end(), t) -
                                  arrivals.begin());
}

double ModulatedTrajectory::time_in_state(int state) const {
  double total = 0.0;
  double since = 0.0;
  int current = initial_state;
  for (const auto& f : background_flips) {
    if (current == state) total += f.time - since;
    since = f.time;
    current = f.state;
  }
  if (current == state) total += horizon - since;
  return total;
}

ModulatedTrajectory simulate_modulated(const BromanParams& b, double horizon, Rng& rng,
                                       BackgroundInit init) {
  b.validate();
  require_horizon(horizon);
  ModulatedTrajectory out;
  out.horizon = horizon;
  switch (init) {
    case BackgroundInit::equilibrium: out.initial_state = bernoulli(rng, b.p) ? 1 : 0; break;
    case BackgroundInit::fixed0: out.initial_state = 0; break;
    case BackgroundInit::fixed1: out.initial_state = 1; break;
  }
  const double up = b.gamma * b.p;
  const double down = b.gamma * (1.0 - b.p);
  int state = out.initial_state;
  double t = 0.0;
  for (;;) {
    const double flip = state == 1 ? down : up;
    const double arrive = state == 1 ? b.alpha1 : b.alpha0;
    const double total = flip + arrive;
    t += exponential(rng, total);
    if (t > horizon) break;
    if (uniform01(rng) * total < arrive) {
      out.arrivals.push_back(t);
    } else {
      state ^= 1;
      out.background_flips.push_back({t, state});
    }
  }
  return out;
}

ModulatedTrajectory simulate_modulated(const BromanParams& b, double horizon,
                                       std::uint64_t seed, BackgroundInit init) {
  Rng rng = make_rng(seed, 0, Stream::modulated);
  return simulate_modulated(b, horizon, rng, init);
}

std::vector<double> simulate_poisson(double rate, double horizon, Rng& rng) {
  if (!std::isfinite(rate) || rate < 0.0) throw DomainError("rate must be >= 0");
  require_horizon(horizon);
  std::vector<double> out;
  if (rate == 0.0) return out;
  for (double t = exponential(rng, rate); t <= horizon; t += exponential(rng, rate)) {
    out.push_back(t);
  }
  return out;
}

std::vector<double> simulate_poisson(double rate, double horizon, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0, Stream::poisson);
  return simulate_poisson(rate, horizon, rng);
}

std::string DominanceReport::bonferroni_note() const {
  // One-sided normal tail at z, times the number of cells.
  const double per_cell = 0.5 * std::erfc(z / std::sqrt(2.0));
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%zu cells tested at z=%.3g (per-cell false-positive rate %.3g); "
                "family-wise rate <= %.3g by Bonferroni",
                cell_count(), z, per_cell, std::min(1.0, per_cell * double(cell_count())));
  return buf;
}

std::vector<double> default_time_grid() { return {0.5, 1.0, 2.0, 5.0, 10.0}; }

std::vector<std::int64_t> default_count_grid(double lambda, double t_max) {
  const std::int64_t q = std::max<std::int64_t>(1, stats::poisson_quantile(lambda * t_max, 0.9999));
  std::vector<std::int64_t> grid(static_cast<std::size_t>(q));
  for (std::int64_t k = 1; k <= q; ++k) grid[static_cast<std::size_t>(k - 1)] = k;
  return grid;
}

DominanceReport tail_dominance_test(const BromanParams& b, double lambda,
                                    const DominanceOptions& options) {
  b.validate();
  if (!std::isfinite(lambda) || lambda < 0.0) throw DomainError("lambda must be >= 0");
  if (options.replicas < 1000) throw DomainError("tail dominance test needs >= 1000 replicas");
  if (!(options.z > 0.0)) throw DomainError("z must be > 0");

  DominanceReport rep;
  rep.params = b;
  rep.lambda = lambda;
  rep.lambda_bar = lambda_bar_broman(b);
  rep.z = options.z;
  rep.replicas = options.replicas;
  rep.seed = options.seed;
  rep.time_grid = options.time_grid.empty() ? default_time_grid() : options.time_grid;
  std::sort(rep.time_grid.begin(), rep.time_grid.end());
  for (double t : rep.time_grid) require_horizon(t);
  const double t_max = rep.time_grid.back();
  rep.count_grid =
      options.count_grid.empty() ? default_count_grid(lambda, t_max) : options.count_grid;
  std::sort(rep.count_grid.begin(), rep.count_grid.end());
  rep.count_grid.erase(std::unique(rep.count_grid.begin(), rep.count_grid.end()),
                       rep.count_grid.end());

  const std::size_t nt = rep.time_grid.size();
  const std::size_t n = options.replicas;
  std::vector<std::int64_t> counts(n * nt);
  detail::parallel_for(n, options.threads, [&](std::size_t i) {
    Rng rng = make_rng(options.seed, i, Stream::modulated);
    const auto traj = simulate_modulated(b, t_max, rng, BackgroundInit::equilibrium);
    for (std::size_t j = 0; j < nt; ++j) {
      counts[i * nt + j] = static_cast<std::int64_t>(traj.count_at(rep.time_grid[j]));
    }
  });

  const double nd = static_cast<double>(n);
  const std::size_t nk = rep.count_grid.size();
  rep.empirical_tail.assign(nt, std::vector<double>(nk));
  rep.reference_tail.assign(nt, std::vector<double>(nk));
  rep.std_error.assign(nt, std::vector<double>(nk));
  for (std::size_t j = 0; j < nt; ++j) {
    std::vector<std::int64_t> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = counts[i * nt + j];
    std::sort(col.begin(), col.end());
    for (std::size_t c = 0; c < nk; ++c) {
      const std::int64_t k = rep.count_grid[c];
      const auto at_least = col.end() - std::lower_bound(col.begin(), col.end(), k);
      const double emp = static_cast<double>(at_least) / nd;
      const double ref = stats::poisson_tail(lambda * rep.time_grid[j], k);
      // Null variance at the reference tail; floored at 1/n where the normal
      // approximation to a near-degenerate binomial breaks down.
      const double var = std::max({ref * (1.0 - ref), emp * (1.0 - emp), 1.0 / nd});
      const double se = std::sqrt(var / nd);
      rep.empirical_tail[j][c] = emp;
      rep.reference_tail[j][c] = ref;
      rep.std_error[j][c] = se;
      const double deficit = ref - emp;
      if (deficit > options.z * se) rep.violations.push_back({rep.time_grid[j], k, deficit, se});
    }
  }
  return rep;
}

}  // namespace mcpsim
