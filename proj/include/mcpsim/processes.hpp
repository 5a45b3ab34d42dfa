#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcpsim/graphical.hpp"
#include "mcpsim/rng.hpp"
#include "mcpsim/stats.hpp"
#include "mcpsim/thresholds.hpp"

namespace mcpsim {

enum class SiteState : std::uint8_t { empty = 0, type1 = 1, type2 = 2 };

// Dense lattice state. For the standard contact process type1 means infected.
class Configuration {
public:
  explicit Configuration(Box box, SiteState fill = SiteState::empty);

  const Box& box() const noexcept { return box_; }
  std::size_t size() const noexcept { return state_.size(); }
  SiteState operator[](Site x) const { return state_[x]; }
  void set(Site x, SiteState s) { state_.at(x) = s; }
  std::span<SiteState> states() noexcept { return state_; }
  std::span<const SiteState> states() const noexcept { return state_; }
  std::size_t count(SiteState s) const noexcept;

  // One digit per site, "0", "1" or "2".
  std::string to_string() const;

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.box_ == b.box_ && a.state_ == b.state_;
  }

private:
  Box box_;
  std::vector<SiteState> state_;
};

enum class ProcessType { cp, mcp, cpree, mcp_perturbed };

// How a process reads the graphical construction.
//   cp            1-arrows infect from infected sources, x marks cure.
//   mcp           arrows of type i give birth to type i from type-i sources
//                 onto empty tips; x kills type 2, bullet kills type 1.
//   cpree         as mcp, but a 1-arrow fills an empty tip with type 1
//                 whatever its source holds.
//   mcp_perturbed x kills both types; bullet marks (rate sigma) kill type 1
//                 when sigma > 0 and are ignored when sigma == 0.
struct ProcessKind {
  ProcessType type = ProcessType::mcp;
  double lambda = 0.0;  // cp only
  double sigma = 0.0;   // mcp_perturbed only

  static ProcessKind cp(double lambda) { return {ProcessType::cp, lambda, 0.0}; }
  static ProcessKind mcp() { return {ProcessType::mcp, 0.0, 0.0}; }
  static ProcessKind cpree() { return {ProcessType::cpree, 0.0, 0.0}; }
  static ProcessKind mcp_perturbed(double sigma) {
    return {ProcessType::mcp_perturbed, 0.0, sigma};
  }

  // Type whose survival is of interest: infected for cp, type 2 otherwise.
  SiteState tracked() const noexcept {
    return type == ProcessType::cp ? SiteState::type1 : SiteState::type2;
  }
};

const char* to_string(ProcessType type) noexcept;

// Graphical-construction intensities for the contact process with birth
// rate lambda and death rate 1.
GenericMcpRates cp_rates(double lambda, int dim);

// Shared construction of the death-rate perturbation coupling: 1- and
// 2-arrows, x marks at rate 1 and bullet marks at rate sigma. The perturbed
// process then has type-1 death rate 1 + sigma.
GenericMcpRates perturbed_rates(double b1, double b2, double sigma, int dim);

// Throws DomainError when the log's stream intensities cannot represent the
// process (cp needs cp_rates(lambda); mcp_perturbed with sigma > 0 needs a
// bullet stream of rate sigma and x marks at rate 1).
void check_compatible(const ProcessKind& kind, const EventLog& log);

// Applies one event in place. Only states[e.tip] can change.
void apply_event(const ProcessKind& kind, const Event& e, std::span<SiteState> states) noexcept;

struct StateChange {
  std::size_t event_index = 0;
  double time = 0.0;
  Site site = 0;
  SiteState from = SiteState::empty;
  SiteState to = SiteState::empty;
};

// Initial configuration plus every state change, in event order.
struct Trajectory {
  Configuration initial;
  std::vector<StateChange> changes;

  // Configuration after all events with time <= t.
  Configuration at(double t) const;
  Configuration final_state() const;
};

Trajectory evolve(const ProcessKind& kind, const EventLog& log, const Configuration& init);

// Coupled-run relations between a lower process L and an upper process U,
// named after the set inclusions they assert. With type 1 ranked below empty
// and empty below type 2, all four together are the pointwise order L <= U.
enum class Relation : std::uint8_t {
  type1_superset,   // {L=1} contains {U=1}
  type01_superset,  // {L in {0,1}} contains {U in {0,1}}
  type02_subset,    // {L in {0,2}} is contained in {U in {0,2}}
  type2_subset,     // {L=2} is contained in {U=2}
  population2,      // |{L=2}| <= |{U=2}| at checkpoints
};

const char* to_string(Relation r) noexcept;

// True iff the pair of site states satisfies relation r (population2 is
// always true at site level).
bool relation_holds(Relation r, SiteState lower, SiteState upper) noexcept;

struct CouplingViolation {
  std::uint64_t replica = 0;
  double time = 0.0;
  Site site = 0;
  Relation relation = Relation::type1_superset;
};

struct OccupancySample {
  std::uint64_t replica = 0;
  double time = 0.0;
  int process = 0;  // index into process_names
  SiteState origin = SiteState::empty;
  std::size_t pop1 = 0;
  std::size_t pop2 = 0;
};

struct CoupledRunReport {
  std::vector<std::string> process_names;  // {lower, upper}
  std::vector<Relation> relations;
  std::uint64_t replicas = 0;
  std::uint64_t checked_events = 0;
  std::vector<CouplingViolation> violations;
  std::vector<Configuration> final_configs;  // lower, upper per replica
  std::vector<OccupancySample> occupancy_series;

  bool passed() const noexcept { return violations.empty(); }
};

// Test hook: overwrite one site of both processes just before event
// `at_event` is applied (after the last event when at_event >= size).
struct FaultInjection {
  std::size_t at_event = 0;
  Site site = 0;
  SiteState lower = SiteState::type2;
  SiteState upper = SiteState::type1;
};

struct CouplingOptions {
  std::vector<double> checkpoints;  // empty: {T/4, T/2, T}
  std::optional<FaultInjection> fault;
  std::uint64_t replica = 0;
  bool keep_final_configs = true;
};

// CPREE (lower) against MCP (upper) on one log; asserts {cpree=1} contains
// {mcp=1} and {cpree=2} is contained in {mcp=2}, plus the type-2 population
// bound at checkpoints. Inits must satisfy the same relations.
CoupledRunReport couple_cpree_mcp(const EventLog& log, const Configuration& init_mcp,
                                  const Configuration& init_cpree,
                                  const CouplingOptions& options = {});

// Two MCPs on one log; all four set relations asserted.
CoupledRunReport couple_mcp_attractive(const EventLog& log, const Configuration& init_lower,
                                       const Configuration& init_upper,
                                       const CouplingOptions& options = {});

// Death-rate perturbation: eta (lower, mcp_perturbed(0)) ignores bullet marks
// while xi (upper, mcp_perturbed(sigma)) kills type 1 at them. log_base must
// carry a bullet stream of rate sigma; both start from init.
CoupledRunReport couple_prop1(const EventLog& log_base, double sigma, const Configuration& init,
                              const CouplingOptions& options = {});

enum class InitKind { single_seed_at_origin, product_measure, all_2 };

struct InitSpec {
  InitKind kind = InitKind::single_seed_at_origin;
  double p1 = 0.5;
  double p2 = 0.5;
};

// single_seed_at_origin: origin tracked, all else type 1 (empty for cp).
// product_measure: i.i.d. sites, type 1 w.p. p1, type 2 w.p. p2 (cp: infected
// w.p. p1). all_2: every site type 2 (infected for cp).
Configuration make_initial(const ProcessKind& kind, const Box& box, const InitSpec& init,
                           Rng& rng);

// Random configuration pair with lower <= upper: upper from the product
// measure, lower obtained by moving each site down the order 1 < 0 < 2 with
// probability `degrade`.
std::pair<Configuration, Configuration> random_ordered_pair(const Box& box, double p1,
                                                            double p2, double degrade,
                                                            Rng& rng);

enum class CouplingKind { cpree_mcp, attractive, prop1 };
enum class PairInit { standard, equal, random_ordered };

const char* to_string(CouplingKind kind) noexcept;

// Many replicas of one coupling, each on its own freshly generated log.
// standard inits: cpree_mcp origin=2/others=1 for both; attractive lower
// all 1 and upper all 2; prop1 one product-measure draw shared by both.
struct CouplingSuiteConfig {
  CouplingKind kind = CouplingKind::cpree_mcp;
  GenericMcpRates rates;  // prop1: perturbed_rates(...)
  double sigma = 0.0;     // prop1 only
  Box box{1, 64};
  double horizon = 20.0;
  std::uint64_t replicas = 1000;
  std::uint64_t seed = 0;
  PairInit init = PairInit::standard;
  double p1 = 0.5;
  double p2 = 0.5;
  std::vector<double> checkpoints;
  std::optional<std::uint64_t> fault_replica;  // inject mid-run at the origin
  bool keep_final_configs = true;
  unsigned threads = 1;
};

CoupledRunReport run_coupling_suite(const CouplingSuiteConfig& config);

struct CheckpointEstimate {
  double time = 0.0;
  stats::Proportion origin;      // tracked type at the origin
  stats::Proportion population;  // tracked type present anywhere
};

// Finite-horizon proxies for strong survival.
struct SurvivalEstimate {
  ProcessKind kind;
  SiteState tracked = SiteState::type2;
  std::uint64_t replicas = 0;
  std::uint64_t survive_count = 0;          // tracked population > 0 at horizon
  std::uint64_t origin_occupied_count = 0;  // tracked type at origin at horizon
  double estimate = 0.0;                    // origin occupancy probability
  double half_width = 0.0;                  // 95%
  double survive_estimate = 0.0;
  double survive_half_width = 0.0;
  std::vector<CheckpointEstimate> checkpoints;
};

struct SurvivalConfig {
  ProcessKind kind;
  GenericMcpRates rates;
  Box box{1, 101};
  double horizon = 20.0;
  std::uint64_t replicas = 1000;
  std::uint64_t seed = 0;
  InitSpec init;
  std::vector<double> checkpoints;   // extra times; the horizon is always reported
  std::optional<SiteState> tracked;  // default kind.tracked()
  std::uint64_t max_events = 100'000'000;
  unsigned threads = 1;
};

// Replica r uses graphical seed (seed, r), so two configs with equal seeds
// and rates see identical constructions. Requires replicas >= 100.
SurvivalEstimate estimate_survival(const SurvivalConfig& config);

}  // namespace mcpsim
