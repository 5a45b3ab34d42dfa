#include "mcpsim/processes.hpp"

#include <algorithm>
#include <cmath>

#include "mcpsim/errors.hpp"
#include "parallel.hpp"

namespace mcpsim {
namespace {

using S = SiteState;

std::vector<double> resolve_checkpoints(std::vector<double> cps, double horizon) {
  if (cps.empty()) cps = {horizon / 4.0, horizon / 2.0, horizon};
  for (double c : cps) {
    if (!std::isfinite(c) || c < 0.0 || c > horizon) {
      throw DomainError("checkpoints must lie in [0, horizon]");
    }
  }
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

// Index of the first event with time > t.
std::size_t events_through(const EventLog& log, double t) {
  return static_cast<std::size_t>(
      std::upper_bound(log.events.begin(), log.events.end(), t,
                       [](double v, const Event& e) { return v < e.time; }) -
      log.events.begin());
}

struct PairSetup {
  ProcessKind lower_kind;
  ProcessKind upper_kind;
  std::vector<std::string> names;
  std::vector<Relation> relations;
};

class PairRun {
public:
  PairRun(const EventLog& log, const PairSetup& setup, Configuration lower, Configuration upper,
          const CouplingOptions& options)
      : log_(log), setup_(setup), options_(options), lower_(std::move(lower)),
        upper_(std::move(upper)) {
    check_compatible(setup.lower_kind, log);
    check_compatible(setup.upper_kind, log);
    if (!(lower_.box() == log.box) || !(upper_.box() == log.box)) {
      throw DomainError("initial configuration box does not match the log");
    }
    for (Site x = 0; x < lower_.size(); ++x) {
      for (Relation r : setup.relations) {
        if (!relation_holds(r, lower_[x], upper_[x])) {
          throw PreconditionError(std::string("initial configurations violate ") + to_string(r) +
                                  " at site " + std::to_string(x));
        }
      }
    }
    report_.process_names = setup.names;
    report_.relations = setup.relations;
    report_.replicas = 1;
    lower_pop_ = {lower_.count(S::type1), lower_.count(S::type2)};
    upper_pop_ = {upper_.count(S::type1), upper_.count(S::type2)};
  }

  CoupledRunReport run() {
    const auto cps = resolve_checkpoints(options_.checkpoints, log_.horizon);
    std::vector<std::size_t> cp_index(cps.size());
    for (std::size_t c = 0; c < cps.size(); ++c) cp_index[c] = events_through(log_, cps[c]);

    std::size_t next_cp = 0;
    const std::size_t n = log_.events.size();
    for (std::size_t i = 0; i < n; ++i) {
      while (next_cp < cps.size() && cp_index[next_cp] == i) checkpoint(cps[next_cp++]);
      const Event& e = log_.events[i];
      if (options_.fault && options_.fault->at_event == i) inject(e.time);
      step(e);
    }
    while (next_cp < cps.size()) checkpoint(cps[next_cp++]);
    if (options_.fault && options_.fault->at_event >= n) inject(log_.horizon);
    sweep(log_.horizon);

    if (options_.keep_final_configs) {
      report_.final_configs.push_back(lower_);
      report_.final_configs.push_back(upper_);
    }
    return std::move(report_);
  }

private:
  struct Pop {
    std::size_t one = 0;
    std::size_t two = 0;
  };

  static void update(Pop& p, S from, S to) {
    if (from == S::type1) --p.one;
    if (from == S::type2) --p.two;
    if (to == S::type1) ++p.one;
    if (to == S::type2) ++p.two;
  }

  void step(const Event& e) {
    auto ls = lower_.states();
    auto us = upper_.states();
    const S l0 = ls[e.tip];
    const S u0 = us[e.tip];
    apply_event(setup_.lower_kind, e, ls);
    apply_event(setup_.upper_kind, e, us);
    update(lower_pop_, l0, ls[e.tip]);
    update(upper_pop_, u0, us[e.tip]);
    ++report_.checked_events;
    check_site(e.tip, e.time);
  }

  void check_site(Site x, double t) {
    for (Relation r : setup_.relations) {
      if (!relation_holds(r, lower_[x], upper_[x])) {
        report_.violations.push_back({options_.replica, t, x, r});
      }
    }
  }

  void sweep(double t) {
    for (Site x = 0; x < lower_.size(); ++x) check_site(x, t);
  }

  void inject(double t) {
    const auto& f = *options_.fault;
    update(lower_pop_, lower_[f.site], f.lower);
    update(upper_pop_, upper_[f.site], f.upper);
    lower_.set(f.site, f.lower);
    upper_.set(f.site, f.upper);
    check_site(f.site, t);
  }

  void checkpoint(double t) {
    sweep(t);
    const bool bound = std::find(setup_.relations.begin(), setup_.relations.end(),
                                 Relation::population2) != setup_.relations.end();
    if (bound && lower_pop_.two > upper_pop_.two) {
      report_.violations.push_back({options_.replica, t, kNoSite, Relation::population2});
    }
    const Site o = log_.box.origin();
    report_.occupancy_series.push_back(
        {options_.replica, t, 0, lower_[o], lower_pop_.one, lower_pop_.two});
    report_.occupancy_series.push_back(
        {options_.replica, t, 1, upper_[o], upper_pop_.one, upper_pop_.two});
  }

  const EventLog& log_;
  const PairSetup& setup_;
  const CouplingOptions& options_;
  Configuration lower_;
  Configuration upper_;
  Pop lower_pop_;
  Pop upper_pop_;
  CoupledRunReport report_;
};

const std::vector<Relation> kOuterRelations = {Relation::type1_superset, Relation::type2_subset};
const std::vector<Relation> kAllSetRelations = {Relation::type1_superset, Relation::type01_superset,
                                                Relation::type02_subset, Relation::type2_subset};

PairSetup cpree_mcp_setup() {
  auto rel = kOuterRelations;
  rel.push_back(Relation::population2);
  return {ProcessKind::cpree(), ProcessKind::mcp(), {"cpree", "mcp"}, rel};
}

PairSetup attractive_setup() {
  return {ProcessKind::mcp(), ProcessKind::mcp(), {"mcp_lower", "mcp_upper"}, kAllSetRelations};
}

PairSetup prop1_setup(double sigma) {
  return {ProcessKind::mcp_perturbed(0.0), ProcessKind::mcp_perturbed(sigma), {"eta", "xi"},
          kOuterRelations};
}

void check_prop1_log(const EventLog& log, double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) throw DomainError("sigma must be >= 0");
  if (log.rates.d1 != sigma) {
    throw PreconditionError("log_base must carry a bullet stream of rate sigma");
  }
  if (log.rates.d2 != 1.0) throw PreconditionError("log_base must carry x marks at rate 1");
}

}  // namespace

Configuration::Configuration(Box box, SiteState fill)
    : box_(std::move(box)), state_(box_.site_count(), fill) {}

std::size_t Configuration::count(SiteState s) const noexcept {
  return static_cast<std::size_t>(std::count(state_.begin(), state_.end(), s));
}

std::string Configuration::to_string() const {
  std::string out(state_.size(), '0');
  for (std::size_t i = 0; i < state_.size(); ++i) {
    out[i] = static_cast<char>('0' + static_cast<int>(state_[i]));
  }
  return out;
}

const char* to_string(ProcessType type) noexcept {
  switch (type) {
    case ProcessType::cp: return "cp";
    case ProcessType::mcp: return "mcp";
    case ProcessType::cpree: return "cpree";
    case ProcessType::mcp_perturbed: return "mcp_perturbed";
  }
  return "?";
}

GenericMcpRates cp_rates(double lambda, int dim) {
  GenericMcpRates r{lambda, 0.0, 0.0, 1.0, dim};
  r.validate();
  return r;
}

GenericMcpRates perturbed_rates(double b1, double b2, double sigma, int dim) {
  GenericMcpRates r{b1, sigma, b2, 1.0, dim};
  r.validate();
  return r;
}

void check_compatible(const ProcessKind& kind, const EventLog& log) {
  const auto& r = log.rates;
  switch (kind.type) {
    case ProcessType::cp:
      if (!(kind.lambda >= 0.0)) throw DomainError("cp lambda must be >= 0");
      if (r.b1 != kind.lambda || r.b2 != 0.0 || r.d1 != 0.0 || r.d2 != 1.0) {
        throw DomainError("contact process needs a log generated with cp_rates(lambda)");
      }
      break;
    case ProcessType::mcp_perturbed:
      if (!(kind.sigma >= 0.0)) throw DomainError("sigma must be >= 0");
      if (kind.sigma > 0.0 && (r.d1 != kind.sigma || r.d2 != 1.0)) {
        throw DomainError("perturbed MCP needs bullet marks at rate sigma and x marks at rate 1");
      }
      break;
    case ProcessType::mcp:
    case ProcessType::cpree:
      break;
  }
}

void apply_event(const ProcessKind& kind, const Event& e, std::span<SiteState> states) noexcept {
  SiteState& x = states[e.tip];
  switch (e.kind) {
    case EventKind::death_all:
      if (kind.type == ProcessType::cp || kind.type == ProcessType::mcp_perturbed) {
        if (x == S::type1) x = S::empty;
      }
      if (x == S::type2) x = S::empty;
      break;
    case EventKind::death1:
      if (kind.type == ProcessType::cp) break;
      if (kind.type == ProcessType::mcp_perturbed && kind.sigma == 0.0) break;
      if (x == S::type1) x = S::empty;
      break;
    case EventKind::arrow1:
      if (x != S::empty) break;
      if (kind.type == ProcessType::cpree || states[e.source] == S::type1) x = S::type1;
      break;
    case EventKind::arrow2:
      if (kind.type == ProcessType::cp) break;
      if (x == S::empty && states[e.source] == S::type2) x = S::type2;
      break;
  }
}

Configuration Trajectory::at(double t) const {
  Configuration c = initial;
  for (const auto& ch : changes) {
    if (ch.time > t) break;
    c.set(ch.site, ch.to);
  }
  return c;
}

Configuration Trajectory::final_state() const {
  Configuration c = initial;
  for (const auto& ch : changes) c.set(ch.site, ch.to);
  return c;
}

Trajectory evolve(const ProcessKind& kind, const EventLog& log, const Configuration& init) {
  check_compatible(kind, log);
  if (!(init.box() == log.box)) throw DomainError("initial configuration box does not match the log");
  if (kind.type == ProcessType::cp && init.count(S::type2) != 0) {
    throw DomainError("contact process configurations hold only 0 and 1");
  }
  Trajectory traj{init, {}};
  Configuration cur = init;
  auto states = cur.states();
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const Event& e = log.events[i];
    const S before = states[e.tip];
    apply_event(kind, e, states);
    if (states[e.tip] != before) traj.changes.push_back({i, e.time, e.tip, before, states[e.tip]});
  }
  return traj;
}

const char* to_string(Relation r) noexcept {
  switch (r) {
    case Relation::type1_superset: return "type1_superset";
    case Relation::type01_superset: return "type01_superset";
    case Relation::type02_subset: return "type02_subset";
    case Relation::type2_subset: return "type2_subset";
    case Relation::population2: return "population2";
  }
  return "?";
}

bool relation_holds(Relation r, SiteState l, SiteState u) noexcept {
  switch (r) {
    case Relation::type1_superset: return u != S::type1 || l == S::type1;
    case Relation::type01_superset: return u == S::type2 || l != S::type2;
    case Relation::type02_subset: return l == S::type1 || u != S::type1;
    case Relation::type2_subset: return l != S::type2 || u == S::type2;
    case Relation::population2: return true;
  }
  return false;
}

CoupledRunReport couple_cpree_mcp(const EventLog& log, const Configuration& init_mcp,
                                  const Configuration& init_cpree,
                                  const CouplingOptions& options) {
  const auto setup = cpree_mcp_setup();
  return PairRun(log, setup, init_cpree, init_mcp, options).run();
}

CoupledRunReport couple_mcp_attractive(const EventLog& log, const Configuration& init_lower,
                                       const Configuration& init_upper,
                                       const CouplingOptions& options) {
  const auto setup = attractive_setup();
  return PairRun(log, setup, init_lower, init_upper, options).run();
}

CoupledRunReport couple_prop1(const EventLog& log_base, double sigma, const Configuration& init,
                              const CouplingOptions& options) {
  check_prop1_log(log_base, sigma);
  const auto setup = prop1_setup(sigma);
  return PairRun(log_base, setup, init, init, options).run();
}

Configuration make_initial(const ProcessKind& kind, const Box& box, const InitSpec& init,
                           Rng& rng) {
  const bool cp = kind.type == ProcessType::cp;
  const S top = cp ? S::type1 : S::type2;
  switch (init.kind) {
    case InitKind::single_seed_at_origin: {
      Configuration c(box, cp ? S::empty : S::type1);
      c.set(box.origin(), top);
      return c;
    }
    case InitKind::all_2:
      return Configuration(box, top);
    case InitKind::product_measure: {
      const double p2 = cp ? 0.0 : init.p2;
      if (!(init.p1 >= 0.0 && p2 >= 0.0 && init.p1 + p2 <= 1.0)) {
        throw DomainError("product measure needs p1, p2 >= 0 and p1 + p2 <= 1");
      }
      Configuration c(box);
      for (auto& s : c.states()) {
        const double u = uniform01(rng);
        s = u < init.p1 ? S::type1 : (u < init.p1 + p2 ? S::type2 : S::empty);
      }
      return c;
    }
  }
  throw DomainError("unknown init kind");
}

std::pair<Configuration, Configuration> random_ordered_pair(const Box& box, double p1, double p2,
                                                            double degrade, Rng& rng) {
  InitSpec spec{InitKind::product_measure, p1, p2};
  Configuration upper = make_initial(ProcessKind::mcp(), box, spec, rng);
  Configuration lower = upper;
  for (auto& s : lower.states()) {
    if (!bernoulli(rng, degrade) || s == S::type1) continue;
    // Move strictly down the order 1 < 0 < 2.
    if (s == S::empty) s = S::type1;
    else s = bernoulli(rng, 0.5) ? S::empty : S::type1;
  }
  return {std::move(lower), std::move(upper)};
}

const char* to_string(CouplingKind kind) noexcept {
  switch (kind) {
    case CouplingKind::cpree_mcp: return "cpree-mcp";
    case CouplingKind::attractive: return "attractive";
    case CouplingKind::prop1: return "prop1";
  }
  return "?";
}

CoupledRunReport run_coupling_suite(const CouplingSuiteConfig& cfg) {
  if (cfg.replicas == 0) throw DomainError("replicas must be >= 1");
  const PairSetup setup = cfg.kind == CouplingKind::cpree_mcp  ? cpree_mcp_setup()
                          : cfg.kind == CouplingKind::attractive ? attractive_setup()
                                                                 : prop1_setup(cfg.sigma);
  resolve_checkpoints(cfg.checkpoints, cfg.horizon);

  std::vector<CoupledRunReport> slots(cfg.replicas);
  detail::parallel_for(cfg.replicas, cfg.threads, [&](std::size_t r) {
    GenerateOptions gen;
    gen.replica = r;
    const EventLog log = generate(cfg.box, cfg.rates, cfg.horizon, cfg.seed, gen);
    if (cfg.kind == CouplingKind::prop1) check_prop1_log(log, cfg.sigma);

    Rng rng = make_rng(cfg.seed, r, Stream::init_config);
    const InitSpec product{InitKind::product_measure, cfg.p1, cfg.p2};
    std::optional<Configuration> lower;
    std::optional<Configuration> upper;
    switch (cfg.init) {
      case PairInit::standard:
        if (cfg.kind == CouplingKind::cpree_mcp) {
          lower = upper = make_initial(ProcessKind::mcp(), cfg.box, InitSpec{}, rng);
        } else if (cfg.kind == CouplingKind::attractive) {
          lower = Configuration(cfg.box, S::type1);
          upper = Configuration(cfg.box, S::type2);
        } else {
          lower = upper = make_initial(ProcessKind::mcp(), cfg.box, product, rng);
        }
        break;
      case PairInit::equal:
        lower = upper = make_initial(ProcessKind::mcp(), cfg.box, product, rng);
        break;
      case PairInit::random_ordered: {
        if (cfg.kind == CouplingKind::prop1) {
          throw DomainError("prop1 starts both processes from one configuration");
        }
        auto pair = random_ordered_pair(cfg.box, cfg.p1, cfg.p2, 0.3, rng);
        lower = std::move(pair.first);
        upper = std::move(pair.second);
        break;
      }
    }

    CouplingOptions opt;
    opt.checkpoints = cfg.checkpoints;
    opt.replica = r;
    opt.keep_final_configs = cfg.keep_final_configs;
    if (cfg.fault_replica && *cfg.fault_replica == r) {
      opt.fault = FaultInjection{log.events.size() / 2, cfg.box.origin(), S::type2, S::type1};
    }
    slots[r] = PairRun(log, setup, std::move(*lower), std::move(*upper), opt).run();
  });

  CoupledRunReport out;
  out.process_names = setup.names;
  out.relations = setup.relations;
  for (auto& s : slots) {
    out.replicas += s.replicas;
    out.checked_events += s.checked_events;
    out.violations.insert(out.violations.end(), s.violations.begin(), s.violations.end());
    for (auto& c : s.final_configs) out.final_configs.push_back(std::move(c));
    out.occupancy_series.insert(out.occupancy_series.end(), s.occupancy_series.begin(),
                                s.occupancy_series.end());
  }
  return out;
}

SurvivalEstimate estimate_survival(const SurvivalConfig& cfg) {
  if (cfg.replicas < 100) throw DomainError("survival estimation needs >= 100 replicas");
  if (!std::isfinite(cfg.horizon) || !(cfg.horizon > 0.0)) throw DomainError("horizon must be > 0");
  const S tracked = cfg.tracked.value_or(cfg.kind.tracked());
  if (tracked == S::empty) throw DomainError("tracked state must be type 1 or type 2");
  {
    EventLog probe{cfg.box, cfg.horizon, cfg.seed, cfg.rates, {}};
    check_compatible(cfg.kind, probe);
  }
  std::vector<double> times = cfg.checkpoints;
  times.push_back(cfg.horizon);
  times = resolve_checkpoints(times, cfg.horizon);
  // A tracked type that needs a same-type parent never comes back once gone.
  const bool absorbing = !(cfg.kind.type == ProcessType::cpree && tracked == S::type1);

  struct Outcome {
    std::vector<char> origin;
    std::vector<char> alive;
  };
  std::vector<Outcome> slots(cfg.replicas);
  const Site o = cfg.box.origin();

  detail::parallel_for(cfg.replicas, cfg.threads, [&](std::size_t r) {
    Rng init_rng = make_rng(cfg.seed, r, Stream::init_config);
    Configuration conf = make_initial(cfg.kind, cfg.box, cfg.init, init_rng);
    auto states = conf.states();
    std::size_t pop = conf.count(tracked);

    GenerateOptions gen;
    gen.replica = r;
    gen.max_events = cfg.max_events;
    EventStream stream(cfg.box, cfg.rates, cfg.horizon, cfg.seed, gen);
    Outcome out{std::vector<char>(times.size(), 0), std::vector<char>(times.size(), 0)};
    std::size_t c = 0;
    Event e;
    bool more = stream.next(e);
    while (c < times.size()) {
      if (more && e.time <= times[c]) {
        const S before = states[e.tip];
        apply_event(cfg.kind, e, states);
        const S after = states[e.tip];
        if (before == tracked && after != tracked) --pop;
        if (after == tracked && before != tracked) ++pop;
        if (pop == 0 && absorbing) break;
        more = stream.next(e);
        continue;
      }
      out.origin[c] = states[o] == tracked;
      out.alive[c] = pop > 0;
      ++c;
    }
    slots[r] = std::move(out);
  });

  SurvivalEstimate est;
  est.kind = cfg.kind;
  est.tracked = tracked;
  est.replicas = cfg.replicas;
  for (std::size_t c = 0; c < times.size(); ++c) {
    std::uint64_t origin = 0;
    std::uint64_t alive = 0;
    for (const auto& s : slots) {
      origin += static_cast<std::uint64_t>(s.origin[c]);
      alive += static_cast<std::uint64_t>(s.alive[c]);
    }
    est.checkpoints.push_back(
        {times[c], stats::proportion(origin, cfg.replicas), stats::proportion(alive, cfg.replicas)});
  }
  const auto& last = est.checkpoints.back();
  est.survive_count = last.population.count;
  est.origin_occupied_count = last.origin.count;
  est.estimate = last.origin.estimate;
  est.half_width = last.origin.half_width;
  est.survive_estimate = last.population.estimate;
  est.survive_half_width = last.population.half_width;
  return est;
}

}  // namespace mcpsim
