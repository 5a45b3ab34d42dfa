#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "mcpsim/errors.hpp"
#include "mcpsim/processes.hpp"

using namespace mcpsim;
using S = SiteState;

namespace {

int rank(S s) { return s == S::type1 ? 0 : (s == S::empty ? 1 : 2); }

const GenericMcpRates kExampleRates{32.0, 8.0, 24.0, 1.0, 1};  // beta=4, c=6, alpha=8, d=1

Configuration random_config(const Box& box, std::mt19937_64& rng, bool allow2 = true) {
  Configuration c(box);
  std::uniform_int_distribution<int> u(0, allow2 ? 2 : 1);
  for (auto& s : c.states()) s = static_cast<S>(u(rng));
  return c;
}

}  // namespace

TEST_CASE("relations are the pointwise order 1 < 0 < 2") {
  const S all[] = {S::empty, S::type1, S::type2};
  for (S l : all) {
    for (S u : all) {
      const bool ordered = rank(l) <= rank(u);
      bool every = true;
      for (Relation r : {Relation::type1_superset, Relation::type01_superset,
                         Relation::type02_subset, Relation::type2_subset}) {
        every = every && relation_holds(r, l, u);
      }
      CHECK(every == ordered);
      CHECK(relation_holds(Relation::type1_superset, l, u) == (u != S::type1 || l == S::type1));
      CHECK(relation_holds(Relation::type2_subset, l, u) == (l != S::type2 || u == S::type2));
    }
  }
}

TEST_CASE("evolve: empty log and single transitions") {
  EventLog log;
  log.box = Box(1, 3);
  log.horizon = 1.0;
  log.rates = kExampleRates;
  Configuration init(log.box, S::type1);
  init.set(1, S::type2);
  const auto t0 = evolve(ProcessKind::mcp(), log, init);
  CHECK(t0.changes.empty());
  CHECK(t0.final_state() == init);

  log.events.push_back({0.5, 1, kNoSite, EventKind::death_all});
  const auto t1 = evolve(ProcessKind::mcp(), log, init);
  CHECK(t1.final_state()[1] == S::empty);
  CHECK(t1.at(0.4)[1] == S::type2);
  CHECK(t1.final_state()[0] == S::type1);
}

TEST_CASE("apply_event semantics per process") {
  auto run = [](ProcessKind k, std::array<S, 3> s, Event e) {
    apply_event(k, e, s);
    return s;
  };
  const Event a1{1.0, 1, 0, EventKind::arrow1};
  const Event a2{1.0, 1, 0, EventKind::arrow2};
  const Event x{1.0, 1, kNoSite, EventKind::death_all};
  const Event dot{1.0, 1, kNoSite, EventKind::death1};

  // MCP: births need a matching source and an empty tip.
  CHECK(run(ProcessKind::mcp(), {S::type1, S::empty, S::empty}, a1)[1] == S::type1);
  CHECK(run(ProcessKind::mcp(), {S::empty, S::empty, S::empty}, a1)[1] == S::empty);
  CHECK(run(ProcessKind::mcp(), {S::type2, S::empty, S::empty}, a1)[1] == S::empty);
  CHECK(run(ProcessKind::mcp(), {S::type2, S::empty, S::empty}, a2)[1] == S::type2);
  CHECK(run(ProcessKind::mcp(), {S::type2, S::type1, S::empty}, a2)[1] == S::type1);
  CHECK(run(ProcessKind::mcp(), {S::empty, S::type2, S::empty}, x)[1] == S::empty);
  CHECK(run(ProcessKind::mcp(), {S::empty, S::type1, S::empty}, x)[1] == S::type1);
  CHECK(run(ProcessKind::mcp(), {S::empty, S::type1, S::empty}, dot)[1] == S::empty);
  CHECK(run(ProcessKind::mcp(), {S::empty, S::type2, S::empty}, dot)[1] == S::type2);

  // CPREE: 1-arrows fill empty tips whatever the source holds.
  CHECK(run(ProcessKind::cpree(), {S::empty, S::empty, S::empty}, a1)[1] == S::type1);
  CHECK(run(ProcessKind::cpree(), {S::type2, S::empty, S::empty}, a1)[1] == S::type1);
  CHECK(run(ProcessKind::cpree(), {S::type1, S::type2, S::empty}, a1)[1] == S::type2);

  // CP: x kills the particle, bullets and 2-arrows are inert.
  CHECK(run(ProcessKind::cp(1.0), {S::empty, S::type1, S::empty}, x)[1] == S::empty);
  CHECK(run(ProcessKind::cp(1.0), {S::empty, S::type1, S::empty}, dot)[1] == S::type1);
  CHECK(run(ProcessKind::cp(1.0), {S::type1, S::empty, S::empty}, a1)[1] == S::type1);

  // Perturbed: x kills both types; bullets act only when sigma > 0.
  CHECK(run(ProcessKind::mcp_perturbed(0.0), {S::empty, S::type1, S::empty}, x)[1] == S::empty);
  CHECK(run(ProcessKind::mcp_perturbed(0.0), {S::empty, S::type1, S::empty}, dot)[1] == S::type1);
  CHECK(run(ProcessKind::mcp_perturbed(1.0), {S::empty, S::type1, S::empty}, dot)[1] == S::empty);
}

TEST_CASE("evolve: legality, locality and determinism") {
  std::mt19937_64 rng(41);
  const Box box(2, 5);
  const auto log = generate(box, {3, 1, 2, 1, 2}, 4.0, 42);
  for (ProcessKind k : {ProcessKind::mcp(), ProcessKind::cpree()}) {
    const auto init = random_config(box, rng);
    const auto a = evolve(k, log, init);
    const auto b = evolve(k, log, init);
    REQUIRE(a.changes.size() == b.changes.size());
    for (std::size_t i = 0; i < a.changes.size(); ++i) {
      const auto& c = a.changes[i];
      CHECK(c.event_index == b.changes[i].event_index);
      CHECK(c.site == log.events[c.event_index].tip);
      CHECK(c.from != c.to);
      CHECK(static_cast<int>(c.to) <= 2);
    }
  }
  const auto cp_log = generate(box, cp_rates(1.5, 2), 4.0, 43);
  const auto t = evolve(ProcessKind::cp(1.5), cp_log, random_config(box, rng, false));
  for (const auto& c : t.changes) CHECK(c.to != S::type2);
}

TEST_CASE("evolve: compatibility errors") {
  const Box box(1, 5);
  const auto log = generate(box, kExampleRates, 1.0, 44);
  CHECK_THROWS_AS(evolve(ProcessKind::cp(1.0), log, Configuration(box)), DomainError);
  CHECK_THROWS_AS(evolve(ProcessKind::mcp(), log, Configuration(Box(1, 6))), DomainError);
  const auto cp_log = generate(box, cp_rates(1.0, 1), 1.0, 45);
  CHECK_THROWS_AS(evolve(ProcessKind::cp(1.0), cp_log, Configuration(box, S::type2)), DomainError);
  CHECK_NOTHROW(evolve(ProcessKind::cp(1.0), cp_log, Configuration(box, S::type1)));
  CHECK_THROWS_AS(evolve(ProcessKind::mcp_perturbed(2.0), log, Configuration(box)), DomainError);
}

TEST_CASE("cpree vs mcp coupling") {
  const Box box(1, 32);
  const auto log = generate(box, kExampleRates, 10.0, 46);
  Configuration init(box, S::type1);
  init.set(box.origin(), S::type2);
  const auto rep = couple_cpree_mcp(log, init, init);
  CHECK(rep.passed());
  CHECK(rep.checked_events == log.events.size());
  CHECK(rep.process_names == std::vector<std::string>{"cpree", "mcp"});

  // Without type 1 and 1-arrows the two dynamics coincide.
  const auto no1 = generate(box, {0.0, 0.5, 2.0, 1.0, 1}, 10.0, 47);
  Configuration only2(box);
  only2.set(3, S::type2);
  only2.set(4, S::type2);
  const auto same = couple_cpree_mcp(no1, only2, only2);
  REQUIRE(same.final_configs.size() == 2);
  CHECK(same.final_configs[0] == same.final_configs[1]);

  // Precondition: cpree must hold type 1 wherever mcp does.
  Configuration bad_cpree(box);
  CHECK_THROWS_AS(couple_cpree_mcp(log, init, bad_cpree), PreconditionError);
}

TEST_CASE("attractive coupling") {
  std::mt19937_64 rng(48);
  const Box box(1, 32);
  const auto log = generate(box, kExampleRates, 10.0, 49);
  const auto rep = couple_mcp_attractive(log, Configuration(box, S::type1),
                                         Configuration(box, S::type2));
  CHECK(rep.passed());
  CHECK(rep.relations.size() == 4);

  const auto init = random_config(box, rng);
  const auto eq = couple_mcp_attractive(log, init, init);
  CHECK(eq.passed());
  CHECK(eq.final_configs[0] == eq.final_configs[1]);

  Rng r2 = make_rng(1, 0, Stream::init_config);
  for (int i = 0; i < 20; ++i) {
    auto [lo, up] = random_ordered_pair(box, 0.4, 0.4, 0.3, r2);
    for (Site x = 0; x < box.site_count(); ++x) CHECK(rank(lo[x]) <= rank(up[x]));
    CHECK(couple_mcp_attractive(log, lo, up).passed());
  }
  CHECK_THROWS_AS(couple_mcp_attractive(log, Configuration(box, S::type2),
                                        Configuration(box, S::type1)),
                  PreconditionError);
}

TEST_CASE("prop1 coupling") {
  std::mt19937_64 rng(50);
  const Box box(1, 32);
  const auto init = random_config(box, rng);
  const auto log = generate(box, perturbed_rates(1.0, 2.0, 1.0, 1), 10.0, 51);
  CHECK(couple_prop1(log, 1.0, init).passed());
  CHECK_THROWS_AS(couple_prop1(log, 0.5, init), PreconditionError);

  const auto log0 = generate(box, perturbed_rates(1.0, 2.0, 0.0, 1), 10.0, 52);
  const auto same = couple_prop1(log0, 0.0, init);
  CHECK(same.passed());
  CHECK(same.final_configs[0] == same.final_configs[1]);
}

TEST_CASE("fault injection is reported") {
  const Box box(1, 16);
  const auto log = generate(box, kExampleRates, 5.0, 53);
  CouplingOptions o;
  o.fault = FaultInjection{log.events.size() / 2, box.origin(), S::type2, S::type1};
  const auto rep = couple_mcp_attractive(log, Configuration(box, S::type1),
                                         Configuration(box, S::type2), o);
  REQUIRE_FALSE(rep.passed());
  CHECK(rep.violations.front().site == box.origin());
  CHECK(rep.violations.front().time >= log.events[log.events.size() / 2 - 1].time);
}

TEST_CASE("parameter monotonicity through thinned streams") {
  // Upper copy: fewer x marks and 1-arrows. Lower copy: fewer 2-arrows and
  // bullets. Both run MCP dynamics on their thinned logs.
  std::mt19937_64 rng(54);
  std::bernoulli_distribution keep(0.7);
  const Box box(1, 24);
  for (int rep = 0; rep < 20; ++rep) {
    const auto log = generate(box, {3.0, 1.5, 2.5, 1.0, 1}, 8.0, 55, {static_cast<std::uint64_t>(rep)});
    Configuration lower(box, S::type1);
    Configuration upper(box, S::type2);
    if (rep % 2 == 1) {
      auto pair = random_ordered_pair(box, 0.3, 0.4, 0.5, rng);
      lower = pair.first;
      upper = pair.second;
    }
    const auto k = ProcessKind::mcp();
    for (const auto& e : log.events) {
      const bool to_upper =
          (e.kind != EventKind::death_all && e.kind != EventKind::arrow1) || keep(rng);
      const bool to_lower =
          (e.kind != EventKind::arrow2 && e.kind != EventKind::death1) || keep(rng);
      if (to_lower) apply_event(k, e, lower.states());
      if (to_upper) apply_event(k, e, upper.states());
      CHECK(rank(lower[e.tip]) <= rank(upper[e.tip]));
    }
    for (Site x = 0; x < box.site_count(); ++x) CHECK(rank(lower[x]) <= rank(upper[x]));
  }
}

TEST_CASE("coupling suite") {
  CouplingSuiteConfig cfg;
  cfg.box = Box(1, 16);
  cfg.horizon = 5.0;
  cfg.replicas = 20;
  cfg.seed = 56;
  cfg.rates = kExampleRates;
  for (CouplingKind kind : {CouplingKind::cpree_mcp, CouplingKind::attractive}) {
    cfg.kind = kind;
    for (PairInit init : {PairInit::standard, PairInit::equal, PairInit::random_ordered}) {
      cfg.init = init;
      const auto rep = run_coupling_suite(cfg);
      CHECK(rep.passed());
      CHECK(rep.replicas == 20);
      CHECK(rep.final_configs.size() == 40);
      CHECK(rep.occupancy_series.size() == 20 * 3 * 2);
    }
  }
  cfg.kind = CouplingKind::prop1;
  cfg.sigma = 1.0;
  cfg.rates = perturbed_rates(1.0, 2.0, 1.0, 1);
  cfg.init = PairInit::standard;
  CHECK(run_coupling_suite(cfg).passed());
  cfg.init = PairInit::random_ordered;
  CHECK_THROWS_AS(run_coupling_suite(cfg), DomainError);

  cfg.kind = CouplingKind::attractive;
  cfg.rates = kExampleRates;
  cfg.init = PairInit::standard;
  cfg.fault_replica = 3;
  const auto faulty = run_coupling_suite(cfg);
  REQUIRE_FALSE(faulty.passed());
  for (const auto& v : faulty.violations) CHECK(v.replica == 3);

  // Thread count does not change the merged report.
  cfg.fault_replica.reset();
  cfg.threads = 1;
  const auto one = run_coupling_suite(cfg);
  cfg.threads = 4;
  const auto four = run_coupling_suite(cfg);
  CHECK(one.checked_events == four.checked_events);
  CHECK(one.final_configs == four.final_configs);
}

TEST_CASE("population bound at checkpoints") {
  CouplingSuiteConfig cfg;
  cfg.box = Box(1, 32);
  cfg.horizon = 8.0;
  cfg.replicas = 10;
  cfg.seed = 57;
  cfg.rates = kExampleRates;
  cfg.checkpoints = {1.0, 2.0, 4.0, 8.0};
  const auto rep = run_coupling_suite(cfg);
  CHECK(rep.passed());
  for (std::size_t i = 0; i + 1 < rep.occupancy_series.size(); i += 2) {
    const auto& lo = rep.occupancy_series[i];
    const auto& up = rep.occupancy_series[i + 1];
    CHECK(lo.time == up.time);
    CHECK(lo.pop2 <= up.pop2);
  }
}

TEST_CASE("initial configurations") {
  const Box box(1, 11);
  Rng rng = make_rng(2, 0, Stream::init_config);
  const auto seed_mcp = make_initial(ProcessKind::mcp(), box, {}, rng);
  CHECK(seed_mcp[box.origin()] == S::type2);
  CHECK(seed_mcp.count(S::type1) == 10);
  const auto seed_cp = make_initial(ProcessKind::cp(1.0), box, {}, rng);
  CHECK(seed_cp.count(S::type1) == 1);
  CHECK(seed_cp.count(S::empty) == 10);
  CHECK(make_initial(ProcessKind::mcp(), box, {InitKind::all_2}, rng).count(S::type2) == 11);
  CHECK(make_initial(ProcessKind::cp(1.0), box, {InitKind::all_2}, rng).count(S::type1) == 11);
  CHECK_THROWS_AS(make_initial(ProcessKind::mcp(), box, {InitKind::product_measure, 0.7, 0.7}, rng),
                  DomainError);
  CHECK(seed_mcp.to_string().size() == 11);
}

TEST_CASE("survival estimates") {
  SurvivalConfig cfg;
  cfg.box = Box(1, 31);
  cfg.horizon = 5.0;
  cfg.replicas = 200;
  cfg.seed = 58;

  cfg.kind = ProcessKind::cp(0.0);
  cfg.rates = cp_rates(0.0, 1);
  const auto dead = estimate_survival(cfg);
  CHECK(dead.survive_count <= 200);
  CHECK(dead.origin_occupied_count <= dead.survive_count);
  cfg.horizon = 20.0;
  CHECK(estimate_survival(cfg).survive_count == 0);

  cfg.kind = ProcessKind::mcp();
  cfg.rates = kExampleRates;
  cfg.horizon = 4.0;
  cfg.checkpoints = {1.0, 2.0};
  const auto a = estimate_survival(cfg);
  CHECK(a.tracked == S::type2);
  CHECK(a.checkpoints.size() == 3);
  CHECK(a.checkpoints.back().time == 4.0);
  CHECK(a.estimate == a.checkpoints.back().origin.estimate);
  CHECK(a.survive_estimate == a.checkpoints.back().population.estimate);
  cfg.threads = 3;
  const auto b = estimate_survival(cfg);
  CHECK(a.survive_count == b.survive_count);
  CHECK(a.origin_occupied_count == b.origin_occupied_count);

  cfg.replicas = 99;
  CHECK_THROWS_AS(estimate_survival(cfg), DomainError);
}

TEST_CASE("perturbed type 1 occupies the origin less often") {
  CouplingSuiteConfig cfg;
  cfg.kind = CouplingKind::prop1;
  cfg.sigma = 1.0;
  cfg.rates = perturbed_rates(1.0, 2.0, 1.0, 1);
  cfg.box = Box(1, 32);
  cfg.horizon = 10.0;
  cfg.replicas = 200;
  cfg.seed = 59;
  const auto rep = run_coupling_suite(cfg);
  CHECK(rep.passed());
  int eta1 = 0;
  int xi1 = 0;
  for (const auto& s : rep.occupancy_series) {
    if (s.time != cfg.horizon) continue;
    (s.process == 0 ? eta1 : xi1) += s.origin == S::type1;
  }
  CHECK(xi1 <= eta1);
}
