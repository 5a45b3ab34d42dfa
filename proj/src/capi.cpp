#include "mcpsim/mcpsim.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "mcpsim/errors.hpp"
#include "mcpsim/graphical.hpp"
#include "mcpsim/pointproc.hpp"
#include "mcpsim/processes.hpp"
#include "mcpsim/report_io.hpp"
#include "mcpsim/thresholds.hpp"
#include "version.hpp"

struct mcpsim_dominance_report {
  mcpsim::DominanceReport report;
};

struct mcpsim_couple_report {
  mcpsim::CoupledRunReport report;
};

struct mcpsim_survival_report {
  mcpsim::SurvivalEstimate estimate;
};

namespace {

thread_local std::string g_last_error;

class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

template <class Fn>
mcpsim_status guarded(Fn&& fn) noexcept {
  g_last_error.clear();
  try {
    fn();
    return MCPSIM_OK;
  } catch (const ArgumentError& e) {
    g_last_error = e.what();
    return MCPSIM_ERR_ARGUMENT;
  } catch (const mcpsim::DomainError& e) {
    g_last_error = e.what();
    return MCPSIM_ERR_DOMAIN;
  } catch (const mcpsim::PreconditionError& e) {
    g_last_error = e.what();
    return MCPSIM_ERR_PRECONDITION;
  } catch (const mcpsim::ResourceError& e) {
    g_last_error = e.what();
    return MCPSIM_ERR_RESOURCE;
  } catch (const mcpsim::FormatError& e) {
    g_last_error = e.what();
    return MCPSIM_ERR_FORMAT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MCPSIM_ERR_RESOURCE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MCPSIM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MCPSIM_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw ArgumentError(std::string(what) + " is null");
}

mcpsim::McpParams to_params(const mcpsim_params* p) {
  require(p, "params");
  return mcpsim::McpParams(p->beta, p->c, p->alpha, p->dim);
}

mcpsim::BromanParams to_broman(const mcpsim_broman_params& b) {
  return {b.alpha0, b.alpha1, b.gamma, b.p};
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mcpsim::Box to_box(int dim, int side, int periodic) {
  return mcpsim::Box(dim, side, periodic ? mcpsim::Boundary::periodic : mcpsim::Boundary::free);
}

void check_format(mcpsim_format fmt) {
  if (fmt != MCPSIM_FORMAT_CSV && fmt != MCPSIM_FORMAT_JSON) throw ArgumentError("unknown format");
}

}  // namespace

extern "C" {

const char* mcpsim_version(void) { return MCPSIM_VERSION_STRING; }

const char* mcpsim_last_error(void) { return g_last_error.c_str(); }

void mcpsim_string_free(char* s) { std::free(s); }

mcpsim_status mcpsim_lambda_bar(const mcpsim_params* p, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = mcpsim::lambda_bar_mcp(to_params(p));
  });
}

mcpsim_status mcpsim_lambda_bar_broman(const mcpsim_broman_params* b, double* out) {
  return guarded([&] {
    require(b, "params");
    require(out, "out");
    *out = mcpsim::lambda_bar_broman(to_broman(*b));
  });
}

mcpsim_status mcpsim_cpree_broman_params(const mcpsim_params* p, mcpsim_broman_params* out) {
  return guarded([&] {
    require(out, "out");
    const auto b = mcpsim::cpree_broman_params(to_params(p));
    *out = {b.alpha0, b.alpha1, b.gamma, b.p};
  });
}

mcpsim_status mcpsim_c_star(double alpha, double beta, int dim, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = mcpsim::c_star(alpha, beta, dim);
  });
}

mcpsim_status mcpsim_sufficient_c_bound(double alpha, double beta, int dim, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = mcpsim::sufficient_c_bound(alpha, beta, dim);
  });
}

mcpsim_status mcpsim_survival_sufficient(const mcpsim_params* p, double lambda_c_ref, int* out) {
  return guarded([&] {
    require(out, "out");
    *out = mcpsim::survival_sufficient(to_params(p), lambda_c_ref) ? 1 : 0;
  });
}

mcpsim_status mcpsim_lambda_c_bounds(int dim, double* lower, double* upper) {
  return guarded([&] {
    require(lower, "lower");
    require(upper, "upper");
    *lower = mcpsim::lambda_c_lower_bound(dim);
    *upper = mcpsim::lambda_c_upper_bound(dim);
  });
}

mcpsim_status mcpsim_dominance_run(const mcpsim_dominance_config* cfg,
                                   mcpsim_dominance_report** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = nullptr;
    mcpsim::DominanceOptions opt;
    if (cfg->times != nullptr) opt.time_grid.assign(cfg->times, cfg->times + cfg->n_times);
    if (cfg->max_count > 0) {
      for (std::int64_t k = 1; k <= cfg->max_count; ++k) opt.count_grid.push_back(k);
    }
    opt.replicas = cfg->replicas;
    opt.seed = cfg->seed;
    opt.z = cfg->z;
    opt.threads = cfg->threads;
    auto rep = mcpsim::tail_dominance_test(to_broman(cfg->params), cfg->lambda, opt);
    *out = new mcpsim_dominance_report{std::move(rep)};
  });
}

size_t mcpsim_dominance_violations(const mcpsim_dominance_report* r) {
  return r ? r->report.violations.size() : 0;
}

size_t mcpsim_dominance_cells(const mcpsim_dominance_report* r) {
  return r ? r->report.cell_count() : 0;
}

double mcpsim_dominance_lambda_bar(const mcpsim_dominance_report* r) {
  return r ? r->report.lambda_bar : 0.0;
}

mcpsim_status mcpsim_dominance_serialize(const mcpsim_dominance_report* r, mcpsim_format fmt,
                                         char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    check_format(fmt);
    *out = copy_string(fmt == MCPSIM_FORMAT_JSON ? mcpsim::dominance_to_json(r->report)
                                                 : mcpsim::dominance_to_csv(r->report));
  });
}

void mcpsim_dominance_free(mcpsim_dominance_report* r) { delete r; }

mcpsim_status mcpsim_couple_run(const mcpsim_couple_config* cfg, mcpsim_couple_report** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = nullptr;
    mcpsim::CouplingSuiteConfig s;
    switch (cfg->which) {
      case MCPSIM_COUPLE_CPREE_MCP: s.kind = mcpsim::CouplingKind::cpree_mcp; break;
      case MCPSIM_COUPLE_ATTRACTIVE: s.kind = mcpsim::CouplingKind::attractive; break;
      case MCPSIM_COUPLE_PROP1: s.kind = mcpsim::CouplingKind::prop1; break;
      default: throw ArgumentError("unknown coupling");
    }
    switch (cfg->init) {
      case MCPSIM_PAIR_STANDARD: s.init = mcpsim::PairInit::standard; break;
      case MCPSIM_PAIR_EQUAL: s.init = mcpsim::PairInit::equal; break;
      case MCPSIM_PAIR_RANDOM_ORDERED: s.init = mcpsim::PairInit::random_ordered; break;
      default: throw ArgumentError("unknown pair init");
    }
    s.rates = s.kind == mcpsim::CouplingKind::prop1
                  ? mcpsim::perturbed_rates(cfg->b1, cfg->b2, cfg->sigma, cfg->dim)
                  : mcpsim::GenericMcpRates{cfg->b1, cfg->d1, cfg->b2, cfg->d2, cfg->dim};
    s.sigma = cfg->sigma;
    s.box = to_box(cfg->dim, cfg->side, cfg->periodic);
    s.horizon = cfg->horizon;
    s.replicas = cfg->replicas;
    s.seed = cfg->seed;
    s.p1 = cfg->p1;
    s.p2 = cfg->p2;
    if (cfg->fault_replica >= 0) s.fault_replica = static_cast<std::uint64_t>(cfg->fault_replica);
    s.threads = cfg->threads;
    *out = new mcpsim_couple_report{mcpsim::run_coupling_suite(s)};
  });
}

size_t mcpsim_couple_violations(const mcpsim_couple_report* r) {
  return r ? r->report.violations.size() : 0;
}

uint64_t mcpsim_couple_checked_events(const mcpsim_couple_report* r) {
  return r ? r->report.checked_events : 0;
}

mcpsim_status mcpsim_couple_serialize(const mcpsim_couple_report* r, mcpsim_format fmt,
                                      char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    check_format(fmt);
    *out = copy_string(fmt == MCPSIM_FORMAT_JSON ? mcpsim::coupling_to_json(r->report)
                                                 : mcpsim::coupling_to_csv(r->report));
  });
}

void mcpsim_couple_free(mcpsim_couple_report* r) { delete r; }

mcpsim_status mcpsim_survival_run(const mcpsim_survival_config* cfg,
                                  mcpsim_survival_report** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = nullptr;
    mcpsim::SurvivalConfig s;
    switch (cfg->kind) {
      case MCPSIM_PROCESS_CP:
        s.kind = mcpsim::ProcessKind::cp(cfg->lambda);
        s.rates = mcpsim::cp_rates(cfg->lambda, cfg->dim);
        break;
      case MCPSIM_PROCESS_MCP:
        s.kind = mcpsim::ProcessKind::mcp();
        s.rates = {cfg->b1, cfg->d1, cfg->b2, cfg->d2, cfg->dim};
        break;
      case MCPSIM_PROCESS_CPREE:
        s.kind = mcpsim::ProcessKind::cpree();
        s.rates = {cfg->b1, cfg->d1, cfg->b2, cfg->d2, cfg->dim};
        break;
      case MCPSIM_PROCESS_MCP_PERTURBED:
        s.kind = mcpsim::ProcessKind::mcp_perturbed(cfg->sigma);
        s.rates = mcpsim::perturbed_rates(cfg->b1, cfg->b2, cfg->sigma, cfg->dim);
        break;
      default: throw ArgumentError("unknown process kind");
    }
    switch (cfg->init) {
      case MCPSIM_INIT_SINGLE_SEED: s.init.kind = mcpsim::InitKind::single_seed_at_origin; break;
      case MCPSIM_INIT_PRODUCT: s.init.kind = mcpsim::InitKind::product_measure; break;
      case MCPSIM_INIT_ALL_2: s.init.kind = mcpsim::InitKind::all_2; break;
      default: throw ArgumentError("unknown init");
    }
    s.init.p1 = cfg->p1;
    s.init.p2 = cfg->p2;
    if (cfg->tracked_state == 1) s.tracked = mcpsim::SiteState::type1;
    else if (cfg->tracked_state == 2) s.tracked = mcpsim::SiteState::type2;
    else if (cfg->tracked_state != 0) throw ArgumentError("tracked_state must be 0, 1 or 2");
    s.box = to_box(cfg->dim, cfg->side, cfg->periodic);
    s.horizon = cfg->horizon;
    if (cfg->checkpoints != nullptr) {
      s.checkpoints.assign(cfg->checkpoints, cfg->checkpoints + cfg->n_checkpoints);
    }
    s.replicas = cfg->replicas;
    s.seed = cfg->seed;
    s.threads = cfg->threads;
    *out = new mcpsim_survival_report{mcpsim::estimate_survival(s)};
  });
}

mcpsim_status mcpsim_survival_get_summary(const mcpsim_survival_report* r,
                                          mcpsim_survival_summary* out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    const auto& e = r->estimate;
    *out = {e.replicas,   e.survive_count,    e.origin_occupied_count, e.estimate,
            e.half_width, e.survive_estimate, e.survive_half_width};
  });
}

mcpsim_status mcpsim_survival_serialize(const mcpsim_survival_report* r, mcpsim_format fmt,
                                        char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    check_format(fmt);
    *out = copy_string(fmt == MCPSIM_FORMAT_JSON ? mcpsim::survival_to_json(r->estimate)
                                                 : mcpsim::survival_to_csv(r->estimate));
  });
}

void mcpsim_survival_free(mcpsim_survival_report* r) { delete r; }

mcpsim_status mcpsim_event_log_text(int dim, int side, int periodic, double b1, double d1,
                                    double b2, double d2, double horizon, uint64_t seed,
                                    char** out) {
  return guarded([&] {
    require(out, "out");
    const auto log = mcpsim::generate(to_box(dim, side, periodic), {b1, d1, b2, d2, dim},
                                      horizon, seed);
    std::ostringstream os;
    mcpsim::write_event_log(os, log);
    *out = copy_string(os.str());
  });
}

}  // extern "C"
