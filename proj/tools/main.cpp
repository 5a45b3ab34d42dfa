// mcpsim command-line front end. Links only the C API.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_support.hpp"
#include "mcpsim/mcpsim.h"

namespace {

using mcpsim_cli::ExperimentConfig;
using nlohmann::json;

struct Exit : std::exception {
  int code;
  std::string message;
  Exit(int c, std::string m) : code(c), message(std::move(m)) {}
};

void check(mcpsim_status s) {
  if (s != MCPSIM_OK) throw Exit(mcpsim_cli::exit_code_for(s), mcpsim_last_error());
}

std::string take(char* s) {
  std::string out(s);
  mcpsim_string_free(s);
  return out;
}

struct Global {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicas;
  unsigned threads = 0;
  std::string out = "-";
  std::string format = "csv";

  std::uint64_t resolved_seed() {
    if (!seed) {
      std::random_device rd;
      seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    return *seed;
  }
  mcpsim_format fmt() const { return format == "json" ? MCPSIM_FORMAT_JSON : MCPSIM_FORMAT_CSV; }
};

struct McpOpts {
  double beta = 4.0;
  double c = 6.0;
  double alpha = 8.0;
  int dim = 1;

  mcpsim_params params() const { return {beta, c, alpha, dim}; }
  void record(ExperimentConfig& cfg) const {
    cfg.set("beta", beta);
    cfg.set("c", c);
    cfg.set("alpha", alpha);
    cfg.set_int("dim", dim);
  }
};

void add_mcp(CLI::App* sub, McpOpts& o) {
  sub->add_option("--beta", o.beta, "type 1 birth scale beta")->capture_default_str();
  sub->add_option("--c", o.c, "type 2 birth multiplier c")->capture_default_str();
  sub->add_option("--alpha", o.alpha, "type 1 death rate alpha")->capture_default_str();
  sub->add_option("--dim", o.dim, "lattice dimension")->capture_default_str()->check(
      CLI::PositiveNumber);
}

struct BoxOpts {
  int side = 0;
  std::string boundary = "periodic";
  double horizon = 20.0;

  void record(ExperimentConfig& cfg) const {
    cfg.set_int("side", side);
    cfg.set("boundary", boundary);
    cfg.set("horizon", horizon);
  }
};

void add_box(CLI::App* sub, BoxOpts& o, int default_side) {
  o.side = default_side;
  sub->add_option("--side", o.side, "box side length")->capture_default_str();
  sub->add_option("--boundary", o.boundary, "periodic or free")
      ->capture_default_str()
      ->check(CLI::IsMember({"periodic", "free"}));
  sub->add_option("--horizon", o.horizon, "time horizon T")->capture_default_str();
}

void write_output(const Global& g, const ExperimentConfig& cfg, const std::string& body) {
  std::string text;
  if (g.format == "json") {
    json doc = {{"header", json::parse(cfg.json_header_object())}, {"report", json::parse(body)}};
    text = doc.dump(2) + "\n";
  } else {
    text = cfg.csv_header() + body;
  }
  if (g.out == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::FILE* f = std::fopen(g.out.c_str(), "wb");
  if (f == nullptr) throw Exit(mcpsim_cli::kExitIo, "cannot open " + g.out + " for writing");
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok) throw Exit(mcpsim_cli::kExitIo, "write to " + g.out + " failed");
}

void record_common(const Global& g, ExperimentConfig& cfg, std::uint64_t seed,
                   std::uint64_t replicas) {
  cfg.set("seed", std::to_string(seed));
  cfg.set("replicas", std::to_string(replicas));
  cfg.set("threads", std::to_string(g.threads));
  cfg.set("format", g.format);
}

// ---- thresholds ---------------------------------------------------------

struct ThresholdOpts {
  McpOpts mcp;
  std::string lambda_c = "upper";
};

int run_thresholds(Global& g, const ThresholdOpts& o) {
  ExperimentConfig cfg("thresholds");
  o.mcp.record(cfg);
  cfg.set("lambda-c", o.lambda_c);
  cfg.set("format", g.format);

  const mcpsim_params p = o.mcp.params();
  double lambda_bar = 0.0;
  check(mcpsim_lambda_bar(&p, &lambda_bar));
  double lc = 0.0;
  try {
    lc = mcpsim_cli::resolve_lambda_c(o.lambda_c, o.mcp.dim);
  } catch (const std::exception& e) {
    throw Exit(mcpsim_cli::kExitDomain, e.what());
  }
  int sufficient = 0;
  check(mcpsim_survival_sufficient(&p, lc, &sufficient));
  mcpsim_broman_params b{};
  check(mcpsim_cpree_broman_params(&p, &b));
  double lower = 0.0;
  double upper = 0.0;
  check(mcpsim_lambda_c_bounds(o.mcp.dim, &lower, &upper));

  // Quantities with their own domains are reported inline, not as failures.
  auto optional_value = [](mcpsim_status s, double v) -> std::pair<std::optional<double>, std::string> {
    if (s == MCPSIM_OK) return {v, {}};
    return {std::nullopt, mcpsim_last_error()};
  };
  double cs = 0.0;
  const mcpsim_status cs_status = mcpsim_c_star(p.alpha, p.beta, p.dim, &cs);
  const auto c_star = optional_value(cs_status, cs);
  double cb = 0.0;
  const mcpsim_status cb_status = mcpsim_sufficient_c_bound(p.alpha, p.beta, p.dim, &cb);
  const auto c_bound = optional_value(cb_status, cb);

  std::string body;
  if (g.format == "json") {
    auto opt = [](const std::pair<std::optional<double>, std::string>& v) {
      return v.first ? json{{"value", *v.first}, {"error", nullptr}}
                     : json{{"value", nullptr}, {"error", v.second}};
    };
    json j = {{"kind", "thresholds"},
              {"params", {{"beta", p.beta}, {"c", p.c}, {"alpha", p.alpha}, {"dim", p.dim}}},
              {"lambda_bar", lambda_bar},
              {"lambda_c_ref", lc},
              {"lambda_c_preset", o.lambda_c},
              {"sufficient", sufficient != 0},
              {"c_star", opt(c_star)},
              {"sufficient_c_bound", opt(c_bound)},
              {"broman", {{"alpha0", b.alpha0}, {"alpha1", b.alpha1}, {"gamma", b.gamma}, {"p", b.p}}},
              {"lambda_c_lower_bound", lower},
              {"lambda_c_upper_bound", upper}};
    body = j.dump(2) + "\n";
  } else {
    auto row = [&body](const std::string& k, const std::string& v) { body += k + "," + v + "\n"; };
    auto opt = [&row](const std::string& k, const std::pair<std::optional<double>, std::string>& v) {
      if (v.first) row(k, mcpsim_cli::csv_number(*v.first));
      else row(k, "\"domain error: " + v.second + "\"");
    };
    using mcpsim_cli::csv_number;
    body = "quantity,value\n";
    row("lambda_bar", csv_number(lambda_bar));
    row("lambda_c_ref", csv_number(lc));
    row("lambda_c_preset", o.lambda_c);
    row("sufficient", sufficient != 0 ? "true" : "false");
    opt("c_star", c_star);
    opt("sufficient_c_bound", c_bound);
    row("broman_alpha0", csv_number(b.alpha0));
    row("broman_alpha1", csv_number(b.alpha1));
    row("broman_gamma", csv_number(b.gamma));
    row("broman_p", csv_number(b.p));
    row("lambda_c_lower_bound", csv_number(lower));
    row("lambda_c_upper_bound", csv_number(upper));
  }
  write_output(g, cfg, body);
  return mcpsim_cli::kExitOk;
}

// ---- sweep --------------------------------------------------------------

struct SweepOpts {
  McpOpts mcp;
  std::vector<std::string> axes;
  std::string lambda_c = "upper";
};

int run_sweep(Global& g, const SweepOpts& o) {
  ExperimentConfig cfg("sweep");
  mcpsim_cli::SweepGrid grid;
  std::vector<mcpsim_cli::SweepRow> rows;
  try {
    for (const auto& a : o.axes) grid.axes.push_back(mcpsim_cli::parse_axis(a));
    grid.beta = o.mcp.beta;
    grid.c = o.mcp.c;
    grid.alpha = o.mcp.alpha;
    grid.dim = o.mcp.dim;
    grid.lambda_c_ref = mcpsim_cli::resolve_lambda_c(o.lambda_c, o.mcp.dim);
    rows = mcpsim_cli::run_sweep(grid);
  } catch (const std::exception& e) {
    throw Exit(mcpsim_cli::kExitDomain, e.what());
  }
  o.mcp.record(cfg);
  // Repeated keys are not representable in the header, so axes are joined.
  std::string joined;
  for (const auto& a : o.axes) joined += (joined.empty() ? "" : ",") + a;
  cfg.set("axis", joined);
  cfg.set("lambda-c", o.lambda_c);
  cfg.set("format", g.format);
  write_output(g, cfg,
               g.format == "json" ? mcpsim_cli::sweep_to_json(rows) : mcpsim_cli::sweep_to_csv(rows));
  return mcpsim_cli::kExitOk;
}

// ---- dominance ----------------------------------------------------------

struct DominanceOpts {
  McpOpts mcp;
  std::optional<double> alpha0, alpha1, gamma, p;
  std::optional<double> lambda;
  std::vector<double> times;
  long long max_count = 0;
  double z = 4.0;
};

int run_dominance(Global& g, const DominanceOpts& o) {
  ExperimentConfig cfg("dominance");
  mcpsim_dominance_config dc{};
  const bool broman = o.alpha0 || o.alpha1 || o.gamma || o.p;
  if (broman) {
    if (!(o.alpha0 && o.alpha1 && o.gamma && o.p)) {
      throw Exit(mcpsim_cli::kExitDomain, "--alpha0, --alpha1, --gamma and --p go together");
    }
    dc.params = {*o.alpha0, *o.alpha1, *o.gamma, *o.p};
    cfg.set("alpha0", *o.alpha0);
    cfg.set("alpha1", *o.alpha1);
    cfg.set("gamma", *o.gamma);
    cfg.set("p", *o.p);
  } else {
    const mcpsim_params mp = o.mcp.params();
    check(mcpsim_cpree_broman_params(&mp, &dc.params));
    o.mcp.record(cfg);
  }
  double lambda_bar = 0.0;
  check(mcpsim_lambda_bar_broman(&dc.params, &lambda_bar));
  dc.lambda = o.lambda.value_or(lambda_bar);
  dc.times = o.times.empty() ? nullptr : o.times.data();
  dc.n_times = o.times.size();
  dc.max_count = o.max_count;
  dc.replicas = g.replicas.value_or(100000);
  dc.seed = g.resolved_seed();
  dc.z = o.z;
  dc.threads = g.threads;

  cfg.set("lambda", dc.lambda);
  if (!o.times.empty()) {
    std::string t;
    for (double x : o.times) t += (t.empty() ? "" : ",") + mcpsim_cli::exact(x);
    cfg.set("times", t);
  }
  cfg.set_int("max-count", o.max_count);
  cfg.set("z", o.z);
  record_common(g, cfg, dc.seed, dc.replicas);

  mcpsim_dominance_report* r = nullptr;
  check(mcpsim_dominance_run(&dc, &r));
  const std::size_t violations = mcpsim_dominance_violations(r);
  const std::size_t cells = mcpsim_dominance_cells(r);
  char* s = nullptr;
  const mcpsim_status st = mcpsim_dominance_serialize(r, g.fmt(), &s);
  mcpsim_dominance_free(r);
  check(st);
  write_output(g, cfg, take(s));
  std::fprintf(stderr, "dominance: %zu of %zu cells violate at z=%g (lambda=%.12g, lambda_bar=%.12g)\n",
               violations, cells, o.z, dc.lambda, lambda_bar);
  if (dc.lambda > lambda_bar) {
    std::fprintf(stderr, "note: lambda exceeds lambda_bar, violations are expected\n");
  }
  return mcpsim_cli::kExitOk;
}

// ---- couple -------------------------------------------------------------

struct CoupleOpts {
  std::string which = "cpree-mcp";
  McpOpts mcp;
  double b1 = 1.0;
  double b2 = 2.0;
  double sigma = 1.0;
  BoxOpts box;
  std::string init = "standard";
  double p1 = 0.5;
  double p2 = 0.5;
  long long fault_replica = -1;
};

int run_couple(Global& g, const CoupleOpts& o) {
  ExperimentConfig cfg("couple");
  mcpsim_couple_config cc{};
  cfg.set("which", o.which);
  if (o.which == "prop1") {
    cc.which = MCPSIM_COUPLE_PROP1;
    cc.b1 = o.b1;
    cc.b2 = o.b2;
    cc.sigma = o.sigma;
    cc.d1 = o.sigma;
    cc.d2 = 1.0;
    cc.dim = o.mcp.dim;
    cfg.set("b1", o.b1);
    cfg.set("b2", o.b2);
    cfg.set("sigma", o.sigma);
    cfg.set_int("dim", o.mcp.dim);
  } else {
    cc.which = o.which == "attractive" ? MCPSIM_COUPLE_ATTRACTIVE : MCPSIM_COUPLE_CPREE_MCP;
    cc.b1 = o.mcp.beta * o.mcp.alpha;
    cc.d1 = o.mcp.alpha;
    cc.b2 = o.mcp.c * o.mcp.beta;
    cc.d2 = 1.0;
    cc.dim = o.mcp.dim;
    o.mcp.record(cfg);
  }
  cc.side = o.box.side;
  cc.periodic = o.box.boundary == "periodic";
  cc.horizon = o.box.horizon;
  cc.replicas = g.replicas.value_or(1000);
  cc.seed = g.resolved_seed();
  cc.init = o.init == "equal"            ? MCPSIM_PAIR_EQUAL
            : o.init == "random-ordered" ? MCPSIM_PAIR_RANDOM_ORDERED
                                         : MCPSIM_PAIR_STANDARD;
  cc.p1 = o.p1;
  cc.p2 = o.p2;
  cc.fault_replica = o.fault_replica;
  cc.threads = g.threads;

  o.box.record(cfg);
  cfg.set("init", o.init);
  cfg.set("p1", o.p1);
  cfg.set("p2", o.p2);
  cfg.set_int("fault-replica", o.fault_replica);
  record_common(g, cfg, cc.seed, cc.replicas);

  mcpsim_couple_report* r = nullptr;
  check(mcpsim_couple_run(&cc, &r));
  const std::size_t violations = mcpsim_couple_violations(r);
  const std::uint64_t checked = mcpsim_couple_checked_events(r);
  char* s = nullptr;
  mcpsim_status st = mcpsim_couple_serialize(r, g.fmt(), &s);
  std::string body = st == MCPSIM_OK ? take(s) : std::string();
  std::string detail;
  if (st == MCPSIM_OK && violations > 0 && g.format != "json") {
    // The CSV holds the occupancy series; violations are listed on stderr.
    char* js = nullptr;
    st = mcpsim_couple_serialize(r, MCPSIM_FORMAT_JSON, &js);
    if (st == MCPSIM_OK) detail = take(js);
  }
  mcpsim_couple_free(r);
  check(st);
  write_output(g, cfg, body);
  std::fprintf(stderr, "couple %s: %llu events checked, %zu violations\n", o.which.c_str(),
               static_cast<unsigned long long>(checked), violations);
  if (violations > 0) {
    const json doc = json::parse(detail.empty() ? body : detail);
    std::size_t shown = 0;
    for (const auto& v : doc.at("violations")) {
      if (++shown > 20) break;
      std::fprintf(stderr, "violation: replica=%s time=%s site=%s relation=%s\n",
                   v.at("replica").dump().c_str(), v.at("time").dump().c_str(),
                   v.at("site").dump().c_str(), v.at("relation").get<std::string>().c_str());
    }
    return mcpsim_cli::kExitViolation;
  }
  return mcpsim_cli::kExitOk;
}

// ---- survive ------------------------------------------------------------

struct SurviveOpts {
  std::string process = "mcp";
  McpOpts mcp;
  std::optional<double> lambda;
  double sigma = 1.0;
  double b1 = 1.0;
  double b2 = 2.0;
  BoxOpts box;
  std::string init = "single";
  double p1 = 0.5;
  double p2 = 0.5;
  int track = 0;
  std::vector<double> checkpoints;
};

struct SurvivalRun {
  std::string name;
  mcpsim_survival_summary summary{};
  std::string body;
};

SurvivalRun survive_one(const Global& g, const SurviveOpts& o, mcpsim_process kind,
                        double lambda, std::uint64_t seed, std::uint64_t replicas) {
  mcpsim_survival_config sc{};
  sc.kind = kind;
  sc.lambda = lambda;
  sc.sigma = o.sigma;
  if (kind == MCPSIM_PROCESS_MCP_PERTURBED) {
    sc.b1 = o.b1;
    sc.b2 = o.b2;
  } else {
    sc.b1 = o.mcp.beta * o.mcp.alpha;
    sc.d1 = o.mcp.alpha;
    sc.b2 = o.mcp.c * o.mcp.beta;
    sc.d2 = 1.0;
  }
  sc.dim = o.mcp.dim;
  sc.side = o.box.side;
  sc.periodic = o.box.boundary == "periodic";
  sc.horizon = o.box.horizon;
  sc.checkpoints = o.checkpoints.empty() ? nullptr : o.checkpoints.data();
  sc.n_checkpoints = o.checkpoints.size();
  sc.init = o.init == "product" ? MCPSIM_INIT_PRODUCT
            : o.init == "all2"  ? MCPSIM_INIT_ALL_2
                                : MCPSIM_INIT_SINGLE_SEED;
  sc.p1 = o.p1;
  sc.p2 = o.p2;
  sc.tracked_state = o.track;
  sc.replicas = replicas;
  sc.seed = seed;
  sc.threads = g.threads;

  mcpsim_survival_report* r = nullptr;
  check(mcpsim_survival_run(&sc, &r));
  SurvivalRun out;
  mcpsim_status st = mcpsim_survival_get_summary(r, &out.summary);
  char* s = nullptr;
  if (st == MCPSIM_OK) st = mcpsim_survival_serialize(r, g.fmt(), &s);
  mcpsim_survival_free(r);
  check(st);
  out.body = take(s);
  return out;
}

int run_survive(Global& g, const SurviveOpts& o) {
  ExperimentConfig cfg("survive");
  const std::uint64_t seed = g.resolved_seed();
  const std::uint64_t replicas = g.replicas.value_or(1000);
  const mcpsim_params mp = o.mcp.params();
  const bool needs_mcp = o.process != "mcp-perturbed" && !(o.process == "cp" && o.lambda);
  double lambda_bar = 0.0;
  if (needs_mcp) check(mcpsim_lambda_bar(&mp, &lambda_bar));
  const double lambda = o.lambda.value_or(lambda_bar);

  cfg.set("process", o.process);
  if (o.process == "mcp-perturbed") {
    cfg.set("b1", o.b1);
    cfg.set("b2", o.b2);
    cfg.set("sigma", o.sigma);
    cfg.set_int("dim", o.mcp.dim);
  } else if (o.process == "cp") {
    cfg.set("lambda", lambda);
    cfg.set_int("dim", o.mcp.dim);
  } else {
    o.mcp.record(cfg);
    if (o.process == "paired") cfg.set("lambda", lambda);
  }
  o.box.record(cfg);
  cfg.set("init", o.init);
  cfg.set("p1", o.p1);
  cfg.set("p2", o.p2);
  cfg.set_int("track", o.track);
  if (!o.checkpoints.empty()) {
    std::string t;
    for (double x : o.checkpoints) t += (t.empty() ? "" : ",") + mcpsim_cli::exact(x);
    cfg.set("checkpoints", t);
  }
  record_common(g, cfg, seed, replicas);

  if (o.process != "paired") {
    const mcpsim_process kind = o.process == "cp"      ? MCPSIM_PROCESS_CP
                                : o.process == "cpree" ? MCPSIM_PROCESS_CPREE
                                : o.process == "mcp"   ? MCPSIM_PROCESS_MCP
                                                       : MCPSIM_PROCESS_MCP_PERTURBED;
    SurviveOpts own = o;
    const SurvivalRun run = survive_one(g, own, kind, lambda, seed, replicas);
    write_output(g, cfg, run.body);
    std::fprintf(stderr, "survive %s: origin occupied %.6g +- %.3g, survived %.6g +- %.3g\n",
                 o.process.c_str(), run.summary.estimate, run.summary.half_width,
                 run.summary.survive_estimate, run.summary.survive_half_width);
    return mcpsim_cli::kExitOk;
  }

  // Paired: CP at lambda (default lambda_bar), CPREE and MCP on the same seed.
  // CP tracks its occupied sites; the others track type 2 unless --track says otherwise.
  SurviveOpts cp_opts = o;
  cp_opts.track = 0;
  if (cp_opts.init == "all2") cp_opts.init = "product";
  std::vector<SurvivalRun> runs;
  runs.push_back(survive_one(g, cp_opts, MCPSIM_PROCESS_CP, lambda, seed, replicas));
  runs.back().name = "cp";
  runs.push_back(survive_one(g, o, MCPSIM_PROCESS_CPREE, lambda, seed, replicas));
  runs.back().name = "cpree";
  runs.push_back(survive_one(g, o, MCPSIM_PROCESS_MCP, lambda, seed, replicas));
  runs.back().name = "mcp";

  struct Diff {
    std::string name;
    double origin, origin_hw, survive, survive_hw;
  };
  std::vector<Diff> diffs;
  auto diff = [&](std::size_t hi, std::size_t lo) {
    const auto& a = runs[hi].summary;
    const auto& b = runs[lo].summary;
    diffs.push_back({runs[hi].name + "-" + runs[lo].name, a.estimate - b.estimate,
                     a.half_width + b.half_width, a.survive_estimate - b.survive_estimate,
                     a.survive_half_width + b.survive_half_width});
  };
  diff(1, 0);
  diff(2, 1);
  diff(2, 0);

  std::string body;
  if (g.format == "json") {
    json est = json::array();
    for (const auto& r : runs) est.push_back(json::parse(r.body));
    json d = json::array();
    for (const auto& x : diffs) {
      d.push_back({{"pair", x.name},
                   {"origin_difference", x.origin},
                   {"origin_half_width", x.origin_hw},
                   {"survive_difference", x.survive},
                   {"survive_half_width", x.survive_hw}});
    }
    body = json{{"kind", "paired_survival"}, {"estimates", est}, {"differences", d}}.dump(2) + "\n";
  } else {
    // One table; difference rows carry the difference in the estimate columns
    // and the summed half-widths, with counts left empty.
    bool first = true;
    for (const auto& r : runs) {
      std::size_t pos = 0;
      if (!first) pos = r.body.find('\n') + 1;
      body += r.body.substr(pos);
      first = false;
    }
    using mcpsim_cli::csv_number;
    for (const auto& x : diffs) {
      body += "diff:" + x.name + "," + csv_number(o.box.horizon) + "," + std::to_string(replicas) +
              ",," + csv_number(x.origin) + "," + csv_number(x.origin_hw) + ",," +
              csv_number(x.survive) + "," + csv_number(x.survive_hw) + "\n";
    }
  }
  write_output(g, cfg, body);
  for (const auto& x : diffs) {
    std::fprintf(stderr, "paired %s: origin %+.6g (slack %.3g), survived %+.6g (slack %.3g)\n",
                 x.name.c_str(), x.origin, x.origin_hw, x.survive, x.survive_hw);
  }
  const bool ordered = diffs[0].survive >= -diffs[0].survive_hw &&
                       diffs[1].survive >= -diffs[1].survive_hw;
  std::fprintf(stderr, "ordering cp <= cpree <= mcp within CI slack: %s\n", ordered ? "yes" : "no");
  return mcpsim_cli::kExitOk;
}

// "a,b,c" lists arrive as one token from config headers.
void add_list(CLI::App* sub, const std::string& name, std::vector<double>& v, const std::string& help) {
  sub->add_option(name, v, help)->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    args = mcpsim_cli::merge_config_args(args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return mcpsim_cli::kExitFailure;
  }

  CLI::App app{"mcpsim: multitype contact process simulation and threshold tools"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(mcpsim_version()));

  Global g;
  std::string config_path;
  app.add_option("--seed", g.seed, "master seed (default: random, recorded in the header)");
  app.add_option("--replicas", g.replicas, "number of replicas");
  app.add_option("--threads", g.threads, "worker threads, 0 = available cores")->capture_default_str();
  app.add_option("--out", g.out, "output path, - for stdout")->capture_default_str();
  app.add_option("--format", g.format, "csv or json")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", config_path, "key=value file or an earlier output; flags override it");

  ThresholdOpts th;
  auto* th_cmd = app.add_subcommand("thresholds", "lambda_bar, c*, sufficient c bound, sufficiency");
  add_mcp(th_cmd, th.mcp);
  th_cmd->add_option("--lambda-c", th.lambda_c, "lower|upper|literature|<value>")->capture_default_str();

  SweepOpts sw;
  auto* sw_cmd = app.add_subcommand("sweep", "phase diagram over up to two of c, alpha, beta");
  add_mcp(sw_cmd, sw.mcp);
  sw_cmd->add_option("--axis", sw.axes, "name:min:max:steps[:lin|log], up to two")
      ->required()
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sw_cmd->add_option("--lambda-c", sw.lambda_c, "lower|upper|literature|<value>")->capture_default_str();

  DominanceOpts dm;
  auto* dm_cmd = app.add_subcommand("dominance", "Poisson tail dominance of the modulated process");
  add_mcp(dm_cmd, dm.mcp);
  dm_cmd->add_option("--alpha0", dm.alpha0, "arrival rate in background state 0");
  dm_cmd->add_option("--alpha1", dm.alpha1, "arrival rate in background state 1");
  dm_cmd->add_option("--gamma", dm.gamma, "background flip clock rate");
  dm_cmd->add_option("--p", dm.p, "probability the background flips to state 1");
  dm_cmd->add_option("--lambda", dm.lambda, "reference Poisson rate (default lambda_bar)");
  add_list(dm_cmd, "--times", dm.times, "comma separated time grid");
  dm_cmd->add_option("--max-count", dm.max_count, "largest k, 0 = automatic")->capture_default_str();
  dm_cmd->add_option("--z", dm.z, "violation threshold in standard errors")->capture_default_str();

  CoupleOpts cp;
  auto* cp_cmd = app.add_subcommand("couple", "coupled runs with per-event order checks");
  cp_cmd->add_option("--which", cp.which, "cpree-mcp, attractive or prop1")
      ->capture_default_str()
      ->check(CLI::IsMember({"cpree-mcp", "attractive", "prop1"}));
  add_mcp(cp_cmd, cp.mcp);
  cp_cmd->add_option("--b1", cp.b1, "prop1: type 1 birth rate")->capture_default_str();
  cp_cmd->add_option("--b2", cp.b2, "prop1: type 2 birth rate")->capture_default_str();
  cp_cmd->add_option("--sigma", cp.sigma, "prop1: extra type 1 death rate")->capture_default_str();
  add_box(cp_cmd, cp.box, 64);
  cp_cmd->add_option("--init", cp.init, "standard, equal or random-ordered")
      ->capture_default_str()
      ->check(CLI::IsMember({"standard", "equal", "random-ordered"}));
  cp_cmd->add_option("--p1", cp.p1, "type 1 density for random inits")->capture_default_str();
  cp_cmd->add_option("--p2", cp.p2, "type 2 density for random inits")->capture_default_str();
  cp_cmd->add_option("--fault-replica", cp.fault_replica,
                     "test hook: corrupt this replica mid-run (-1 = off)")
      ->capture_default_str();
  cp_cmd->add_flag_function(
      "--inject-fault", [&cp](std::int64_t) { cp.fault_replica = 0; },
      "test hook: same as --fault-replica 0");

  SurviveOpts sv;
  auto* sv_cmd = app.add_subcommand("survive", "survival and origin occupancy estimates");
  sv_cmd->add_option("--process", sv.process, "cp, mcp, cpree, mcp-perturbed or paired")
      ->capture_default_str()
      ->check(CLI::IsMember({"cp", "mcp", "cpree", "mcp-perturbed", "paired"}));
  add_mcp(sv_cmd, sv.mcp);
  sv_cmd->add_option("--lambda", sv.lambda, "cp infection rate (default lambda_bar)");
  sv_cmd->add_option("--sigma", sv.sigma, "mcp-perturbed: extra type 1 death rate")->capture_default_str();
  sv_cmd->add_option("--b1", sv.b1, "mcp-perturbed: type 1 birth rate")->capture_default_str();
  sv_cmd->add_option("--b2", sv.b2, "mcp-perturbed: type 2 birth rate")->capture_default_str();
  add_box(sv_cmd, sv.box, 101);
  sv_cmd->add_option("--init", sv.init, "single, product or all2")
      ->capture_default_str()
      ->check(CLI::IsMember({"single", "product", "all2"}));
  sv_cmd->add_option("--p1", sv.p1, "type 1 density for product inits")->capture_default_str();
  sv_cmd->add_option("--p2", sv.p2, "type 2 density for product inits")->capture_default_str();
  sv_cmd->add_option("--track", sv.track, "tracked state, 0 = process default")
      ->capture_default_str()
      ->check(CLI::Range(0, 2));
  add_list(sv_cmd, "--checkpoints", sv.checkpoints, "comma separated checkpoint times");

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mcpsim_cli::kExitFailure;
  }

  try {
    if (*th_cmd) return run_thresholds(g, th);
    if (*sw_cmd) return run_sweep(g, sw);
    if (*dm_cmd) return run_dominance(g, dm);
    if (*cp_cmd) return run_couple(g, cp);
    if (*sv_cmd) return run_survive(g, sv);
  } catch (const Exit& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return mcpsim_cli::kExitFailure;
  }
  return mcpsim_cli::kExitFailure;
}
