#include "cli_support.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mcpsim_cli {
namespace {

using nlohmann::json;

constexpr const char* kSubcommands[] = {"thresholds", "sweep", "dominance", "couple", "survive"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view s, const char* what) {
  const std::string str(s);
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (str.empty() || end != str.c_str() + str.size()) {
    throw std::invalid_argument(std::string("bad ") + what + ": '" + str + "'");
  }
  return v;
}

bool is_subcommand(const std::string& s) {
  for (const char* c : kSubcommands) {
    if (s == c) return true;
  }
  return false;
}

}  // namespace

int exit_code_for(mcpsim_status status) {
  switch (status) {
    case MCPSIM_OK: return kExitOk;
    case MCPSIM_ERR_DOMAIN:
    case MCPSIM_ERR_PRECONDITION:
    case MCPSIM_ERR_ARGUMENT:
    case MCPSIM_ERR_FORMAT: return kExitDomain;
    case MCPSIM_ERR_RESOURCE: return kExitResource;
    case MCPSIM_ERR_INTERNAL: return kExitFailure;
  }
  return kExitFailure;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void ExperimentConfig::set(const std::string& key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(key, std::move(value));
}

std::string ExperimentConfig::csv_header() const {
  std::string out = std::string("# mcpsim ") + mcpsim_version() + "\n# command=" + command_ + "\n";
  for (const auto& [k, v] : entries_) out += "# " + k + "=" + v + "\n";
  return out;
}

std::string ExperimentConfig::json_header_object() const {
  json config = json::object();
  for (const auto& [k, v] : entries_) config[k] = v;
  json h = {{"tool", "mcpsim"},
            {"version", mcpsim_version()},
            {"command", command_},
            {"config", std::move(config)}};
  return h.dump();
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    const json doc = json::parse(body);
    const json* cfg = &doc;
    if (doc.contains("header")) {
      const auto& h = doc.at("header");
      if (h.contains("command")) out.emplace_back("command", h.at("command").get<std::string>());
      cfg = &h.at("config");
    }
    for (auto it = cfg->begin(); it != cfg->end(); ++it) {
      out.emplace_back(it.key(), it->is_string() ? it->get<std::string>() : it->dump());
    }
    return out;
  }
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    std::string s = trim(line);
    if (s.empty()) continue;
    const bool comment = s.front() == '#';
    if (comment) s = trim(std::string_view(s).substr(1));
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      if (!comment && s.find(',') != std::string::npos) break;  // CSV data
      continue;
    }
    out.emplace_back(trim(std::string_view(s).substr(0, eq)),
                     trim(std::string_view(s).substr(eq + 1)));
  }
  return out;
}

std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
  std::optional<std::string> config_path;
  std::vector<std::string> rest;
  std::string subcommand;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else if (subcommand.empty() && is_subcommand(a)) {
      subcommand = a;
    } else {
      rest.push_back(a);
    }
  }
  std::vector<std::string> out{args.empty() ? std::string("mcpsim") : args[0]};
  if (!subcommand.empty()) out.push_back(subcommand);
  if (config_path) {
    std::FILE* f = std::fopen(config_path->c_str(), "rb");
    if (f == nullptr) throw std::runtime_error("cannot open config file " + *config_path);
    std::string text;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
    std::fclose(f);
    for (const auto& [k, v] : parse_config_text(text)) {
      if (k == "command") {
        if (!subcommand.empty() && v != subcommand) {
          throw std::runtime_error("config was recorded for '" + v + "', not '" + subcommand + "'");
        }
        if (subcommand.empty()) {
          subcommand = v;
          out.push_back(v);
        }
        continue;
      }
      if (k == "version" || k == "tool" || k.rfind("mcpsim", 0) == 0) continue;
      out.push_back("--" + k + "=" + v);
    }
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

double resolve_lambda_c(std::string_view spec, int dim) {
  double lower = 0.0;
  double upper = 0.0;
  if (mcpsim_lambda_c_bounds(dim, &lower, &upper) != MCPSIM_OK) {
    throw std::invalid_argument(mcpsim_last_error());
  }
  if (spec == "lower") return lower;
  if (spec == "upper") return upper;
  if (spec == "literature") {
    // Published numerical estimates of the critical value (per-neighbour
    // infection rate convention); not rigorous bounds.
    switch (dim) {
      case 1: return 1.6494;
      case 2: return 0.41219;
      case 3: return 0.21948;
      default: throw std::invalid_argument("no literature lambda_c estimate for dim > 3");
    }
  }
  const double v = parse_double(spec, "lambda-c");
  if (!(v > 0.0)) throw std::invalid_argument("lambda-c must be > 0");
  return v;
}

std::vector<double> Axis::values() const {
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double f = static_cast<double>(i) / (steps - 1);
    out[static_cast<std::size_t>(i)] =
        log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min)))
            : min + f * (max - min);
  }
  out.front() = min;
  out.back() = max;
  return out;
}

Axis parse_axis(std::string_view spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto colon = spec.find(':', start);
    parts.emplace_back(spec.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 4 && parts.size() != 5) {
    throw std::invalid_argument("axis must be name:min:max:steps[:lin|log]");
  }
  Axis a;
  a.name = parts[0];
  a.min = parse_double(parts[1], "axis min");
  a.max = parse_double(parts[2], "axis max");
  int steps = 0;
  const auto& s = parts[3];
  const auto res = std::from_chars(s.data(), s.data() + s.size(), steps);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad axis steps '" + s + "'");
  }
  a.steps = steps;
  if (parts.size() == 5) {
    if (parts[4] == "log") a.log = true;
    else if (parts[4] != "lin") throw std::invalid_argument("axis scale must be lin or log");
  }
  return a;
}

void SweepGrid::validate() const {
  if (axes.empty() || axes.size() > 2) throw std::invalid_argument("sweep needs one or two axes");
  std::set<std::string> names;
  for (const auto& a : axes) {
    if (a.name != "c" && a.name != "alpha" && a.name != "beta") {
      throw std::invalid_argument("axis must be one of c, alpha, beta");
    }
    if (!names.insert(a.name).second) throw std::invalid_argument("axes must be distinct");
    if (a.steps < 2) throw std::invalid_argument("axis steps must be >= 2");
    if (!(a.min <= a.max)) throw std::invalid_argument("axis min must not exceed max");
    if (a.log && !(a.min > 0.0)) throw std::invalid_argument("log axis needs min > 0");
  }
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (!(lambda_c_ref > 0.0)) throw std::invalid_argument("lambda_c must be > 0");
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid) {
  grid.validate();
  const auto first = grid.axes[0].values();
  const std::vector<double> second =
      grid.axes.size() > 1 ? grid.axes[1].values() : std::vector<double>{0.0};
  std::vector<SweepRow> rows;
  rows.reserve(first.size() * second.size());
  for (double u : first) {
    for (double v : second) {
      mcpsim_params p{grid.beta, grid.c, grid.alpha, grid.dim};
      auto assign = [&p](const std::string& name, double x) {
        if (name == "c") p.c = x;
        else if (name == "alpha") p.alpha = x;
        else p.beta = x;
      };
      assign(grid.axes[0].name, u);
      if (grid.axes.size() > 1) assign(grid.axes[1].name, v);

      SweepRow row{p.beta, p.c, p.alpha, p.dim, 0.0, false, std::nullopt};
      int sufficient = 0;
      if (mcpsim_lambda_bar(&p, &row.lambda_bar) != MCPSIM_OK ||
          mcpsim_survival_sufficient(&p, grid.lambda_c_ref, &sufficient) != MCPSIM_OK) {
        throw std::invalid_argument(mcpsim_last_error());
      }
      row.sufficient = sufficient != 0;
      double cs = 0.0;
      if (mcpsim_c_star(p.alpha, p.beta, p.dim, &cs) == MCPSIM_OK) row.c_star = cs;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "beta,c,alpha,dim,lambda_bar,sufficient,c_star\n";
  for (const auto& r : rows) {
    out += csv_number(r.beta) + "," + csv_number(r.c) + "," + csv_number(r.alpha) + "," +
           std::to_string(r.dim) + "," + csv_number(r.lambda_bar) + "," +
           (r.sufficient ? "1" : "0") + "," + (r.c_star ? csv_number(*r.c_star) : "") + "\n";
  }
  return out;
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"beta", r.beta},
                   {"c", r.c},
                   {"alpha", r.alpha},
                   {"dim", r.dim},
                   {"lambda_bar", r.lambda_bar},
                   {"sufficient", r.sufficient},
                   {"c_star", r.c_star ? json(*r.c_star) : json(nullptr)}});
  }
  return json{{"kind", "sweep"}, {"rows", std::move(arr)}}.dump(2) + "\n";
}

}  // namespace mcpsim_cli
