#include "mcpsim/report_io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace mcpsim {
namespace {

using nlohmann::json;

constexpr int kCsvDigits = 12;

std::string num(double v) { return format_number(v, kCsvDigits); }

json broman_json(const BromanParams& b) {
  return {{"alpha0", b.alpha0}, {"alpha1", b.alpha1}, {"gamma", b.gamma}, {"p", b.p}};
}

}  // namespace

std::string format_number(double v, int significant) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, v);
  return buf;
}

std::string dominance_to_csv(const DominanceReport& r) {
  std::ostringstream os;
  os << "t,k,empirical,reference,std_error,violated\n";
  for (std::size_t j = 0; j < r.time_grid.size(); ++j) {
    for (std::size_t c = 0; c < r.count_grid.size(); ++c) {
      const double deficit = r.reference_tail[j][c] - r.empirical_tail[j][c];
      const bool violated = deficit > r.z * r.std_error[j][c];
      os << num(r.time_grid[j]) << ',' << r.count_grid[c] << ',' << num(r.empirical_tail[j][c])
         << ',' << num(r.reference_tail[j][c]) << ',' << num(r.std_error[j][c]) << ','
         << (violated ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

std::string dominance_to_json(const DominanceReport& r) {
  json cells = json::array();
  for (std::size_t j = 0; j < r.time_grid.size(); ++j) {
    for (std::size_t c = 0; c < r.count_grid.size(); ++c) {
      const double deficit = r.reference_tail[j][c] - r.empirical_tail[j][c];
      cells.push_back({{"t", r.time_grid[j]},
                       {"k", r.count_grid[c]},
                       {"empirical", r.empirical_tail[j][c]},
                       {"reference", r.reference_tail[j][c]},
                       {"std_error", r.std_error[j][c]},
                       {"violated", deficit > r.z * r.std_error[j][c]}});
    }
  }
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back(
        {{"t", v.time}, {"k", v.k}, {"deficit", v.deficit}, {"std_error", v.std_error}});
  }
  json out = {{"kind", "dominance_report"},
              {"params", broman_json(r.params)},
              {"lambda", r.lambda},
              {"lambda_bar", r.lambda_bar},
              {"lambda_exceeds_bar", r.lambda_exceeds_bar()},
              {"z", r.z},
              {"replicas", r.replicas},
              {"seed", r.seed},
              {"time_grid", r.time_grid},
              {"count_grid", r.count_grid},
              {"cells", std::move(cells)},
              {"violations", std::move(violations)},
              {"note", r.bonferroni_note()}};
  return out.dump(2) + "\n";
}

std::string coupling_to_csv(const CoupledRunReport& r) {
  std::ostringstream os;
  os << "replica,time,process,origin_state,pop1,pop2\n";
  for (const auto& s : r.occupancy_series) {
    os << s.replica << ',' << num(s.time) << ',' << r.process_names.at(static_cast<std::size_t>(s.process))
       << ',' << static_cast<int>(s.origin) << ',' << s.pop1 << ',' << s.pop2 << '\n';
  }
  return os.str();
}

std::string coupling_to_json(const CoupledRunReport& r) {
  json relations = json::array();
  for (Relation rel : r.relations) relations.push_back(to_string(rel));
  json violations = json::array();
  for (const auto& v : r.violations) {
    json site = v.site == kNoSite ? json(nullptr) : json(v.site);
    violations.push_back({{"replica", v.replica},
                          {"time", v.time},
                          {"site", std::move(site)},
                          {"relation", to_string(v.relation)}});
  }
  json finals = json::array();
  const std::size_t per = r.process_names.size();
  for (std::size_t i = 0; i < r.final_configs.size(); ++i) {
    finals.push_back({{"replica", per ? i / per : 0},
                      {"process", r.process_names.at(per ? i % per : 0)},
                      {"state", r.final_configs[i].to_string()}});
  }
  json series = json::array();
  for (const auto& s : r.occupancy_series) {
    series.push_back({{"replica", s.replica},
                      {"time", s.time},
                      {"process", r.process_names.at(static_cast<std::size_t>(s.process))},
                      {"origin_state", static_cast<int>(s.origin)},
                      {"pop1", s.pop1},
                      {"pop2", s.pop2}});
  }
  json out = {{"kind", "coupled_run_report"},
              {"processes", r.process_names},
              {"relations", std::move(relations)},
              {"replicas", r.replicas},
              {"checked_events", r.checked_events},
              {"passed", r.passed()},
              {"violations", std::move(violations)},
              {"final_configs", std::move(finals)},
              {"occupancy_series", std::move(series)}};
  return out.dump(2) + "\n";
}

std::string survival_to_csv(const SurvivalEstimate& s) {
  std::ostringstream os;
  os << "process,time,replicas,origin_count,origin_estimate,origin_half_width,"
        "survive_count,survive_estimate,survive_half_width\n";
  for (const auto& c : s.checkpoints) {
    os << to_string(s.kind.type) << ',' << num(c.time) << ',' << s.replicas << ','
       << c.origin.count << ',' << num(c.origin.estimate) << ',' << num(c.origin.half_width)
       << ',' << c.population.count << ',' << num(c.population.estimate) << ','
       << num(c.population.half_width) << '\n';
  }
  return os.str();
}

std::string survival_to_json(const SurvivalEstimate& s) {
  json cps = json::array();
  for (const auto& c : s.checkpoints) {
    cps.push_back({{"time", c.time},
                   {"origin_count", c.origin.count},
                   {"origin_estimate", c.origin.estimate},
                   {"origin_half_width", c.origin.half_width},
                   {"survive_count", c.population.count},
                   {"survive_estimate", c.population.estimate},
                   {"survive_half_width", c.population.half_width}});
  }
  json out = {{"kind", "survival_estimate"},
              {"process", to_string(s.kind.type)},
              {"lambda", s.kind.lambda},
              {"sigma", s.kind.sigma},
              {"tracked_state", static_cast<int>(s.tracked)},
              {"replicas", s.replicas},
              {"survive_count", s.survive_count},
              {"origin_occupied_count", s.origin_occupied_count},
              {"estimate", s.estimate},
              {"half_width", s.half_width},
              {"survive_estimate", s.survive_estimate},
              {"survive_half_width", s.survive_half_width},
              {"checkpoints", std::move(cps)}};
  return out.dump(2) + "\n";
}

}  // namespace mcpsim
