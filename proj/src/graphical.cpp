#include "mcpsim/graphical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mcpsim/errors.hpp"
#include "mcpsim/rng.hpp"

namespace mcpsim {
namespace {

constexpr std::size_t kMaxSites = 10'000'000;

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Box::Box(int dim, int side, Boundary boundary) : dim_(dim), side_(side), boundary_(boundary) {
  if (dim < 1) throw DomainError("box dim must be >= 1");
  if (side < 1) throw DomainError("box side must be >= 1");
  if (boundary == Boundary::periodic && side < 3) {
    throw DomainError("periodic box needs side >= 3");
  }
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) {
    n *= static_cast<std::size_t>(side);
    if (n > kMaxSites) throw ResourceError("box exceeds " + std::to_string(kMaxSites) + " sites");
  }

  auto offsets = std::make_shared<std::vector<std::size_t>>();
  auto adjacency = std::make_shared<std::vector<Site>>();
  auto tips = std::make_shared<std::vector<Site>>();
  offsets->reserve(n + 1);
  adjacency->reserve(n * 2 * static_cast<std::size_t>(dim));
  offsets->push_back(0);
  std::vector<int> c(static_cast<std::size_t>(dim));
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t rem = x;
    for (int i = 0; i < dim; ++i) {
      c[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(side));
      rem /= static_cast<std::size_t>(side);
    }
    std::size_t stride = 1;
    for (int i = 0; i < dim; ++i) {
      const int ci = c[static_cast<std::size_t>(i)];
      for (int step : {-1, +1}) {
        int ni = ci + step;
        if (ni < 0 || ni >= side) {
          if (boundary == Boundary::free) continue;
          ni = (ni + side) % side;
        }
        const auto y = static_cast<Site>(x + (static_cast<std::size_t>(ni) * stride) -
                                         (static_cast<std::size_t>(ci) * stride));
        adjacency->push_back(y);
        tips->push_back(static_cast<Site>(x));
      }
      stride *= static_cast<std::size_t>(side);
    }
    offsets->push_back(adjacency->size());
  }
  offsets_ = std::move(offsets);
  adjacency_ = std::move(adjacency);
  edge_tips_ = std::move(tips);

  std::vector<int> centre(static_cast<std::size_t>(dim), side / 2);
  origin_ = site_at(centre);
}

std::span<const Site> Box::neighbors(Site x) const {
  if (x >= site_count()) throw DomainError("site out of range");
  const auto b = (*offsets_)[x];
  const auto e = (*offsets_)[x + 1];
  return {adjacency_->data() + b, e - b};
}

bool Box::adjacent(Site x, Site y) const {
  if (x >= site_count() || y >= site_count()) return false;
  const auto nb = neighbors(x);
  return std::find(nb.begin(), nb.end(), y) != nb.end();
}

std::vector<int> Box::coordinates(Site x) const {
  if (x >= site_count()) throw DomainError("site out of range");
  std::vector<int> c(static_cast<std::size_t>(dim_));
  std::size_t rem = x;
  for (auto& ci : c) {
    ci = static_cast<int>(rem % static_cast<std::size_t>(side_));
    rem /= static_cast<std::size_t>(side_);
  }
  return c;
}

Site Box::site_at(std::span<const int> coords) const {
  if (coords.size() != static_cast<std::size_t>(dim_)) throw DomainError("coordinate rank mismatch");
  std::size_t x = 0;
  std::size_t stride = 1;
  for (int ci : coords) {
    if (ci < 0 || ci >= side_) throw DomainError("coordinate out of range");
    x += static_cast<std::size_t>(ci) * stride;
    stride *= static_cast<std::size_t>(side_);
  }
  return static_cast<Site>(x);
}

void EventLog::validate() const {
  const std::size_t n = box.site_count();
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (i > 0 && e.time < events[i - 1].time) throw FormatError("events out of time order");
    if (!(e.time > 0.0) || e.time > horizon) throw FormatError("event time outside (0, horizon]");
    if (e.tip >= n) throw FormatError("event tip out of range");
    if (e.is_arrow()) {
      if (!box.adjacent(e.tip, e.source)) throw FormatError("arrow source is not a neighbour of its tip");
    } else if (e.source != kNoSite) {
      throw FormatError("death mark with a source site");
    }
  }
}

EventStream::EventStream(const Box& box, const GenericMcpRates& rates, double horizon,
                         std::uint64_t seed, const GenerateOptions& options)
    : box_(&box),
      horizon_(horizon),
      n_sites_(box.site_count()),
      n_edges_(box.directed_edge_count()),
      rng_(make_rng(seed, options.replica, Stream::graphical)) {
  rates.validate();
  if (rates.dim != box.dim()) throw DomainError("rates dimension does not match the box");
  if (!std::isfinite(horizon) || !(horizon > 0.0)) throw DomainError("horizon must be > 0");

  const double n = static_cast<double>(n_sites_);
  const double edges = static_cast<double>(n_edges_);
  // Cumulative intensities of the four stream families.
  w_death_all_ = n * rates.d2;
  w_death1_ = w_death_all_ + n * rates.d1;
  w_arrow1_ = w_death1_ + edges * rates.b1;
  total_ = w_arrow1_ + edges * rates.b2;
  done_ = total_ == 0.0;

  const double expected = total_ * horizon;
  if (expected > static_cast<double>(options.max_events)) {
    throw ResourceError("expected event count " + full_precision(expected) + " exceeds cap " +
                        std::to_string(options.max_events));
  }
}

// The superposition of independent Poisson streams is a Poisson process of
// the summed intensity whose points carry i.i.d. stream labels, so points
// come out time-ordered.
bool EventStream::next(Event& e) {
  if (done_) return false;
  t_ += exponential(rng_, total_);
  if (t_ > horizon_) {
    done_ = true;
    return false;
  }
  const double u = uniform01(rng_) * total_;
  e.time = t_;
  if (u < w_death1_) {
    e.kind = u < w_death_all_ ? EventKind::death_all : EventKind::death1;
    e.tip = static_cast<Site>(uniform_index(rng_, n_sites_));
    e.source = kNoSite;
  } else {
    e.kind = u < w_arrow1_ ? EventKind::arrow1 : EventKind::arrow2;
    const auto j = static_cast<std::size_t>(uniform_index(rng_, n_edges_));
    e.tip = box_->edge_tip(j);
    e.source = box_->edge_source(j);
  }
  return true;
}

EventLog generate(const Box& box, const GenericMcpRates& rates, double horizon,
                  std::uint64_t seed, const GenerateOptions& options) {
  EventLog log{box, horizon, seed, rates, {}};
  EventStream stream(log.box, rates, horizon, seed, options);
  const double expected = stream.total_rate() * horizon;
  log.events.reserve(static_cast<std::size_t>(expected + 6.0 * std::sqrt(expected) + 16.0));
  Event e;
  while (stream.next(e)) log.events.push_back(e);
  return log;
}

double ArrowClassification::unblocked_time(Site x, double horizon) const {
  double total = 0.0;
  double since = 0.0;
  bool blocked = false;
  for (const auto& f : site_flips.at(x)) {
    if (!blocked) total += f.time - since;
    since = f.time;
    blocked = f.blocked;
  }
  if (!blocked) total += horizon - since;
  return total;
}

ArrowClassification classify_arrows(const EventLog& log) {
  ArrowClassification cls;
  cls.site_flips.resize(log.box.site_count());
  std::vector<char> blocked(log.box.site_count(), 0);
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const Event& e = log.events[i];
    switch (e.kind) {
      case EventKind::arrow1:
        if (!blocked[e.tip]) {
          blocked[e.tip] = 1;
          cls.site_flips[e.tip].push_back({e.time, true});
        }
        break;
      case EventKind::death1:
        if (blocked[e.tip]) {
          blocked[e.tip] = 0;
          cls.site_flips[e.tip].push_back({e.time, false});
        }
        break;
      case EventKind::arrow2:
        cls.arrows.push_back({i, blocked[e.tip] != 0});
        break;
      case EventKind::death_all:
        break;
    }
  }
  return cls;
}

std::vector<std::int64_t> unblocked_counts(const EventLog& log, const ArrowClassification& cls,
                                           Site tip, Site source,
                                           std::span<const double> time_grid) {
  if (!log.box.adjacent(tip, source)) throw DomainError("unknown edge");
  std::vector<double> times;
  for (const auto& a : cls.arrows) {
    const Event& e = log.events.at(a.event_index);
    if (!a.blocked && e.tip == tip && e.source == source) times.push_back(e.time);
  }
  std::vector<std::int64_t> out;
  out.reserve(time_grid.size());
  for (double t : time_grid) {
    out.push_back(std::upper_bound(times.begin(), times.end(), t) - times.begin());
  }
  return out;
}

const char* to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::death_all: return "death_all";
    case EventKind::death1: return "death1";
    case EventKind::arrow1: return "arrow1";
    case EventKind::arrow2: return "arrow2";
  }
  return "?";
}

void write_event_log(std::ostream& os, const EventLog& log) {
  os << "# mcpsim-eventlog 1\n";
  os << "# box " << log.box.dim() << ' ' << log.box.side() << ' '
     << (log.box.boundary() == Boundary::periodic ? "periodic" : "free") << '\n';
  os << "# rates " << full_precision(log.rates.b1) << ' ' << full_precision(log.rates.d1) << ' '
     << full_precision(log.rates.b2) << ' ' << full_precision(log.rates.d2) << '\n';
  os << "# horizon " << full_precision(log.horizon) << '\n';
  os << "# seed " << log.seed << '\n';
  for (const Event& e : log.events) {
    os << full_precision(e.time) << ' ' << to_string(e.kind) << ' ' << e.tip;
    if (e.is_arrow()) os << ' ' << e.source;
    os << '\n';
  }
}

EventLog read_event_log(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "# mcpsim-eventlog 1") {
    throw FormatError("missing event log signature");
  }
  int dim = 0;
  int side = 0;
  std::string boundary;
  GenericMcpRates rates;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::vector<Event> events;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "box") ls >> dim >> side >> boundary;
      else if (key == "rates") ls >> rates.b1 >> rates.d1 >> rates.b2 >> rates.d2;
      else if (key == "horizon") ls >> horizon;
      else if (key == "seed") ls >> seed;
      if (ls.fail()) throw FormatError("malformed header line: " + line);
      continue;
    }
    Event e;
    std::string kind;
    ls >> e.time >> kind >> e.tip;
    if (kind == "death_all") e.kind = EventKind::death_all;
    else if (kind == "death1") e.kind = EventKind::death1;
    else if (kind == "arrow1") e.kind = EventKind::arrow1;
    else if (kind == "arrow2") e.kind = EventKind::arrow2;
    else throw FormatError("unknown event kind '" + kind + "'");
    if (e.is_arrow()) ls >> e.source;
    if (ls.fail()) throw FormatError("malformed event line: " + line);
    events.push_back(e);
  }
  if (boundary != "periodic" && boundary != "free") throw FormatError("missing or bad box header");
  rates.dim = dim;
  EventLog log{Box(dim, side, boundary == "periodic" ? Boundary::periodic : Boundary::free),
               horizon, seed, rates, std::move(events)};
  log.validate();
  return log;
}

}  // namespace mcpsim
