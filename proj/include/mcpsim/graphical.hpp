#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "mcpsim/rng.hpp"
#include "mcpsim/thresholds.hpp"

namespace mcpsim {

using Site = std::uint32_t;
inline constexpr Site kNoSite = std::numeric_limits<Site>::max();

enum class Boundary { periodic, free };

// A box {0..side-1}^dim of Z^d with nearest-neighbour adjacency. Copies share
// the (immutable) adjacency table.
class Box {
public:
  // Periodic boxes need side >= 3 so that the 2*dim neighbours are distinct.
  Box(int dim, int side, Boundary boundary = Boundary::periodic);

  int dim() const noexcept { return dim_; }
  int side() const noexcept { return side_; }
  Boundary boundary() const noexcept { return boundary_; }
  std::size_t site_count() const noexcept { return offsets_->size() - 1; }

  std::span<const Site> neighbors(Site x) const;
  bool adjacent(Site x, Site y) const;
  std::size_t directed_edge_count() const noexcept { return adjacency_->size(); }
  // Directed edges are enumerated grouped by tip: edge j is
  // edge_source(j) -> edge_tip(j).
  Site edge_tip(std::size_t j) const { return (*edge_tips_)[j]; }
  Site edge_source(std::size_t j) const { return (*adjacency_)[j]; }

  // Centre site (side/2, ..., side/2).
  Site origin() const noexcept { return origin_; }
  std::vector<int> coordinates(Site x) const;
  Site site_at(std::span<const int> coords) const;

  friend bool operator==(const Box& a, const Box& b) noexcept {
    return a.dim_ == b.dim_ && a.side_ == b.side_ && a.boundary_ == b.boundary_;
  }

private:
  int dim_;
  int side_;
  Boundary boundary_;
  Site origin_ = 0;
  std::shared_ptr<const std::vector<std::size_t>> offsets_;
  std::shared_ptr<const std::vector<Site>> adjacency_;
  std::shared_ptr<const std::vector<Site>> edge_tips_;
};

enum class EventKind : std::uint8_t {
  death_all,  // x: kills type 2 in the MCP, the particle in the CP
  death1,     // bullet: kills type 1 only
  arrow1,     // 1-arrow source -> tip
  arrow2,     // 2-arrow source -> tip
};

struct Event {
  double time = 0.0;
  Site tip = 0;
  Site source = kNoSite;  // arrows only
  EventKind kind = EventKind::death_all;

  bool is_arrow() const noexcept {
    return kind == EventKind::arrow1 || kind == EventKind::arrow2;
  }
  friend bool operator==(const Event&, const Event&) = default;
};

// Harris graphical construction on a finite box: time-ordered death marks and
// arrows, each arrow belonging to the timeline of its tip.
struct EventLog {
  Box box{1, 3};
  double horizon = 0.0;
  std::uint64_t seed = 0;
  GenericMcpRates rates;
  std::vector<Event> events;

  // Throws FormatError on unordered events or arrows that are not edges.
  void validate() const;
};

struct GenerateOptions {
  std::uint64_t replica = 0;
  std::uint64_t max_events = 100'000'000;
};

// Time-ordered event source for one graphical construction. Yields exactly
// the events generate() stores for the same arguments, one at a time. The
// box must outlive the stream.
class EventStream {
public:
  EventStream(const Box& box, const GenericMcpRates& rates, double horizon, std::uint64_t seed,
              const GenerateOptions& options = {});

  // Next event, or false once the horizon is passed.
  bool next(Event& out);
  // Summed intensity of all streams on the box.
  double total_rate() const noexcept { return total_; }

private:
  const Box* box_;
  double horizon_;
  double w_death_all_ = 0.0;
  double w_death1_ = 0.0;
  double w_arrow1_ = 0.0;
  double total_ = 0.0;
  double t_ = 0.0;
  bool done_ = false;
  std::uint64_t n_sites_;
  std::uint64_t n_edges_;
  Rng rng_;
};

// Every Poisson stream (x and bullet marks per site, 1- and 2-arrows per
// directed edge y->x indexed by the tip x) is sampled on (0, horizon].
// Throws ResourceError when the expected event count exceeds max_events.
EventLog generate(const Box& box, const GenericMcpRates& rates, double horizon,
                  std::uint64_t seed, const GenerateOptions& options = {});

struct BlockedFlip {
  double time = 0.0;
  bool blocked = false;  // state entered at `time`
};

struct ClassifiedArrow {
  std::size_t event_index = 0;
  bool blocked = false;
};

// Blocked/unblocked labels of 2-arrows. A site becomes blocked at the tip of
// a 1-arrow and unblocked at a bullet mark; every site starts unblocked.
struct ArrowClassification {
  std::vector<ClassifiedArrow> arrows;               // one per arrow2 event, in log order
  std::vector<std::vector<BlockedFlip>> site_flips;  // per site, actual state changes

  // Time in (0, horizon] that site spent unblocked.
  double unblocked_time(Site x, double horizon) const;
};

ArrowClassification classify_arrows(const EventLog& log);

// Cumulative number of unblocked 2-arrows source -> tip with time <= t, for
// each t of time_grid. Throws DomainError when (source, tip) is not an edge.
std::vector<std::int64_t> unblocked_counts(const EventLog& log, const ArrowClassification& cls,
                                           Site tip, Site source,
                                           std::span<const double> time_grid);

// Line-oriented text form: header comments, then `time kind tip [source]`.
void write_event_log(std::ostream& os, const EventLog& log);
EventLog read_event_log(std::istream& is);

const char* to_string(EventKind kind) noexcept;

}  // namespace mcpsim
