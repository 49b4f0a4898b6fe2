#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "cfpp/degrees.hpp"
#include "cfpp/pairing.hpp"
#include "cfpp/rng.hpp"

namespace cfpp {

enum class HalfEdgeStatus : std::uint8_t { FreeInactive = 0, FreeActive1 = 1, FreeActive2 = 2, Paired = 3 };

/// Infection intensities. Both must be positive and finite.
struct Rates {
  double lambda1 = 1.0;
  double lambda2 = 1.0;

  void validate() const;
};

struct SeedPair {
  VertexId first = 0;   // type 1
  VertexId second = 1;  // type 2

  friend bool operator==(const SeedPair&, const SeedPair&) = default;
};

/// Two distinct vertices drawn uniformly without replacement.
struct UniformSeeds {};

using SeedMode = std::variant<UniformSeeds, SeedPair>;

SeedPair draw_uniform_seeds(std::size_t n, Rng& rng);

/// One sample of the jump chain: after k pairings, at continuous time t.
struct TrajectoryPoint {
  std::uint64_t k = 0;
  double t = 0.0;
  std::uint64_t s1 = 0;
  std::uint64_t s2 = 0;
  double m = 0.0;

  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

/// Recorded (k, t, S1, S2, M) samples: every step below the full prefix,
/// every thinning-th step after it, and always the last step.
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::uint64_t final_step = 0;
  std::uint64_t total_edges = 0;
  /// True once the infections have stopped (no active half-edges remain).
  bool complete = false;
};

/// M_k from a trajectory. Beyond the final step (no active half-edges) M is
/// carried forward up to k = N. Throws Error{StepNotRecorded}.
double m_at(const Trajectory& trajectory, std::uint64_t k);

/// Steps k in [nu, end] over which the martingale diagnostics are tracked
/// exactly, independent of trajectory thinning.
struct DiagnosticWindow {
  std::uint64_t nu = 0;
  std::uint64_t end = 0;
};

struct WindowStats {
  double m_nu = 0.0;
  /// max over nu <= k <= end of |M_k - M_nu|
  double sup_deviation = 0.0;
  /// sum over nu <= k < end of (M_{k+1} - M_k)^2
  double qv_sum = 0.0;
  /// min over nu <= k <= end, k >= 1, of S_k / k
  double min_active_ratio = std::numeric_limits<double>::infinity();
};

struct ExplorationOptions {
  std::uint64_t thinning = 100;
  std::uint64_t full_prefix = 1000;
  std::optional<DiagnosticWindow> window;
  /// O(1) counter checks before every step; failures throw
  /// Error{InvariantViolated}.
  bool check_invariants = false;
};

struct StepEvent {
  std::uint64_t k = 0;  // step index after the event
  double t = 0.0;
  double holding = 0.0;
  int type = 0;  // infecting type, 1 or 2
  HalfEdgeId q = 0;
  HalfEdgeId r = 0;
  VertexId x = 0;
  VertexId y = 0;
  bool new_infection = false;
  std::uint64_t s1 = 0;
  std::uint64_t s2 = 0;
  double m = 0.0;
};

struct Infection {
  VertexId vertex = 0;
  int type = 0;
  std::uint64_t step = 0;
  double time = 0.0;
};

struct CompetitionOutcome {
  std::size_t n = 0;
  std::uint64_t total_edges = 0;
  SeedPair seeds;
  Rates rates;
  std::uint64_t a1 = 0;
  std::uint64_t a2 = 0;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  std::uint64_t termination_step = 0;
  double termination_time = 0.0;
  Multigraph final_graph;
  Trajectory trajectory;
  std::optional<WindowStats> window;
};

/// Two-type competition on a configuration-model graph that is revealed
/// while the infections spread.
///
/// Each step consumes random draws in a fixed order: holding time, type,
/// active half-edge q, partner r (redrawn while r == q). When a fixed graph
/// is supplied the partner is its mate and no partner draw is made. Graph
/// completion after the last step draws a uniform matching of the remaining
/// free half-edges.
///
/// The type draw compares against lambda1/lambda2, so the jump chain depends
/// on the rates only through their ratio.
class Exploration {
 public:
  Exploration(const DegreeSequence& seq, SeedPair seeds, Rates rates, ExplorationOptions options = {});

  /// Reuses a prebuilt half-edge index (must describe `seq`).
  Exploration(const DegreeSequence& seq, std::shared_ptr<const HalfEdgeIndex> index, SeedPair seeds, Rates rates,
              ExplorationOptions options = {});

  /// Competition on a fixed, already paired graph (e.g. a uniformly sampled
  /// simple graph). Partners are the mates in `graph`.
  static Exploration on_graph(const DegreeSequence& seq, const Multigraph& graph, SeedPair seeds, Rates rates,
                              ExplorationOptions options = {});

  /// Throws Error{NoActiveHalfEdges | ExhaustedFreePool | InvariantViolated}.
  StepEvent step(Rng& rng);

  /// Steps while the next event time is <= t_end. The holding-time draw of
  /// the first event past t_end is consumed and discarded.
  void run_until_time(double t_end, Rng& rng);

  /// Steps until no active half-edges remain, then completes the graph.
  CompetitionOutcome run_to_termination(Rng& rng);

  std::uint64_t s1() const noexcept { return active_count_[0]; }
  std::uint64_t s2() const noexcept { return active_count_[1]; }
  std::uint64_t active() const noexcept { return active_count_[0] + active_count_[1]; }
  std::uint64_t free_count() const noexcept { return free_count_; }
  std::uint64_t step_index() const noexcept { return k_; }
  double time() const noexcept { return t_; }
  double m() const noexcept { return m_; }
  std::uint64_t a1() const noexcept { return a1_; }
  std::uint64_t a2() const noexcept { return a2_; }
  const Rates& rates() const noexcept { return rates_; }
  const SeedPair& seeds() const noexcept { return seeds_; }
  std::size_t vertex_count() const noexcept { return index_->vertex_count(); }
  std::uint64_t total_edges() const noexcept { return index_->half_edge_count() / 2; }

  HalfEdgeStatus status(HalfEdgeId h) const noexcept { return static_cast<HalfEdgeStatus>(status_[h]); }
  /// 0 for uninfected, else the infection type.
  int vertex_type(VertexId v) const noexcept { return vertex_type_[v]; }
  const std::vector<Infection>& infections() const noexcept { return infections_; }
  const Pairing& pairs() const noexcept { return pairs_; }
  const Trajectory& trajectory() const noexcept { return trajectory_; }
  const std::optional<WindowStats>& window_stats() const noexcept { return window_stats_; }
  const HalfEdgeIndex& index() const noexcept { return *index_; }

  /// Full O(N) consistency audit of statuses, pools and vertex types. Throws
  /// Error{InvariantViolated}.
  void audit() const;

  /// Corrupts the free-pool counter so the invariant checks can be exercised.
  void inject_counter_fault_for_testing() noexcept { ++free_count_; }

 private:
  std::optional<StepEvent> advance(Rng& rng, double t_limit);
  void check_counters() const;
  void activate(HalfEdgeId h, int type);
  void remove_free(HalfEdgeId h);
  void remove_active(HalfEdgeId h, int type);
  void infect(VertexId v, int type, HalfEdgeId skip);
  void record(bool force);
  void track_window();
  void finalize_window();

  std::shared_ptr<const HalfEdgeIndex> index_;
  Rates rates_;
  double ratio_ = 1.0;  // lambda1 / lambda2
  SeedPair seeds_;
  ExplorationOptions options_;

  std::vector<std::uint8_t> status_;
  std::vector<HalfEdgeId> free_pool_;
  std::vector<std::uint32_t> free_pos_;
  std::vector<HalfEdgeId> active_pool_[2];
  std::vector<std::uint32_t> active_pos_;
  std::vector<HalfEdgeId> mate_;  // empty unless on a fixed graph

  std::vector<std::uint8_t> vertex_type_;
  std::vector<Infection> infections_;
  Pairing pairs_;

  std::uint64_t active_count_[2] = {0, 0};
  std::uint64_t free_count_ = 0;
  std::uint64_t k_ = 0;
  double t_ = 0.0;
  double m_ = 0.0;
  std::uint64_t a1_ = 0;
  std::uint64_t a2_ = 0;

  Trajectory trajectory_;
  std::optional<WindowStats> window_stats_;
  bool window_started_ = false;
};

/// Builds the initial state from a seed mode; uniform seeds consume two draws.
Exploration init_exploration(const DegreeSequence& seq, const SeedMode& seeds, Rates rates, Rng& rng,
                             ExplorationOptions options = {});

double m_at(const Exploration& state, std::uint64_t k);
double m_at(const CompetitionOutcome& outcome, std::uint64_t k);

}  // namespace cfpp
