#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cfpp/degrees.hpp"
#include "cfpp/exploration.hpp"
#include "cfpp/rng.hpp"

namespace cfpp {

/// Two independent continuous-time Markov branching processes. An individual
/// of process i is replaced at rate lambda_i by xi ~ offspring children.
struct BranchingParams {
  std::uint64_t a1 = 1;
  std::uint64_t a2 = 1;
  Rates rates;
  Pmf offspring;  // law of xi on {0, 1, 2, ...}
};

struct BranchingOptions {
  /// > 0: record the state on the grid 0, dt, 2dt, ...; 0: record every event.
  double record_interval = 0.0;
  /// Stop early once b1 + b2 reaches this size (the run is marked saturated).
  std::uint64_t population_cap = 10'000'000;
};

struct BranchingPoint {
  double t = 0.0;
  std::uint64_t b1 = 0;
  std::uint64_t b2 = 0;
  /// 1 or 2 when the point records an event of that process, 0 otherwise.
  int process = 0;

  friend bool operator==(const BranchingPoint&, const BranchingPoint&) = default;
};

struct BranchingTrajectory {
  std::vector<BranchingPoint> points;
  BranchingPoint final_state;
  bool saturated = false;
  std::uint64_t events[2] = {0, 0};
};

/// Each process draws from its own sub-stream (split off `rng` in a fixed
/// order), so process 1's events do not depend on lambda2 or a2. Merging the
/// two independent event streams by time gives the same law as a single race
/// at total rate lambda1*b1 + lambda2*b2.
BranchingTrajectory simulate_branching_pair(const BranchingParams& params, double t_end, Rng& rng,
                                            const BranchingOptions& options = {});

struct VDistribution {
  /// b1 / (b1 + b2) at the probe time, one per replica (both-extinct
  /// replicas are dropped).
  std::vector<double> samples;
  std::uint64_t dropped = 0;
  std::uint64_t saturated = 0;
  std::vector<double> quantile_levels;
  std::vector<double> quantiles;
  std::vector<std::uint64_t> histogram;  // equal-width bins on [0, 1]
};

VDistribution estimate_v_distribution(const BranchingParams& params, double t_probe, std::size_t replicas, Rng& rng,
                                      const BranchingOptions& options = {}, unsigned threads = 0,
                                      std::size_t histogram_bins = 20);

/// Least-squares slope of log(b1 + b2) against t over points whose population
/// is at least ten times the initial one. Pooled trajectories share the slope
/// but keep their own intercepts. Throws Error{InsufficientGrowth} unless the
/// population spans at least two decades.
double estimate_growth_rate(const BranchingTrajectory& trajectory);
double estimate_growth_rate(std::span<const BranchingTrajectory> trajectories);

struct CouplingMoments {
  double exploration_mean = 0.0;
  double branching_mean = 0.0;
  double exploration_variance = 0.0;
  double branching_variance = 0.0;
  double z_mean = 0.0;
  double z_variance = 0.0;
};

struct CouplingReport {
  std::size_t replicas = 0;
  double t_probe = 0.0;
  CouplingMoments type1;
  CouplingMoments type2;
  /// Total variation between the binned empirical joint laws of
  /// (S1_t, S2_t) and (b1, b2).
  double tv_estimate = 0.0;
  double max_abs_z = 0.0;
  double z_threshold = 4.0;
  bool diverged = false;
};

/// Compares the exploration engine's active counts at t_probe against the
/// branching pair with offspring D_n* - 1 of the same sequence. Both sides of
/// a replica start from the same seed vertices, so a_i = d(seed_i).
CouplingReport coupling_check(const DegreeSequence& seq, const SeedMode& seeds, Rates rates, double t_probe,
                              std::size_t replicas, Rng& rng, unsigned threads = 0, double z_threshold = 4.0);

}  // namespace cfpp
