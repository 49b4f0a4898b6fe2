#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cfpp/degrees.hpp"
#include "cfpp/exploration.hpp"

namespace cfpp {

struct ExperimentConfig {
  DegreeSource degrees = DegreeSource::iid({{2, 0.5}, {3, 0.5}});
  /// Vertex count for IID sources; ignored for explicit lists.
  std::size_t n = 100000;
  Rates rates;
  std::size_t replicas = 1;
  std::uint64_t master_seed = 0;
  /// Burn-in step; defaults to ceil(n^{1/3}).
  std::optional<std::uint64_t> nu;
  double epsilon = 0.1;
  std::uint64_t thinning = 100;
  /// Condition on a simple graph (rejection sampling before the run).
  bool simple = false;
  int max_attempts = 1000;
  /// IID sources: draw one sequence for all replicas instead of one each.
  bool fixed_sequence = false;
  SeedMode seeds = UniformSeeds{};
  /// Worker threads (0 = hardware concurrency). Does not affect results.
  unsigned threads = 0;
  /// Keep each replica's full outcome (trajectory and final graph).
  bool keep_outcomes = false;

  void validate() const;
};

/// Smallest integer m with m^3 >= n.
std::uint64_t default_nu(std::uint64_t n);

/// floor((1 - epsilon) N), the last step of the diagnostic window.
std::uint64_t window_end(std::uint64_t total_edges, double epsilon);

struct ReplicaResult {
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::uint64_t total_edges = 0;
  SeedPair seeds;
  std::uint64_t a1 = 0;
  std::uint64_t a2 = 0;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  double nbar1 = 0.0;
  double nbar2 = 0.0;
  std::uint64_t nu = 0;
  std::uint64_t window_end = 0;
  double m_nu = 0.0;
  double sup_deviation = 0.0;
  double qv_sum = 0.0;
  double min_active_ratio = 0.0;
  std::uint64_t termination_step = 0;
  double termination_time = 0.0;
  int simple_attempts = 0;
};

struct SampleSummary {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> quantiles;  // at EnsembleReport::quantile_levels
};

struct EnsembleAggregates {
  SampleSummary nbar1;
  SampleSummary nbar2;
  SampleSummary sup_deviation;
  SampleSummary qv_sum;
  SampleSummary min_active_ratio;
  SampleSummary n1;
  /// Fraction of replicas with nbar1 in (0.1, 0.9).
  double fraction_interior = 0.0;
  /// Fraction of replicas with nbar1 + nbar2 >= 0.99.
  double fraction_covered = 0.0;
  std::vector<std::uint64_t> nbar1_histogram;  // 20 equal bins on [0, 1]
};

struct EnsembleReport {
  ExperimentConfig config;
  AssumptionFlags assumptions;
  std::vector<double> quantile_levels;
  std::vector<ReplicaResult> replicas;
  EnsembleAggregates aggregates;
  std::vector<CompetitionOutcome> outcomes;  // only with keep_outcomes
};

/// Runs config.replicas independent competitions. Replica r uses the stream
/// derive_seed(master_seed, r); the report does not depend on thread count.
/// Throws the lowest-index replica's error, prefixed with its index.
EnsembleReport run_ensemble(const ExperimentConfig& config);

/// Aggregates in replica-index order.
EnsembleAggregates aggregate(std::span<const ReplicaResult> rows, std::span<const double> quantile_levels);

/// sup over recorded nu <= k <= (1-eps)N of |M_k - M_nu|. With a thinned
/// trajectory this is a lower bound on the exact supremum. Throws
/// Error{RangeNotCovered}.
double constancy_statistic(const Trajectory& trajectory, std::uint64_t nu, double epsilon,
                           std::uint64_t total_edges);

/// Sum over nu <= k < (1-eps)N of (M_{k+1} - M_k)^2; needs every step in the
/// range recorded (thinning 1, or a range inside the full prefix). Throws
/// Error{RangeNotCovered}.
double qv_statistic(const Trajectory& trajectory, std::uint64_t nu, double epsilon, std::uint64_t total_edges);

struct ScalingPoint {
  std::size_t n = 0;
  std::size_t replicas = 0;
  double median_n1 = 0.0;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  double ratio = 0.0;  // lambda1 / lambda2
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ci_level = 0.95;
  std::size_t bootstrap_resamples = 0;
  bool ci_contains_ratio = false;
  bool exploratory = true;
};

/// Regression of log(median N1) on log n across ensembles run at different
/// n, with a percentile bootstrap over replicas. Throws
/// Error{InsufficientSizes} unless there are >= 3 distinct n spanning two
/// decades.
ScalingReport scaling_from_reports(std::span<const EnsembleReport> reports, std::uint64_t bootstrap_seed,
                                   std::size_t resamples = 1000);

/// Runs one ensemble per n in `n_values` (stream derive_seed(master, i) for
/// the i-th size) and regresses.
ScalingReport scaling_study(const ExperimentConfig& base, std::span<const std::size_t> n_values,
                            std::size_t resamples = 1000);

}  // namespace cfpp
