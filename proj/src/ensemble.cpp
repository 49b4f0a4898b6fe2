#include "cfpp/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cfpp/error.hpp"
#include "cfpp/parallel.hpp"
#include "cfpp/stats.hpp"

namespace cfpp {

namespace {

// Stream index reserved for the shared sequence of a fixed_sequence run;
// replica streams use indices 0 .. replicas-1.
constexpr std::uint64_t kSequenceStream = 0xffff'ffff'ffff'fff0ULL;

}  // namespace

void ExperimentConfig::validate() const {
  if (replicas < 1) throw Error(ErrorCode::InvalidArgument, "replicas must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  rates.validate();
  if (thinning < 1) throw Error(ErrorCode::InvalidArgument, "thinning must be >= 1");
  if (max_attempts < 1) throw Error(ErrorCode::InvalidArgument, "max_attempts must be >= 1");
  if (degrees.is_iid() && n < 2) throw Error(ErrorCode::InvalidArgument, "n must be >= 2");
}

std::uint64_t default_nu(std::uint64_t n) {
  auto root = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n)));
  while (root > 0 && root * root * root >= n) --root;
  while (root * root * root < n) ++root;
  return root;
}

std::uint64_t window_end(std::uint64_t total_edges, double epsilon) {
  return static_cast<std::uint64_t>(std::floor((1.0 - epsilon) * static_cast<double>(total_edges)));
}

namespace {

SampleSummary summarize(std::vector<double> x, std::span<const double> levels) {
  SampleSummary s;
  if (x.empty()) return s;
  s.mean = stats::mean(x);
  s.stddev = stats::stddev(x);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  s.min = *lo;
  s.max = *hi;
  std::sort(x.begin(), x.end());
  for (const double p : levels) s.quantiles.push_back(stats::quantile(x, p));
  return s;
}

template <class F>
std::vector<double> column(std::span<const ReplicaResult> rows, F field) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(field(r));
  return out;
}

}  // namespace

EnsembleAggregates aggregate(std::span<const ReplicaResult> rows, std::span<const double> levels) {
  EnsembleAggregates a;
  a.nbar1 = summarize(column(rows, [](const auto& r) { return r.nbar1; }), levels);
  a.nbar2 = summarize(column(rows, [](const auto& r) { return r.nbar2; }), levels);
  a.sup_deviation = summarize(column(rows, [](const auto& r) { return r.sup_deviation; }), levels);
  a.qv_sum = summarize(column(rows, [](const auto& r) { return r.qv_sum; }), levels);
  a.min_active_ratio = summarize(column(rows, [](const auto& r) { return r.min_active_ratio; }), levels);
  a.n1 = summarize(column(rows, [](const auto& r) { return static_cast<double>(r.n1); }), levels);
  a.nbar1_histogram.assign(20, 0);
  std::size_t interior = 0;
  std::size_t covered = 0;
  for (const auto& r : rows) {
    if (r.nbar1 > 0.1 && r.nbar1 < 0.9) ++interior;
    if (r.nbar1 + r.nbar2 >= 0.99) ++covered;
    ++a.nbar1_histogram[std::min<std::size_t>(19, static_cast<std::size_t>(r.nbar1 * 20.0))];
  }
  if (!rows.empty()) {
    a.fraction_interior = static_cast<double>(interior) / static_cast<double>(rows.size());
    a.fraction_covered = static_cast<double>(covered) / static_cast<double>(rows.size());
  }
  return a;
}

EnsembleReport run_ensemble(const ExperimentConfig& config) {
  config.validate();
  EnsembleReport report;
  report.config = config;
  report.assumptions = config.degrees.flags();
  report.quantile_levels = {0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99};

  std::optional<DegreeSequence> shared;
  if (!config.degrees.is_iid() || config.fixed_sequence) {
    Rng rng(derive_seed(config.master_seed, kSequenceStream));
    shared = config.degrees.realize(config.n, rng);
  }

  const std::size_t count = config.replicas;
  std::vector<ReplicaResult> rows(count);
  std::vector<std::optional<Error>> errors(count);
  std::vector<CompetitionOutcome> outcomes(config.keep_outcomes ? count : 0);

  parallel_for(count, config.threads, [&](std::size_t r) {
    try {
      const std::uint64_t seed = derive_seed(config.master_seed, r);
      Rng rng(seed);
      const DegreeSequence seq = shared ? *shared : config.degrees.realize(config.n, rng);

      int attempts = 0;
      std::optional<Multigraph> graph;
      if (config.simple) graph = sample_simple_graph(seq, rng, config.max_attempts, &attempts);

      const SeedPair seeds = std::holds_alternative<SeedPair>(config.seeds) ? std::get<SeedPair>(config.seeds)
                                                                            : draw_uniform_seeds(seq.size(), rng);
      ExplorationOptions options;
      options.thinning = config.thinning;
      const std::uint64_t nu = config.nu.value_or(default_nu(seq.size()));
      const std::uint64_t end = window_end(seq.total_edges(), config.epsilon);
      options.window = DiagnosticWindow{std::min(nu, end), end};

      Exploration state = graph ? Exploration::on_graph(seq, *graph, seeds, config.rates, options)
                                : Exploration(seq, seeds, config.rates, options);
      CompetitionOutcome outcome = state.run_to_termination(rng);

      auto& row = rows[r];
      row.replica = r;
      row.seed = seed;
      row.n = outcome.n;
      row.total_edges = outcome.total_edges;
      row.seeds = outcome.seeds;
      row.a1 = outcome.a1;
      row.a2 = outcome.a2;
      row.n1 = outcome.n1;
      row.n2 = outcome.n2;
      row.nbar1 = static_cast<double>(outcome.n1) / static_cast<double>(outcome.n);
      row.nbar2 = static_cast<double>(outcome.n2) / static_cast<double>(outcome.n);
      row.nu = options.window->nu;
      row.window_end = end;
      row.m_nu = outcome.window->m_nu;
      row.sup_deviation = outcome.window->sup_deviation;
      row.qv_sum = outcome.window->qv_sum;
      row.min_active_ratio = std::isfinite(outcome.window->min_active_ratio) ? outcome.window->min_active_ratio : 0.0;
      row.termination_step = outcome.termination_step;
      row.termination_time = outcome.termination_time;
      row.simple_attempts = attempts;
      if (config.keep_outcomes) outcomes[r] = std::move(outcome);
    } catch (const Error& e) {
      errors[r] = Error(e.code(), "replica " + std::to_string(r) + ": " + e.what());
    }
  });

  for (const auto& e : errors) {
    if (e) throw *e;
  }
  report.replicas = std::move(rows);
  report.outcomes = std::move(outcomes);
  report.aggregates = aggregate(report.replicas, report.quantile_levels);
  return report;
}

namespace {

struct RecordedRange {
  std::vector<TrajectoryPoint>::const_iterator begin;
  std::vector<TrajectoryPoint>::const_iterator end;
  std::uint64_t last;  // last step of the range that exists in the process
};

RecordedRange recorded_range(const Trajectory& trajectory, std::uint64_t nu, double epsilon,
                             std::uint64_t total_edges) {
  const std::uint64_t k_end = window_end(total_edges, epsilon);
  if (nu > k_end) throw Error(ErrorCode::RangeNotCovered, "nu lies beyond (1 - epsilon) N");
  if (!trajectory.complete && trajectory.final_step < k_end) {
    throw Error(ErrorCode::RangeNotCovered, "trajectory stops at step " + std::to_string(trajectory.final_step) +
                                                " before (1 - epsilon) N = " + std::to_string(k_end));
  }
  const auto& pts = trajectory.points;
  auto by_k = [](const TrajectoryPoint& p, std::uint64_t key) { return p.k < key; };
  const std::uint64_t last = std::min(k_end, trajectory.final_step);
  const auto first = std::lower_bound(pts.begin(), pts.end(), std::min(nu, last), by_k);
  const auto stop = std::upper_bound(pts.begin(), pts.end(), last,
                                     [](std::uint64_t key, const TrajectoryPoint& p) { return key < p.k; });
  return {first, stop, last};
}

}  // namespace

double constancy_statistic(const Trajectory& trajectory, std::uint64_t nu, double epsilon,
                           std::uint64_t total_edges) {
  const auto range = recorded_range(trajectory, nu, epsilon, total_edges);
  double m_nu = 0.0;
  try {
    m_nu = m_at(trajectory, nu);
  } catch (const Error&) {
    throw Error(ErrorCode::RangeNotCovered, "M at nu = " + std::to_string(nu) + " was not recorded");
  }
  double sup = 0.0;
  for (auto it = range.begin; it != range.end; ++it) {
    if (it->k >= nu) sup = std::max(sup, std::abs(it->m - m_nu));
  }
  return sup;
}

double qv_statistic(const Trajectory& trajectory, std::uint64_t nu, double epsilon, std::uint64_t total_edges) {
  const auto range = recorded_range(trajectory, nu, epsilon, total_edges);
  if (nu >= range.last) return 0.0;
  if (range.begin == range.end || range.begin->k != nu ||
      static_cast<std::uint64_t>(range.end - range.begin) != range.last - nu + 1) {
    throw Error(ErrorCode::RangeNotCovered, "increments between nu and (1 - epsilon) N are not all recorded");
  }
  double qv = 0.0;
  for (auto it = range.begin; it + 1 != range.end; ++it) {
    const double dm = (it + 1)->m - it->m;
    qv += dm * dm;
  }
  return qv;
}

ScalingReport scaling_from_reports(std::span<const EnsembleReport> reports, std::uint64_t bootstrap_seed,
                                   std::size_t resamples) {
  std::set<std::size_t> sizes;
  for (const auto& rep : reports) {
    if (!rep.replicas.empty()) sizes.insert(rep.replicas.front().n);
  }
  if (sizes.size() < 3 || static_cast<double>(*sizes.rbegin()) < 100.0 * static_cast<double>(*sizes.begin())) {
    throw Error(ErrorCode::InsufficientSizes, "need at least three distinct n spanning two decades");
  }

  ScalingReport out;
  const auto& rates = reports.front().config.rates;
  out.ratio = rates.lambda1 / rates.lambda2;
  out.bootstrap_resamples = resamples;

  std::vector<std::vector<double>> n1(reports.size());
  std::vector<double> log_n;
  std::vector<double> log_median;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (const auto& row : reports[i].replicas) n1[i].push_back(static_cast<double>(row.n1));
    const double med = stats::median(n1[i]);
    out.points.push_back({reports[i].replicas.front().n, reports[i].replicas.size(), med});
    log_n.push_back(std::log(static_cast<double>(out.points.back().n)));
    log_median.push_back(std::log(med));
  }
  const auto fit = stats::ols(log_n, log_median);
  out.slope = fit.slope;
  out.intercept = fit.intercept;

  Rng rng(bootstrap_seed);
  std::vector<double> slopes;
  slopes.reserve(resamples);
  std::vector<double> resampled;
  std::vector<double> boot_log_median(reports.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      resampled.clear();
      for (std::size_t j = 0; j < n1[i].size(); ++j) resampled.push_back(n1[i][rng.below(n1[i].size())]);
      boot_log_median[i] = std::log(stats::median(resampled));
    }
    slopes.push_back(stats::ols(log_n, boot_log_median).slope);
  }
  if (!slopes.empty()) {
    out.ci_low = stats::quantile(slopes, (1.0 - out.ci_level) / 2.0);
    out.ci_high = stats::quantile(slopes, 1.0 - (1.0 - out.ci_level) / 2.0);
  } else {
    out.ci_low = out.ci_high = out.slope;
  }
  out.ci_contains_ratio = out.ci_low <= out.ratio && out.ratio <= out.ci_high;
  return out;
}

ScalingReport scaling_study(const ExperimentConfig& base, std::span<const std::size_t> n_values,
                            std::size_t resamples) {
  const std::set<std::size_t> distinct(n_values.begin(), n_values.end());
  if (distinct.size() < 3 || static_cast<double>(*distinct.rbegin()) < 100.0 * static_cast<double>(*distinct.begin())) {
    throw Error(ErrorCode::InsufficientSizes, "need at least three distinct n spanning two decades");
  }
  std::vector<EnsembleReport> reports;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    ExperimentConfig cfg = base;
    cfg.n = n_values[i];
    cfg.master_seed = derive_seed(base.master_seed, i);
    cfg.keep_outcomes = false;
    reports.push_back(run_ensemble(cfg));
  }
  return scaling_from_reports(reports, derive_seed(base.master_seed, 0xb007), resamples);
}

}  // namespace cfpp
