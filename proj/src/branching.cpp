#include "cfpp/branching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "cfpp/error.hpp"
#include "cfpp/parallel.hpp"
#include "cfpp/stats.hpp"

namespace cfpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class GridRecorder {
 public:
  GridRecorder(double interval, std::vector<BranchingPoint>& out) : interval_(interval), out_(out) {}

  /// Emits grid points strictly before `t` (or up to and including `t` when
  /// `inclusive`) with the given state.
  void emit_until(double t, bool inclusive, std::uint64_t b1, std::uint64_t b2) {
    for (;;) {
      const double g = static_cast<double>(next_) * interval_;
      if (inclusive ? g > t : g >= t) return;
      out_.push_back({g, b1, b2, 0});
      ++next_;
    }
  }

 private:
  double interval_;
  std::uint64_t next_ = 0;
  std::vector<BranchingPoint>& out_;
};

}  // namespace

BranchingTrajectory simulate_branching_pair(const BranchingParams& params, double t_end, Rng& rng,
                                            const BranchingOptions& options) {
  if (params.a1 < 1 || params.a2 < 1) throw Error(ErrorCode::InvalidArgument, "initial populations must be >= 1");
  if (!(t_end >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be >= 0");
  if (options.record_interval < 0.0) throw Error(ErrorCode::InvalidArgument, "record_interval must be >= 0");
  params.rates.validate();
  validate_pmf(params.offspring, false);
  const DiscreteSampler offspring(params.offspring);
  const bool monotone = offspring.min_value() >= 1;

  Rng stream[2] = {Rng(rng.next()), Rng(rng.next())};
  const double lambda[2] = {params.rates.lambda1, params.rates.lambda2};
  std::uint64_t b[2] = {params.a1, params.a2};
  // Per-process clocks in units of 1/lambda_i.
  double tau[2] = {0.0, 0.0};
  auto schedule = [&](int i) {
    tau[i] = b[i] > 0 ? tau[i] + stream[i].standard_exponential() / static_cast<double>(b[i]) : kInf;
  };
  schedule(0);
  schedule(1);

  BranchingTrajectory out;
  const bool grid = options.record_interval > 0.0;
  GridRecorder recorder(options.record_interval, out.points);
  if (!grid) out.points.push_back({0.0, b[0], b[1], 0});

  double t = 0.0;
  for (;;) {
    const double t0 = tau[0] / lambda[0];
    const double t1 = tau[1] / lambda[1];
    const int i = t0 <= t1 ? 0 : 1;
    const double te = std::min(t0, t1);
    if (!(te <= t_end)) break;
    if (grid) recorder.emit_until(te, false, b[0], b[1]);

    const std::uint64_t xi = offspring.draw(stream[i]);
    const std::uint64_t before = b[i];
    b[i] = b[i] - 1 + xi;
    if (monotone && b[i] < before) throw Error(ErrorCode::InvariantViolated, "population decreased");
    ++out.events[i];
    t = te;
    if (!grid) out.points.push_back({t, b[0], b[1], i + 1});
    if (b[0] + b[1] >= options.population_cap) {
      out.saturated = true;
      break;
    }
    schedule(i);
  }

  const double stop = out.saturated ? t : t_end;
  if (grid) recorder.emit_until(stop, true, b[0], b[1]);
  out.final_state = {stop, b[0], b[1], 0};
  if (!grid && out.points.back().t != stop) out.points.push_back(out.final_state);
  return out;
}

VDistribution estimate_v_distribution(const BranchingParams& params, double t_probe, std::size_t replicas, Rng& rng,
                                      const BranchingOptions& options, unsigned threads,
                                      std::size_t histogram_bins) {
  if (replicas < 1) throw Error(ErrorCode::InvalidArgument, "replicas must be >= 1");
  if (histogram_bins < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  const std::uint64_t master = rng.next();
  BranchingOptions quiet = options;
  if (quiet.record_interval == 0.0) quiet.record_interval = t_probe > 0.0 ? t_probe : 1.0;

  std::vector<std::optional<double>> fraction(replicas);
  std::vector<char> saturated(replicas, 0);
  parallel_for(replicas, threads, [&](std::size_t r) {
    Rng local(derive_seed(master, r));
    const auto tr = simulate_branching_pair(params, t_probe, local, quiet);
    const auto total = tr.final_state.b1 + tr.final_state.b2;
    if (total > 0) fraction[r] = static_cast<double>(tr.final_state.b1) / static_cast<double>(total);
    saturated[r] = tr.saturated ? 1 : 0;
  });

  VDistribution out;
  out.histogram.assign(histogram_bins, 0);
  for (std::size_t r = 0; r < replicas; ++r) {
    out.saturated += saturated[r];
    if (!fraction[r]) {
      ++out.dropped;
      continue;
    }
    const double x = *fraction[r];
    out.samples.push_back(x);
    const auto bin = std::min(histogram_bins - 1, static_cast<std::size_t>(x * static_cast<double>(histogram_bins)));
    ++out.histogram[bin];
  }
  out.quantile_levels = {0.05, 0.25, 0.5, 0.75, 0.95};
  if (!out.samples.empty()) {
    for (const double p : out.quantile_levels) out.quantiles.push_back(stats::quantile(out.samples, p));
  }
  return out;
}

double estimate_growth_rate(const BranchingTrajectory& trajectory) {
  return estimate_growth_rate(std::span<const BranchingTrajectory>(&trajectory, 1));
}

double estimate_growth_rate(std::span<const BranchingTrajectory> trajectories) {
  double sxx = 0.0;
  double sxy = 0.0;
  double best_span = 0.0;
  for (const auto& tr : trajectories) {
    if (tr.points.empty()) continue;
    const double initial = static_cast<double>(tr.points.front().b1 + tr.points.front().b2);
    if (initial <= 0.0) continue;
    std::vector<double> ts;
    std::vector<double> ys;
    double peak = initial;
    for (const auto& p : tr.points) {
      const double pop = static_cast<double>(p.b1 + p.b2);
      peak = std::max(peak, pop);
      if (pop >= 10.0 * initial) {
        ts.push_back(p.t);
        ys.push_back(std::log(pop));
      }
    }
    best_span = std::max(best_span, peak / initial);
    if (ts.size() < 2) continue;
    const double mt = stats::mean(ts);
    const double my = stats::mean(ys);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      sxx += (ts[j] - mt) * (ts[j] - mt);
      sxy += (ts[j] - mt) * (ys[j] - my);
    }
  }
  if (best_span < 100.0 || sxx <= 0.0) {
    throw Error(ErrorCode::InsufficientGrowth, "population does not span two decades");
  }
  return sxy / sxx;
}

namespace {

CouplingMoments compare(const std::vector<double>& e, const std::vector<double>& b) {
  CouplingMoments m;
  m.exploration_mean = stats::mean(e);
  m.branching_mean = stats::mean(b);
  m.exploration_variance = stats::variance(e);
  m.branching_variance = stats::variance(b);
  auto z = [](double diff, double se) {
    if (se > 0.0) return diff / se;
    return diff == 0.0 ? 0.0 : kInf;
  };
  m.z_mean = z(m.exploration_mean - m.branching_mean, stats::mean_difference_se(e, b));
  m.z_variance = z(m.exploration_variance - m.branching_variance, stats::variance_difference_se(e, b));
  return m;
}

}  // namespace

CouplingReport coupling_check(const DegreeSequence& seq, const SeedMode& seeds, Rates rates, double t_probe,
                              std::size_t replicas, Rng& rng, unsigned threads, double z_threshold) {
  rates.validate();
  if (!(t_probe >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t_probe must be >= 0");
  if (replicas < 2) throw Error(ErrorCode::InvalidArgument, "coupling check needs at least two replicas");
  const Pmf offspring = offspring_pmf(compute_stats(seq).pmf);
  const auto index = std::make_shared<const HalfEdgeIndex>(seq);
  const std::uint64_t master = rng.next();
  const auto* fixed = std::get_if<SeedPair>(&seeds);

  std::vector<double> e1(replicas), e2(replicas), b1(replicas), b2(replicas);
  ExplorationOptions quiet;
  quiet.full_prefix = 0;
  quiet.thinning = std::numeric_limits<std::uint64_t>::max();
  parallel_for(replicas, threads, [&](std::size_t r) {
    Rng explore_rng(derive_seed(master, 2 * r));
    Rng branch_rng(derive_seed(master, 2 * r + 1));

    const SeedPair sp = fixed ? *fixed : draw_uniform_seeds(seq.size(), explore_rng);
    Exploration state(seq, index, sp, rates, quiet);
    state.run_until_time(t_probe, explore_rng);
    e1[r] = static_cast<double>(state.s1());
    e2[r] = static_cast<double>(state.s2());

    const BranchingParams params{.a1 = seq[sp.first], .a2 = seq[sp.second], .rates = rates, .offspring = offspring};
    BranchingOptions opts;
    opts.record_interval = t_probe > 0.0 ? t_probe : 1.0;
    const auto tr = simulate_branching_pair(params, t_probe, branch_rng, opts);
    b1[r] = static_cast<double>(tr.final_state.b1);
    b2[r] = static_cast<double>(tr.final_state.b2);
  });

  CouplingReport report;
  report.replicas = replicas;
  report.t_probe = t_probe;
  report.z_threshold = z_threshold;
  report.type1 = compare(e1, b1);
  report.type2 = compare(e2, b2);
  report.max_abs_z = std::max({std::abs(report.type1.z_mean), std::abs(report.type1.z_variance),
                               std::abs(report.type2.z_mean), std::abs(report.type2.z_variance)});

  double peak = 0.0;
  for (std::size_t r = 0; r < replicas; ++r) peak = std::max({peak, e1[r], e2[r], b1[r], b2[r]});
  const double width = std::max(1.0, std::ceil((peak + 1.0) / 32.0));
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> diff;
  for (std::size_t r = 0; r < replicas; ++r) {
    ++diff[{static_cast<std::int64_t>(e1[r] / width), static_cast<std::int64_t>(e2[r] / width)}];
    --diff[{static_cast<std::int64_t>(b1[r] / width), static_cast<std::int64_t>(b2[r] / width)}];
  }
  double tv = 0.0;
  for (const auto& [cell, d] : diff) tv += static_cast<double>(std::llabs(d));
  report.tv_estimate = 0.5 * tv / static_cast<double>(replicas);
  report.diverged = report.max_abs_z > z_threshold;
  return report;
}

}  // namespace cfpp
