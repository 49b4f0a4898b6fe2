#include "cfpp/report_io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace cfpp {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

// JSON has no infinity; such values are written as null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json summary_to_json(const SampleSummary& s, std::span<const double> levels) {
  json q = json::object();
  for (std::size_t i = 0; i < levels.size() && i < s.quantiles.size(); ++i) {
    q[format_double(levels[i])] = number(s.quantiles[i]);
  }
  return {{"mean", number(s.mean)}, {"stddev", number(s.stddev)}, {"min", number(s.min)},
          {"max", number(s.max)},   {"quantiles", q}};
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "k,t,s1,s2,m\n";
  for (const auto& p : trajectory.points) {
    out << p.k << ',' << format_double(p.t) << ',' << p.s1 << ',' << p.s2 << ',' << format_double(p.m) << '\n';
  }
}

void write_branching_csv(std::ostream& out, const BranchingTrajectory& trajectory) {
  out << "t,b1,b2\n";
  for (const auto& p : trajectory.points) out << format_double(p.t) << ',' << p.b1 << ',' << p.b2 << '\n';
}

void write_v_samples_csv(std::ostream& out, std::span<const double> samples) {
  out << "v\n";
  for (const double v : samples) out << format_double(v) << '\n';
}

void write_replicas_csv(std::ostream& out, std::span<const ReplicaResult> rows) {
  out << "replica,seed,n,N,seed1,seed2,a1,a2,n1,n2,nbar1,nbar2,nu,window_end,m_nu,sup_deviation,qv_sum,"
         "min_active_ratio,termination_step,termination_time,simple_attempts\n";
  for (const auto& r : rows) {
    out << r.replica << ',' << r.seed << ',' << r.n << ',' << r.total_edges << ',' << r.seeds.first << ','
        << r.seeds.second << ',' << r.a1 << ',' << r.a2 << ',' << r.n1 << ',' << r.n2 << ','
        << format_double(r.nbar1) << ',' << format_double(r.nbar2) << ',' << r.nu << ',' << r.window_end << ','
        << format_double(r.m_nu) << ',' << format_double(r.sup_deviation) << ',' << format_double(r.qv_sum) << ','
        << format_double(r.min_active_ratio) << ',' << r.termination_step << ','
        << format_double(r.termination_time) << ',' << r.simple_attempts << '\n';
  }
}

json outcome_to_json(const CompetitionOutcome& o, std::uint64_t seed) {
  json j;
  j["n"] = o.n;
  j["N"] = o.total_edges;
  j["seeds"] = json::array({o.seeds.first, o.seeds.second});
  j["lambda1"] = o.rates.lambda1;
  j["lambda2"] = o.rates.lambda2;
  j["a1"] = o.a1;
  j["a2"] = o.a2;
  j["n1"] = o.n1;
  j["n2"] = o.n2;
  j["nbar1"] = o.n ? static_cast<double>(o.n1) / static_cast<double>(o.n) : 0.0;
  j["nbar2"] = o.n ? static_cast<double>(o.n2) / static_cast<double>(o.n) : 0.0;
  j["termination_step"] = o.termination_step;
  j["termination_time"] = number(o.termination_time);
  j["rng_seed"] = seed;
  if (o.window) {
    j["window"] = {{"m_nu", number(o.window->m_nu)},
                   {"sup_deviation", number(o.window->sup_deviation)},
                   {"qv_sum", number(o.window->qv_sum)},
                   {"min_active_ratio", number(o.window->min_active_ratio)}};
  }
  return j;
}

json assumptions_to_json(const AssumptionFlags& f) {
  return {{"all_at_least_two", f.all_at_least_two},
          {"some_above_two", f.some_above_two},
          {"finite_second_moment_declared", f.finite_second_moment_declared},
          {"satisfied", f.satisfied()}};
}

json aggregates_to_json(const EnsembleAggregates& a, std::span<const double> levels) {
  return {{"nbar1", summary_to_json(a.nbar1, levels)},
          {"nbar2", summary_to_json(a.nbar2, levels)},
          {"sup_deviation", summary_to_json(a.sup_deviation, levels)},
          {"qv_sum", summary_to_json(a.qv_sum, levels)},
          {"min_active_ratio", summary_to_json(a.min_active_ratio, levels)},
          {"n1", summary_to_json(a.n1, levels)},
          {"fraction_interior", a.fraction_interior},
          {"fraction_covered", a.fraction_covered},
          {"nbar1_histogram", a.nbar1_histogram}};
}

json v_distribution_to_json(const VDistribution& v) {
  json q = json::object();
  for (std::size_t i = 0; i < v.quantile_levels.size(); ++i) q[format_double(v.quantile_levels[i])] = v.quantiles[i];
  return {{"samples", v.samples.size()}, {"dropped", v.dropped},      {"saturated", v.saturated},
          {"quantiles", q},              {"histogram", v.histogram}};
}

json coupling_to_json(const CouplingReport& r) {
  auto moments = [](const CouplingMoments& m) {
    return json{{"exploration_mean", m.exploration_mean},         {"branching_mean", m.branching_mean},
                {"exploration_variance", m.exploration_variance}, {"branching_variance", m.branching_variance},
                {"z_mean", number(m.z_mean)},                     {"z_variance", number(m.z_variance)}};
  };
  return {{"replicas", r.replicas},       {"t_probe", r.t_probe},         {"type1", moments(r.type1)},
          {"type2", moments(r.type2)},    {"tv_estimate", r.tv_estimate}, {"max_abs_z", number(r.max_abs_z)},
          {"z_threshold", r.z_threshold}, {"diverged", r.diverged}};
}

json scaling_to_json(const ScalingReport& r) {
  json points = json::array();
  for (const auto& p : r.points) points.push_back({{"n", p.n}, {"replicas", p.replicas}, {"median_n1", p.median_n1}});
  return {{"points", points},
          {"ratio", r.ratio},
          {"slope", number(r.slope)},
          {"intercept", number(r.intercept)},
          {"ci_low", number(r.ci_low)},
          {"ci_high", number(r.ci_high)},
          {"ci_level", r.ci_level},
          {"bootstrap_resamples", r.bootstrap_resamples},
          {"ci_contains_ratio", r.ci_contains_ratio},
          {"exploratory", r.exploratory}};
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  write_text_file(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::Io, "cannot create output directory " + dir.string() +
                                   (ec ? ": " + ec.message() : std::string()));
  }
}

}  // namespace cfpp
