// Acceptance gate: one PASS/FAIL line per criterion, thresholds pinned below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cfpp/branching.hpp"
#include "cfpp/ensemble.hpp"
#include "cfpp/exploration.hpp"
#include "cfpp/martingale_oracle.hpp"
#include "cfpp/pairing.hpp"
#include "cfpp/report_io.hpp"
#include "cfpp/stats.hpp"

using namespace cfpp;

namespace {

constexpr std::uint64_t kMasterSeed = 0x5eed2024;
constexpr double kAlpha = 1e-3;

// c1
constexpr int kMatchingSamples = 30000;
constexpr double kMatchingSeconds = 5.0;
// c2
constexpr double kOracleTolerance = 1e-12;
constexpr double kOracleDiscriminance = 1e-3;
constexpr double kOracleSeconds = 10.0;
// c3
constexpr std::size_t kCoexistReplicas = 500;
constexpr double kMinStddev = 0.05;
constexpr double kMinInterior = 0.5;
constexpr double kCoverage = 0.99;
constexpr double kMinCoveredFraction = 0.99;
constexpr double kEnsembleSeconds = 600.0;
// c4
constexpr std::size_t kTrendReplicas = 200;
constexpr double kMaxMedianNbar1 = 0.05;
// c7, frozen after pilot runs (observed minima far above this)
constexpr double kMinActiveRatio = 0.01;
constexpr double kMinActiveFraction = 0.99;
// c8
constexpr std::size_t kCouplingReplicas = 10000;
constexpr double kCouplingProbe = 3.0;
constexpr double kCouplingZ = 4.0;
constexpr double kCouplingSeconds = 300.0;
// c9
constexpr std::size_t kYuleReplicas = 10000;
constexpr double kYuleProbe = 8.0;
// c10
constexpr std::size_t kScalingResamples = 1000;

const Pmf kDegrees = {{2, 0.5}, {3, 0.5}};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

int failures = 0;

void report(const std::string& id, const std::string& title, bool gating, const std::function<Verdict()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = fn();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const char* tag = v.pass ? "PASS" : (gating ? "FAIL" : "WARN");
  std::printf("%s %s %s: %s [%.1f s]%s\n", tag, id.c_str(), title.c_str(), v.detail.c_str(), secs,
              gating ? "" : " (exploratory, non-gating)");
  std::fflush(stdout);
  if (!v.pass && gating) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Timed {
  EnsembleReport report;
  double seconds = 0.0;
};

Timed ensemble(std::size_t n, Rates rates, std::size_t replicas, std::uint64_t stream) {
  ExperimentConfig cfg;
  cfg.degrees = DegreeSource::iid(kDegrees);
  cfg.n = n;
  cfg.rates = rates;
  cfg.replicas = replicas;
  cfg.master_seed = derive_seed(kMasterSeed, stream);
  const auto start = std::chrono::steady_clock::now();
  Timed t{run_ensemble(cfg), 0.0};
  t.seconds = seconds_since(start);
  return t;
}

std::vector<double> column(const EnsembleReport& r, std::size_t count, double ReplicaResult::*field) {
  std::vector<double> out;
  for (std::size_t i = 0; i < count && i < r.replicas.size(); ++i) out.push_back(r.replicas[i].*field);
  return out;
}

}  // namespace

int main() {
  report("c1", "matching uniformity", true, [] {
    const auto start = std::chrono::steady_clock::now();
    const auto seq = load_degree_sequence(std::vector<std::int64_t>{1, 1, 1, 1});
    Rng rng(derive_seed(kMasterSeed, 1));
    std::map<std::vector<Edge>, std::uint64_t> counts;
    for (int i = 0; i < kMatchingSamples; ++i) {
      auto edges = generate_configuration_graph(seq, rng).edges;
      for (auto& [u, v] : edges) {
        if (u > v) std::swap(u, v);
      }
      std::sort(edges.begin(), edges.end());
      ++counts[edges];
    }
    std::vector<std::uint64_t> observed;
    for (const auto& [e, c] : counts) observed.push_back(c);
    const auto test = stats::chi_square(observed, std::vector<double>(observed.size(), 1.0 / 3.0));
    const double secs = seconds_since(start);
    return Verdict{counts.size() == 3 && test.p_value > kAlpha && secs < kMatchingSeconds,
                   "3 matchings, chi-square p=" + num(test.p_value) + " (> " + num(kAlpha) + ")"};
  });

  report("c2", "martingale oracle", true, [] {
    const auto start = std::chrono::steady_clock::now();
    const auto a = load_degree_sequence(std::vector<std::int64_t>{2, 2, 2});
    const auto b = load_degree_sequence(std::vector<std::int64_t>{2, 2, 3, 3});
    const double ra = static_cast<double>(martingale_enumeration_oracle(a, {0, 1}, {1, 1}).max_residual);
    const double rb = static_cast<double>(martingale_enumeration_oracle(b, {0, 2}, {1, 1}).max_residual);
    const double rc = static_cast<double>(martingale_enumeration_oracle(a, {0, 1}, {1, 2}).max_residual);
    const double rd = static_cast<double>(martingale_enumeration_oracle(b, {0, 2}, {1, 2}).max_residual);
    const double secs = seconds_since(start);
    const bool ok = ra <= kOracleTolerance && rb <= kOracleTolerance && rc > kOracleDiscriminance &&
                    rd > kOracleDiscriminance && secs < kOracleSeconds;
    return Verdict{ok, "equal rates: (2,2,2) " + num(ra) + ", (2,2,3,3) " + num(rb) + "; ratio 1/2: " + num(rc) +
                           ", " + num(rd)};
  });

  // Shared runs. Equal rates at n = 1e5 (500 replicas; the first 200 serve
  // c5-c7) and n = 1e4; rates (1, 2) at 1e3, 1e4, 1e5.
  std::printf("running ensembles...\n");
  std::fflush(stdout);
  const auto eq5 = ensemble(100000, {1, 1}, kCoexistReplicas, 10);
  const auto eq4 = ensemble(10000, {1, 1}, kTrendReplicas, 11);
  const auto wt3 = ensemble(1000, {1, 2}, kTrendReplicas, 12);
  const auto wt4 = ensemble(10000, {1, 2}, kTrendReplicas, 13);
  const auto wt5 = ensemble(100000, {1, 2}, kTrendReplicas, 14);

  report("c3", "coexistence", true, [&] {
    const auto& a = eq5.report.aggregates;
    const bool ok = a.nbar1.stddev > kMinStddev && a.fraction_interior >= kMinInterior &&
                    a.fraction_covered >= kMinCoveredFraction && eq5.seconds <= kEnsembleSeconds;
    return Verdict{ok, "n=1e5, " + std::to_string(eq5.report.replicas.size()) + " replicas: sd(nbar1)=" +
                           num(a.nbar1.stddev) + ", in (0.1,0.9): " + num(a.fraction_interior) +
                           ", nbar1+nbar2>=" + num(kCoverage) + ": " + num(a.fraction_covered) + ", ensemble " +
                           num(eq5.seconds) + " s"};
  });

  report("c4", "winner takes all", true, [&] {
    const double m4 = stats::median(column(wt4.report, kTrendReplicas, &ReplicaResult::nbar1));
    const double m5 = stats::median(column(wt5.report, kTrendReplicas, &ReplicaResult::nbar1));
    const bool ok = m5 < kMaxMedianNbar1 && m5 < m4 && wt4.seconds + wt5.seconds <= kEnsembleSeconds;
    return Verdict{ok, "median nbar1: n=1e4 " + num(m4) + ", n=1e5 " + num(m5) + " (< " + num(kMaxMedianNbar1) + ")"};
  });

  report("c5", "constancy of M", true, [&] {
    const double d4 = stats::median(column(eq4.report, kTrendReplicas, &ReplicaResult::sup_deviation));
    const double d5 = stats::median(column(eq5.report, kTrendReplicas, &ReplicaResult::sup_deviation));
    return Verdict{d5 < d4, "median sup|M_k - M_nu|: n=1e4 " + num(d4) + ", n=1e5 " + num(d5)};
  });

  report("c6", "quadratic variation decay", true, [&] {
    const double q4 = stats::mean(column(eq4.report, kTrendReplicas, &ReplicaResult::qv_sum));
    const double q5 = stats::mean(column(eq5.report, kTrendReplicas, &ReplicaResult::qv_sum));
    return Verdict{q5 < q4, "mean QV: n=1e4 " + num(q4) + ", n=1e5 " + num(q5)};
  });

  report("c7", "linear active growth", true, [&] {
    const auto ratios = column(eq5.report, kTrendReplicas, &ReplicaResult::min_active_ratio);
    const auto good = std::count_if(ratios.begin(), ratios.end(), [](double r) { return r >= kMinActiveRatio; });
    const double frac = static_cast<double>(good) / static_cast<double>(ratios.size());
    return Verdict{frac >= kMinActiveFraction,
                   "min S_k/k >= " + num(kMinActiveRatio) + " in " + num(frac) + " of replicas; smallest " +
                       num(*std::min_element(ratios.begin(), ratios.end())) + ", median " + num(stats::median(ratios))};
  });

  report("c8", "branching coupling", true, [] {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(derive_seed(kMasterSeed, 8));
    const auto seq = sample_iid_degrees(kDegrees, 100000, rng);
    const auto r = coupling_check(seq, UniformSeeds{}, {1, 1}, kCouplingProbe, kCouplingReplicas, rng, 0, kCouplingZ);
    const double secs = seconds_since(start);
    return Verdict{!r.diverged && secs <= kCouplingSeconds,
                   "z(mean1)=" + num(r.type1.z_mean) + " z(var1)=" + num(r.type1.z_variance) + " z(mean2)=" +
                       num(r.type2.z_mean) + " z(var2)=" + num(r.type2.z_variance) + " (|z| <= " + num(kCouplingZ) +
                       "), tv=" + num(r.tv_estimate)};
  });

  report("c9", "symmetric V (Yule race)", true, [] {
    Rng rng(derive_seed(kMasterSeed, 9));
    const BranchingParams p{.a1 = 1, .a2 = 1, .rates = {1, 1}, .offspring = {{2, 1.0}}};
    const auto v = estimate_v_distribution(p, kYuleProbe, kYuleReplicas, rng);
    const auto ks = stats::ks_uniform(v.samples);
    std::vector<double> urn;
    for (std::size_t r = 0; r < kYuleReplicas; ++r) {
      std::uint64_t white = 1, total = 2;
      for (int i = 0; i < 5000; ++i, ++total) white += rng.below(total) < white;
      urn.push_back(static_cast<double>(white) / static_cast<double>(total));
    }
    const auto cross = stats::ks_two_sample(v.samples, urn);
    return Verdict{ks.p_value > kAlpha && cross.p_value > kAlpha,
                   "KS vs Uniform(0,1) p=" + num(ks.p_value) + ", vs Polya urn p=" + num(cross.p_value)};
  });

  report("c10", "scaling conjecture", false, [&] {
    const std::vector<EnsembleReport> reports = {wt3.report, wt4.report, wt5.report};
    const auto s = scaling_from_reports(reports, derive_seed(kMasterSeed, 10), kScalingResamples);
    return Verdict{s.ci_contains_ratio, "slope " + num(s.slope) + ", 95% CI [" + num(s.ci_low) + ", " +
                                            num(s.ci_high) + "], ratio " + num(s.ratio)};
  });

  report("c11", "determinism and scale invariance", true, [] {
    ExperimentConfig cfg;
    cfg.degrees = DegreeSource::iid(kDegrees);
    cfg.n = 20000;
    cfg.replicas = 3;
    cfg.keep_outcomes = true;
    cfg.master_seed = derive_seed(kMasterSeed, 11);
    auto serialize = [](const EnsembleReport& r) {
      std::ostringstream s;
      write_replicas_csv(s, r.replicas);
      for (const auto& o : r.outcomes) {
        s << outcome_to_json(o, 0).dump();
        write_trajectory_csv(s, o.trajectory);
        write_edge_list(s, o.final_graph);
      }
      return s.str();
    };
    const bool repeat = serialize(run_ensemble(cfg)) == serialize(run_ensemble(cfg));

    auto fast = cfg;
    fast.rates = {3, 3};
    const auto a = run_ensemble(cfg);
    const auto b = run_ensemble(fast);
    bool same_chain = true;
    for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
      same_chain = same_chain && a.outcomes[i].final_graph.pairing == b.outcomes[i].final_graph.pairing &&
                   a.outcomes[i].n1 == b.outcomes[i].n1 && a.outcomes[i].n2 == b.outcomes[i].n2 &&
                   a.outcomes[i].termination_step == b.outcomes[i].termination_step;
    }
    return Verdict{repeat && same_chain, std::string("repeat byte-identical: ") + (repeat ? "yes" : "no") +
                                             "; (1,1) vs (3,3) identical chains and (N1,N2): " +
                                             (same_chain ? "yes" : "no")};
  });

  std::printf("%s: %d gating criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
