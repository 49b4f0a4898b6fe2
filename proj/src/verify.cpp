#include "cfpp/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "cfpp/branching.hpp"
#include "cfpp/ensemble.hpp"
#include "cfpp/error.hpp"
#include "cfpp/exploration.hpp"
#include "cfpp/martingale_oracle.hpp"
#include "cfpp/pairing.hpp"
#include "cfpp/report_io.hpp"
#include "cfpp/stats.hpp"

namespace cfpp {

namespace {

constexpr double kAlpha = 1e-3;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

using EdgeKey = std::vector<Edge>;

EdgeKey canonical_edges(const Multigraph& g) {
  EdgeKey edges;
  for (auto [u, v] : g.edges) edges.emplace_back(std::min(u, v), std::max(u, v));
  std::sort(edges.begin(), edges.end());
  return edges;
}

/// Counts graphs by their half-edge pairing (distinct matchings).
using PairKey = std::vector<std::pair<HalfEdgeId, HalfEdgeId>>;

PairKey canonical_pairing(const Pairing& p) {
  PairKey key;
  for (auto [a, b] : p) key.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(key.begin(), key.end());
  return key;
}

std::uint64_t double_factorial_odd(std::uint64_t m) {
  std::uint64_t r = 1;
  for (std::uint64_t k = m - 1; k > 1; k -= 2) r *= k;
  return r;
}

Outcome matching_uniformity(std::uint64_t seed, bool full) {
  std::vector<std::vector<std::int64_t>> cases = {{1, 1, 1, 1}, {1, 1, 1, 1, 1, 1}, {2, 1, 1, 2}};
  if (full) cases.push_back({1, 1, 1, 1, 1, 1, 1, 1});
  std::string detail;
  bool ok = true;
  Rng rng(seed);
  for (const auto& raw : cases) {
    const auto seq = load_degree_sequence(raw);
    const std::uint64_t classes = double_factorial_odd(seq.total_half_edges());
    const std::uint64_t samples = std::max<std::uint64_t>(30000, 10000 * classes);
    std::map<PairKey, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < samples; ++i) ++counts[canonical_pairing(generate_configuration_graph(seq, rng).pairing)];
    std::vector<std::uint64_t> observed;
    for (const auto& [key, c] : counts) observed.push_back(c);
    observed.resize(classes, 0);
    const std::vector<double> probs(classes, 1.0 / static_cast<double>(classes));
    const auto test = stats::chi_square(observed, probs);
    const bool pass = counts.size() == classes && test.p_value > kAlpha;
    ok = ok && pass;
    detail += "2N=" + std::to_string(seq.total_half_edges()) + " p=" + fmt(test.p_value) + "; ";
  }
  return {ok, detail};
}

Outcome simple_graph_uniformity(std::uint64_t seed) {
  Rng rng(seed);
  // (2,2,2): the triangle is the only simple realization.
  const auto tri = load_degree_sequence(std::vector<std::int64_t>{2, 2, 2});
  const EdgeKey triangle = {{0, 1}, {0, 2}, {1, 2}};
  bool ok = true;
  for (int i = 0; i < 2000; ++i) ok = ok && canonical_edges(sample_simple_graph(tri, rng)) == triangle;
  // (2,2,2,2): three labelled four-cycles, equally likely.
  const auto sq = load_degree_sequence(std::vector<std::int64_t>{2, 2, 2, 2});
  std::map<EdgeKey, std::uint64_t> counts;
  for (int i = 0; i < 30000; ++i) ++counts[canonical_edges(sample_simple_graph(sq, rng))];
  std::vector<std::uint64_t> observed;
  for (const auto& [key, c] : counts) observed.push_back(c);
  const auto test = stats::chi_square(observed, std::vector<double>(observed.size(), 1.0 / 3.0));
  ok = ok && counts.size() == 3 && test.p_value > kAlpha;
  return {ok, "triangle only: " + std::string(ok ? "yes" : "no") + "; 4-cycles=" + std::to_string(counts.size()) +
                  " p=" + fmt(test.p_value)};
}

Outcome martingale_oracle() {
  const auto a = load_degree_sequence(std::vector<std::int64_t>{2, 2, 2});
  const auto b = load_degree_sequence(std::vector<std::int64_t>{2, 2, 3, 3});
  const SeedPair seeds{0, 1};
  const double ra = static_cast<double>(martingale_enumeration_oracle(a, seeds, {1, 1}).max_residual);
  const double rb = static_cast<double>(martingale_enumeration_oracle(b, {0, 2}, {1, 1}).max_residual);
  const double rc = static_cast<double>(martingale_enumeration_oracle(a, seeds, {1, 2}).max_residual);
  const bool ok = ra <= 1e-12 && rb <= 1e-12 && rc > 1e-3;
  return {ok, "(2,2,2)=" + fmt(ra) + " (2,2,3,3)=" + fmt(rb) + " unequal=" + fmt(rc)};
}

Outcome conservation_audit(std::uint64_t seed, bool inject) {
  Rng rng(seed);
  const auto seq = sample_iid_degrees({{2, 0.3}, {3, 0.4}, {5, 0.3}}, 3000, rng);
  ExplorationOptions opts;
  opts.check_invariants = true;
  auto state = init_exploration(seq, UniformSeeds{}, {1.0, 1.5}, rng, opts);
  std::uint64_t audits = 0;
  if (inject) state.inject_counter_fault_for_testing();
  while (state.active() > 0) {
    state.step(rng);
    if (state.step_index() % 97 == 0) {
      state.audit();
      ++audits;
    }
  }
  state.audit();
  return {true, "steps=" + std::to_string(state.step_index()) + " audits=" + std::to_string(audits + 1)};
}

Outcome determinism_and_scaling(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.n = 10000;
  cfg.replicas = 1;
  cfg.keep_outcomes = true;
  cfg.master_seed = seed;
  const auto r1 = run_ensemble(cfg);
  const auto r2 = run_ensemble(cfg);
  std::ostringstream c1, c2;
  write_trajectory_csv(c1, r1.outcomes[0].trajectory);
  write_trajectory_csv(c2, r2.outcomes[0].trajectory);
  const bool same = c1.str() == c2.str() && outcome_to_json(r1.outcomes[0], seed) == outcome_to_json(r2.outcomes[0], seed) &&
                    r1.outcomes[0].final_graph.pairing == r2.outcomes[0].final_graph.pairing;

  Rng g(seed);
  const auto seq = sample_iid_degrees({{2, 0.5}, {3, 0.5}}, 10000, g);
  Rng ra(seed + 1), rb(seed + 1);
  auto a = init_exploration(seq, UniformSeeds{}, {1, 1}, ra);
  auto b = init_exploration(seq, UniformSeeds{}, {3, 3}, rb);
  const auto oa = a.run_to_termination(ra);
  const auto ob = b.run_to_termination(rb);
  bool scaled = oa.n1 == ob.n1 && oa.n2 == ob.n2 && a.pairs() == b.pairs() &&
                oa.final_graph.pairing == ob.final_graph.pairing;
  const auto& ia = a.infections();
  const auto& ib = b.infections();
  scaled = scaled && ia.size() == ib.size();
  for (std::size_t i = 0; scaled && i < ia.size(); ++i) {
    scaled = ia[i].vertex == ib[i].vertex && ia[i].type == ib[i].type && ia[i].step == ib[i].step &&
             std::abs(ia[i].time - 3.0 * ib[i].time) <= 1e-9 * std::max(1.0, ia[i].time);
  }
  return {same && scaled, std::string("repeat identical: ") + (same ? "yes" : "no") +
                              "; (1,1) vs (3,3) identical chain: " + (scaled ? "yes" : "no")};
}

Outcome coupling(std::uint64_t seed, std::size_t n, double t_probe, std::size_t replicas, unsigned threads) {
  Rng rng(seed);
  const auto seq = sample_iid_degrees({{2, 0.5}, {3, 0.5}}, n, rng);
  const auto report = coupling_check(seq, UniformSeeds{}, {1, 1}, t_probe, replicas, rng, threads);
  return {!report.diverged, "n=" + std::to_string(n) + " t=" + fmt(t_probe) + " replicas=" + std::to_string(replicas) +
                                " max|z|=" + fmt(report.max_abs_z) + " tv=" + fmt(report.tv_estimate)};
}

/// Independent oracle: a Polya urn started from one ball of each colour; the
/// fraction after `draws` draws is uniform on {1, ..., draws+1}/(draws+2).
std::vector<double> polya_urn_fractions(std::size_t replicas, std::uint64_t draws, Rng& rng) {
  std::vector<double> out(replicas);
  for (auto& f : out) {
    std::uint64_t white = 1, total = 2;
    for (std::uint64_t i = 0; i < draws; ++i, ++total) white += rng.below(total) < white;
    f = static_cast<double>(white) / static_cast<double>(total);
  }
  return out;
}

Outcome yule_race(std::uint64_t seed, std::size_t replicas, double t_probe, unsigned threads) {
  Rng rng(seed);
  const BranchingParams params{.a1 = 1, .a2 = 1, .rates = {1, 1}, .offspring = {{2, 1.0}}};
  BranchingOptions opts;
  opts.record_interval = t_probe;
  const auto v = estimate_v_distribution(params, t_probe, replicas, rng, opts, threads);
  const auto ks = stats::ks_uniform(v.samples);
  const auto urn = polya_urn_fractions(replicas, 5000, rng);
  const auto ks_urn_uniform = stats::ks_uniform(urn);
  const auto ks_pair = stats::ks_two_sample(v.samples, urn);
  const bool ok = ks.p_value > kAlpha && ks_urn_uniform.p_value > kAlpha && ks_pair.p_value > kAlpha;
  return {ok, "KS uniform p=" + fmt(ks.p_value) + "; urn uniform p=" + fmt(ks_urn_uniform.p_value) +
                  "; race vs urn p=" + fmt(ks_pair.p_value)};
}

Outcome coexistence(std::uint64_t seed, std::size_t replicas, unsigned threads) {
  ExperimentConfig cfg;
  cfg.n = 100000;
  cfg.replicas = replicas;
  cfg.master_seed = seed;
  cfg.threads = threads;
  const auto report = run_ensemble(cfg);
  const auto& a = report.aggregates;
  std::vector<double> x1, x2;
  for (const auto& r : report.replicas) {
    x1.push_back(r.nbar1);
    x2.push_back(r.nbar2);
  }
  const auto ks = stats::ks_two_sample(x1, x2);
  const bool ok = a.nbar1.stddev > 0.05 && a.fraction_interior >= 0.5 && a.fraction_covered >= 0.99 &&
                  ks.p_value > kAlpha;
  return {ok, "sd(nbar1)=" + fmt(a.nbar1.stddev) + " interior=" + fmt(a.fraction_interior) +
                  " covered=" + fmt(a.fraction_covered) + " KS(nbar1,nbar2) p=" + fmt(ks.p_value)};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  if (options.level != "fast" && options.level != "full") {
    throw Error(ErrorCode::InvalidArgument, "level must be 'fast' or 'full'");
  }
  const bool full = options.level == "full";
  const std::uint64_t s = options.seed;
  const unsigned th = options.threads;

  std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"matching_uniformity", [&] { return matching_uniformity(derive_seed(s, 1), full); }},
      {"simple_graph_uniformity", [&] { return simple_graph_uniformity(derive_seed(s, 2)); }},
      {"martingale_oracle", [] { return martingale_oracle(); }},
      {"conservation_audit", [&] { return conservation_audit(derive_seed(s, 3), options.inject_conservation_fault); }},
      {"determinism_scale_invariance", [&] { return determinism_and_scaling(derive_seed(s, 4)); }},
      {"branching_coupling",
       [&] { return full ? coupling(derive_seed(s, 5), 100000, 3.0, 10000, th) : coupling(derive_seed(s, 5), 10000, 2.0, 2000, th); }},
      {"yule_race_uniform_v",
       [&] { return full ? yule_race(derive_seed(s, 6), 10000, 8.0, th) : yule_race(derive_seed(s, 6), 2000, 6.0, th); }},
  };
  if (full) checks.emplace_back("coexistence_symmetry", [&] { return coexistence(derive_seed(s, 7), 200, th); });

  std::vector<CheckResult> results;
  for (const auto& [name, fn] : checks) {
    CheckResult res;
    res.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto out = fn();
      res.passed = out.passed;
      res.detail = out.detail;
    } catch (const std::exception& e) {
      res.passed = false;
      res.detail = e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace cfpp
