#include <algorithm>
#include <cmath>
#include <map>

#include "cfpp/ensemble.hpp"
#include "cfpp/exploration.hpp"
#include "cfpp/martingale_oracle.hpp"
#include "cfpp/stats.hpp"
#include "helpers.hpp"

using namespace cfpp;
using cfpp::test::seq_of;

TEST_CASE("init examples") {
  const Exploration a(seq_of({2, 2, 3, 3}), SeedPair{0, 2}, {1, 1});
  CHECK(a.s1() == 2);
  CHECK(a.s2() == 3);
  CHECK(a.m() == doctest::Approx(0.4));
  CHECK(a.a1() == 2);
  CHECK(a.a2() == 3);

  const Exploration b(seq_of({2, 2}), SeedPair{0, 1}, {1, 1});
  CHECK(b.s1() == 2);
  CHECK(b.s2() == 2);
  CHECK(b.m() == doctest::Approx(0.5));
  CHECK(m_at(b, 0) == doctest::Approx(0.5));

  CHECK_ERROR_CODE(Exploration(seq_of({2, 2}), SeedPair{1, 1}, {1, 1}), ErrorCode::IdenticalSeeds);
  CHECK_ERROR_CODE(Exploration(seq_of({2, 2}), SeedPair{0, 2}, {1, 1}), ErrorCode::VertexOutOfRange);
  CHECK_ERROR_CODE(Exploration(seq_of({2, 2}), SeedPair{0, 1}, {1, 0}), ErrorCode::InvalidArgument);
  CHECK_ERROR_CODE(Exploration(seq_of({2, 2}), SeedPair{0, 1}, {-1, 1}), ErrorCode::InvalidArgument);
}

TEST_CASE("uniform seeds are distinct") {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const auto s = draw_uniform_seeds(2, rng);
    CHECK(s.first != s.second);
  }
}

TEST_CASE("(1,1) runs one step") {
  Rng rng(1);
  Exploration e(seq_of({1, 1}), SeedPair{0, 1}, {1, 1});
  const auto out = e.run_to_termination(rng);
  CHECK(out.n1 == 1);
  CHECK(out.n2 == 1);
  CHECK(out.termination_step == 1);
  CHECK(out.final_graph.edges.size() == 1);
  // S_1 = 0, so M_1 carries M_0 forward.
  CHECK(m_at(out, 1) == doctest::Approx(0.5));
  CHECK_ERROR_CODE(e.step(rng), ErrorCode::NoActiveHalfEdges);
}

TEST_CASE("(2,2) first step law") {
  // Type 1 or 2 with prob 1/2, then r is the same-vertex half-edge (1/3) or
  // one of the two at the other seed (2/3).
  const auto seq = seq_of({2, 2});
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> counts;
  Rng rng(17);
  const int samples = 60000;
  for (int i = 0; i < samples; ++i) {
    Exploration e(seq, SeedPair{0, 1}, {1, 1});
    const auto ev = e.step(rng);
    ++counts[{ev.s1, ev.s2}];
  }
  REQUIRE(counts.size() == 3);
  const std::vector<std::uint64_t> observed = {counts[{0, 2}], counts[{2, 0}], counts[{1, 1}]};
  const std::vector<double> probs = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
  CHECK(stats::chi_square(observed, probs).p_value > 1e-3);
}

TEST_CASE("mutual annihilation carries M forward") {
  Rng rng(2);
  // Either r is the other seed (both drop out) or r sits at vertex 2.
  for (int trial = 0; trial < 50; ++trial) {
    Exploration f(seq_of({1, 1, 2}), SeedPair{0, 1}, {1, 1});
    const auto ev = f.step(rng);
    if (!ev.new_infection) {
      CHECK(ev.s1 == 0);
      CHECK(ev.s2 == 0);
      CHECK(ev.m == doctest::Approx(0.5));
    } else {
      CHECK(ev.s1 + ev.s2 == 2);
    }
  }
}

TEST_CASE("step bookkeeping on random instances") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const auto seq = sample_iid_degrees({{1, 0.1}, {2, 0.4}, {3, 0.3}, {6, 0.2}}, 300, rng);
    ExplorationOptions opts;
    opts.check_invariants = true;
    auto e = init_exploration(seq, UniformSeeds{}, {1.0, 0.5 + trial * 0.1}, rng, opts);
    double last_t = 0.0;
    std::vector<int> types(seq.size(), 0);
    for (VertexId v = 0; v < seq.size(); ++v) types[v] = e.vertex_type(v);
    while (e.active() > 0) {
      const auto s1 = static_cast<std::int64_t>(e.s1());
      const auto s2 = static_cast<std::int64_t>(e.s2());
      const auto ev = e.step(rng);
      CHECK(ev.t >= last_t);
      last_t = ev.t;
      const std::int64_t d1 = static_cast<std::int64_t>(ev.s1) - s1;
      const std::int64_t d2 = static_cast<std::int64_t>(ev.s2) - s2;
      if (ev.new_infection) {
        const auto dy = static_cast<std::int64_t>(seq[ev.y]);
        CHECK((ev.type == 1 ? d1 : d2) == dy - 2);
        CHECK((ev.type == 1 ? d2 : d1) == 0);
        CHECK(e.vertex_type(ev.y) == ev.type);
      } else {
        CHECK(d1 + d2 == -2);
      }
      for (VertexId v = 0; v < seq.size(); ++v) {
        if (types[v] != 0) CHECK(e.vertex_type(v) == types[v]);
        types[v] = e.vertex_type(v);
      }
      CHECK(2 * e.pairs().size() + e.free_count() == seq.total_half_edges());
    }
    e.audit();
  }
}

TEST_CASE("run_to_termination conservation") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Exploration e(seq_of({2, 2, 3, 3}), SeedPair{static_cast<VertexId>(trial % 2), 2}, {1, 1});
    const auto out = e.run_to_termination(rng);
    CHECK(out.n1 + out.n2 <= 4);
    CHECK(out.n1 >= 1);
    CHECK(out.n2 >= 1);
    CHECK(out.final_graph.edges.size() == 5);
    std::vector<int> seen(10, 0);
    for (auto [a, b] : out.final_graph.pairing) {
      ++seen[a];
      ++seen[b];
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("corrupted counter is detected") {
  Rng rng(1);
  ExplorationOptions opts;
  opts.check_invariants = true;
  Exploration e(seq_of({2, 2, 3, 3}), SeedPair{0, 2}, {1, 1}, opts);
  e.inject_counter_fault_for_testing();
  CHECK_ERROR_CODE(e.step(rng), ErrorCode::InvariantViolated);
  CHECK_ERROR_CODE(e.audit(), ErrorCode::InvariantViolated);
}

TEST_CASE("trajectory recording and m_at") {
  Rng rng(8);
  const auto seq = sample_iid_degrees({{2, 0.5}, {3, 0.5}}, 5000, rng);
  ExplorationOptions opts;
  opts.thinning = 50;
  opts.full_prefix = 100;
  auto e = init_exploration(seq, UniformSeeds{}, {1, 1}, rng, opts);
  const auto out = e.run_to_termination(rng);
  const auto& pts = out.trajectory.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto k = pts[i].k;
    CHECK((k < 100 || k % 50 == 0));
  }
  CHECK(pts.back().k == out.termination_step);
  CHECK(m_at(out, 37) == doctest::Approx(pts[37].m));
  CHECK(m_at(out, out.total_edges) == pts.back().m);
  if (out.termination_step > 200) CHECK_ERROR_CODE(m_at(out, 151), ErrorCode::StepNotRecorded);
  CHECK_ERROR_CODE(m_at(out, out.total_edges + 1), ErrorCode::StepNotRecorded);
}

TEST_CASE("online QV equals post-hoc recomputation") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto seq = sample_iid_degrees({{2, 0.5}, {3, 0.5}}, 3000, rng);
    const std::uint64_t nu = default_nu(seq.size());
    const double eps = 0.1;
    const std::uint64_t end = window_end(seq.total_edges(), eps);
    ExplorationOptions opts;
    opts.thinning = 1;
    opts.window = DiagnosticWindow{nu, end};
    auto e = init_exploration(seq, UniformSeeds{}, {1, 1}, rng, opts);
    const auto out = e.run_to_termination(rng);
    REQUIRE(out.window.has_value());
    CHECK(out.window->qv_sum == qv_statistic(out.trajectory, nu, eps, out.total_edges));
    CHECK(out.window->sup_deviation == constancy_statistic(out.trajectory, nu, eps, out.total_edges));
  }
}

TEST_CASE("determinism and scale invariance") {
  Rng g(3);
  const auto seq = sample_iid_degrees({{2, 0.5}, {3, 0.5}}, 4000, g);
  auto run = [&](Rates r, std::uint64_t seed) {
    Rng rng(seed);
    auto e = init_exploration(seq, UniformSeeds{}, r, rng);
    auto out = e.run_to_termination(rng);
    return std::make_pair(std::move(out), e.infections());
  };
  const auto [a, ia] = run({1, 1}, 77);
  const auto [b, ib] = run({1, 1}, 77);
  CHECK(a.final_graph.pairing == b.final_graph.pairing);
  CHECK(a.trajectory.points == b.trajectory.points);
  CHECK(a.termination_time == b.termination_time);

  for (const double c : {3.0, 0.25}) {
    const auto [s, is] = run({c, c}, 77);
    CHECK(s.n1 == a.n1);
    CHECK(s.n2 == a.n2);
    CHECK(s.final_graph.pairing == a.final_graph.pairing);
    REQUIRE(is.size() == ia.size());
    for (std::size_t i = 0; i < is.size(); ++i) {
      CHECK(is[i].vertex == ia[i].vertex);
      CHECK(is[i].time * c == doctest::Approx(ia[i].time));
    }
  }
  // Also for an unequal ratio.
  const auto [u, iu] = run({1, 2}, 5);
  const auto [v, iv] = run({3, 6}, 5);
  CHECK(u.final_graph.pairing == v.final_graph.pairing);
  CHECK(u.n1 == v.n1);
}

TEST_CASE("fixed graph mode follows the supplied pairing") {
  Rng rng(12);
  const auto seq = seq_of({2, 2, 2, 3, 3, 2});
  const auto graph = sample_simple_graph(seq, rng);
  for (int trial = 0; trial < 20; ++trial) {
    auto e = Exploration::on_graph(seq, graph, SeedPair{0, 3}, {1, 1});
    const auto out = e.run_to_termination(rng);
    auto a = out.final_graph.edges;
    auto b = graph.edges;
    for (auto* es : {&a, &b}) {
      for (auto& [x, y] : *es) {
        if (x > y) std::swap(x, y);
      }
      std::sort(es->begin(), es->end());
    }
    CHECK(a == b);
    CHECK(out.n1 + out.n2 == 6);  // connected graph
  }
}

TEST_CASE("martingale enumeration oracle") {
  CHECK(martingale_enumeration_oracle(seq_of({1, 1}), {0, 1}, {1, 1}).max_residual == 0.0L);
  const auto a = martingale_enumeration_oracle(seq_of({2, 2, 2}), {0, 1}, {1, 1});
  CHECK(a.max_residual <= 1e-12L);
  CHECK(a.states > 1);
  CHECK(martingale_enumeration_oracle(seq_of({2, 2, 3, 3}), {0, 2}, {2, 2}).max_residual <= 1e-12L);
  CHECK(martingale_enumeration_oracle(seq_of({2, 2, 2}), {0, 1}, {1, 2}).max_residual > 1e-3L);
  CHECK_ERROR_CODE(martingale_enumeration_oracle(seq_of({3, 3, 3, 3}), {0, 1}, {1, 1}), ErrorCode::InstanceTooLarge);
}

TEST_CASE("one-step martingale check by simulation") {
  // Monte Carlo counterpart of the oracle on a mid-sized instance: the mean
  // of M_1 - M_0 over many fresh starts is zero for equal rates.
  const auto seq = seq_of({2, 3, 4, 2, 3, 4, 2, 2});
  std::vector<double> diffs;
  Rng rng(71);
  for (int i = 0; i < 40000; ++i) {
    Exploration e(seq, SeedPair{1, 5}, {1, 1});
    const double m0 = e.m();
    diffs.push_back(e.step(rng).m - m0);
  }
  const double se = stats::stddev(diffs) / std::sqrt(static_cast<double>(diffs.size()));
  CHECK(std::abs(stats::mean(diffs)) < 4 * se);
}
