#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "cfpp/pairing.hpp"
#include "cfpp/stats.hpp"
#include "helpers.hpp"

using namespace cfpp;
using cfpp::test::seq_of;

namespace {

using Key = std::vector<std::pair<HalfEdgeId, HalfEdgeId>>;

Key canonical(const Pairing& p) {
  Key k;
  for (auto [a, b] : p) k.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(k.begin(), k.end());
  return k;
}

std::vector<Edge> edge_set(const Multigraph& g) {
  std::vector<Edge> e;
  for (auto [u, v] : g.edges) e.emplace_back(std::min(u, v), std::max(u, v));
  std::sort(e.begin(), e.end());
  return e;
}

// Independent enumeration of all perfect matchings of {0..m-1}.
void all_matchings(std::vector<HalfEdgeId> rest, Key& current, std::vector<Key>& out) {
  if (rest.empty()) {
    auto k = current;
    std::sort(k.begin(), k.end());
    out.push_back(k);
    return;
  }
  const HalfEdgeId a = rest.front();
  for (std::size_t i = 1; i < rest.size(); ++i) {
    auto next = rest;
    const HalfEdgeId b = next[i];
    next.erase(next.begin() + static_cast<long>(i));
    next.erase(next.begin());
    current.emplace_back(a, b);
    all_matchings(next, current, out);
    current.pop_back();
  }
}

}  // namespace

TEST_CASE("uniform_matching small cases") {
  Rng rng(1);
  CHECK(uniform_matching({}, rng).empty());
  const std::vector<HalfEdgeId> two = {5, 9};
  const auto p = uniform_matching(two, rng);
  REQUIRE(p.size() == 1);
  CHECK(canonical(p) == Key{{5, 9}});
  const std::vector<HalfEdgeId> odd = {1, 2, 3};
  CHECK_ERROR_CODE(uniform_matching(odd, rng), ErrorCode::OddSetSize);
}

TEST_CASE("uniform_matching is uniform for m = 4, 6, 8") {
  Rng rng(2024);
  for (std::size_t m : {4u, 6u, 8u}) {
    std::vector<HalfEdgeId> ids(m);
    std::iota(ids.begin(), ids.end(), 0u);
    std::vector<Key> enumerated;
    Key scratch;
    all_matchings(ids, scratch, enumerated);
    std::map<Key, std::size_t> index;
    for (std::size_t i = 0; i < enumerated.size(); ++i) index[enumerated[i]] = i;
    REQUIRE(index.size() == enumerated.size());

    const std::size_t samples = 10000 * enumerated.size();
    std::vector<std::uint64_t> counts(enumerated.size(), 0);
    for (std::size_t s = 0; s < samples; ++s) {
      const auto it = index.find(canonical(uniform_matching(ids, rng)));
      REQUIRE(it != index.end());
      ++counts[it->second];
    }
    const std::vector<double> probs(enumerated.size(), 1.0 / static_cast<double>(enumerated.size()));
    CHECK(stats::chi_square(counts, probs).p_value > 1e-3);
  }
}

TEST_CASE("generate_configuration_graph examples") {
  Rng rng(3);
  const auto g = generate_configuration_graph(seq_of({1, 1}), rng);
  CHECK(edge_set(g) == std::vector<Edge>{{0, 1}});
  CHECK(is_simple(g));

  const auto loop = generate_configuration_graph(seq_of({2}), rng);
  CHECK(edge_set(loop) == std::vector<Edge>{{0, 0}});
  CHECK_FALSE(is_simple(loop));

  // (2,2): 1 of the 3 matchings gives two self-loops, 2 give a double edge.
  const auto two = seq_of({2, 2});
  std::uint64_t doubles = 0;
  const int samples = 30000;
  for (int i = 0; i < samples; ++i) {
    const auto e = edge_set(generate_configuration_graph(two, rng));
    CHECK_FALSE(is_simple(generate_configuration_graph(two, rng)));
    doubles += e == std::vector<Edge>{{0, 1}, {0, 1}};
  }
  const std::vector<std::uint64_t> observed = {doubles, samples - doubles};
  const std::vector<double> probs = {2.0 / 3.0, 1.0 / 3.0};
  CHECK(stats::chi_square(observed, probs).p_value > 1e-3);
}

TEST_CASE("generated degrees match the sequence") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto seq = sample_iid_degrees({{1, 0.2}, {2, 0.3}, {4, 0.5}}, 500, rng);
    const auto g = generate_configuration_graph(seq, rng);
    CHECK(g.edges.size() == seq.total_edges());
    const auto realized = realized_degrees(g);
    CHECK(std::equal(realized.begin(), realized.end(), seq.degrees().begin(), seq.degrees().end()));
    std::vector<int> seen(seq.total_half_edges(), 0);
    for (auto [a, b] : g.pairing) {
      ++seen[a];
      ++seen[b];
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("HalfEdgeIndex is a bijection") {
  const auto seq = seq_of({3, 1, 2, 2});
  const HalfEdgeIndex idx(seq);
  CHECK(idx.half_edge_count() == 8);
  for (HalfEdgeId h = 0; h < 8; ++h) CHECK(idx.id(idx.vertex(h), idx.slot(h)) == h);
  CHECK(idx.degree(0) == 3);
  CHECK(idx.first(2) == 4);
}

TEST_CASE("sample_simple_graph") {
  Rng rng(9);
  CHECK(edge_set(sample_simple_graph(seq_of({1, 1}), rng)) == std::vector<Edge>{{0, 1}});
  int attempts = 0;
  sample_simple_graph(seq_of({1, 1}), rng, 5, &attempts);
  CHECK(attempts == 1);

  for (int i = 0; i < 500; ++i) {
    CHECK(edge_set(sample_simple_graph(seq_of({2, 2, 2}), rng)) == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});
  }
  // (2,2) has no simple realization.
  CHECK_ERROR_CODE(sample_simple_graph(seq_of({2, 2}), rng, 1), ErrorCode::MaxAttemptsExceeded);
}

TEST_CASE("sample_simple_graph is uniform over simple graphs") {
  // (1,1,2,2): simple graphs are the paths 0-2-3-1 and 0-3-2-1.
  // (2,2,2,2): the three labelled 4-cycles.
  Rng rng(31);
  for (const auto& raw : {std::vector<std::int64_t>{1, 1, 2, 2}, std::vector<std::int64_t>{2, 2, 2, 2}}) {
    const auto seq = seq_of(raw);
    std::map<std::vector<Edge>, std::uint64_t> counts;
    for (int i = 0; i < 30000; ++i) ++counts[edge_set(sample_simple_graph(seq, rng))];
    std::vector<std::uint64_t> observed;
    for (const auto& [e, c] : counts) observed.push_back(c);
    const std::size_t expected_classes = raw[0] == 1 ? 2 : 3;
    CHECK(observed.size() == expected_classes);
    CHECK(stats::chi_square(observed, std::vector<double>(observed.size(), 1.0 / static_cast<double>(observed.size())))
              .p_value > 1e-3);
  }
}

TEST_CASE("edge list format") {
  Rng rng(1);
  std::ostringstream out;
  write_edge_list(out, generate_configuration_graph(seq_of({1, 1}), rng));
  CHECK(out.str() == "0 1\n");
}
