#include "cfpp/pairing.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

#include "cfpp/error.hpp"

namespace cfpp {

HalfEdgeIndex::HalfEdgeIndex(const DegreeSequence& seq) {
  if (seq.total_half_edges() > UINT32_MAX) {
    throw Error(ErrorCode::InvalidArgument, "more than 2^32 - 1 half-edges");
  }
  offsets_.resize(seq.size() + 1);
  offsets_[0] = 0;
  for (std::size_t v = 0; v < seq.size(); ++v) offsets_[v + 1] = offsets_[v] + seq[v];
  owner_.resize(seq.total_half_edges());
  for (std::size_t v = 0; v < seq.size(); ++v) {
    std::fill(owner_.begin() + offsets_[v], owner_.begin() + offsets_[v + 1], static_cast<VertexId>(v));
  }
}

Pairing uniform_matching(std::span<const HalfEdgeId> half_edges, Rng& rng) {
  const std::size_t m = half_edges.size();
  if (m % 2 != 0) throw Error(ErrorCode::OddSetSize, "cannot perfectly match " + std::to_string(m) + " half-edges");
  std::vector<HalfEdgeId> pool(half_edges.begin(), half_edges.end());
  Pairing out;
  out.reserve(m / 2);
  // Front element of the unmatched suffix is matched to a uniform element of
  // the rest of the suffix.
  for (std::size_t i = 0; i < m; i += 2) {
    const std::size_t j = i + 1 + rng.below(m - i - 1);
    std::swap(pool[i + 1], pool[j]);
    out.emplace_back(pool[i], pool[i + 1]);
  }
  return out;
}

Multigraph graph_from_pairing(const HalfEdgeIndex& index, Pairing pairing) {
  Multigraph g;
  g.n = index.vertex_count();
  g.edges.reserve(pairing.size());
  for (const auto& [a, b] : pairing) g.edges.emplace_back(index.vertex(a), index.vertex(b));
  g.pairing = std::move(pairing);
  return g;
}

Multigraph generate_configuration_graph(const DegreeSequence& seq, Rng& rng) {
  const HalfEdgeIndex index(seq);
  std::vector<HalfEdgeId> all(index.half_edge_count());
  std::iota(all.begin(), all.end(), HalfEdgeId{0});
  return graph_from_pairing(index, uniform_matching(all, rng));
}

bool is_simple(const Multigraph& g) {
  std::vector<Edge> normalized;
  normalized.reserve(g.edges.size());
  for (const auto& [u, v] : g.edges) {
    if (u == v) return false;
    normalized.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(normalized.begin(), normalized.end());
  return std::adjacent_find(normalized.begin(), normalized.end()) == normalized.end();
}

Multigraph sample_simple_graph(const DegreeSequence& seq, Rng& rng, int max_attempts, int* attempts_used) {
  if (max_attempts < 1) throw Error(ErrorCode::InvalidArgument, "max_attempts must be at least 1");
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    Multigraph g = generate_configuration_graph(seq, rng);
    if (is_simple(g)) {
      if (attempts_used != nullptr) *attempts_used = attempt;
      return g;
    }
  }
  if (attempts_used != nullptr) *attempts_used = max_attempts;
  throw Error(ErrorCode::MaxAttemptsExceeded,
              "no simple graph after " + std::to_string(max_attempts) +
                  " attempts; the acceptance probability may be close to 0");
}

void write_edge_list(std::ostream& out, const Multigraph& g) {
  for (const auto& [u, v] : g.edges) out << u << ' ' << v << '\n';
}

std::vector<Degree> realized_degrees(const Multigraph& g) {
  std::vector<Degree> deg(g.n, 0);
  for (const auto& [u, v] : g.edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

}  // namespace cfpp
