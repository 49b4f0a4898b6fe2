#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "cfpp/degrees.hpp"
#include "cfpp/rng.hpp"

namespace cfpp {

using HalfEdgeId = std::uint32_t;
using VertexId = std::uint32_t;
using Pairing = std::vector<std::pair<HalfEdgeId, HalfEdgeId>>;
using Edge = std::pair<VertexId, VertexId>;

/// Global numbering of half-edges: vertex v owns the contiguous block
/// [offset(v), offset(v) + d_v).
class HalfEdgeIndex {
 public:
  explicit HalfEdgeIndex(const DegreeSequence& seq);

  std::size_t vertex_count() const noexcept { return offsets_.size() - 1; }
  std::size_t half_edge_count() const noexcept { return owner_.size(); }

  VertexId vertex(HalfEdgeId h) const noexcept { return owner_[h]; }
  std::uint32_t slot(HalfEdgeId h) const noexcept { return h - offsets_[owner_[h]]; }
  HalfEdgeId id(VertexId v, std::uint32_t slot) const noexcept { return offsets_[v] + slot; }
  HalfEdgeId first(VertexId v) const noexcept { return offsets_[v]; }
  HalfEdgeId last(VertexId v) const noexcept { return offsets_[v + 1]; }
  Degree degree(VertexId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

 private:
  std::vector<HalfEdgeId> offsets_;
  std::vector<VertexId> owner_;
};

/// Configuration-model multigraph. Self-loops and repeated edges allowed.
struct Multigraph {
  std::size_t n = 0;
  std::vector<Edge> edges;
  Pairing pairing;
};

/// Uniformly random perfect matching of `half_edges`: each of the (m-1)!!
/// matchings is equally likely. Throws Error{OddSetSize}.
Pairing uniform_matching(std::span<const HalfEdgeId> half_edges, Rng& rng);

Multigraph graph_from_pairing(const HalfEdgeIndex& index, Pairing pairing);

Multigraph generate_configuration_graph(const DegreeSequence& seq, Rng& rng);

bool is_simple(const Multigraph& g);

inline constexpr int kDefaultMaxAttempts = 1000;

/// Rejection sampling of generate_configuration_graph until the result is
/// simple. Throws Error{MaxAttemptsExceeded}.
Multigraph sample_simple_graph(const DegreeSequence& seq, Rng& rng, int max_attempts = kDefaultMaxAttempts,
                               int* attempts_used = nullptr);

/// `u v` per line, 0-based vertex ids.
void write_edge_list(std::ostream& out, const Multigraph& g);

/// Vertex degrees implied by the edge list (self-loops count twice).
std::vector<Degree> realized_degrees(const Multigraph& g);

}  // namespace cfpp
