#pragma once

#include <cstdint>

#include "cfpp/degrees.hpp"
#include "cfpp/exploration.hpp"

namespace cfpp {

inline constexpr std::uint64_t kOracleMaxHalfEdges = 10;

struct MartingaleOracleResult {
  /// max over reachable states with active half-edges of
  /// |E[M_{k+1} | state] - M_k|, in extended precision.
  long double max_residual = 0.0L;
  std::uint64_t states = 0;
  std::uint64_t max_depth = 0;
};

/// Exhaustive enumeration of the exploration jump chain on a tiny instance.
/// Written independently of Exploration: states are plain status vectors and
/// transition probabilities are computed in closed form. Throws
/// Error{InstanceTooLarge} when 2N > kOracleMaxHalfEdges.
MartingaleOracleResult martingale_enumeration_oracle(const DegreeSequence& seq, SeedPair seeds, Rates rates);

}  // namespace cfpp
