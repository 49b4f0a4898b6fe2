#include "cfpp/martingale_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include "cfpp/error.hpp"

namespace cfpp {

namespace {

// Half-edge states: 0 inactive, 1/2 active of that type, 3 paired.
using State = std::vector<std::uint8_t>;

std::uint64_t encode(const State& s) {
  std::uint64_t key = 0;
  for (const auto v : s) key = key * 4 + v;
  return key;
}

class Enumerator {
 public:
  Enumerator(const DegreeSequence& seq, long double ratio) : ratio_(ratio) {
    for (std::size_t v = 0; v < seq.size(); ++v) {
      for (Degree j = 0; j < seq[v]; ++j) owner_.push_back(static_cast<std::uint32_t>(v));
    }
  }

  State initial(SeedPair seeds) const {
    State s(owner_.size(), 0);
    for (std::size_t h = 0; h < owner_.size(); ++h) {
      if (owner_[h] == seeds.first) s[h] = 1;
      if (owner_[h] == seeds.second) s[h] = 2;
    }
    return s;
  }

  void visit(const State& s, std::uint64_t depth) {
    if (!seen_.insert(encode(s)).second) return;
    result_.states++;
    result_.max_depth = std::max(result_.max_depth, depth);

    long double s1 = 0, s2 = 0, free = 0;
    for (const auto v : s) {
      s1 += v == 1;
      s2 += v == 2;
      free += v != 3;
    }
    if (s1 + s2 == 0) return;
    const long double m = s1 / (s1 + s2);
    const long double weight = ratio_ * s1 + s2;

    long double expected = 0.0L;
    for (std::size_t q = 0; q < s.size(); ++q) {
      if (s[q] != 1 && s[q] != 2) continue;
      // P(type) * P(q | type) = (lambda_type s_type / W) / s_type
      const long double pq = (s[q] == 1 ? ratio_ : 1.0L) / weight;
      for (std::size_t r = 0; r < s.size(); ++r) {
        if (r == q || s[r] == 3) continue;
        const long double p = pq / (free - 1);
        State next = s;
        const std::uint8_t type = s[q];
        next[q] = 3;
        if (s[r] == 0) {
          // r's vertex is uninfected: all its other half-edges become active.
          for (std::size_t h = 0; h < s.size(); ++h) {
            if (owner_[h] == owner_[r] && h != r) next[h] = type;
          }
        }
        next[r] = 3;
        long double n1 = 0, n2 = 0;
        for (const auto v : next) {
          n1 += v == 1;
          n2 += v == 2;
        }
        const long double m_next = (n1 + n2) > 0 ? n1 / (n1 + n2) : m;
        expected += p * m_next;
        visit(next, depth + 1);
      }
    }
    result_.max_residual = std::max(result_.max_residual, std::fabs(expected - m));
  }

  MartingaleOracleResult result() const { return result_; }

 private:
  long double ratio_;
  std::vector<std::uint32_t> owner_;
  std::unordered_set<std::uint64_t> seen_;
  MartingaleOracleResult result_;
};

}  // namespace

MartingaleOracleResult martingale_enumeration_oracle(const DegreeSequence& seq, SeedPair seeds, Rates rates) {
  rates.validate();
  if (seq.total_half_edges() > kOracleMaxHalfEdges) {
    throw Error(ErrorCode::InstanceTooLarge, "enumeration limited to 2N <= " + std::to_string(kOracleMaxHalfEdges) +
                                                 ", got " + std::to_string(seq.total_half_edges()));
  }
  if (seeds.first >= seq.size() || seeds.second >= seq.size()) {
    throw Error(ErrorCode::VertexOutOfRange, "seed vertex out of range");
  }
  if (seeds.first == seeds.second) throw Error(ErrorCode::IdenticalSeeds, "seeds must differ");
  Enumerator e(seq, static_cast<long double>(rates.lambda1) / static_cast<long double>(rates.lambda2));
  e.visit(e.initial(seeds), 0);
  return e.result();
}

}  // namespace cfpp
