#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "cfpp/rng.hpp"

namespace cfpp {

using Degree = std::uint32_t;

/// Probability mass function over degrees (or offspring counts).
using Pmf = std::map<Degree, double>;

inline constexpr double kPmfTolerance = 1e-9;

/// A degree sequence (d_1, ..., d_n) with every d_i >= 1 and an even sum.
class DegreeSequence {
 public:
  DegreeSequence() = default;

  /// Validates `degrees`. Throws Error{NonPositiveDegree | OddTotalDegree |
  /// EmptySequence}.
  explicit DegreeSequence(std::vector<Degree> degrees);

  std::span<const Degree> degrees() const noexcept { return degrees_; }
  Degree operator[](std::size_t v) const noexcept { return degrees_[v]; }
  std::size_t size() const noexcept { return degrees_.size(); }
  std::uint64_t total_half_edges() const noexcept { return total_; }
  /// N, the number of edges of any graph realizing the sequence.
  std::uint64_t total_edges() const noexcept { return total_ / 2; }

  friend bool operator==(const DegreeSequence&, const DegreeSequence&) = default;

 private:
  std::vector<Degree> degrees_;
  std::uint64_t total_ = 0;
};

/// Empirical law of D_n and its size-biased version D_n*.
struct DegreeStats {
  Pmf pmf;
  double mean = 0.0;
  double second_moment = 0.0;
  Pmf size_biased_pmf;
  /// E[D_n* - 1]; the giant-component threshold is 1.
  double mean_excess = 0.0;
};

struct AssumptionFlags {
  bool all_at_least_two = false;
  bool some_above_two = false;
  /// True only for IID sources with a finitely supported pmf; a single
  /// explicit list says nothing about the limit law.
  bool finite_second_moment_declared = false;

  bool satisfied() const noexcept {
    return all_at_least_two && some_above_two && finite_second_moment_declared;
  }
};

/// Accepts signed input so that non-positive entries can be reported rather
/// than silently wrapped.
DegreeSequence load_degree_sequence(std::span<const std::int64_t> raw);

/// n IID draws from `pmf`; if the sum is odd one uniformly chosen entry is
/// incremented. Throws Error{InvalidPmf}.
DegreeSequence sample_iid_degrees(const Pmf& pmf, std::size_t n, Rng& rng);

DegreeStats compute_stats(const DegreeSequence& seq);

AssumptionFlags check_assumptions(const DegreeSequence& seq);

/// Throws Error{InvalidPmf} unless all masses are >= 0, keys are positive
/// (when `positive_support`) and the total is 1 within kPmfTolerance.
void validate_pmf(const Pmf& pmf, bool positive_support = true);

/// Offspring law D* - 1 of the size-biased degree.
Pmf offspring_pmf(const Pmf& degree_pmf);

/// Inverse-CDF sampler over the positive-mass support of a pmf.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const Pmf& pmf);

  Degree draw(Rng& rng) const;
  Degree min_value() const noexcept { return values_.front(); }
  Degree max_value() const noexcept { return values_.back(); }

 private:
  std::vector<Degree> values_;
  std::vector<double> cdf_;
};

/// One integer per line; blank lines and lines starting with '#' ignored.
DegreeSequence read_degree_file(std::istream& in);
void write_degree_file(std::ostream& out, const DegreeSequence& seq);

/// Where the degrees of an experiment come from.
class DegreeSource {
 public:
  struct Explicit {
    DegreeSequence sequence;
  };
  struct Iid {
    Pmf pmf;
  };

  static DegreeSource explicit_list(DegreeSequence seq);
  static DegreeSource iid(Pmf pmf);

  bool is_iid() const noexcept { return std::holds_alternative<Iid>(kind_); }
  const std::variant<Explicit, Iid>& kind() const noexcept { return kind_; }

  /// Explicit lists return their sequence (n is ignored); IID sources draw a
  /// fresh sequence of length n.
  DegreeSequence realize(std::size_t n, Rng& rng) const;

  AssumptionFlags flags() const;

 private:
  explicit DegreeSource(std::variant<Explicit, Iid> kind) : kind_(std::move(kind)) {}

  std::variant<Explicit, Iid> kind_;
};

}  // namespace cfpp
