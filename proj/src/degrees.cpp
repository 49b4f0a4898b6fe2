#include "cfpp/degrees.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "cfpp/error.hpp"

namespace cfpp {

DegreeSequence::DegreeSequence(std::vector<Degree> degrees) : degrees_(std::move(degrees)) {
  if (degrees_.empty()) throw Error(ErrorCode::EmptySequence, "degree sequence has no vertices");
  for (std::size_t i = 0; i < degrees_.size(); ++i) {
    if (degrees_[i] == 0) {
      throw Error(ErrorCode::NonPositiveDegree, "vertex " + std::to_string(i) + " has degree 0");
    }
    total_ += degrees_[i];
  }
  if (total_ % 2 != 0) {
    throw Error(ErrorCode::OddTotalDegree, "total degree " + std::to_string(total_) + " is odd");
  }
}

DegreeSequence load_degree_sequence(std::span<const std::int64_t> raw) {
  std::vector<Degree> degrees;
  degrees.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] < 1) {
      throw Error(ErrorCode::NonPositiveDegree,
                  "vertex " + std::to_string(i) + " has degree " + std::to_string(raw[i]));
    }
    if (raw[i] > static_cast<std::int64_t>(UINT32_MAX)) {
      throw Error(ErrorCode::InvalidArgument, "degree too large at vertex " + std::to_string(i));
    }
    degrees.push_back(static_cast<Degree>(raw[i]));
  }
  return DegreeSequence(std::move(degrees));
}

void validate_pmf(const Pmf& pmf, bool positive_support) {
  if (pmf.empty()) throw Error(ErrorCode::InvalidPmf, "empty pmf");
  double total = 0.0;
  for (const auto& [value, mass] : pmf) {
    if (!(mass >= 0.0) || !std::isfinite(mass)) {
      throw Error(ErrorCode::InvalidPmf, "mass at " + std::to_string(value) + " is not a probability");
    }
    if (positive_support && value == 0 && mass > 0.0) {
      throw Error(ErrorCode::InvalidPmf, "degree 0 has positive mass");
    }
    total += mass;
  }
  if (std::abs(total - 1.0) > kPmfTolerance) {
    throw Error(ErrorCode::InvalidPmf, "masses sum to " + std::to_string(total));
  }
}

DiscreteSampler::DiscreteSampler(const Pmf& pmf) {
  double acc = 0.0;
  for (const auto& [value, mass] : pmf) {
    if (mass <= 0.0) continue;
    acc += mass;
    values_.push_back(value);
    cdf_.push_back(acc);
  }
  if (values_.empty()) throw Error(ErrorCode::InvalidPmf, "pmf has no positive mass");
}

Degree DiscreteSampler::draw(Rng& rng) const {
  const double u = rng.uniform() * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), values_.size() - 1);
  return values_[idx];
}

DegreeSequence sample_iid_degrees(const Pmf& pmf, std::size_t n, Rng& rng) {
  validate_pmf(pmf);
  if (n == 0) throw Error(ErrorCode::EmptySequence, "n must be at least 1");
  const DiscreteSampler table(pmf);
  std::vector<Degree> degrees(n);
  std::uint64_t sum = 0;
  for (auto& d : degrees) {
    d = table.draw(rng);
    sum += d;
  }
  if (sum % 2 != 0) ++degrees[rng.below(n)];
  return DegreeSequence(std::move(degrees));
}

DegreeStats compute_stats(const DegreeSequence& seq) {
  std::map<Degree, std::uint64_t> counts;
  for (const Degree d : seq.degrees()) ++counts[d];

  const auto n = static_cast<double>(seq.size());
  const auto total = static_cast<double>(seq.total_half_edges());
  DegreeStats stats;
  double second = 0.0;
  for (const auto& [d, c] : counts) {
    const double dd = d;
    stats.pmf[d] = static_cast<double>(c) / n;
    stats.size_biased_pmf[d] = dd * static_cast<double>(c) / total;
    second += dd * dd * static_cast<double>(c);
  }
  stats.mean = total / n;
  stats.second_moment = second / n;
  // E[D* - 1] = (sum d^2 - sum d) / sum d, from exact integer-valued sums.
  stats.mean_excess = (second - total) / total;
  return stats;
}

AssumptionFlags check_assumptions(const DegreeSequence& seq) {
  const auto [lo, hi] = std::minmax_element(seq.degrees().begin(), seq.degrees().end());
  return {.all_at_least_two = *lo >= 2, .some_above_two = *hi > 2, .finite_second_moment_declared = false};
}

Pmf offspring_pmf(const Pmf& degree_pmf) {
  validate_pmf(degree_pmf);
  double mean = 0.0;
  for (const auto& [d, p] : degree_pmf) mean += d * p;
  Pmf out;
  for (const auto& [d, p] : degree_pmf) {
    if (p > 0.0) out[d - 1] = d * p / mean;
  }
  return out;
}

DegreeSequence read_degree_file(std::istream& in) {
  std::vector<std::int64_t> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    std::size_t used = 0;
    std::int64_t value = 0;
    try {
      value = std::stoll(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw Error(ErrorCode::Io, "line " + std::to_string(lineno) + ": not an integer: '" + token + "'");
    }
    raw.push_back(value);
  }
  return load_degree_sequence(raw);
}

void write_degree_file(std::ostream& out, const DegreeSequence& seq) {
  for (const Degree d : seq.degrees()) out << d << '\n';
}

DegreeSource DegreeSource::explicit_list(DegreeSequence seq) { return DegreeSource(Explicit{std::move(seq)}); }

DegreeSource DegreeSource::iid(Pmf pmf) {
  validate_pmf(pmf);
  return DegreeSource(Iid{std::move(pmf)});
}

DegreeSequence DegreeSource::realize(std::size_t n, Rng& rng) const {
  if (const auto* e = std::get_if<Explicit>(&kind_)) return e->sequence;
  return sample_iid_degrees(std::get<Iid>(kind_).pmf, n, rng);
}

AssumptionFlags DegreeSource::flags() const {
  if (const auto* e = std::get_if<Explicit>(&kind_)) return check_assumptions(e->sequence);
  AssumptionFlags flags{.all_at_least_two = true, .some_above_two = false, .finite_second_moment_declared = true};
  for (const auto& [d, p] : std::get<Iid>(kind_).pmf) {
    if (p <= 0.0) continue;
    flags.all_at_least_two = flags.all_at_least_two && d >= 2;
    flags.some_above_two = flags.some_above_two || d > 2;
  }
  return flags;
}

}  // namespace cfpp
