#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "cfpp/branching.hpp"
#include "cfpp/ensemble.hpp"
#include "cfpp/exploration.hpp"
#include "json.hpp"

namespace cfpp {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for
/// non-finite values.
std::string format_double(double x);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_branching_csv(std::ostream& out, const BranchingTrajectory& trajectory);
void write_v_samples_csv(std::ostream& out, std::span<const double> samples);
void write_replicas_csv(std::ostream& out, std::span<const ReplicaResult> rows);

nlohmann::json outcome_to_json(const CompetitionOutcome& outcome, std::uint64_t seed);
nlohmann::json aggregates_to_json(const EnsembleAggregates& aggregates, std::span<const double> quantile_levels);
nlohmann::json assumptions_to_json(const AssumptionFlags& flags);
nlohmann::json v_distribution_to_json(const VDistribution& v);
nlohmann::json coupling_to_json(const CouplingReport& report);
nlohmann::json scaling_to_json(const ScalingReport& report);

/// Writes `doc` indented, with a trailing newline. Throws Error{Io}.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

/// Opens `path` for writing or throws Error{Io}, then calls fn(stream).
template <class Fn>
void write_text_file(const std::filesystem::path& path, Fn&& fn);

/// Creates `dir` (and parents) if needed. Throws Error{Io}.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace cfpp

#include <fstream>

#include "cfpp/error.hpp"

template <class Fn>
void cfpp::write_text_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  fn(out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}
