#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cfpp/branching.hpp"
#include "cfpp/degrees.hpp"
#include "cfpp/ensemble.hpp"
#include "cfpp/exploration.hpp"
#include "json.hpp"

namespace cfpp {

inline constexpr int kSchemaVersion = 1;

/// How the degrees of a run are specified in a config file.
struct DegreeSpec {
  enum class Kind { Explicit, File, Iid };
  Kind kind = Kind::Iid;
  std::vector<std::int64_t> values;  // Explicit
  std::filesystem::path path;        // File
  Pmf pmf = {{2, 0.5}, {3, 0.5}};    // Iid
};

/// Schema-versioned run configuration shared by all subcommands. Every field
/// has a default so the resolved document can be echoed in full.
struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string subcommand;
  DegreeSpec degrees;
  std::size_t n = 1000;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  SeedMode seeds = UniformSeeds{};
  std::size_t replicas = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> nu;
  double epsilon = 0.1;
  std::filesystem::path out = "out";
  std::uint64_t thinning = 100;
  bool simple = false;
  int max_attempts = kDefaultMaxAttempts;
  bool fixed_sequence = false;
  unsigned threads = 0;
  /// Non-empty: `ensemble` runs a scaling study over these sizes.
  std::vector<std::size_t> n_list;
  std::size_t bootstrap = 1000;
  // branching
  double t_end = 8.0;
  std::optional<std::uint64_t> a1;
  std::optional<std::uint64_t> a2;
  std::optional<Pmf> offspring;
  double record_interval = 0.1;
  std::uint64_t population_cap = 10'000'000;
  // verify
  std::string level = "fast";
};

/// Parses a config document. Unknown keys, a missing or unsupported
/// schema_version, and ill-typed values throw Error{Config}.
RunConfig parse_run_config(const nlohmann::json& doc);

RunConfig load_run_config(const std::filesystem::path& path);

/// Semantic validation (rates, epsilon, replicas, seed presence, ...). Throws
/// Error{Config}.
void validate_run_config(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

nlohmann::json pmf_to_json(const Pmf& pmf);
Pmf pmf_from_json(const nlohmann::json& j);

DegreeSource resolve_degree_source(const RunConfig& cfg);
ExperimentConfig to_experiment(const RunConfig& cfg);

}  // namespace cfpp
