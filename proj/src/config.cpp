#include "cfpp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "cfpp/error.hpp"

namespace cfpp {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, what); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    config_error("key '" + key + "' has the wrong type");
  }
}

std::uint64_t get_u64(const json& j, const std::string& key) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    config_error("key '" + key + "' must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

double get_real(const json& j, const std::string& key) {
  if (!j.is_number()) config_error("key '" + key + "' must be a number");
  return j.get<double>();
}

DegreeSpec parse_degrees(const json& j) {
  if (!j.is_object()) config_error("'degrees' must be an object");
  if (!j.contains("kind") || !j["kind"].is_string()) config_error("'degrees.kind' must be a string");
  const auto kind = j["kind"].get<std::string>();
  DegreeSpec spec;
  if (kind == "explicit") {
    reject_unknown(j, {"kind", "values"}, "degrees");
    if (!j.contains("values") || !j["values"].is_array()) config_error("'degrees.values' must be an array");
    spec.kind = DegreeSpec::Kind::Explicit;
    for (const auto& v : j["values"]) {
      if (!v.is_number_integer()) config_error("'degrees.values' must contain integers");
      spec.values.push_back(v.get<std::int64_t>());
    }
  } else if (kind == "file") {
    reject_unknown(j, {"kind", "path"}, "degrees");
    if (!j.contains("path") || !j["path"].is_string()) config_error("'degrees.path' must be a string");
    spec.kind = DegreeSpec::Kind::File;
    spec.path = j["path"].get<std::string>();
  } else if (kind == "iid") {
    reject_unknown(j, {"kind", "pmf"}, "degrees");
    if (!j.contains("pmf")) config_error("'degrees.pmf' is required for kind 'iid'");
    spec.kind = DegreeSpec::Kind::Iid;
    spec.pmf = pmf_from_json(j["pmf"]);
  } else {
    config_error("'degrees.kind' must be one of explicit, file, iid");
  }
  return spec;
}

json degrees_to_json(const DegreeSpec& spec) {
  switch (spec.kind) {
    case DegreeSpec::Kind::Explicit: return {{"kind", "explicit"}, {"values", spec.values}};
    case DegreeSpec::Kind::File: return {{"kind", "file"}, {"path", spec.path.string()}};
    case DegreeSpec::Kind::Iid: return {{"kind", "iid"}, {"pmf", pmf_to_json(spec.pmf)}};
  }
  return {};
}

}  // namespace

json pmf_to_json(const Pmf& pmf) {
  json out = json::object();
  for (const auto& [k, p] : pmf) out[std::to_string(k)] = p;
  return out;
}

Pmf pmf_from_json(const json& j) {
  if (!j.is_object()) config_error("a pmf must be an object mapping integers to probabilities");
  Pmf pmf;
  for (const auto& [key, value] : j.items()) {
    std::size_t used = 0;
    long long k = -1;
    try {
      k = std::stoll(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || k < 0 || k > static_cast<long long>(UINT32_MAX)) {
      config_error("pmf key '" + key + "' is not a non-negative integer");
    }
    if (!value.is_number()) config_error("pmf value at '" + key + "' must be a number");
    pmf[static_cast<Degree>(k)] = value.get<double>();
  }
  return pmf;
}

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) config_error("config must be a JSON object");
  static const std::set<std::string> allowed = {
      "schema_version", "subcommand", "degrees",  "n",         "lambda1",        "lambda2",        "seeds",
      "replicas",       "seed",       "nu",       "epsilon",   "out",            "thinning",       "simple",
      "max_attempts",   "fixed_sequence", "threads", "n_list",   "bootstrap",      "t_end",          "a1",
      "a2",             "offspring",  "record_interval", "population_cap", "level"};
  reject_unknown(doc, allowed, "config");
  if (!doc.contains("schema_version")) config_error("missing 'schema_version'");
  RunConfig cfg;
  cfg.schema_version = static_cast<int>(get_u64(doc["schema_version"], "schema_version"));
  if (cfg.schema_version != kSchemaVersion) {
    config_error("unsupported schema_version " + std::to_string(cfg.schema_version) + " (expected " +
                 std::to_string(kSchemaVersion) + ")");
  }
  for (const auto& [key, v] : doc.items()) {
    if (key == "schema_version") continue;
    if (key == "subcommand") cfg.subcommand = get_as<std::string>(v, key);
    else if (key == "degrees") cfg.degrees = parse_degrees(v);
    else if (key == "n") cfg.n = get_u64(v, key);
    else if (key == "lambda1") cfg.lambda1 = get_real(v, key);
    else if (key == "lambda2") cfg.lambda2 = get_real(v, key);
    else if (key == "seeds") {
      if (v.is_string() && v.get<std::string>() == "uniform") {
        cfg.seeds = UniformSeeds{};
      } else if (v.is_array() && v.size() == 2) {
        cfg.seeds = SeedPair{static_cast<VertexId>(get_u64(v[0], "seeds[0]")),
                             static_cast<VertexId>(get_u64(v[1], "seeds[1]"))};
      } else {
        config_error("'seeds' must be \"uniform\" or a pair of vertex ids");
      }
    } else if (key == "replicas") cfg.replicas = get_u64(v, key);
    else if (key == "seed") cfg.seed = get_u64(v, key);
    else if (key == "nu") {
      if (!v.is_null()) cfg.nu = get_u64(v, key);
    } else if (key == "epsilon") cfg.epsilon = get_real(v, key);
    else if (key == "out") cfg.out = get_as<std::string>(v, key);
    else if (key == "thinning") cfg.thinning = get_u64(v, key);
    else if (key == "simple") cfg.simple = get_as<bool>(v, key);
    else if (key == "max_attempts") cfg.max_attempts = static_cast<int>(get_u64(v, key));
    else if (key == "fixed_sequence") cfg.fixed_sequence = get_as<bool>(v, key);
    else if (key == "threads") cfg.threads = static_cast<unsigned>(get_u64(v, key));
    else if (key == "n_list") {
      if (!v.is_array()) config_error("'n_list' must be an array");
      for (const auto& x : v) cfg.n_list.push_back(get_u64(x, "n_list"));
    } else if (key == "bootstrap") cfg.bootstrap = get_u64(v, key);
    else if (key == "t_end") cfg.t_end = get_real(v, key);
    else if (key == "a1") {
      if (!v.is_null()) cfg.a1 = get_u64(v, key);
    } else if (key == "a2") {
      if (!v.is_null()) cfg.a2 = get_u64(v, key);
    } else if (key == "offspring") {
      if (!v.is_null()) cfg.offspring = pmf_from_json(v);
    } else if (key == "record_interval") cfg.record_interval = get_real(v, key);
    else if (key == "population_cap") cfg.population_cap = get_u64(v, key);
    else if (key == "level") cfg.level = get_as<std::string>(v, key);
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON in ") + path.string() + ": " + e.what());
  }
  return parse_run_config(doc);
}

void validate_run_config(const RunConfig& cfg) {
  static const std::set<std::string> subcommands = {"", "generate", "compete", "ensemble", "branching", "verify"};
  if (!subcommands.contains(cfg.subcommand)) config_error("unknown subcommand '" + cfg.subcommand + "'");
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(cfg.lambda1) || !positive(cfg.lambda2)) config_error("lambda1 and lambda2 must be positive");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) config_error("epsilon must lie in (0, 1)");
  if (cfg.replicas < 1) config_error("replicas must be >= 1");
  if (cfg.thinning < 1) config_error("thinning must be >= 1");
  if (cfg.max_attempts < 1) config_error("max_attempts must be >= 1");
  if (cfg.degrees.kind == DegreeSpec::Kind::Iid && cfg.n < 2) config_error("n must be >= 2");
  if (cfg.level != "fast" && cfg.level != "full") config_error("level must be 'fast' or 'full'");
  if (cfg.subcommand != "verify" && !cfg.seed) {
    config_error("a master seed is required (--seed or \"seed\"); runs are never seeded from the clock");
  }
  if (!(cfg.t_end >= 0.0)) config_error("t_end must be >= 0");
  if (cfg.record_interval < 0.0) config_error("record_interval must be >= 0");
  if (cfg.population_cap < 2) config_error("population_cap must be >= 2");
  if (cfg.degrees.kind == DegreeSpec::Kind::Iid) {
    try {
      validate_pmf(cfg.degrees.pmf);
    } catch (const Error& e) {
      config_error(std::string("degrees.pmf: ") + e.what());
    }
  }
  if (cfg.offspring) {
    try {
      validate_pmf(*cfg.offspring, false);
    } catch (const Error& e) {
      config_error(std::string("offspring: ") + e.what());
    }
  }
}

json to_json(const RunConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["subcommand"] = cfg.subcommand;
  j["degrees"] = degrees_to_json(cfg.degrees);
  j["n"] = cfg.n;
  j["lambda1"] = cfg.lambda1;
  j["lambda2"] = cfg.lambda2;
  if (const auto* pair = std::get_if<SeedPair>(&cfg.seeds)) {
    j["seeds"] = json::array({pair->first, pair->second});
  } else {
    j["seeds"] = "uniform";
  }
  j["replicas"] = cfg.replicas;
  j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  j["nu"] = cfg.nu ? json(*cfg.nu) : json(nullptr);
  j["epsilon"] = cfg.epsilon;
  j["out"] = cfg.out.string();
  j["thinning"] = cfg.thinning;
  j["simple"] = cfg.simple;
  j["max_attempts"] = cfg.max_attempts;
  j["fixed_sequence"] = cfg.fixed_sequence;
  j["n_list"] = cfg.n_list;
  j["bootstrap"] = cfg.bootstrap;
  j["t_end"] = cfg.t_end;
  j["a1"] = cfg.a1 ? json(*cfg.a1) : json(nullptr);
  j["a2"] = cfg.a2 ? json(*cfg.a2) : json(nullptr);
  j["offspring"] = cfg.offspring ? pmf_to_json(*cfg.offspring) : json(nullptr);
  j["record_interval"] = cfg.record_interval;
  j["population_cap"] = cfg.population_cap;
  j["level"] = cfg.level;
  // `threads` is deliberately absent: results never depend on it.
  return j;
}

DegreeSource resolve_degree_source(const RunConfig& cfg) {
  switch (cfg.degrees.kind) {
    case DegreeSpec::Kind::Explicit: return DegreeSource::explicit_list(load_degree_sequence(cfg.degrees.values));
    case DegreeSpec::Kind::File: {
      std::ifstream in(cfg.degrees.path);
      if (!in) throw Error(ErrorCode::Io, "cannot open degree file " + cfg.degrees.path.string());
      return DegreeSource::explicit_list(read_degree_file(in));
    }
    case DegreeSpec::Kind::Iid: return DegreeSource::iid(cfg.degrees.pmf);
  }
  throw Error(ErrorCode::Config, "unreachable degree kind");
}

ExperimentConfig to_experiment(const RunConfig& cfg) {
  ExperimentConfig e;
  e.degrees = resolve_degree_source(cfg);
  e.n = cfg.n;
  e.rates = {cfg.lambda1, cfg.lambda2};
  e.replicas = cfg.replicas;
  e.master_seed = cfg.seed.value_or(0);
  e.nu = cfg.nu;
  e.epsilon = cfg.epsilon;
  e.thinning = cfg.thinning;
  e.simple = cfg.simple;
  e.max_attempts = cfg.max_attempts;
  e.fixed_sequence = cfg.fixed_sequence;
  e.seeds = cfg.seeds;
  e.threads = cfg.threads;
  return e;
}

}  // namespace cfpp
