#include "cli.hpp"

#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "cfpp/branching.hpp"
#include "cfpp/config.hpp"
#include "cfpp/ensemble.hpp"
#include "cfpp/error.hpp"
#include "cfpp/exploration.hpp"
#include "cfpp/pairing.hpp"
#include "cfpp/report_io.hpp"
#include "cfpp/verify.hpp"

namespace cfpp::cli {

namespace {

using nlohmann::json;

struct Overrides {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double lambda1 = 0;
  double lambda2 = 0;
  std::size_t replicas = 0;
  std::string out;
  double epsilon = 0;
  std::uint64_t nu = 0;
  unsigned threads = 0;
  std::uint64_t thinning = 0;
  std::string degrees;
  std::string degree_file;
  std::string pmf;
  std::string seeds;
  std::vector<std::size_t> n_list;
  double t_end = 0;
  std::uint64_t a1 = 0;
  std::uint64_t a2 = 0;
  std::string level;
  bool fixed_sequence = false;
  bool inject_fault = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run config");
  cmd->add_option("--seed", o.seed, "master seed (required unless in the config)");
  cmd->add_option("--n", o.n, "vertex count for IID degrees");
  cmd->add_option("--lambda1", o.lambda1, "type-1 rate");
  cmd->add_option("--lambda2", o.lambda2, "type-2 rate");
  cmd->add_option("--replicas", o.replicas, "independent replicas");
  cmd->add_flag("--simple", "condition on a simple graph");
  cmd->add_option("--out", o.out, "output directory (created if missing)");
  cmd->add_option("--epsilon", o.epsilon, "diagnostic window ends at (1-epsilon)N");
  cmd->add_option("--nu", o.nu, "diagnostic window start (default ceil(n^(1/3)))");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_option("--thinning", o.thinning, "trajectory thinning after the full prefix");
  cmd->add_option("--degrees", o.degrees, "explicit degree list, e.g. 2,2,3,3");
  cmd->add_option("--degree-file", o.degree_file, "degree file, one integer per line");
  cmd->add_option("--pmf", o.pmf, "IID degree law, e.g. 2:0.5,3:0.5");
  cmd->add_option("--seeds", o.seeds, "'uniform' or two 0-based vertex ids, e.g. 0,1");
  cmd->add_flag("--fixed-sequence", o.fixed_sequence, "one IID degree draw shared by all replicas");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error(ErrorCode::Config, what + ": '" + s + "' is not an integer");
  return v;
}

double parse_real(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error(ErrorCode::Config, what + ": '" + s + "' is not a number");
  return v;
}

RunConfig resolve(const CLI::App* cmd, const std::string& name, const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (!cfg.subcommand.empty() && cfg.subcommand != name) {
    throw Error(ErrorCode::Config, "config is for subcommand '" + cfg.subcommand + "', not '" + name + "'");
  }
  cfg.subcommand = name;
  auto given = [&](const char* flag) {
    const auto* opt = cmd->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--seed")) cfg.seed = o.seed;
  if (given("--n")) cfg.n = o.n;
  if (given("--lambda1")) cfg.lambda1 = o.lambda1;
  if (given("--lambda2")) cfg.lambda2 = o.lambda2;
  if (given("--replicas")) cfg.replicas = o.replicas;
  if (given("--simple")) cfg.simple = true;
  if (given("--out")) cfg.out = o.out;
  if (given("--epsilon")) cfg.epsilon = o.epsilon;
  if (given("--nu")) cfg.nu = o.nu;
  if (given("--threads")) cfg.threads = o.threads;
  if (given("--thinning")) cfg.thinning = o.thinning;
  if (given("--fixed-sequence")) cfg.fixed_sequence = true;
  const int degree_flags = given("--degrees") + given("--degree-file") + given("--pmf");
  if (degree_flags > 1) throw Error(ErrorCode::Config, "--degrees, --degree-file and --pmf are exclusive");
  if (given("--degrees")) {
    cfg.degrees = DegreeSpec{};
    cfg.degrees.kind = DegreeSpec::Kind::Explicit;
    for (const auto& part : split(o.degrees, ',')) cfg.degrees.values.push_back(parse_int(part, "--degrees"));
  }
  if (given("--degree-file")) {
    cfg.degrees = DegreeSpec{};
    cfg.degrees.kind = DegreeSpec::Kind::File;
    cfg.degrees.path = o.degree_file;
  }
  if (given("--pmf")) {
    cfg.degrees = DegreeSpec{};
    cfg.degrees.kind = DegreeSpec::Kind::Iid;
    cfg.degrees.pmf.clear();
    for (const auto& part : split(o.pmf, ',')) {
      const auto kv = split(part, ':');
      if (kv.size() != 2) throw Error(ErrorCode::Config, "--pmf entries must look like degree:probability");
      const auto k = parse_int(kv[0], "--pmf");
      if (k < 0) throw Error(ErrorCode::Config, "--pmf degrees must be non-negative");
      cfg.degrees.pmf[static_cast<Degree>(k)] = parse_real(kv[1], "--pmf");
    }
  }
  if (given("--seeds")) {
    if (o.seeds == "uniform") {
      cfg.seeds = UniformSeeds{};
    } else {
      const auto parts = split(o.seeds, ',');
      if (parts.size() != 2) throw Error(ErrorCode::Config, "--seeds must be 'uniform' or two vertex ids");
      const auto a = parse_int(parts[0], "--seeds");
      const auto b = parse_int(parts[1], "--seeds");
      if (a < 0 || b < 0) throw Error(ErrorCode::Config, "--seeds vertex ids must be non-negative");
      cfg.seeds = SeedPair{static_cast<VertexId>(a), static_cast<VertexId>(b)};
    }
  }
  if (given("--n-list")) cfg.n_list = o.n_list;
  if (given("--t-end")) cfg.t_end = o.t_end;
  if (given("--a1")) cfg.a1 = o.a1;
  if (given("--a2")) cfg.a2 = o.a2;
  if (given("--level")) cfg.level = o.level;
  validate_run_config(cfg);
  return cfg;
}

json document(const RunConfig& cfg) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["config"] = to_json(cfg);
  return doc;
}

void write_config_echo(const RunConfig& cfg) { write_json_file(cfg.out / "config.json", to_json(cfg)); }

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  const auto source = resolve_degree_source(cfg);
  Rng rng(derive_seed(*cfg.seed, 0));
  const auto seq = source.realize(cfg.n, rng);
  int attempts = 1;
  const auto graph = cfg.simple ? sample_simple_graph(seq, rng, cfg.max_attempts, &attempts)
                                : generate_configuration_graph(seq, rng);
  ensure_directory(cfg.out);
  write_config_echo(cfg);
  write_text_file(cfg.out / "graph.edges", [&](std::ostream& os) { write_edge_list(os, graph); });
  write_text_file(cfg.out / "degrees.txt", [&](std::ostream& os) { write_degree_file(os, seq); });
  auto doc = document(cfg);
  doc["n"] = seq.size();
  doc["N"] = seq.total_edges();
  doc["simple"] = is_simple(graph);
  doc["attempts"] = attempts;
  doc["assumptions"] = assumptions_to_json(source.is_iid() ? source.flags() : check_assumptions(seq));
  write_json_file(cfg.out / "generate.json", doc);
  out << "generate: n=" << seq.size() << " N=" << seq.total_edges() << " simple=" << (is_simple(graph) ? "yes" : "no")
      << " -> " << (cfg.out / "graph.edges").string() << '\n';
  return kOk;
}

int cmd_compete(RunConfig cfg, std::ostream& out) {
  auto exp = to_experiment(cfg);
  exp.replicas = 1;
  exp.keep_outcomes = true;
  exp.thinning = cfg.thinning;
  const auto report = run_ensemble(exp);
  const auto& outcome = report.outcomes.at(0);
  const auto& row = report.replicas.at(0);
  ensure_directory(cfg.out);
  write_config_echo(cfg);
  auto doc = document(cfg);
  doc["outcome"] = outcome_to_json(outcome, row.seed);
  doc["outcome"]["nu"] = row.nu;
  doc["outcome"]["window_end"] = row.window_end;
  doc["assumptions"] = assumptions_to_json(report.assumptions);
  write_json_file(cfg.out / "outcome.json", doc);
  write_text_file(cfg.out / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, outcome.trajectory); });
  out << "compete: n=" << outcome.n << " N=" << outcome.total_edges << " n1=" << outcome.n1 << " n2=" << outcome.n2
      << " steps=" << outcome.termination_step << '\n';
  return kOk;
}

int cmd_ensemble(const RunConfig& cfg, std::ostream& out) {
  const auto exp = to_experiment(cfg);
  if (!cfg.n_list.empty()) {
    const auto scaling = scaling_study(exp, cfg.n_list, cfg.bootstrap);
    ensure_directory(cfg.out);
    write_config_echo(cfg);
    auto doc = document(cfg);
    doc["scaling"] = scaling_to_json(scaling);
    write_json_file(cfg.out / "scaling.json", doc);
    write_text_file(cfg.out / "scaling.csv", [&](std::ostream& os) {
      os << "n,replicas,median_n1\n";
      for (const auto& p : scaling.points) os << p.n << ',' << p.replicas << ',' << format_double(p.median_n1) << '\n';
    });
    out << "ensemble scaling: slope=" << format_double(scaling.slope) << " ci=[" << format_double(scaling.ci_low)
        << ", " << format_double(scaling.ci_high) << "] ratio=" << format_double(scaling.ratio) << '\n';
    return kOk;
  }
  const auto report = run_ensemble(exp);
  ensure_directory(cfg.out);
  write_config_echo(cfg);
  auto doc = document(cfg);
  doc["assumptions"] = assumptions_to_json(report.assumptions);
  doc["replicas"] = report.replicas.size();
  doc["aggregates"] = aggregates_to_json(report.aggregates, report.quantile_levels);
  write_json_file(cfg.out / "ensemble.json", doc);
  write_text_file(cfg.out / "replicas.csv", [&](std::ostream& os) { write_replicas_csv(os, report.replicas); });
  out << "ensemble: replicas=" << report.replicas.size() << " mean nbar1=" << format_double(report.aggregates.nbar1.mean)
      << " sd=" << format_double(report.aggregates.nbar1.stddev) << '\n';
  return kOk;
}

int cmd_branching(const RunConfig& cfg, std::ostream& out) {
  BranchingParams params;
  params.rates = {cfg.lambda1, cfg.lambda2};
  params.a1 = cfg.a1.value_or(1);
  params.a2 = cfg.a2.value_or(1);
  if (cfg.offspring) {
    params.offspring = *cfg.offspring;
  } else if (cfg.degrees.kind == DegreeSpec::Kind::Iid) {
    params.offspring = offspring_pmf(cfg.degrees.pmf);
  } else {
    Rng unused(0);
    params.offspring = offspring_pmf(compute_stats(resolve_degree_source(cfg).realize(0, unused)).pmf);
  }
  BranchingOptions opts;
  opts.record_interval = cfg.record_interval;
  opts.population_cap = cfg.population_cap;

  Rng rng(*cfg.seed);
  const auto trajectory = simulate_branching_pair(params, cfg.t_end, rng, opts);
  ensure_directory(cfg.out);
  write_config_echo(cfg);
  auto doc = document(cfg);
  doc["offspring"] = pmf_to_json(params.offspring);
  doc["final"] = {{"t", trajectory.final_state.t},
                  {"b1", trajectory.final_state.b1},
                  {"b2", trajectory.final_state.b2},
                  {"saturated", trajectory.saturated},
                  {"events1", trajectory.events[0]},
                  {"events2", trajectory.events[1]}};
  try {
    doc["growth_rate"] = estimate_growth_rate(trajectory);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientGrowth) throw;
    doc["growth_rate"] = nullptr;
  }
  write_text_file(cfg.out / "branching_trajectory.csv", [&](std::ostream& os) { write_branching_csv(os, trajectory); });
  if (cfg.replicas > 1) {
    const auto v = estimate_v_distribution(params, cfg.t_end, cfg.replicas, rng, opts, cfg.threads);
    doc["v_distribution"] = v_distribution_to_json(v);
    write_text_file(cfg.out / "v_samples.csv", [&](std::ostream& os) { write_v_samples_csv(os, v.samples); });
  }
  write_json_file(cfg.out / "branching.json", doc);
  out << "branching: t=" << format_double(trajectory.final_state.t) << " b1=" << trajectory.final_state.b1
      << " b2=" << trajectory.final_state.b2 << (trajectory.saturated ? " (saturated)" : "") << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& cfg, bool inject, std::ostream& out) {
  VerifyOptions opts;
  opts.level = cfg.level;
  if (cfg.seed) opts.seed = *cfg.seed;
  opts.threads = cfg.threads;
  opts.inject_conservation_fault = inject;
  const auto results = run_verification(opts);
  bool all = true;
  json checks = json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << format_double(std::round(r.seconds * 100) / 100)
        << " s): " << r.detail << '\n';
    checks.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  ensure_directory(cfg.out);
  write_config_echo(cfg);
  auto doc = document(cfg);
  doc["seed_used"] = opts.seed;
  doc["checks"] = checks;
  doc["passed"] = all;
  write_json_file(cfg.out / "verify.json", doc);
  out << (all ? "verify: all checks passed" : "verify: FAILED") << '\n';
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-type competing first passage percolation on configuration-model graphs"};
  app.require_subcommand(1);
  Overrides o;
  auto* generate = app.add_subcommand("generate", "sample one configuration-model graph");
  auto* compete = app.add_subcommand("compete", "one competition run");
  auto* ensemble = app.add_subcommand("ensemble", "independent replicas, or a scaling study with --n-list");
  auto* branching = app.add_subcommand("branching", "two independent branching processes");
  auto* verify = app.add_subcommand("verify", "oracle and property suite");
  for (auto* cmd : {generate, compete, ensemble, branching, verify}) add_common(cmd, o);
  ensemble->add_option("--n-list", o.n_list, "sizes for a scaling study");
  branching->add_option("--t-end", o.t_end, "end time");
  branching->add_option("--a1", o.a1, "initial type-1 population");
  branching->add_option("--a2", o.a2, "initial type-2 population");
  verify->add_option("--level", o.level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_flag("--inject-fault", o.inject_fault, "corrupt the conservation counter (self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  CLI::App* cmd = app.get_subcommands().front();
  RunConfig cfg;
  try {
    cfg = resolve(cmd, cmd->get_name(), o);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  try {
    if (cmd == generate) return cmd_generate(cfg, out);
    if (cmd == compete) return cmd_compete(cfg, out);
    if (cmd == ensemble) return cmd_ensemble(cfg, out);
    if (cmd == branching) return cmd_branching(cfg, out);
    return cmd_verify(cfg, o.inject_fault, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const bool input = e.code() == ErrorCode::Config || e.code() == ErrorCode::OddTotalDegree ||
                       e.code() == ErrorCode::NonPositiveDegree || e.code() == ErrorCode::EmptySequence ||
                       e.code() == ErrorCode::InvalidPmf || e.code() == ErrorCode::VertexOutOfRange ||
                       e.code() == ErrorCode::IdenticalSeeds;
    return input ? kValidation : kRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace cfpp::cli
