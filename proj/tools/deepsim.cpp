// Command-line front end: config ingestion, experiment execution, figure
// data emission, and the built-in verification suite.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "deepsim/csv.hpp"
#include "deepsim/explore.hpp"
#include "deepsim/lake.hpp"
#include "deepsim/market.hpp"
#include "deepsim/registry.hpp"
#include "deepsim/verify.hpp"
#include "deepsim/version.hpp"

namespace {

using deepsim::ConfigError;
using nlohmann::json;

constexpr std::uint64_t default_master_seed = 4521;

struct CliOptions {
  std::optional<std::uint64_t> seed_flag;
  int jobs = 0;
  std::optional<std::string> output_flag;
};

struct LoadedConfig {
  std::string model_id;
  deepsim::Constants constant_overrides;
  std::vector<deepsim::Policy> policies;  // empty: use the model default
  std::vector<deepsim::Scenario> scenarios;
  deepsim::SamplerSpec sampler;
  bool has_policies = false;
  bool has_scenarios = false;
  std::optional<int> replications;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
};

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& error) {
    throw ConfigError("invalid JSON in " + path + ": " + error.what());
  }
}

double require_number(const json& value, const std::string& context) {
  if (!value.is_number())
    throw ConfigError(context + " must be a number");
  return value.get<double>();
}

std::uint64_t require_seed(const json& value) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(value.get<std::int64_t>());
  throw ConfigError("seed must be an unsigned integer");
}

std::vector<deepsim::Policy> parse_policies(const json& node) {
  if (!node.is_array() || node.empty())
    throw ConfigError("policies must be a non-empty array");
  std::vector<deepsim::Policy> policies;
  for (const json& item : node) {
    if (!item.is_object())
      throw ConfigError("each policy must be an object");
    for (const auto& [key, value] : item.items()) {
      (void)value;
      if (key != "id" && key != "bindings")
        throw ConfigError("unknown policy key: " + key);
    }
    if (!item.contains("id") || !item.at("id").is_string())
      throw ConfigError("each policy needs a string id");
    if (!item.contains("bindings") || !item.at("bindings").is_object())
      throw ConfigError("each policy needs a bindings object");
    deepsim::Policy policy;
    policy.id = item.at("id").get<std::string>();
    for (const auto& [name, value] : item.at("bindings").items()) {
      if (value.is_array()) {
        std::vector<double> sequence;
        for (const json& element : value)
          sequence.push_back(
              require_number(element, "policy binding " + name));
        policy.set(name, std::move(sequence));
      } else {
        policy.set(name, require_number(value, "policy binding " + name));
      }
    }
    policies.push_back(std::move(policy));
  }
  return policies;
}

void parse_scenarios(const json& node, LoadedConfig* config) {
  if (node.is_array()) {
    if (node.empty()) throw ConfigError("scenarios must be non-empty");
    for (const json& item : node) {
      if (!item.is_object())
        throw ConfigError("each scenario must be an object");
      for (const auto& [key, value] : item.items()) {
        (void)value;
        if (key != "id" && key != "bindings")
          throw ConfigError("unknown scenario key: " + key);
      }
      if (!item.contains("id") || !item.at("id").is_string())
        throw ConfigError("each scenario needs a string id");
      if (!item.contains("bindings") || !item.at("bindings").is_object())
        throw ConfigError("each scenario needs a bindings object");
      deepsim::Scenario scenario;
      scenario.id = item.at("id").get<std::string>();
      for (const auto& [name, value] : item.at("bindings").items())
        scenario.bindings[name] =
            require_number(value, "scenario binding " + name);
      config->scenarios.push_back(std::move(scenario));
    }
    return;
  }
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      (void)value;
      if (key != "sampler" && key != "n")
        throw ConfigError("unknown scenarios key: " + key);
    }
    if (!node.contains("sampler") || !node.at("sampler").is_string())
      throw ConfigError("sampled scenarios need a sampler name");
    const std::string method = node.at("sampler").get<std::string>();
    if (method == "lhs")
      config->sampler.method = deepsim::SamplerSpec::Method::LatinHypercube;
    else if (method == "mc")
      config->sampler.method = deepsim::SamplerSpec::Method::MonteCarlo;
    else
      throw ConfigError("unknown sampler: " + method +
                        " (valid samplers: lhs, mc)");
    if (!node.contains("n") || !node.at("n").is_number_integer() ||
        node.at("n").get<std::int64_t>() < 1)
      throw ConfigError("sampled scenarios need a positive integer n");
    config->sampler.n = static_cast<int>(node.at("n").get<std::int64_t>());
    return;
  }
  throw ConfigError("scenarios must be an array or a sampler object");
}

LoadedConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  static const std::set<std::string> allowed = {
      "model",    "constants",    "policies", "scenarios",
      "replications", "seed",     "output"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!allowed.count(key)) throw ConfigError("unknown config key: " + key);
  }
  LoadedConfig config;
  if (!doc.contains("model") || !doc.at("model").is_string())
    throw ConfigError("config needs a string model key");
  config.model_id = doc.at("model").get<std::string>();
  if (doc.contains("constants")) {
    if (!doc.at("constants").is_object())
      throw ConfigError("constants must be an object");
    for (const auto& [name, value] : doc.at("constants").items())
      config.constant_overrides[name] =
          require_number(value, "constant " + name);
  }
  if (doc.contains("policies")) {
    config.policies = parse_policies(doc.at("policies"));
    config.has_policies = true;
  }
  if (doc.contains("scenarios")) {
    parse_scenarios(doc.at("scenarios"), &config);
    config.has_scenarios = true;
  }
  if (doc.contains("replications")) {
    const json& value = doc.at("replications");
    if (!value.is_number_integer() || value.get<std::int64_t>() < 1)
      throw ConfigError("replications must be a positive integer");
    config.replications = static_cast<int>(value.get<std::int64_t>());
  }
  if (doc.contains("seed")) config.seed = require_seed(doc.at("seed"));
  if (doc.contains("output")) {
    if (!doc.at("output").is_string())
      throw ConfigError("output must be a string path");
    config.output = doc.at("output").get<std::string>();
  }
  return config;
}

std::uint64_t resolve_seed(const CliOptions& options,
                           const std::optional<std::uint64_t>& config_seed) {
  if (options.seed_flag) return *options.seed_flag;
  if (const char* env = std::getenv("DEEPSIM_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw ConfigError(std::string("DEEPSIM_SEED must be an unsigned "
                                    "integer, got: ") +
                        env);
    return static_cast<std::uint64_t>(value);
  }
  if (config_seed) return *config_seed;
  return default_master_seed;
}

std::string resolve_output(const CliOptions& options,
                           const std::optional<std::string>& config_output,
                           const std::string& fallback) {
  if (options.output_flag) return *options.output_flag;
  if (config_output) return *config_output;
  return fallback;
}

// Canonical compact JSON of the fully materialized plan; object keys are
// serialized sorted, so the digest is stable across runs and platforms.
std::uint64_t plan_hash(const deepsim::ModelInfo& info,
                        const deepsim::ExperimentPlan& plan) {
  json doc;
  doc["model"] = plan.model_id;
  json constants = json::object();
  for (const auto& [name, value] :
       deepsim::resolve_constants(info, plan.constants))
    constants[name] = value;
  doc["constants"] = std::move(constants);
  json policies = json::array();
  for (const deepsim::Policy& policy : plan.policies) {
    json bindings = json::object();
    for (const auto& [name, sequence] : policy.bindings)
      bindings[name] = sequence;
    policies.push_back({{"id", policy.id}, {"bindings", std::move(bindings)}});
  }
  doc["policies"] = std::move(policies);
  if (plan.sampler.method == deepsim::SamplerSpec::Method::Explicit) {
    json scenarios = json::array();
    for (const deepsim::Scenario& scenario : plan.scenarios) {
      json bindings = json::object();
      for (const auto& [name, value] : scenario.bindings)
        bindings[name] = value;
      scenarios.push_back(
          {{"id", scenario.id}, {"bindings", std::move(bindings)}});
    }
    doc["scenarios"] = std::move(scenarios);
  } else {
    doc["scenarios"] = {
        {"sampler", plan.sampler.method ==
                            deepsim::SamplerSpec::Method::LatinHypercube
                        ? "lhs"
                        : "mc"},
        {"n", plan.sampler.n}};
  }
  doc["replications"] = plan.replications;
  doc["seed"] = plan.master_seed;
  return deepsim::fnv1a64(doc.dump());
}

void write_csv_file(const std::string& path,
                    const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  body(out);
  if (!out) throw ConfigError("failed writing output file: " + path);
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const std::filesystem::path p(path);
  std::filesystem::path renamed = p.parent_path();
  renamed /= p.stem().string() + suffix + p.extension().string();
  return renamed.string();
}

// Builds the plan shared by simulate and explore: config policies and
// scenarios when given, model defaults otherwise.
deepsim::ExperimentPlan plan_from_config(const LoadedConfig& config,
                                         const deepsim::ModelInfo& info,
                                         const deepsim::ComposedModel& model,
                                         std::uint64_t seed) {
  deepsim::ExperimentPlan plan;
  plan.model_id = config.model_id;
  plan.constants = config.constant_overrides;
  plan.master_seed = seed;
  plan.replications = config.replications.value_or(1);
  plan.policies = config.has_policies
                      ? config.policies
                      : std::vector<deepsim::Policy>{
                            info.default_policy(model, seed)};
  if (config.has_scenarios) {
    plan.scenarios = config.scenarios;
    plan.sampler = config.sampler;
  } else {
    plan.scenarios = {deepsim::default_scenario(model)};
  }
  return plan;
}

// Validation errors must surface as config errors (exit 2) before any row
// runs; run_ensemble only flags them per row.
void prevalidate(const deepsim::ComposedModel& model,
                 const deepsim::Constants& runtime_constants,
                 const deepsim::ExperimentPlan& plan) {
  for (const deepsim::Policy& policy : plan.policies)
    for (const deepsim::Scenario& scenario : plan.scenarios)
      deepsim::validate_inputs(model, policy, scenario, runtime_constants);
}

int cmd_simulate(const std::string& config_path, const CliOptions& options) {
  const LoadedConfig config = parse_config(load_config_file(config_path));
  const std::uint64_t seed = resolve_seed(options, config.seed);
  const deepsim::ModelInfo& info = deepsim::find_model(config.model_id);
  const deepsim::InstantiatedModel instantiated =
      info.instantiate(deepsim::resolve_constants(info,
                                                  config.constant_overrides));

  deepsim::ExperimentPlan plan =
      plan_from_config(config, info, instantiated.model, seed);
  if (plan.sampler.method != deepsim::SamplerSpec::Method::Explicit)
    throw ConfigError("simulate requires an explicit scenario, not a sampler");
  if (plan.policies.size() != 1 || plan.scenarios.size() != 1)
    throw ConfigError("simulate takes exactly one policy and one scenario");
  plan.recorded_series = info.default_output_series;
  prevalidate(instantiated.model, instantiated.runtime_constants, plan);

  const std::uint64_t hash = plan_hash(info, plan);
  const deepsim::ResultsTable table = deepsim::run_ensemble(plan, options.jobs);
  for (const deepsim::ResultRow& row : table.rows)
    if (!row.ok) throw deepsim::ModelError(row.error);

  const std::string base = resolve_output(options, config.output,
                                          config.model_id + "_trace.csv");
  std::vector<std::string> written;
  for (const deepsim::ResultRow& row : table.rows) {
    const std::string path =
        plan.replications == 1
            ? base
            : with_suffix(base,
                          "_rep" + std::to_string(row.replication_index));
    write_csv_file(path, [&](std::ostream& out) {
      deepsim::write_provenance(out, config.model_id, hash, seed);
      deepsim::write_trace_csv(out, *row.trace, info.default_output_series,
                               instantiated.model.environment.series_specs);
    });
    written.push_back(path);
  }
  std::cout << "wrote";
  for (const std::string& path : written) std::cout << " " << path;
  std::cout << "\n";
  return 0;
}

int cmd_explore(const std::string& config_path, const CliOptions& options) {
  const LoadedConfig config = parse_config(load_config_file(config_path));
  const std::uint64_t seed = resolve_seed(options, config.seed);
  const deepsim::ModelInfo& info = deepsim::find_model(config.model_id);
  const deepsim::InstantiatedModel instantiated =
      info.instantiate(deepsim::resolve_constants(info,
                                                  config.constant_overrides));

  const deepsim::ExperimentPlan plan =
      plan_from_config(config, info, instantiated.model, seed);
  prevalidate(instantiated.model, instantiated.runtime_constants, plan);

  const std::uint64_t hash = plan_hash(info, plan);
  const deepsim::ResultsTable table = deepsim::run_ensemble(plan, options.jobs);

  const std::string results_path =
      resolve_output(options, config.output, "results.csv");
  write_csv_file(results_path, [&](std::ostream& out) {
    deepsim::write_provenance(out, config.model_id, hash, seed);
    deepsim::write_results_csv(out, table);
  });

  const std::vector<std::string> metrics = {"mean", "std", "p10", "snr",
                                            "minimax_regret"};
  std::map<std::string, std::map<std::string, std::map<std::string, double>>>
      by_objective;
  for (const std::string& objective : table.objective_columns)
    by_objective[objective] =
        deepsim::robustness_summary(table, objective, metrics);
  const std::string summary_path = with_suffix(results_path, "_summary");
  write_csv_file(summary_path, [&](std::ostream& out) {
    deepsim::write_provenance(out, config.model_id, hash, seed);
    deepsim::write_summary_csv(out, table.policy_ids, by_objective);
  });

  std::cout << "wrote " << results_path << " (" << table.rows.size()
            << " rows, " << table.failed_rows << " failed) and "
            << summary_path << "\n";
  return 0;
}

struct FigureProtocol {
  std::string model_id;
  std::string level_decision;
  std::vector<double> levels;
  std::vector<std::string> series;
  int default_replications = 1;
};

FigureProtocol figure_protocol(const std::string& name) {
  namespace lake = deepsim::lake_names;
  namespace market = deepsim::market_names;
  if (name == "lake4")
    return {lake::model_id,
            lake::removal,
            {0.0, 0.001, 0.002, 0.003},
            {lake::pollution},
            10};
  if (name == "market5")
    return {market::model_id,
            market::shortfall_penalty,
            {0.0, 20.0, 80.0, 140.0},
            {market::clearing_price, market::wind_dispatched,
             market::wind_revenue},
            200};
  throw deepsim::UnknownFigure(name);
}

int cmd_figure(const std::string& name, const std::string& config_path,
               const CliOptions& options) {
  const FigureProtocol protocol = figure_protocol(name);

  LoadedConfig config;
  config.model_id = protocol.model_id;
  if (!config_path.empty()) {
    config = parse_config(load_config_file(config_path));
    if (config.model_id != protocol.model_id)
      throw ConfigError("figure " + name + " runs model " +
                        protocol.model_id + ", config says " +
                        config.model_id);
    if (config.has_policies || config.has_scenarios)
      throw ConfigError(
          "figure protocols fix policies and scenarios; remove them from "
          "the config");
  }
  const std::uint64_t seed = resolve_seed(options, config.seed);
  const deepsim::ModelInfo& info = deepsim::find_model(protocol.model_id);
  const deepsim::InstantiatedModel instantiated =
      info.instantiate(deepsim::resolve_constants(info,
                                                  config.constant_overrides));

  deepsim::ExperimentPlan plan;
  plan.model_id = protocol.model_id;
  plan.constants = config.constant_overrides;
  plan.master_seed = seed;
  plan.replications = config.replications.value_or(
      protocol.default_replications);
  plan.scenarios = {deepsim::default_scenario(instantiated.model)};
  plan.recorded_series = protocol.series;
  std::vector<std::string> level_labels;
  for (double level : protocol.levels) {
    deepsim::Policy policy = info.default_policy(instantiated.model, seed);
    policy.set(protocol.level_decision, level);
    const std::string label = deepsim::format_double(level);
    policy.id = protocol.level_decision + "_" + label;
    level_labels.push_back(label);
    plan.policies.push_back(std::move(policy));
  }
  prevalidate(instantiated.model, instantiated.runtime_constants, plan);

  const std::uint64_t hash = plan_hash(info, plan);
  const deepsim::ResultsTable table = deepsim::run_ensemble(plan, options.jobs);
  if (table.failed_rows > 0)
    throw deepsim::ModelError("figure ensemble had failing rows");

  std::vector<deepsim::FigureRow> rows;
  for (const std::string& series : protocol.series) {
    const auto aggregates = deepsim::series_aggregate(table, series);
    bool state_series = false;
    for (const deepsim::SeriesSpec& spec :
         instantiated.model.environment.series_specs)
      if (spec.name == series)
        state_series = spec.kind == deepsim::SeriesKind::State;
    for (std::size_t i = 0; i < protocol.levels.size(); ++i) {
      const auto& [means, stds] =
          aggregates.at(plan.policies[i].id);
      for (std::size_t k = 0; k < means.size(); ++k) {
        deepsim::FigureRow row;
        row.series = series;
        row.level = level_labels[i];
        row.t = state_series ? static_cast<int>(k) : static_cast<int>(k) + 1;
        row.mean = means[k];
        row.std_dev = stds[k];
        rows.push_back(row);
      }
    }
  }

  const std::string path =
      resolve_output(options, config.output, name + ".csv");
  write_csv_file(path, [&](std::ostream& out) {
    deepsim::write_provenance(out, protocol.model_id, hash, seed);
    deepsim::write_figure_csv(out, rows);
  });
  std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_verify() {
  const std::vector<deepsim::CheckResult> results =
      deepsim::run_verification();
  int failed = 0;
  for (const deepsim::CheckResult& result : results) {
    if (result.passed) {
      std::cout << "[PASS] " << result.name << "\n";
    } else {
      std::cout << "[FAIL] " << result.name << ": " << result.detail << "\n";
      ++failed;
    }
  }
  std::cout << "verification: " << (results.size() - failed) << "/"
            << results.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deepsim: multi-perspective simulation models under deep "
               "uncertainty"};
  app.require_subcommand(1);

  CliOptions options;
  std::string config_path;
  std::string figure_name;
  std::string figure_config;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", options.seed_flag,
                    "Master seed (overrides DEEPSIM_SEED and the config)");
    cmd->add_option("--jobs", options.jobs,
                    "Worker threads; 0 selects machine parallelism");
    cmd->add_option("--output", options.output_flag,
                    "Output CSV path (overrides the config)");
  };

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run one policy and scenario; write a "
                                     "trace CSV per replication");
  simulate->add_option("config", config_path, "JSON config file")
      ->required();
  add_common(simulate);

  CLI::App* explore =
      app.add_subcommand("explore", "Run a (policy, scenario, replication) "
                                    "ensemble; write results and summary "
                                    "CSVs");
  explore->add_option("config", config_path, "JSON config file")->required();
  add_common(explore);

  CLI::App* figure =
      app.add_subcommand("figure", "Emit the data behind a built-in figure "
                                   "protocol (lake4 or market5)");
  figure->add_option("name", figure_name, "Figure name: lake4 or market5")
      ->required();
  figure->add_option("config", figure_config,
                     "Optional JSON config (constants, replications, seed, "
                     "output)");
  add_common(figure);

  CLI::App* verify = app.add_subcommand(
      "verify", "Run the built-in verification suite");
  (void)verify;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, options);
    if (explore->parsed()) return cmd_explore(config_path, options);
    if (figure->parsed())
      return cmd_figure(figure_name, figure_config, options);
    return cmd_verify();
  } catch (const ConfigError& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 2;
  } catch (const deepsim::ModelError& error) {
    std::cerr << "model error: " << error.what() << "\n";
    return 3;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  }
}
