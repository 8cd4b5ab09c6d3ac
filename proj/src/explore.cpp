#include "deepsim/explore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "deepsim/registry.hpp"

namespace deepsim {

namespace {

std::vector<Scenario> plan_scenarios(const ExperimentPlan& plan,
                                     const ModelInfo& info) {
  if (plan.sampler.method == SamplerSpec::Method::Explicit) {
    if (plan.scenarios.empty())
      throw ConfigError("plan has no scenarios and no sampler");
    return plan.scenarios;
  }
  if (!plan.scenarios.empty())
    throw ConfigError("plan has both explicit scenarios and a sampler");
  RandomStream stream(plan.master_seed, aux_stream_scenario_sampler,
                      aux_replication_index);
  if (plan.sampler.method == SamplerSpec::Method::LatinHypercube)
    return latin_hypercube(plan.sampler.n, info.sampling_ranges, stream);
  return monte_carlo(plan.sampler.n, info.sampling_ranges, stream);
}

void validate_plan(const ExperimentPlan& plan, const ComposedModel& model) {
  if (plan.replications < 1)
    throw ConfigError("replications must be >= 1, got " +
                      std::to_string(plan.replications));
  if (plan.policies.empty()) throw ConfigError("plan has no policies");
  std::set<std::string> ids;
  for (const Policy& policy : plan.policies)
    if (!ids.insert(policy.id).second)
      throw ConfigError("duplicate policy id: " + policy.id);
  std::set<std::string> declared;
  for (const SeriesSpec& spec : model.environment.series_specs)
    declared.insert(spec.name);
  for (const std::string& name : plan.recorded_series)
    if (!declared.count(name)) throw SeriesNotRecorded(name);
}

}  // namespace

ResultsTable run_ensemble(const ExperimentPlan& plan, int jobs) {
  const ModelInfo& info = find_model(plan.model_id);
  const Constants resolved = resolve_constants(info, plan.constants);
  const InstantiatedModel instantiated = info.instantiate(resolved);
  const ComposedModel& model = instantiated.model;

  validate_plan(plan, model);
  const std::vector<Scenario> scenarios = plan_scenarios(plan, info);

  ResultsTable table;
  table.master_seed = plan.master_seed;
  table.scenarios = scenarios;
  for (const Policy& policy : plan.policies)
    table.policy_ids.push_back(policy.id);
  for (const Perspective& perspective : model.perspectives)
    for (const std::string& name : perspective.objective_names)
      table.objective_columns.push_back(perspective.id + "." + name);

  const std::size_t scenario_count = scenarios.size();
  const std::size_t replication_count =
      static_cast<std::size_t>(plan.replications);
  const std::size_t total =
      plan.policies.size() * scenario_count * replication_count;
  table.rows.resize(total);

  const bool keep_traces = !plan.recorded_series.empty();
  const auto run_row = [&](std::size_t index) {
    const std::size_t policy_index =
        index / (scenario_count * replication_count);
    const std::size_t scenario_index =
        (index / replication_count) % scenario_count;
    const std::size_t replication = index % replication_count;

    const Policy& policy = plan.policies[policy_index];
    const Scenario& scenario = scenarios[scenario_index];
    ResultRow& row = table.rows[index];
    row.policy_id = policy.id;
    row.scenario_id = scenario.id;
    row.scenario_index = static_cast<std::uint32_t>(scenario_index);
    row.replication_index = static_cast<std::uint32_t>(replication);

    RandomStream stream(plan.master_seed,
                        static_cast<std::uint32_t>(scenario_index),
                        static_cast<std::uint32_t>(replication));
    try {
      auto [trace, result] =
          simulate(model, policy, scenario, instantiated.runtime_constants,
                   stream);
      row.objectives = result.flat();
      if (keep_traces)
        row.trace = std::make_shared<const Trace>(std::move(trace));
      row.ok = true;
    } catch (const DeepsimError& error) {
      row.ok = false;
      row.error = error.what();
    }
  };

  int worker_count = jobs;
  if (worker_count <= 0) {
    const unsigned hardware = std::thread::hardware_concurrency();
    worker_count = hardware == 0 ? 1 : static_cast<int>(hardware);
  }
  worker_count =
      static_cast<int>(std::min<std::size_t>(total, worker_count));

  if (worker_count <= 1) {
    for (std::size_t index = 0; index < total; ++index) run_row(index);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(worker_count));
    for (int w = 0; w < worker_count; ++w)
      workers.emplace_back([&] {
        for (std::size_t index = next.fetch_add(1); index < total;
             index = next.fetch_add(1))
          run_row(index);
      });
    for (std::thread& worker : workers) worker.join();
  }

  for (const ResultRow& row : table.rows)
    if (!row.ok) ++table.failed_rows;
  return table;
}

namespace {

double mean_of(const std::vector<double>& values) {
  double total = 0.0;
  for (double value : values) total += value;
  return total / static_cast<double>(values.size());
}

double population_std(const std::vector<double>& values, double mean) {
  double total = 0.0;
  for (double value : values) total += (value - mean) * (value - mean);
  return std::sqrt(total / static_cast<double>(values.size()));
}

double percentile10(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double position = 0.1 * static_cast<double>(values.size() - 1);
  const std::size_t index = static_cast<std::size_t>(position);
  const double fraction = position - static_cast<double>(index);
  if (index + 1 >= values.size()) return values.back();
  return values[index] + fraction * (values[index + 1] - values[index]);
}

}  // namespace

std::map<std::string, std::map<std::string, double>> robustness_summary(
    const ResultsTable& table, const std::string& objective,
    const std::vector<std::string>& metrics) {
  if (std::find(table.objective_columns.begin(), table.objective_columns.end(),
                objective) == table.objective_columns.end())
    throw UnknownObjective(objective);
  static const std::set<std::string> known = {"mean", "std", "p10", "snr",
                                              "minimax_regret"};
  for (const std::string& metric : metrics)
    if (!known.count(metric)) throw UnknownMetric(metric);

  // Per-policy pooled values and per-(policy, scenario) replication means.
  std::map<std::string, std::vector<double>> pooled;
  std::map<std::string, std::map<std::string, std::vector<double>>> cells;
  for (const ResultRow& row : table.rows) {
    if (!row.ok) continue;
    const double value = row.objectives.at(objective);
    pooled[row.policy_id].push_back(value);
    cells[row.policy_id][row.scenario_id].push_back(value);
  }

  // Best replication-mean per scenario across policies (maximization).
  std::map<std::string, double> scenario_best;
  for (const auto& [policy_id, by_scenario] : cells) {
    (void)policy_id;
    for (const auto& [scenario_id, values] : by_scenario) {
      const double cell_mean = mean_of(values);
      auto it = scenario_best.find(scenario_id);
      if (it == scenario_best.end())
        scenario_best.emplace(scenario_id, cell_mean);
      else
        it->second = std::max(it->second, cell_mean);
    }
  }

  std::map<std::string, std::map<std::string, double>> summary;
  for (const std::string& policy_id : table.policy_ids) {
    auto pooled_it = pooled.find(policy_id);
    if (pooled_it == pooled.end()) continue;  // every row of it failed
    const std::vector<double>& values = pooled_it->second;
    const double mean = mean_of(values);
    const double std_dev = population_std(values, mean);
    std::map<std::string, double>& out = summary[policy_id];
    for (const std::string& metric : metrics) {
      if (metric == "mean") {
        out["mean"] = mean;
      } else if (metric == "std") {
        out["std"] = std_dev;
      } else if (metric == "p10") {
        out["p10"] = percentile10(values);
      } else if (metric == "snr") {
        if (std_dev == 0.0 && mean == 0.0) continue;  // undefined, absent
        out["snr"] = mean / std_dev;
      } else if (metric == "minimax_regret") {
        double worst = 0.0;
        for (const auto& [scenario_id, cell_values] : cells.at(policy_id))
          worst = std::max(worst, scenario_best.at(scenario_id) -
                                      mean_of(cell_values));
        out["minimax_regret"] = worst;
      }
    }
  }
  return summary;
}

std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
series_aggregate(const ResultsTable& table, const std::string& series_id) {
  std::map<std::string, std::vector<const std::vector<double>*>> by_policy;
  for (const ResultRow& row : table.rows) {
    if (!row.ok) continue;
    if (!row.trace) throw SeriesNotRecorded(series_id);
    by_policy[row.policy_id].push_back(&row.trace->at(series_id));
  }
  if (by_policy.empty()) throw SeriesNotRecorded(series_id);

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
      aggregates;
  for (const auto& [policy_id, traces] : by_policy) {
    const std::size_t length = traces.front()->size();
    for (const std::vector<double>* series : traces)
      if (series->size() != length)
        throw ModelError("series " + series_id +
                         " has inconsistent lengths across rows");
    std::vector<double> means(length, 0.0);
    std::vector<double> stds(length, 0.0);
    const double count = static_cast<double>(traces.size());
    for (const std::vector<double>* series : traces)
      for (std::size_t t = 0; t < length; ++t) means[t] += (*series)[t];
    for (double& value : means) value /= count;
    for (const std::vector<double>* series : traces)
      for (std::size_t t = 0; t < length; ++t) {
        const double gap = (*series)[t] - means[t];
        stds[t] += gap * gap;
      }
    for (double& value : stds) value = std::sqrt(value / count);
    aggregates[policy_id] = {std::move(means), std::move(stds)};
  }
  return aggregates;
}

}  // namespace deepsim
