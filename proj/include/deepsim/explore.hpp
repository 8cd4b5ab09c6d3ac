#pragma once
// Ensemble experimentation: run a plan's (policy, scenario, replication)
// grid, collect objective values and optional traces, and summarize
// robustness across scenarios.
//
// Determinism contract: each row's stream is keyed by (master seed, scenario
// index, replication index) and never by policy, so all policies see
// identical draws (common random numbers) and results are bitwise identical
// whatever the execution order or thread count.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "deepsim/model.hpp"

namespace deepsim {

struct SamplerSpec {
  enum class Method { Explicit, MonteCarlo, LatinHypercube };
  Method method = Method::Explicit;
  int n = 0;
};

struct ExperimentPlan {
  std::string model_id;
  // Overrides onto the model's default constants (see resolve_constants);
  // unknown names are rejected.
  Constants constants;
  std::vector<Policy> policies;
  // Explicit scenarios; required empty when the sampler method is not
  // Explicit (the sampler then draws them from the model's default ranges).
  std::vector<Scenario> scenarios;
  SamplerSpec sampler;
  int replications = 1;
  std::uint64_t master_seed = 4521;
  // Series to keep per row; must be declared by the model. Empty keeps none.
  std::vector<std::string> recorded_series;
};

struct ResultRow {
  std::string policy_id;
  std::string scenario_id;
  std::uint32_t scenario_index = 0;
  std::uint32_t replication_index = 0;
  bool ok = false;
  std::string error;
  std::map<std::string, double> objectives;  // keys "perspective.objective"
  std::shared_ptr<const Trace> trace;        // null unless series recorded
};

struct ResultsTable {
  std::vector<std::string> objective_columns;  // declaration order
  std::vector<ResultRow> rows;  // (policy, scenario, replication) order
  std::vector<std::string> policy_ids;
  std::vector<Scenario> scenarios;  // realized (explicit or sampled)
  std::uint64_t master_seed = 0;
  std::size_t failed_rows = 0;
};

// jobs <= 0 selects the machine's hardware concurrency. A failing row is
// flagged and counted, never fatal to the ensemble.
ResultsTable run_ensemble(const ExperimentPlan& plan, int jobs = 0);

// Supported metrics: "mean", "std" (population), "p10" (10th percentile,
// linear interpolation), "snr" (mean/std; omitted from the result when both
// mean and std are 0), "minimax_regret" (per scenario, regret of a policy is
// the gap to the best policy mean under maximization; the metric is the
// worst such gap). Failed rows are excluded.
std::map<std::string, std::map<std::string, double>> robustness_summary(
    const ResultsTable& table, const std::string& objective,
    const std::vector<std::string>& metrics);

// Pointwise mean and population std of a recorded series across the rows of
// each policy.
std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
series_aggregate(const ResultsTable& table, const std::string& series_id);

}  // namespace deepsim
