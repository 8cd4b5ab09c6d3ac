#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <set>
#include <vector>

#include "deepsim/explore.hpp"
#include "deepsim/market.hpp"
#include "deepsim/registry.hpp"

using namespace deepsim;
namespace names = deepsim::market_names;

namespace {

ExperimentPlan market_plan() {
  const ModelInfo& info = find_model(names::model_id);
  const InstantiatedModel instantiated =
      info.instantiate(info.default_constants);

  ExperimentPlan plan;
  plan.model_id = names::model_id;

  Policy base = policy_from_defaults(instantiated.model);
  base.id = "base";
  Policy harsh = policy_from_defaults(instantiated.model);
  harsh.id = "harsh";
  harsh.set(names::shortfall_penalty, 140.0);
  plan.policies = {base, harsh};

  Scenario calm = default_scenario(instantiated.model);
  calm.id = "calm";
  Scenario cheap_solar = calm;
  cheap_solar.id = "cheap_solar";
  cheap_solar.bindings[names::solar_price_mean] = 20.0;
  plan.scenarios = {calm, cheap_solar};

  plan.replications = 3;
  plan.master_seed = 4521;
  return plan;
}

bool rows_identical(const ResultsTable& a, const ResultsTable& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const ResultRow& x = a.rows[i];
    const ResultRow& y = b.rows[i];
    if (x.policy_id != y.policy_id || x.scenario_id != y.scenario_id ||
        x.ok != y.ok || x.error != y.error || x.objectives != y.objectives)
      return false;
  }
  return true;
}

ResultRow made_row(const std::string& policy, const std::string& scenario,
                   double value, bool ok = true) {
  ResultRow row;
  row.policy_id = policy;
  row.scenario_id = scenario;
  row.ok = ok;
  if (ok) row.objectives["p.value"] = value;
  return row;
}

ResultsTable crafted_table() {
  ResultsTable table;
  table.objective_columns = {"p.value"};
  table.policy_ids = {"a", "b"};
  table.rows = {made_row("a", "s0", 0.0),  made_row("a", "s0", 10.0),
                made_row("a", "s1", 20.0), made_row("a", "s1", 30.0),
                made_row("b", "s0", 5.0),  made_row("b", "s0", 15.0),
                made_row("b", "s1", 5.0),  made_row("b", "s1", 15.0)};
  return table;
}

}  // namespace

TEST_CASE("grid shape and row order") {
  const ResultsTable table = run_ensemble(market_plan(), 1);
  CHECK(table.objective_columns ==
        std::vector<std::string>{"wind_producer.daily_revenue",
                                 "regulator.total_shortfall",
                                 "regulator.mean_clearing_price"});
  CHECK(table.policy_ids == std::vector<std::string>{"base", "harsh"});
  REQUIRE(table.rows.size() == 12);  // 2 policies x 2 scenarios x 3 reps
  CHECK(table.failed_rows == 0);

  // Policy-major, then scenario, then replication.
  std::size_t index = 0;
  for (const char* policy : {"base", "harsh"})
    for (const char* scenario : {"calm", "cheap_solar"})
      for (std::uint32_t rep = 0; rep < 3; ++rep, ++index) {
        const ResultRow& row = table.rows[index];
        CHECK(row.policy_id == policy);
        CHECK(row.scenario_id == scenario);
        CHECK(row.replication_index == rep);
        CHECK(row.ok);
        CHECK(row.trace == nullptr);  // nothing recorded
        REQUIRE(row.objectives.size() == 3);
      }
}

TEST_CASE("thread schedule never changes results") {
  const ExperimentPlan plan = market_plan();
  const ResultsTable serial = run_ensemble(plan, 1);
  const ResultsTable parallel = run_ensemble(plan, 8);
  const ResultsTable defaulted = run_ensemble(plan, 0);
  CHECK(rows_identical(serial, parallel));
  CHECK(rows_identical(serial, defaulted));
}

TEST_CASE("common random numbers across policies") {
  ExperimentPlan plan = market_plan();
  plan.recorded_series = {names::demand, names::wind_production};
  const ResultsTable table = run_ensemble(plan, 4);
  REQUIRE(table.failed_rows == 0);

  // Rows pair up across the two policies: same scenario and replication,
  // identical exogenous draws.
  const std::size_t half = table.rows.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const ResultRow& base = table.rows[i];
    const ResultRow& harsh = table.rows[half + i];
    REQUIRE(base.trace != nullptr);
    REQUIRE(harsh.trace != nullptr);
    CHECK(base.scenario_id == harsh.scenario_id);
    CHECK(base.replication_index == harsh.replication_index);
    CHECK(base.trace->at(names::demand) == harsh.trace->at(names::demand));
    CHECK(base.trace->at(names::wind_production) ==
          harsh.trace->at(names::wind_production));
  }
  // Replications do differ.
  CHECK(table.rows[0].trace->at(names::demand) !=
        table.rows[1].trace->at(names::demand));
}

TEST_CASE("row streams match direct simulation") {
  const ModelInfo& info = find_model(names::model_id);
  const InstantiatedModel instantiated =
      info.instantiate(info.default_constants);

  ExperimentPlan plan;
  plan.model_id = names::model_id;
  Policy policy = policy_from_defaults(instantiated.model);
  policy.id = "default";
  plan.policies = {policy};
  Scenario scenario = default_scenario(instantiated.model);
  scenario.id = "default";
  plan.scenarios = {scenario};
  plan.replications = 1;
  plan.master_seed = 4521;

  const ResultsTable table = run_ensemble(plan, 1);
  REQUIRE(table.rows.size() == 1);
  REQUIRE(table.rows[0].ok);
  // Same value as simulate() under RandomStream(4521, 0, 0).
  CHECK(table.rows[0].objectives.at("wind_producer.daily_revenue") ==
        336740.90184923337);
}

TEST_CASE("robustness metrics on crafted values") {
  const ResultsTable table = crafted_table();
  const auto summary = robustness_summary(
      table, "p.value", {"mean", "std", "p10", "snr", "minimax_regret"});
  REQUIRE(summary.size() == 2);

  const auto& a = summary.at("a");
  CHECK(a.at("mean") == 15.0);                 // pooled {0,10,20,30}
  CHECK(a.at("std") == std::sqrt(125.0));      // population variance 125
  CHECK(a.at("p10") == 0.1 * 3.0 * 10.0);      // position 0.3 between 0 and 10
  CHECK(a.at("snr") == 15.0 / std::sqrt(125.0));
  // Scenario means: a {s0: 5, s1: 25}, b {s0: 10, s1: 10}; best {10, 25}.
  CHECK(a.at("minimax_regret") == 5.0);

  const auto& b = summary.at("b");
  CHECK(b.at("mean") == 10.0);
  CHECK(b.at("std") == 5.0);
  CHECK(b.at("p10") == 5.0);
  CHECK(b.at("snr") == 2.0);
  CHECK(b.at("minimax_regret") == 15.0);
}

TEST_CASE("snr is omitted only for the degenerate all-zero case") {
  ResultsTable table;
  table.objective_columns = {"p.value"};
  table.policy_ids = {"zero"};
  table.rows = {made_row("zero", "s0", 0.0), made_row("zero", "s0", 0.0)};
  const auto summary =
      robustness_summary(table, "p.value", {"mean", "std", "snr"});
  const auto& zero = summary.at("zero");
  CHECK(zero.at("mean") == 0.0);
  CHECK(zero.at("std") == 0.0);
  CHECK(zero.count("snr") == 0);
}

TEST_CASE("unknown objective and metric names are rejected") {
  const ResultsTable table = crafted_table();
  CHECK_THROWS_AS(robustness_summary(table, "p.missing", {"mean"}),
                  UnknownObjective);
  CHECK_THROWS_AS(robustness_summary(table, "p.value", {"median"}),
                  UnknownMetric);
}

TEST_CASE("failed rows are excluded from summaries") {
  ResultsTable table;
  table.objective_columns = {"p.value"};
  table.policy_ids = {"a", "doomed"};
  table.rows = {made_row("a", "s0", 10.0),
                made_row("a", "s0", 999.0, false),
                made_row("doomed", "s0", 999.0, false)};
  const auto summary = robustness_summary(table, "p.value", {"mean"});
  REQUIRE(summary.size() == 1);  // a policy with no surviving rows is absent
  CHECK(summary.at("a").at("mean") == 10.0);
}

TEST_CASE("series aggregation across rows") {
  auto with_trace = [](const std::string& policy,
                       std::vector<double> values) {
    ResultRow row = made_row(policy, "s0", 0.0);
    Trace trace;
    trace.series["s"] = std::move(values);
    row.trace = std::make_shared<const Trace>(std::move(trace));
    return row;
  };
  ResultsTable table;
  table.objective_columns = {"p.value"};
  table.policy_ids = {"a", "b"};
  table.rows = {with_trace("a", {1.0, 2.0, 3.0}),
                with_trace("a", {3.0, 4.0, 5.0}),
                with_trace("b", {0.0, 0.0, 0.0})};

  const auto aggregates = series_aggregate(table, "s");
  REQUIRE(aggregates.size() == 2);
  CHECK(aggregates.at("a").first == std::vector<double>{2.0, 3.0, 4.0});
  CHECK(aggregates.at("a").second == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(aggregates.at("b").first == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(aggregates.at("b").second == std::vector<double>{0.0, 0.0, 0.0});

  // A series the rows never recorded.
  CHECK_THROWS_AS(series_aggregate(table, "other"), SeriesNotRecorded);

  // Rows without traces cannot be aggregated.
  ResultsTable bare = crafted_table();
  CHECK_THROWS_AS(series_aggregate(bare, "s"), SeriesNotRecorded);

  // Length mismatches are a hard error, not silent truncation.
  table.rows.push_back(with_trace("a", {1.0, 2.0}));
  CHECK_THROWS_AS(series_aggregate(table, "s"), ModelError);
}

TEST_CASE("plan validation failures") {
  {
    ExperimentPlan plan = market_plan();
    plan.replications = 0;
    CHECK_THROWS_AS(run_ensemble(plan, 1), ConfigError);
  }
  {
    ExperimentPlan plan = market_plan();
    plan.policies.clear();
    CHECK_THROWS_AS(run_ensemble(plan, 1), ConfigError);
  }
  {
    ExperimentPlan plan = market_plan();
    plan.policies[1].id = plan.policies[0].id;
    CHECK_THROWS_AS(run_ensemble(plan, 1), ConfigError);
  }
  {
    ExperimentPlan plan = market_plan();
    plan.recorded_series = {"no_such_series"};
    CHECK_THROWS_AS(run_ensemble(plan, 1), SeriesNotRecorded);
  }
  {
    ExperimentPlan plan = market_plan();
    plan.scenarios.clear();  // explicit method with nothing to run
    CHECK_THROWS_AS(run_ensemble(plan, 1), ConfigError);
  }
  {
    ExperimentPlan plan = market_plan();
    plan.sampler.method = SamplerSpec::Method::MonteCarlo;
    plan.sampler.n = 4;  // but explicit scenarios are still present
    CHECK_THROWS_AS(run_ensemble(plan, 1), ConfigError);
  }
  {
    ExperimentPlan plan = market_plan();
    plan.model_id = "nope";
    CHECK_THROWS_AS(run_ensemble(plan, 1), UnknownModel);
  }
  {
    ExperimentPlan plan = market_plan();
    plan.constants["no_such_constant"] = 1.0;
    CHECK_THROWS_AS(run_ensemble(plan, 1), ConfigError);
  }
}

TEST_CASE("a bad policy binding flags rows instead of aborting") {
  ExperimentPlan plan = market_plan();
  plan.policies[0].set("imaginary_knob", 1.0);
  const ResultsTable table = run_ensemble(plan, 2);
  REQUIRE(table.rows.size() == 12);
  CHECK(table.failed_rows == 6);  // every row of the broken policy
  for (const ResultRow& row : table.rows) {
    if (row.policy_id == "base") {
      CHECK_FALSE(row.ok);
      CHECK_FALSE(row.error.empty());
      CHECK(row.objectives.empty());
    } else {
      CHECK(row.ok);
    }
  }
}

TEST_CASE("ensemble survives a model that fails every row") {
  ExperimentPlan plan = market_plan();
  plan.constants = {{names::demand_mean, 100000.0}, {names::demand_std, 0.0}};
  const ResultsTable table = run_ensemble(plan, 4);
  CHECK(table.failed_rows == table.rows.size());
  for (const ResultRow& row : table.rows)
    CHECK(row.error.find("cannot meet demand") != std::string::npos);
  // No policy survives, so the summary is empty rather than an error.
  CHECK(robustness_summary(table, "wind_producer.daily_revenue", {"mean"})
            .empty());
}

TEST_CASE("sampled scenario plans") {
  const ModelInfo& info = find_model(names::model_id);
  ExperimentPlan plan = market_plan();
  plan.scenarios.clear();
  plan.sampler.method = SamplerSpec::Method::MonteCarlo;
  plan.sampler.n = 5;
  plan.replications = 1;

  const ResultsTable table = run_ensemble(plan, 2);
  REQUIRE(table.scenarios.size() == 5);
  CHECK(table.rows.size() == 10);  // 2 policies x 5 scenarios
  CHECK(table.failed_rows == 0);
  for (std::size_t i = 0; i < table.scenarios.size(); ++i) {
    const Scenario& scenario = table.scenarios[i];
    CHECK(scenario.id == "mc_" + std::to_string(i));
    REQUIRE(scenario.bindings.size() == info.sampling_ranges.size());
    for (const SamplingRange& range : info.sampling_ranges) {
      const double value = scenario.at(range.name);
      CHECK(value > range.lo);
      CHECK(value < range.hi);
    }
  }

  // Same master seed, same realized scenarios, whatever the policies.
  ExperimentPlan other = plan;
  other.policies.resize(1);
  const ResultsTable again = run_ensemble(other, 1);
  REQUIRE(again.scenarios.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(again.scenarios[i].bindings == table.scenarios[i].bindings);

  // A different seed moves the sample.
  other.master_seed = 99;
  const ResultsTable moved = run_ensemble(other, 1);
  CHECK(moved.scenarios[0].bindings != table.scenarios[0].bindings);
}

TEST_CASE("latin hypercube plans stratify every dimension") {
  const ModelInfo& info = find_model(names::model_id);
  ExperimentPlan plan = market_plan();
  plan.scenarios.clear();
  plan.sampler.method = SamplerSpec::Method::LatinHypercube;
  plan.sampler.n = 8;
  plan.replications = 1;
  plan.policies.resize(1);

  const ResultsTable table = run_ensemble(plan, 2);
  REQUIRE(table.scenarios.size() == 8);
  CHECK(table.scenarios[0].id == "lhs_0");
  CHECK(table.scenarios[7].id == "lhs_7");
  for (const SamplingRange& range : info.sampling_ranges) {
    std::set<std::size_t> strata;
    for (const Scenario& scenario : table.scenarios) {
      const double unit =
          (scenario.at(range.name) - range.lo) / (range.hi - range.lo);
      strata.insert(static_cast<std::size_t>(unit * 8.0));
    }
    CHECK(strata.size() == 8);  // each stratum hit exactly once
  }
}
