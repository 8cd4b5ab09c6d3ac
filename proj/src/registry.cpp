#include "deepsim/registry.hpp"

#include <cmath>

#include "deepsim/lake.hpp"
#include "deepsim/market.hpp"

namespace deepsim {

namespace {

int horizon_from(const Constants& resolved) {
  const double value = constant_at(resolved, "horizon");
  if (value < 1.0 || value != std::floor(value))
    throw ConfigError("horizon must be a positive integer, got " +
                      std::to_string(value));
  return static_cast<int>(value);
}

InstantiatedModel instantiate_lake(const Constants& resolved) {
  LakeConstants constants;
  constants.benefit_rate = constant_at(resolved, lake_names::benefit_rate);
  constants.initial_pollution =
      constant_at(resolved, lake_names::initial_pollution);
  constants.horizon = horizon_from(resolved);
  Constants runtime = resolved;
  runtime.erase("horizon");
  return {build_lake_model(constants), std::move(runtime)};
}

InstantiatedModel instantiate_market(const Constants& resolved) {
  MarketConstants constants;
  constants.demand_mean = constant_at(resolved, market_names::demand_mean);
  constants.demand_std = constant_at(resolved, market_names::demand_std);
  constants.conv_quantity[0] =
      constant_at(resolved, market_names::conv_quantity_1);
  constants.conv_quantity[1] =
      constant_at(resolved, market_names::conv_quantity_2);
  constants.conv_quantity[2] =
      constant_at(resolved, market_names::conv_quantity_3);
  constants.solar_base = constant_at(resolved, market_names::solar_base);
  constants.solar_amplitude =
      constant_at(resolved, market_names::solar_amplitude);
  constants.production_mean =
      constant_at(resolved, market_names::production_mean);
  constants.production_std = constant_at(resolved, market_names::production_std);
  constants.penalty_default = constant_at(resolved, "penalty_default");
  Constants runtime = resolved;
  runtime.erase("penalty_default");
  return {build_market_model(constants), std::move(runtime)};
}

Policy lake_default_policy(const ComposedModel& model,
                           std::uint64_t master_seed) {
  Policy policy = policy_from_defaults(model);
  policy.set(lake_names::emission,
             frozen_emission_sequence(master_seed, model.horizon()));
  return policy;
}

Policy market_default_policy(const ComposedModel& model, std::uint64_t) {
  return policy_from_defaults(model);
}

std::vector<ModelInfo> build_registry() {
  std::vector<ModelInfo> registry;

  ModelInfo lake;
  lake.id = lake_names::model_id;
  lake.default_constants = {{lake_names::benefit_rate, 0.4},
                            {lake_names::initial_pollution, 0.0},
                            {"horizon", 100.0}};
  lake.instantiate = instantiate_lake;
  lake.sampling_ranges = {{lake_names::removal_rate, 0.1, 0.45},
                          {lake_names::recycling_exponent, 2.0, 4.5},
                          {lake_names::inflow_mean, 0.01, 0.05},
                          {lake_names::inflow_std, 0.001, 0.005},
                          {lake_names::discount_factor, 0.93, 0.99}};
  lake.default_output_series = {lake_names::pollution};
  lake.default_policy = lake_default_policy;
  registry.push_back(std::move(lake));

  ModelInfo market;
  market.id = market_names::model_id;
  market.default_constants = {{market_names::demand_mean, 800.0},
                              {market_names::demand_std, 200.0},
                              {market_names::conv_quantity_1, 300.0},
                              {market_names::conv_quantity_2, 250.0},
                              {market_names::conv_quantity_3, 1000.0},
                              {market_names::solar_base, 0.0},
                              {market_names::solar_amplitude, -400.0},
                              {market_names::production_mean, 300.0},
                              {market_names::production_std, 100.0},
                              {"penalty_default", 0.0}};
  market.instantiate = instantiate_market;
  // Half-to-one-and-a-half bands around the default price moments.
  market.sampling_ranges = {{market_names::conv_price_mean_1, 22.5, 67.5},
                            {market_names::conv_price_mean_2, 25.0, 75.0},
                            {market_names::conv_price_mean_3, 30.0, 90.0},
                            {market_names::conv_price_std_1, 2.5, 7.5},
                            {market_names::conv_price_std_2, 2.5, 7.5},
                            {market_names::conv_price_std_3, 2.5, 7.5},
                            {market_names::solar_price_mean, 17.5, 52.5},
                            {market_names::solar_price_std, 5.0, 15.0}};
  market.default_output_series = {market_names::clearing_price,
                                  market_names::wind_dispatched,
                                  market_names::wind_revenue};
  market.default_policy = market_default_policy;
  registry.push_back(std::move(market));

  return registry;
}

}  // namespace

const std::vector<ModelInfo>& model_registry() {
  static const std::vector<ModelInfo> registry = build_registry();
  return registry;
}

const ModelInfo& find_model(const std::string& id) {
  const std::vector<ModelInfo>& registry = model_registry();
  for (const ModelInfo& info : registry)
    if (info.id == id) return info;
  std::string valid;
  for (const ModelInfo& info : registry) {
    if (!valid.empty()) valid += ", ";
    valid += info.id;
  }
  throw UnknownModel(id, valid);
}

Constants resolve_constants(const ModelInfo& info, const Constants& overrides) {
  Constants resolved = info.default_constants;
  for (const auto& [name, value] : overrides) {
    auto it = resolved.find(name);
    if (it == resolved.end())
      throw ConfigError("unknown constant for model " + info.id + ": " + name);
    it->second = value;
  }
  return resolved;
}

Scenario default_scenario(const ComposedModel& model) {
  Scenario scenario;
  scenario.id = "default";
  for (const ParameterSpec& spec : model.environment.uncertainty_specs)
    scenario.bindings[spec.name] = spec.default_value;
  return scenario;
}

Policy policy_from_defaults(const ComposedModel& model) {
  Policy policy;
  policy.id = "default";
  for (const ParameterSpec& spec : model.all_decision_specs())
    policy.set(spec.name, spec.default_value);
  return policy;
}

}  // namespace deepsim
