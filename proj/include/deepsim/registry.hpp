#pragma once
// Model registry: the CLI and the ensemble runner address models by id and
// need uniform access to defaults (constants, policies, scenarios, sampling
// ranges, output series) without knowing each model's construction details.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "deepsim/model.hpp"
#include "deepsim/sampling.hpp"

namespace deepsim {

struct InstantiatedModel {
  ComposedModel model;
  // What simulate() needs; excludes construction-only entries like "horizon".
  Constants runtime_constants;
};

struct ModelInfo {
  std::string id;
  // User-facing constants with defaults; overrides outside this set are
  // rejected (fail-closed).
  Constants default_constants;
  std::function<InstantiatedModel(const Constants& resolved)> instantiate;
  // Default sweep ranges for the deep uncertainties. May be narrower than
  // the validation domains; documented as artifact defaults.
  std::vector<SamplingRange> sampling_ranges;
  std::vector<std::string> default_output_series;
  // Baseline policy: every decision at its declared default, except inputs
  // frozen from the master seed (the lake's emission sequence).
  std::function<Policy(const ComposedModel&, std::uint64_t master_seed)>
      default_policy;
};

const std::vector<ModelInfo>& model_registry();

// Throws UnknownModel naming the valid ids.
const ModelInfo& find_model(const std::string& id);

// Defaults overlaid with overrides; unknown override names are errors.
Constants resolve_constants(const ModelInfo& info, const Constants& overrides);

// Scenario binding every deep uncertainty to its declared default.
Scenario default_scenario(const ComposedModel& model);

// Policy binding every decision to its declared default (scalars).
Policy policy_from_defaults(const ComposedModel& model);

}  // namespace deepsim
