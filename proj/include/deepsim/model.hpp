#pragma once
// Multi-perspective model composition. An Environment owns the shared
// dynamics (horizon, transition, declared series, non-decision parameters);
// each Perspective owns its decision variables and objective evaluators.
// compose() welds them into a ComposedModel after checking that decision
// names are disjoint and that every name the model claims to need resolves
// to exactly one declared element. simulate() is the single entry contract:
// run the dynamics, then hand every perspective the finished trace and
// report each declared objective. evaluate_perspective() runs the same
// simulation with one perspective's decisions split out from the others',
// so a stakeholder can be evaluated with everyone else's choices treated as
// fixed exogenous inputs; it never changes any number.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "deepsim/random.hpp"
#include "deepsim/types.hpp"

namespace deepsim {

// Collects series values during a run and enforces the declared lengths.
class TraceBuilder {
 public:
  TraceBuilder(const std::vector<SeriesSpec>& specs, int horizon);

  void push(const std::string& name, double value);
  void set_scalar(const std::string& name, double value);

  // Latest value of a state series (the current state).
  double current(const std::string& name) const;

  // Verifies every declared series has its full declared length.
  Trace finish(std::string policy_id, std::string scenario_id,
               const RandomStream& stream) const;

 private:
  const std::vector<SeriesSpec>& specs_;
  int horizon_;
  std::map<std::string, std::vector<double>> series_;

  std::vector<double>& lookup(const std::string& name);
  std::size_t declared_length(const SeriesSpec& spec) const;
};

struct StepContext {
  int t;  // 0-based step index; models with 1-based conventions shift locally
  const Policy& policy;
  const Scenario& scenario;
  const Constants& constants;
  RandomStream& stream;
};

struct InitContext {
  const Policy& policy;
  const Scenario& scenario;
  const Constants& constants;
};

using InitFn = std::function<void(TraceBuilder&, const InitContext&)>;
using TransitionFn = std::function<void(TraceBuilder&, const StepContext&)>;
using ObjectiveEvaluator = std::function<std::map<std::string, double>(
    const Trace&, const Policy&, const Scenario&, const Constants&)>;

struct Perspective {
  std::string id;
  std::vector<ParameterSpec> decision_specs;
  std::vector<std::string> objective_names;
  ObjectiveEvaluator objective_evaluator;
};

// Where an audited name must be declared.
enum class SymbolCategory { Parameter, Series, Objective };

struct AuditEntry {
  std::string name;
  SymbolCategory category;
};

struct Environment {
  std::string model_id;
  int horizon = 1;
  std::vector<ParameterSpec> uncertainty_specs;  // kind DeepUncertain
  std::vector<ParameterSpec> constant_specs;     // kind Constant
  std::vector<SeriesSpec> series_specs;
  InitFn init;
  TransitionFn transition;
  // Names the model is required to expose, checked by the construction-time
  // self-audit: each must resolve to exactly one declared parameter, series,
  // or objective, in the stated category.
  std::vector<AuditEntry> audit_manifest;
};

struct ComposedModel {
  Environment environment;
  std::vector<Perspective> perspectives;

  int horizon() const { return environment.horizon; }
  const std::string& id() const { return environment.model_id; }

  const Perspective& perspective(const std::string& id) const;
  std::vector<ParameterSpec> all_decision_specs() const;
  const ParameterSpec* find_parameter(const std::string& name) const;
};

// Checks decision-name disjointness, global name uniqueness (parameters and
// series share one namespace; objective names may repeat across perspectives
// but may not shadow a parameter or series), and the audit manifest.
ComposedModel compose(Environment environment,
                      std::vector<Perspective> perspectives);

// Full validation of one run's inputs against the declared specs: exact
// coverage (no missing names, no unknown extras), domain membership, and
// per-timestep sequence lengths.
void validate_inputs(const ComposedModel& model, const Policy& policy,
                     const Scenario& scenario, const Constants& constants);

std::pair<Trace, ObjectiveResult> simulate(const ComposedModel& model,
                                           const Policy& policy,
                                           const Scenario& scenario,
                                           const Constants& constants,
                                           RandomStream stream);

// Merge own and exogenous decision bindings (own wins on overlap), run the
// full simulation, and return the named perspective's objective values.
std::map<std::string, double> evaluate_perspective(
    const ComposedModel& model, const std::string& perspective_id,
    const Policy& own_policy_part, const Policy& exogenous_policy_part,
    const Scenario& scenario, const Constants& constants, RandomStream stream);

}  // namespace deepsim
