#include "deepsim/model.hpp"

#include <algorithm>
#include <set>

namespace deepsim {

// ---- TraceBuilder ----

TraceBuilder::TraceBuilder(const std::vector<SeriesSpec>& specs, int horizon)
    : specs_(specs), horizon_(horizon) {
  for (const SeriesSpec& spec : specs_) {
    auto [it, inserted] = series_.try_emplace(spec.name);
    if (!inserted) throw DuplicateSymbol(spec.name);
    it->second.reserve(declared_length(spec));
  }
}

std::size_t TraceBuilder::declared_length(const SeriesSpec& spec) const {
  switch (spec.kind) {
    case SeriesKind::State:
      return static_cast<std::size_t>(horizon_) + 1;
    case SeriesKind::PerStep:
      return static_cast<std::size_t>(horizon_);
    case SeriesKind::Scalar:
      return 1;
  }
  return 0;
}

std::vector<double>& TraceBuilder::lookup(const std::string& name) {
  auto it = series_.find(name);
  if (it == series_.end()) throw SeriesNotRecorded(name);
  return it->second;
}

void TraceBuilder::push(const std::string& name, double value) {
  lookup(name).push_back(value);
}

void TraceBuilder::set_scalar(const std::string& name, double value) {
  std::vector<double>& values = lookup(name);
  values.assign(1, value);
}

double TraceBuilder::current(const std::string& name) const {
  auto it = series_.find(name);
  if (it == series_.end() || it->second.empty()) throw SeriesNotRecorded(name);
  return it->second.back();
}

Trace TraceBuilder::finish(std::string policy_id, std::string scenario_id,
                           const RandomStream& stream) const {
  for (const SeriesSpec& spec : specs_) {
    const std::size_t want = declared_length(spec);
    const std::size_t got = series_.at(spec.name).size();
    if (got != want)
      throw ModelError("series " + spec.name + " recorded " +
                       std::to_string(got) + " values, declared " +
                       std::to_string(want));
  }
  Trace trace;
  trace.series = series_;
  trace.policy_id = std::move(policy_id);
  trace.scenario_id = std::move(scenario_id);
  trace.master_seed = stream.master_seed();
  trace.scenario_index = stream.scenario_index();
  trace.replication_index = stream.replication_index();
  return trace;
}

// ---- ComposedModel accessors ----

const Perspective& ComposedModel::perspective(const std::string& id) const {
  for (const Perspective& p : perspectives)
    if (p.id == id) return p;
  throw UnknownPerspective(id);
}

std::vector<ParameterSpec> ComposedModel::all_decision_specs() const {
  std::vector<ParameterSpec> out;
  for (const Perspective& p : perspectives)
    out.insert(out.end(), p.decision_specs.begin(), p.decision_specs.end());
  return out;
}

const ParameterSpec* ComposedModel::find_parameter(
    const std::string& name) const {
  for (const ParameterSpec& spec : environment.uncertainty_specs)
    if (spec.name == name) return &spec;
  for (const ParameterSpec& spec : environment.constant_specs)
    if (spec.name == name) return &spec;
  for (const Perspective& p : perspectives)
    for (const ParameterSpec& spec : p.decision_specs)
      if (spec.name == name) return &spec;
  return nullptr;
}

// ---- compose ----

namespace {

void check_spec_wellformed(const ParameterSpec& spec) {
  if (spec.has_interval_domain()) {
    if (spec.lo > spec.hi)
      throw DomainViolation(spec.name, "interval domain has lo > hi");
    if (!spec.admits(spec.default_value))
      throw DomainViolation(spec.name, spec.default_value);
  } else if (!spec.admits(spec.default_value)) {
    throw DomainViolation(spec.name, spec.default_value);
  }
}

}  // namespace

ComposedModel compose(Environment environment,
                      std::vector<Perspective> perspectives) {
  // Decision names must be disjoint across perspectives.
  std::set<std::string> decisions;
  for (const Perspective& p : perspectives) {
    for (const ParameterSpec& spec : p.decision_specs) {
      if (spec.kind != ParamKind::Decision)
        throw DomainViolation(spec.name, "perspective parameter not a decision");
      if (!decisions.insert(spec.name).second)
        throw DuplicateDecisionName(spec.name);
      check_spec_wellformed(spec);
    }
  }

  // Parameters and series share one namespace.
  std::set<std::string> names = decisions;
  for (const ParameterSpec& spec : environment.uncertainty_specs) {
    if (spec.kind != ParamKind::DeepUncertain)
      throw DomainViolation(spec.name, "environment uncertainty spec has wrong kind");
    if (!names.insert(spec.name).second) throw DuplicateSymbol(spec.name);
    check_spec_wellformed(spec);
  }
  for (const ParameterSpec& spec : environment.constant_specs) {
    if (spec.kind != ParamKind::Constant)
      throw DomainViolation(spec.name, "environment constant spec has wrong kind");
    if (!names.insert(spec.name).second) throw DuplicateSymbol(spec.name);
    check_spec_wellformed(spec);
  }
  std::set<std::string> series_names;
  for (const SeriesSpec& spec : environment.series_specs) {
    if (!series_names.insert(spec.name).second) throw DuplicateSymbol(spec.name);
    if (names.count(spec.name)) throw DuplicateSymbol(spec.name);
  }

  // Objective names may repeat across perspectives (shared objectives) but
  // may not shadow a parameter or series.
  std::set<std::string> objective_names;
  for (const Perspective& p : perspectives)
    for (const std::string& name : p.objective_names) {
      if (names.count(name) || series_names.count(name))
        throw DuplicateSymbol(name);
      objective_names.insert(name);
    }

  if (environment.horizon < 1)
    throw ConfigError("model horizon must be >= 1");

  // Self-audit: every name the model claims to expose resolves to exactly
  // one declared element, in the stated category.
  for (const AuditEntry& entry : environment.audit_manifest) {
    const int hits = static_cast<int>(names.count(entry.name)) +
                     static_cast<int>(series_names.count(entry.name)) +
                     static_cast<int>(objective_names.count(entry.name));
    if (hits != 1) throw UnresolvedSymbol(entry.name);
    const bool placed_right =
        (entry.category == SymbolCategory::Parameter && names.count(entry.name)) ||
        (entry.category == SymbolCategory::Series &&
         series_names.count(entry.name)) ||
        (entry.category == SymbolCategory::Objective &&
         objective_names.count(entry.name));
    if (!placed_right) throw UnresolvedSymbol(entry.name);
  }

  ComposedModel model;
  model.environment = std::move(environment);
  model.perspectives = std::move(perspectives);
  return model;
}

// ---- validation ----

namespace {

void check_in_domain(const ParameterSpec& spec, double value) {
  if (!spec.admits(value)) throw DomainViolation(spec.name, value);
}

void validate_policy(const ComposedModel& model, const Policy& policy) {
  const std::vector<ParameterSpec> specs = model.all_decision_specs();
  for (const ParameterSpec& spec : specs) {
    auto it = policy.bindings.find(spec.name);
    if (it == policy.bindings.end()) throw MissingBinding(spec.name);
    const std::vector<double>& seq = it->second;
    if (spec.per_timestep) {
      // Scalars broadcast; explicit sequences must span the horizon.
      if (seq.size() != 1 &&
          seq.size() != static_cast<std::size_t>(model.horizon()))
        throw DomainViolation(
            spec.name, "sequence length " + std::to_string(seq.size()) +
                           " does not match horizon " +
                           std::to_string(model.horizon()));
    } else if (seq.size() != 1) {
      throw DomainViolation(spec.name, "expected a scalar, got a sequence");
    }
    for (double value : seq) check_in_domain(spec, value);
  }
  for (const auto& [name, values] : policy.bindings) {
    (void)values;
    bool known = false;
    for (const ParameterSpec& spec : specs)
      if (spec.name == name) known = true;
    if (!known) throw UnresolvedSymbol(name);
  }
}

void validate_scenario(const ComposedModel& model, const Scenario& scenario) {
  for (const ParameterSpec& spec : model.environment.uncertainty_specs) {
    auto it = scenario.bindings.find(spec.name);
    if (it == scenario.bindings.end()) throw MissingBinding(spec.name);
    check_in_domain(spec, it->second);
  }
  for (const auto& [name, value] : scenario.bindings) {
    (void)value;
    bool known = false;
    for (const ParameterSpec& spec : model.environment.uncertainty_specs)
      if (spec.name == name) known = true;
    if (!known) throw UnresolvedSymbol(name);
  }
}

void validate_constants(const ComposedModel& model, const Constants& constants) {
  for (const ParameterSpec& spec : model.environment.constant_specs) {
    auto it = constants.find(spec.name);
    if (it == constants.end()) throw MissingBinding(spec.name);
    check_in_domain(spec, it->second);
  }
  for (const auto& [name, value] : constants) {
    (void)value;
    bool known = false;
    for (const ParameterSpec& spec : model.environment.constant_specs)
      if (spec.name == name) known = true;
    if (!known) throw UnresolvedSymbol(name);
  }
}

}  // namespace

void validate_inputs(const ComposedModel& model, const Policy& policy,
                     const Scenario& scenario, const Constants& constants) {
  validate_policy(model, policy);
  validate_scenario(model, scenario);
  validate_constants(model, constants);
}

// ---- simulate / evaluate_perspective ----

std::pair<Trace, ObjectiveResult> simulate(const ComposedModel& model,
                                           const Policy& policy,
                                           const Scenario& scenario,
                                           const Constants& constants,
                                           RandomStream stream) {
  validate_inputs(model, policy, scenario, constants);

  TraceBuilder builder(model.environment.series_specs, model.horizon());
  const InitContext init_ctx{policy, scenario, constants};
  if (model.environment.init) model.environment.init(builder, init_ctx);
  for (int t = 0; t < model.horizon(); ++t) {
    const StepContext ctx{t, policy, scenario, constants, stream};
    model.environment.transition(builder, ctx);
  }
  Trace trace = builder.finish(policy.id, scenario.id, stream);

  ObjectiveResult result;
  for (const Perspective& p : model.perspectives) {
    std::map<std::string, double> values =
        p.objective_evaluator(trace, policy, scenario, constants);
    for (const std::string& name : p.objective_names)
      if (!values.count(name))
        throw ModelError("perspective " + p.id +
                         " did not report objective " + name);
    result.by_perspective[p.id] = std::move(values);
  }
  return {std::move(trace), std::move(result)};
}

std::map<std::string, double> evaluate_perspective(
    const ComposedModel& model, const std::string& perspective_id,
    const Policy& own_policy_part, const Policy& exogenous_policy_part,
    const Scenario& scenario, const Constants& constants, RandomStream stream) {
  model.perspective(perspective_id);  // UnknownPerspective before any work

  Policy merged = exogenous_policy_part;
  merged.id = own_policy_part.id.empty() ? exogenous_policy_part.id
                                         : own_policy_part.id;
  for (const auto& [name, seq] : own_policy_part.bindings)
    merged.bindings[name] = seq;

  auto [trace, result] = simulate(model, merged, scenario, constants, stream);
  (void)trace;
  return result.of(perspective_id);
}

}  // namespace deepsim
