#include "deepsim/lake.hpp"

#include <cmath>

namespace deepsim {

double recycling(double pollution, double recycling_exponent) {
  const double powered = std::pow(pollution, recycling_exponent);
  return powered / (1.0 + powered);
}

double lake_step(double pollution, double emission, double removal,
                 double removal_rate, double recycling_exponent,
                 double inflow) {
  const double next = pollution + (emission - removal) +
                      recycling(pollution, recycling_exponent) -
                      removal_rate * pollution + inflow;
  return next < 0.0 ? 0.0 : next;
}

namespace {

// recycling(x) - removal_rate * x; negative just above 0, positive between
// the two equilibria when they exist.
double equilibrium_gap(double x, double removal_rate,
                       double recycling_exponent) {
  return recycling(x, recycling_exponent) - removal_rate * x;
}

// First sign change of the gap on a uniform grid over (0, scan_limit].
// Returns false when the gap stays negative at this resolution.
bool bracket_root(double removal_rate, double recycling_exponent,
                  double scan_limit, int cells, double* lo, double* hi) {
  double prev_x = 0.0;
  double prev_gap = 0.0;  // gap(0) == 0; treated as the negative side
  for (int i = 1; i <= cells; ++i) {
    const double x = scan_limit * i / cells;
    const double gap = equilibrium_gap(x, removal_rate, recycling_exponent);
    if (prev_gap < 0.0 && gap >= 0.0) {
      *lo = prev_x;
      *hi = x;
      return true;
    }
    prev_x = x;
    prev_gap = gap;
  }
  return false;
}

}  // namespace

double critical_threshold(double removal_rate, double recycling_exponent) {
  // Any root satisfies removal_rate * x = recycling(x) < 1.
  const double scan_limit = 1.0 / removal_rate;
  double lo = 0.0;
  double hi = 0.0;
  if (!bracket_root(removal_rate, recycling_exponent, scan_limit, 4096, &lo,
                    &hi) &&
      !bracket_root(removal_rate, recycling_exponent, scan_limit, 262144, &lo,
                    &hi))
    throw NoPositiveRoot(removal_rate, recycling_exponent);

  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (equilibrium_gap(mid, removal_rate, recycling_exponent) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double economic_benefit(const std::vector<double>& emissions,
                        double benefit_rate, double discount_factor) {
  double total = 0.0;
  double discount = 1.0;
  for (double emission : emissions) {
    total += benefit_rate * emission * discount;
    discount *= discount_factor;
  }
  return total;
}

double reliability(const std::vector<double>& pollution_series,
                   double threshold) {
  if (pollution_series.size() < 2) return 1.0;
  const std::size_t steps = pollution_series.size() - 1;
  std::size_t below = 0;
  for (std::size_t t = 1; t <= steps; ++t)
    if (pollution_series[t] < threshold) ++below;
  return static_cast<double>(below) / static_cast<double>(steps);
}

std::vector<double> frozen_emission_sequence(std::uint64_t master_seed,
                                             int horizon, double lo,
                                             double hi) {
  RandomStream stream(master_seed, aux_stream_frozen_inputs,
                      aux_replication_index);
  std::vector<double> sequence(static_cast<std::size_t>(horizon));
  for (double& value : sequence)
    value = lo + (hi - lo) * stream.next_uniform();
  return sequence;
}

ComposedModel build_lake_model(const LakeConstants& constants) {
  namespace names = lake_names;
  if (constants.horizon < 1) throw ConfigError("lake horizon must be >= 1");
  if (constants.benefit_rate < 0.0)
    throw ConfigError("benefit rate must be >= 0");
  if (constants.initial_pollution < 0.0)
    throw ConfigError("initial pollution must be >= 0");

  Environment env;
  env.model_id = names::model_id;
  env.horizon = constants.horizon;
  env.uncertainty_specs = {
      {names::removal_rate, ParamKind::DeepUncertain, 1e-6, 0.999999, {}, 0.42,
       false},
      {names::recycling_exponent, ParamKind::DeepUncertain, 1.0, 10.0, {}, 2.0,
       false},
      {names::inflow_mean, ParamKind::DeepUncertain, 1e-9, 1.0, {}, 0.02,
       false},
      {names::inflow_std, ParamKind::DeepUncertain, 0.0, 1.0, {}, 0.0017,
       false},
      {names::discount_factor, ParamKind::DeepUncertain, 1e-6, 1.0, {}, 0.98,
       false},
  };
  env.constant_specs = {
      {names::benefit_rate, ParamKind::Constant, 0.0, 100.0, {},
       constants.benefit_rate, false},
      {names::initial_pollution, ParamKind::Constant, 0.0, 100.0, {},
       constants.initial_pollution, false},
  };
  env.series_specs = {
      {names::pollution, SeriesKind::State},
      {names::inflow, SeriesKind::PerStep},
      {names::critical_threshold, SeriesKind::Scalar},
  };
  env.init = [](TraceBuilder& trace, const InitContext& ctx) {
    trace.push(lake_names::pollution,
               constant_at(ctx.constants, lake_names::initial_pollution));
    trace.set_scalar(
        lake_names::critical_threshold,
        critical_threshold(ctx.scenario.at(lake_names::removal_rate),
                           ctx.scenario.at(lake_names::recycling_exponent)));
  };
  env.transition = [](TraceBuilder& trace, const StepContext& ctx) {
    const LogNormalSpec inflow_spec{ctx.scenario.at(lake_names::inflow_mean),
                                    ctx.scenario.at(lake_names::inflow_std)};
    const double inflow = sample_lognormal(ctx.stream, inflow_spec);
    const double next = lake_step(
        trace.current(lake_names::pollution),
        ctx.policy.at(lake_names::emission, static_cast<std::size_t>(ctx.t)),
        ctx.policy.at(lake_names::removal, static_cast<std::size_t>(ctx.t)),
        ctx.scenario.at(lake_names::removal_rate),
        ctx.scenario.at(lake_names::recycling_exponent), inflow);
    trace.push(lake_names::inflow, inflow);
    trace.push(lake_names::pollution, next);
  };
  env.audit_manifest = {
      {names::pollution, SymbolCategory::Series},
      {names::inflow, SymbolCategory::Series},
      {names::critical_threshold, SymbolCategory::Series},
      {names::emission, SymbolCategory::Parameter},
      {names::removal, SymbolCategory::Parameter},
      {names::removal_rate, SymbolCategory::Parameter},
      {names::recycling_exponent, SymbolCategory::Parameter},
      {names::inflow_mean, SymbolCategory::Parameter},
      {names::inflow_std, SymbolCategory::Parameter},
      {names::discount_factor, SymbolCategory::Parameter},
      {names::benefit_rate, SymbolCategory::Parameter},
      {names::initial_pollution, SymbolCategory::Parameter},
      {names::economic_benefit_name, SymbolCategory::Objective},
      {names::reliability_name, SymbolCategory::Objective},
      {names::total_removal, SymbolCategory::Objective},
  };

  const int horizon = constants.horizon;
  const auto per_step_values = [horizon](const Policy& policy,
                                         const char* name) {
    std::vector<double> values(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t)
      values[static_cast<std::size_t>(t)] =
          policy.at(name, static_cast<std::size_t>(t));
    return values;
  };

  Perspective community;
  community.id = names::community;
  community.decision_specs = {
      {names::emission, ParamKind::Decision, 0.0, 1.0, {}, 0.03, true},
  };
  community.objective_names = {names::economic_benefit_name,
                               names::reliability_name};
  community.objective_evaluator =
      [per_step_values](const Trace& trace, const Policy& policy,
                        const Scenario& scenario, const Constants& constants) {
        std::map<std::string, double> values;
        values[lake_names::economic_benefit_name] = economic_benefit(
            per_step_values(policy, lake_names::emission),
            constant_at(constants, lake_names::benefit_rate),
            scenario.at(lake_names::discount_factor));
        values[lake_names::reliability_name] =
            reliability(trace.at(lake_names::pollution),
                        trace.scalar(lake_names::critical_threshold));
        return values;
      };

  Perspective regulator;
  regulator.id = names::regulator;
  regulator.decision_specs = {
      {names::removal, ParamKind::Decision, 0.0, 1.0, {}, 0.0, true},
  };
  regulator.objective_names = {names::reliability_name, names::total_removal};
  regulator.objective_evaluator =
      [per_step_values](const Trace& trace, const Policy& policy,
                        const Scenario& scenario, const Constants& constants) {
        (void)scenario;
        (void)constants;
        std::map<std::string, double> values;
        values[lake_names::reliability_name] =
            reliability(trace.at(lake_names::pollution),
                        trace.scalar(lake_names::critical_threshold));
        double total = 0.0;
        for (double removal : per_step_values(policy, lake_names::removal))
          total += removal;
        values[lake_names::total_removal] = total;
        return values;
      };

  return compose(std::move(env), {std::move(community), std::move(regulator)});
}

}  // namespace deepsim
