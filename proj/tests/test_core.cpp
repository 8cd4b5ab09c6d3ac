#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "deepsim/model.hpp"

using namespace deepsim;

namespace {

// Small two-perspective model: perspective "planner" owns the per-step
// decision "push", perspective "scaler" owns the scalar decision "gain".
// state_{t+1} = state_t + push_t * drift + gain * u_t with u_t uniform.
Environment test_environment(int horizon = 3) {
  Environment env;
  env.model_id = "toy";
  env.horizon = horizon;
  env.uncertainty_specs = {
      {"drift", ParamKind::DeepUncertain, 0.0, 10.0, {}, 1.0, false}};
  env.constant_specs = {
      {"offset", ParamKind::Constant, -10.0, 10.0, {}, 2.0, false}};
  env.series_specs = {{"state", SeriesKind::State},
                      {"flow", SeriesKind::PerStep},
                      {"offset_used", SeriesKind::Scalar}};
  env.init = [](TraceBuilder& trace, const InitContext& ctx) {
    trace.push("state", constant_at(ctx.constants, "offset"));
    trace.set_scalar("offset_used", constant_at(ctx.constants, "offset"));
  };
  env.transition = [](TraceBuilder& trace, const StepContext& ctx) {
    const double push = ctx.policy.at("push", ctx.t);
    const double gain = ctx.policy.scalar("gain");
    const double flow = push * ctx.scenario.at("drift") +
                        gain * ctx.stream.next_uniform();
    trace.push("flow", flow);
    trace.push("state", trace.current("state") + flow);
  };
  env.audit_manifest = {{"drift", SymbolCategory::Parameter},
                        {"push", SymbolCategory::Parameter},
                        {"state", SymbolCategory::Series},
                        {"throughput", SymbolCategory::Objective},
                        {"final_state", SymbolCategory::Objective}};
  return env;
}

std::vector<Perspective> test_perspectives() {
  Perspective planner;
  planner.id = "planner";
  planner.decision_specs = {
      {"push", ParamKind::Decision, 0.0, 5.0, {}, 1.0, true}};
  planner.objective_names = {"throughput"};
  planner.objective_evaluator = [](const Trace& trace, const Policy&,
                                   const Scenario&, const Constants&) {
    double total = 0.0;
    for (double f : trace.at("flow")) total += f;
    return std::map<std::string, double>{{"throughput", total}};
  };

  Perspective scaler;
  scaler.id = "scaler";
  scaler.decision_specs = {
      {"gain", ParamKind::Decision, 0.0, 5.0, {}, 2.0, false}};
  // Shares the objective name "throughput" with planner on purpose.
  scaler.objective_names = {"final_state", "throughput"};
  scaler.objective_evaluator = [](const Trace& trace, const Policy&,
                                  const Scenario&, const Constants&) {
    const auto& state = trace.at("state");
    double total = 0.0;
    for (double f : trace.at("flow")) total += f;
    return std::map<std::string, double>{{"final_state", state.back()},
                                         {"throughput", total}};
  };
  return {planner, scaler};
}

Policy test_policy() {
  Policy policy;
  policy.id = "p";
  policy.set("push", std::vector<double>{1.0, 2.0, 3.0});
  policy.set("gain", 0.5);
  return policy;
}

Scenario test_scenario() {
  Scenario scenario;
  scenario.id = "s";
  scenario.bindings = {{"drift", 2.0}};
  return scenario;
}

Constants test_constants() { return {{"offset", 2.0}}; }

}  // namespace

TEST_CASE("composition and simulation of a well-formed model") {
  const ComposedModel model =
      compose(test_environment(), test_perspectives());
  CHECK(model.horizon() == 3);
  CHECK(model.id() == "toy");
  CHECK(model.all_decision_specs().size() == 2);
  REQUIRE(model.find_parameter("drift") != nullptr);
  CHECK(model.find_parameter("drift")->kind == ParamKind::DeepUncertain);
  CHECK(model.find_parameter("missing") == nullptr);

  auto [trace, result] = simulate(model, test_policy(), test_scenario(),
                                  test_constants(), RandomStream(1, 0, 0));
  CHECK(trace.at("state").size() == 4);
  CHECK(trace.at("flow").size() == 3);
  CHECK(trace.scalar("offset_used") == 2.0);
  CHECK(trace.at("state").front() == 2.0);

  // flow_t = push_t * drift + gain * u_t with u_t in (0, 1).
  const auto& flow = trace.at("flow");
  for (int t = 0; t < 3; ++t) {
    const double base = (t + 1.0) * 2.0;
    CHECK(flow[t] > base);
    CHECK(flow[t] < base + 0.5);
  }
  const double throughput = flow[0] + flow[1] + flow[2];
  CHECK(result.of("planner").at("throughput") == throughput);
  CHECK(result.of("scaler").at("throughput") == throughput);
  CHECK(result.of("scaler").at("final_state") ==
        trace.at("state").back());

  const auto flat = result.flat();
  CHECK(flat.at("planner.throughput") == throughput);
  CHECK(flat.at("scaler.final_state") == trace.at("state").back());
}

TEST_CASE("simulation is deterministic in the stream key") {
  const ComposedModel model =
      compose(test_environment(), test_perspectives());
  auto [trace_a, result_a] =
      simulate(model, test_policy(), test_scenario(), test_constants(),
               RandomStream(42, 3, 5));
  auto [trace_b, result_b] =
      simulate(model, test_policy(), test_scenario(), test_constants(),
               RandomStream(42, 3, 5));
  CHECK(trace_a.series == trace_b.series);
  CHECK(result_a.flat() == result_b.flat());

  auto [trace_c, result_c] =
      simulate(model, test_policy(), test_scenario(), test_constants(),
               RandomStream(42, 3, 6));
  CHECK(trace_a.at("flow") != trace_c.at("flow"));
}

TEST_CASE("composition rejects malformed structures") {
  // Duplicate decision name across perspectives.
  {
    auto perspectives = test_perspectives();
    perspectives[1].decision_specs[0].name = "push";
    CHECK_THROWS_AS(compose(test_environment(), perspectives),
                    DuplicateDecisionName);
  }
  // Perspective parameter must have Decision kind.
  {
    auto perspectives = test_perspectives();
    perspectives[0].decision_specs[0].kind = ParamKind::Constant;
    CHECK_THROWS_AS(compose(test_environment(), perspectives),
                    DomainViolation);
  }
  // A series may not reuse a parameter name.
  {
    auto env = test_environment();
    env.series_specs.push_back({"drift", SeriesKind::PerStep});
    CHECK_THROWS_AS(compose(env, test_perspectives()), DuplicateSymbol);
  }
  // A decision may not reuse an uncertainty name.
  {
    auto perspectives = test_perspectives();
    perspectives[0].decision_specs[0].name = "drift";
    auto env = test_environment();
    env.audit_manifest.clear();
    CHECK_THROWS_AS(compose(env, perspectives), DuplicateSymbol);
  }
  // An objective may not shadow a series.
  {
    auto perspectives = test_perspectives();
    perspectives[0].objective_names = {"state"};
    CHECK_THROWS_AS(compose(test_environment(), perspectives),
                    DuplicateSymbol);
  }
  // Horizon must be positive.
  {
    auto env = test_environment();
    env.horizon = 0;
    CHECK_THROWS_AS(compose(env, test_perspectives()), ConfigError);
  }
  // Default values must be inside the declared domain.
  {
    auto env = test_environment();
    env.uncertainty_specs[0].default_value = 11.0;
    CHECK_THROWS_AS(compose(env, test_perspectives()), DomainViolation);
  }
}

TEST_CASE("the audit manifest is enforced at composition") {
  // Unknown name.
  {
    auto env = test_environment();
    env.audit_manifest.push_back({"ghost", SymbolCategory::Parameter});
    CHECK_THROWS_AS(compose(env, test_perspectives()), UnresolvedSymbol);
  }
  // Right name, wrong category.
  {
    auto env = test_environment();
    env.audit_manifest.push_back({"state", SymbolCategory::Parameter});
    CHECK_THROWS_AS(compose(env, test_perspectives()), UnresolvedSymbol);
  }
  {
    auto env = test_environment();
    env.audit_manifest.push_back({"throughput", SymbolCategory::Series});
    CHECK_THROWS_AS(compose(env, test_perspectives()), UnresolvedSymbol);
  }
  // Objectives shared across perspectives still audit as one objective.
  {
    auto env = test_environment();
    env.audit_manifest.push_back({"final_state", SymbolCategory::Objective});
    CHECK_NOTHROW(compose(env, test_perspectives()));
  }
}

TEST_CASE("input validation covers both directions") {
  const ComposedModel model =
      compose(test_environment(), test_perspectives());
  const auto run = [&](const Policy& policy, const Scenario& scenario,
                       const Constants& constants) {
    return simulate(model, policy, scenario, constants,
                    RandomStream(1, 0, 0));
  };

  // Missing decision binding.
  {
    Policy policy = test_policy();
    policy.bindings.erase("gain");
    CHECK_THROWS_AS(run(policy, test_scenario(), test_constants()),
                    MissingBinding);
  }
  // Unknown extra decision binding.
  {
    Policy policy = test_policy();
    policy.set("mystery", 1.0);
    CHECK_THROWS_AS(run(policy, test_scenario(), test_constants()),
                    UnresolvedSymbol);
  }
  // Scalar domain violation.
  {
    Policy policy = test_policy();
    policy.set("gain", 7.0);
    CHECK_THROWS_AS(run(policy, test_scenario(), test_constants()),
                    DomainViolation);
  }
  // Per-step element domain violation.
  {
    Policy policy = test_policy();
    policy.set("push", std::vector<double>{1.0, -1.0, 1.0});
    CHECK_THROWS_AS(run(policy, test_scenario(), test_constants()),
                    DomainViolation);
  }
  // Per-step length must be 1 or the horizon.
  {
    Policy policy = test_policy();
    policy.set("push", std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(run(policy, test_scenario(), test_constants()),
                    DomainViolation);
  }
  // Length 1 broadcasts.
  {
    Policy policy = test_policy();
    policy.set("push", 1.5);
    CHECK_NOTHROW(run(policy, test_scenario(), test_constants()));
  }
  // A scalar decision rejects sequences.
  {
    Policy policy = test_policy();
    policy.set("gain", std::vector<double>{0.5, 0.5, 0.5});
    CHECK_THROWS_AS(run(policy, test_scenario(), test_constants()),
                    DomainViolation);
  }
  // Scenario must bind every uncertainty, and nothing else.
  {
    Scenario scenario;
    scenario.id = "empty";
    CHECK_THROWS_AS(run(test_policy(), scenario, test_constants()),
                    MissingBinding);
  }
  {
    Scenario scenario = test_scenario();
    scenario.bindings["extra"] = 1.0;
    CHECK_THROWS_AS(run(test_policy(), scenario, test_constants()),
                    UnresolvedSymbol);
  }
  {
    Scenario scenario = test_scenario();
    scenario.bindings["drift"] = -1.0;
    CHECK_THROWS_AS(run(test_policy(), scenario, test_constants()),
                    DomainViolation);
  }
  // Constants likewise.
  {
    CHECK_THROWS_AS(run(test_policy(), test_scenario(), Constants{}),
                    MissingBinding);
  }
  {
    Constants constants = test_constants();
    constants["surplus"] = 0.0;
    CHECK_THROWS_AS(run(test_policy(), test_scenario(), constants),
                    UnresolvedSymbol);
  }
}

TEST_CASE("trace builder enforces declared series lengths") {
  // Transition forgets to push the per-step series.
  {
    auto env = test_environment();
    env.transition = [](TraceBuilder& trace, const StepContext& ctx) {
      (void)ctx;
      trace.push("state", trace.current("state"));
    };
    const ComposedModel model = compose(env, test_perspectives());
    CHECK_THROWS_AS(simulate(model, test_policy(), test_scenario(),
                             test_constants(), RandomStream(1, 0, 0)),
                    ModelError);
  }
  // Transition pushes an undeclared series.
  {
    auto env = test_environment();
    env.transition = [](TraceBuilder& trace, const StepContext& ctx) {
      (void)ctx;
      trace.push("rogue", 0.0);
      trace.push("state", trace.current("state"));
      trace.push("flow", 0.0);
    };
    const ComposedModel model = compose(env, test_perspectives());
    CHECK_THROWS_AS(simulate(model, test_policy(), test_scenario(),
                             test_constants(), RandomStream(1, 0, 0)),
                    SeriesNotRecorded);
  }
  // Evaluator underreports its declared objectives.
  {
    auto perspectives = test_perspectives();
    perspectives[1].objective_evaluator =
        [](const Trace&, const Policy&, const Scenario&, const Constants&) {
          return std::map<std::string, double>{{"final_state", 0.0}};
        };
    const ComposedModel model = compose(test_environment(), perspectives);
    CHECK_THROWS_AS(simulate(model, test_policy(), test_scenario(),
                             test_constants(), RandomStream(1, 0, 0)),
                    ModelError);
  }
}

TEST_CASE("perspective evaluation equals the full simulation") {
  const ComposedModel model =
      compose(test_environment(), test_perspectives());
  const Policy full = test_policy();

  for (std::uint32_t rep = 0; rep < 20; ++rep) {
    auto [trace, result] = simulate(model, full, test_scenario(),
                                    test_constants(), RandomStream(9, 0, rep));
    (void)trace;

    Policy own;
    own.id = "own";
    own.set("push", std::vector<double>{1.0, 2.0, 3.0});
    Policy exogenous;
    exogenous.id = "exo";
    exogenous.set("gain", 0.5);

    const auto planner_view =
        evaluate_perspective(model, "planner", own, exogenous,
                             test_scenario(), test_constants(),
                             RandomStream(9, 0, rep));
    CHECK(planner_view == result.of("planner"));

    const auto scaler_view = evaluate_perspective(
        model, "scaler", exogenous, own, test_scenario(), test_constants(),
        RandomStream(9, 0, rep));
    CHECK(scaler_view == result.of("scaler"));
  }
}

TEST_CASE("own bindings override exogenous ones on overlap") {
  const ComposedModel model =
      compose(test_environment(), test_perspectives());

  Policy own;
  own.set("gain", 3.0);
  Policy exogenous;
  exogenous.set("gain", 0.0);  // overridden by own
  exogenous.set("push", std::vector<double>{1.0, 2.0, 3.0});

  Policy merged = test_policy();
  merged.set("gain", 3.0);
  auto [trace, result] = simulate(model, merged, test_scenario(),
                                  test_constants(), RandomStream(5, 0, 0));
  (void)trace;
  const auto view =
      evaluate_perspective(model, "scaler", own, exogenous, test_scenario(),
                           test_constants(), RandomStream(5, 0, 0));
  CHECK(view == result.of("scaler"));
}

TEST_CASE("unknown perspective is rejected before any work") {
  const ComposedModel model =
      compose(test_environment(), test_perspectives());
  CHECK_THROWS_AS(model.perspective("nobody"), UnknownPerspective);
  CHECK_THROWS_AS(
      evaluate_perspective(model, "nobody", Policy{}, Policy{},
                           test_scenario(), test_constants(),
                           RandomStream(1, 0, 0)),
      UnknownPerspective);
}
