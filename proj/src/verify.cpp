#include "deepsim/verify.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "deepsim/lake.hpp"
#include "deepsim/registry.hpp"

namespace deepsim {

double quadratic_threshold(double removal_rate) {
  const double disc = 1.0 - 4.0 * removal_rate * removal_rate;
  return (1.0 - std::sqrt(disc)) / (2.0 * removal_rate);
}

double quadratic_upper_root(double removal_rate) {
  const double disc = 1.0 - 4.0 * removal_rate * removal_rate;
  return (1.0 + std::sqrt(disc)) / (2.0 * removal_rate);
}

double grid_threshold_oracle(double removal_rate, double recycling_exponent) {
  const auto gap = [&](double x) {
    const double powered = std::pow(x, recycling_exponent);
    return powered / (1.0 + powered) - removal_rate * x;
  };
  // Any root satisfies removal_rate * x < 1, so scan (0, 1/removal_rate].
  const double limit = 1.0 / removal_rate;
  const int cells = 50000;
  double lo = 0.0;
  double hi = 0.0;
  double prev_x = 0.0;
  double prev_gap = 0.0;
  bool bracketed = false;
  for (int i = 1; i <= cells && !bracketed; ++i) {
    const double x = limit * i / cells;
    const double g = gap(x);
    if (prev_gap < 0.0 && g >= 0.0) {
      lo = prev_x;
      hi = x;
      bracketed = true;
    }
    prev_x = x;
    prev_gap = g;
  }
  if (!bracketed) throw NoPositiveRoot(removal_rate, recycling_exponent);
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<ClearingOutcome> oracle_clear_market(
    const std::vector<Bid>& bids, double demand) {
  const std::size_t n = bids.size();
  bool found = false;
  double best_price = 0.0;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double total = 0.0;
    double max_price = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        total += bids[i].quantity;
        max_price = std::max(max_price, bids[i].price);
      }
    if (total < demand) continue;
    bool closed = true;
    for (std::size_t i = 0; i < n && closed; ++i)
      if (!(mask & (1u << i)) && bids[i].price <= max_price) closed = false;
    if (!closed) continue;
    if (!found || max_price < best_price) {
      found = true;
      best_price = max_price;
      best_mask = mask;
    }
  }
  if (!found) return std::nullopt;
  ClearingOutcome outcome;
  outcome.clearing_price = best_price;
  outcome.demand_served = demand;
  for (std::size_t i = 0; i < n; ++i)
    outcome.dispatched[bids[i].producer_id] =
        (best_mask & (1u << i)) ? bids[i].quantity : 0.0;
  return outcome;
}

namespace {

std::string describe(double expected, double actual) {
  std::ostringstream text;
  text.precision(17);
  text << "expected " << expected << ", got " << actual;
  return text.str();
}

CheckResult check_lognormal_moments() {
  CheckResult result{"lake.unit.lognormal_moments", false, ""};
  const LogNormalSpec spec{0.02, 0.0017};
  const int draws = 1000000;
  RandomStream stream(4521, 0, 0);
  double total = 0.0;
  double total_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double value = sample_lognormal(stream, spec);
    total += value;
    total_sq += value * value;
  }
  const double mean = total / draws;
  const double variance = total_sq / draws - mean * mean;
  const double std_dev = std::sqrt(variance);
  const double mean_band = 3.0 * spec.std_dev / std::sqrt(double(draws));
  if (std::abs(mean - spec.mean) > mean_band) {
    result.detail = "sample mean " + describe(spec.mean, mean);
    return result;
  }
  if (std::abs(std_dev - spec.std_dev) > 0.05 * spec.std_dev) {
    result.detail = "sample std " + describe(spec.std_dev, std_dev);
    return result;
  }
  result.passed = true;
  return result;
}

CheckResult check_threshold_bisection() {
  CheckResult result{"lake.unit.threshold_bisection", false, ""};
  const double reference = quadratic_threshold(0.42);
  const double computed = critical_threshold(0.42, 2.0);
  if (std::abs(computed - reference) > 1e-6) {
    result.detail = "quadratic case " + describe(reference, computed);
    return result;
  }
  RandomStream stream(4521, 1, 0);
  for (int i = 0; i < 100; ++i) {
    const double b = 0.1 + 0.35 * stream.next_uniform();
    const double q = 2.0 + 2.5 * stream.next_uniform();
    const double oracle = grid_threshold_oracle(b, q);
    const double value = critical_threshold(b, q);
    if (std::abs(value - oracle) > 1e-6) {
      std::ostringstream text;
      text.precision(17);
      text << "case b=" << b << " q=" << q << ": "
           << describe(oracle, value);
      result.detail = text.str();
      return result;
    }
  }
  result.passed = true;
  return result;
}

CheckResult check_irreversibility() {
  CheckResult result{"lake.property.irreversibility", false, ""};
  const double b = 0.42;
  const double threshold = critical_threshold(b, 2.0);
  const double upper = quadratic_upper_root(b);
  double x = threshold + 0.1;
  for (int t = 1; t <= 1000; ++t) {
    x = lake_step(x, 0.0, 0.0, b, 2.0, 0.0);
    if (x < threshold) {
      std::ostringstream text;
      text.precision(17);
      text << "state fell to " << x << " below threshold " << threshold
           << " at step " << t;
      result.detail = text.str();
      return result;
    }
  }
  if (std::abs(x - upper) > 1e-8) {
    result.detail = "final state " + describe(upper, x);
    return result;
  }
  result.passed = true;
  return result;
}

CheckResult check_regulator_sweep() {
  CheckResult result{"lake.scenario.deterministic_regulator_sweep", false,
                     ""};
  const ModelInfo& info = find_model(lake_names::model_id);
  const InstantiatedModel instantiated =
      info.instantiate(info.default_constants);
  const ComposedModel& model = instantiated.model;

  Scenario scenario = default_scenario(model);
  scenario.bindings[lake_names::inflow_std] = 0.0;  // inflow fixed at 0.02

  Policy policy = info.default_policy(model, 4521);
  policy.set(lake_names::removal, 0.003);

  auto [trace, objectives] =
      simulate(model, policy, scenario, instantiated.runtime_constants,
               RandomStream(4521, 0, 0));
  (void)objectives;
  const double threshold = quadratic_threshold(0.42);
  const std::vector<double>& pollution = trace.at(lake_names::pollution);
  for (std::size_t t = 0; t < pollution.size(); ++t)
    if (pollution[t] >= threshold) {
      std::ostringstream text;
      text.precision(17);
      text << "pollution " << pollution[t] << " reached threshold "
           << threshold << " at t=" << t;
      result.detail = text.str();
      return result;
    }
  result.passed = true;
  return result;
}

CheckResult check_settlement_arithmetic() {
  CheckResult result{"market.unit.settlement_arithmetic", false, ""};
  struct Case {
    double dispatched, production, price, penalty, expected;
  };
  const Case cases[] = {
      {300.0, 300.0, 50.0, 140.0, 15000.0},  // no shortfall
      {300.0, 200.0, 50.0, 80.0, 7000.0},    // 100 short at penalty 80
      {300.0, 0.0, 50.0, 50.0, 0.0},         // full shortfall wipes revenue
      {0.0, 300.0, 50.0, 140.0, 0.0},        // rejected bid earns nothing
      {250.0, 300.0, 40.0, 20.0, 10000.0},   // surplus production, no penalty
  };
  for (const Case& c : cases) {
    const double revenue =
        wind_settlement(c.dispatched, c.production, c.price, c.penalty);
    if (revenue != c.expected) {
      result.detail = "settlement " + describe(c.expected, revenue);
      return result;
    }
  }
  result.passed = true;
  return result;
}

CheckResult check_supply_sufficiency() {
  CheckResult result{"market.unit.supply_sufficiency", false, ""};
  const std::vector<Bid> bids = {{"a", 300.0, 45.0}, {"b", 200.0, 50.0}};
  try {
    clear_market(bids, 800.0);
    result.detail = "demand 800 above supply 500 was not rejected";
    return result;
  } catch (const InsufficientSupply& error) {
    if (error.supply != 500.0 || error.demand != 800.0) {
      result.detail = std::string("wrong diagnostic: ") + error.what();
      return result;
    }
  }
  // The same bids must clear once demand is coverable.
  const ClearingOutcome outcome = clear_market(bids, 500.0);
  if (outcome.clearing_price != 50.0) {
    result.detail = "boundary demand " + describe(50.0, outcome.clearing_price);
    return result;
  }
  result.passed = true;
  return result;
}

CheckResult check_merit_order_oracle() {
  CheckResult result{"market.property.merit_order_oracle", false, ""};
  RandomStream stream(4521, 2, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + stream.next_index(9);
    std::vector<Bid> bids;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Bid bid;
      bid.producer_id = "bid_" + std::to_string(i);
      // Coarse price grid so equal-price ties are common.
      bid.price = 5.0 * static_cast<double>(stream.next_index(12));
      bid.quantity = i == 0 ? 1.0 + 499.0 * stream.next_uniform()
                            : (stream.next_uniform() < 0.1
                                   ? 0.0
                                   : 500.0 * stream.next_uniform());
      total += bid.quantity;
      bids.push_back(bid);
    }
    const double demand = total * stream.next_uniform();
    const auto expected = oracle_clear_market(bids, demand);
    if (!expected) {
      result.detail = "oracle found no clearing for feasible demand";
      return result;
    }
    const ClearingOutcome actual = clear_market(bids, demand);
    if (actual.clearing_price != expected->clearing_price) {
      result.detail = "trial " + std::to_string(trial) + " clearing price " +
                      describe(expected->clearing_price,
                               actual.clearing_price);
      return result;
    }
    if (actual.dispatched != expected->dispatched) {
      result.detail =
          "trial " + std::to_string(trial) + ": dispatched sets differ";
      return result;
    }
    double served = 0.0;
    for (const auto& [id, quantity] : actual.dispatched) {
      (void)id;
      served += quantity;
    }
    if (served < demand) {
      result.detail =
          "trial " + std::to_string(trial) + ": demand not covered";
      return result;
    }
  }
  result.passed = true;
  return result;
}

CheckResult check_deterministic_day() {
  CheckResult result{"market.scenario.deterministic_day", false, ""};
  const ModelInfo& info = find_model(market_names::model_id);
  Constants overrides;
  overrides[market_names::demand_std] = 0.0;
  overrides[market_names::production_std] = 0.0;
  const InstantiatedModel instantiated =
      info.instantiate(resolve_constants(info, overrides));
  const ComposedModel& model = instantiated.model;

  Scenario scenario = default_scenario(model);
  scenario.bindings[market_names::conv_price_std_1] = 0.0;
  scenario.bindings[market_names::conv_price_std_2] = 0.0;
  scenario.bindings[market_names::conv_price_std_3] = 0.0;
  scenario.bindings[market_names::solar_price_std] = 0.0;

  const Policy policy = policy_from_defaults(model);
  auto [trace, objectives] =
      simulate(model, policy, scenario, instantiated.runtime_constants,
               RandomStream(4521, 0, 0));

  // Demand 800 sits inside the 50-priced tier whether or not the 400 MWh of
  // midday solar is online, so every hour clears at 50 with wind (bid 300 at
  // 50) fully dispatched.
  const std::vector<double>& price = trace.at(market_names::clearing_price);
  const std::vector<double>& dispatched =
      trace.at(market_names::wind_dispatched);
  const std::vector<double>& revenue = trace.at(market_names::wind_revenue);
  for (int h = 0; h < market_horizon; ++h) {
    if (price[h] != 50.0) {
      result.detail =
          "hour " + std::to_string(h + 1) + " price " + describe(50.0,
                                                                 price[h]);
      return result;
    }
    if (dispatched[h] != 300.0 || revenue[h] != 15000.0) {
      result.detail = "hour " + std::to_string(h + 1) + " settlement " +
                      describe(15000.0, revenue[h]);
      return result;
    }
  }
  const double daily = objectives.of(market_names::wind_producer)
                           .at(market_names::daily_revenue);
  if (daily != 360000.0) {
    result.detail = "daily revenue " + describe(360000.0, daily);
    return result;
  }
  // Midday solar is online at full forecast: 400 MWh at hour 12.
  const double noon = trace.at(market_names::solar_quantity_series)[11];
  if (noon != 400.0) {
    result.detail = "solar forecast at hour 12 " + describe(400.0, noon);
    return result;
  }
  result.passed = true;
  return result;
}

}  // namespace

std::vector<CheckResult> run_verification() {
  const std::pair<const char*, std::function<CheckResult()>> checks[] = {
      {"lake.unit.lognormal_moments", check_lognormal_moments},
      {"lake.unit.threshold_bisection", check_threshold_bisection},
      {"lake.property.irreversibility", check_irreversibility},
      {"lake.scenario.deterministic_regulator_sweep", check_regulator_sweep},
      {"market.unit.settlement_arithmetic", check_settlement_arithmetic},
      {"market.unit.supply_sufficiency", check_supply_sufficiency},
      {"market.property.merit_order_oracle", check_merit_order_oracle},
      {"market.scenario.deterministic_day", check_deterministic_day},
  };
  std::vector<CheckResult> results;
  for (const auto& [name, check] : checks) {
    try {
      results.push_back(check());
    } catch (const std::exception& error) {
      results.push_back({name, false, error.what()});
    }
  }
  return results;
}

}  // namespace deepsim
