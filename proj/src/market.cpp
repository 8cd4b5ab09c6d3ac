#include "deepsim/market.hpp"

#include <algorithm>
#include <cmath>

namespace deepsim {

double solar_quantity(int hour, double base, double amplitude) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double forecast =
      base + amplitude * std::cos(two_pi * hour / market_horizon);
  return forecast < 0.0 ? 0.0 : forecast;
}

std::vector<Bid> generate_bids(int hour, const Policy& policy,
                               const Scenario& scenario,
                               const Constants& constants,
                               RandomStream& stream) {
  namespace names = market_names;
  std::vector<Bid> bids;
  bids.reserve(5);
  const char* quantity_names[3] = {names::conv_quantity_1,
                                   names::conv_quantity_2,
                                   names::conv_quantity_3};
  const char* mean_names[3] = {names::conv_price_mean_1,
                               names::conv_price_mean_2,
                               names::conv_price_mean_3};
  const char* std_names[3] = {names::conv_price_std_1, names::conv_price_std_2,
                              names::conv_price_std_3};
  const char* producer_ids[3] = {names::conv1, names::conv2, names::conv3};
  for (int i = 0; i < 3; ++i) {
    const double price = stream.next_normal_clamped(
        scenario.at(mean_names[i]), scenario.at(std_names[i]), 0.0);
    bids.push_back(
        {producer_ids[i], constant_at(constants, quantity_names[i]), price});
  }
  const double solar_price = stream.next_normal_clamped(
      scenario.at(names::solar_price_mean), scenario.at(names::solar_price_std),
      0.0);
  bids.push_back({names::solar,
                  solar_quantity(hour, constant_at(constants, names::solar_base),
                                 constant_at(constants, names::solar_amplitude)),
                  solar_price});
  bids.push_back({names::wind, policy.scalar(names::wind_bid_quantity),
                  policy.scalar(names::wind_bid_price)});
  return bids;
}

ClearingOutcome clear_market(const std::vector<Bid>& bids, double demand) {
  double supply = 0.0;
  for (const Bid& bid : bids) supply += bid.quantity;
  if (supply < demand) throw InsufficientSupply(supply, demand);

  // Ascending walk over the distinct price tiers; equal-priced bids form one
  // tier and are accepted together.
  std::vector<double> prices;
  prices.reserve(bids.size());
  for (const Bid& bid : bids) prices.push_back(bid.price);
  std::sort(prices.begin(), prices.end());
  prices.erase(std::unique(prices.begin(), prices.end()), prices.end());

  double clearing_price = prices.back();
  double cumulative = 0.0;
  for (double tier : prices) {
    for (const Bid& bid : bids)
      if (bid.price == tier) cumulative += bid.quantity;
    if (cumulative >= demand) {
      clearing_price = tier;
      break;
    }
  }

  ClearingOutcome outcome;
  outcome.clearing_price = clearing_price;
  outcome.demand_served = demand;
  for (const Bid& bid : bids) {
    double& dispatched = outcome.dispatched[bid.producer_id];
    dispatched += bid.price <= clearing_price ? bid.quantity : 0.0;
  }
  return outcome;
}

double wind_settlement(double dispatched, double actual_production,
                       double clearing_price, double penalty) {
  const double gap = dispatched - actual_production;
  const double shortfall = gap > 0.0 ? gap : 0.0;
  return clearing_price * dispatched - penalty * shortfall;
}

ComposedModel build_market_model(const MarketConstants& constants) {
  namespace names = market_names;

  Environment env;
  env.model_id = names::model_id;
  env.horizon = market_horizon;
  env.uncertainty_specs = {
      {names::conv_price_mean_1, ParamKind::DeepUncertain, 0.0, 1000.0, {},
       45.0, false},
      {names::conv_price_mean_2, ParamKind::DeepUncertain, 0.0, 1000.0, {},
       50.0, false},
      {names::conv_price_mean_3, ParamKind::DeepUncertain, 0.0, 1000.0, {},
       60.0, false},
      {names::conv_price_std_1, ParamKind::DeepUncertain, 0.0, 100.0, {}, 5.0,
       false},
      {names::conv_price_std_2, ParamKind::DeepUncertain, 0.0, 100.0, {}, 5.0,
       false},
      {names::conv_price_std_3, ParamKind::DeepUncertain, 0.0, 100.0, {}, 5.0,
       false},
      {names::solar_price_mean, ParamKind::DeepUncertain, 0.0, 1000.0, {},
       35.0, false},
      {names::solar_price_std, ParamKind::DeepUncertain, 0.0, 100.0, {}, 10.0,
       false},
  };
  env.constant_specs = {
      {names::demand_mean, ParamKind::Constant, 0.0, 1e6, {},
       constants.demand_mean, false},
      {names::demand_std, ParamKind::Constant, 0.0, 1e6, {},
       constants.demand_std, false},
      {names::conv_quantity_1, ParamKind::Constant, 0.0, 1e6, {},
       constants.conv_quantity[0], false},
      {names::conv_quantity_2, ParamKind::Constant, 0.0, 1e6, {},
       constants.conv_quantity[1], false},
      {names::conv_quantity_3, ParamKind::Constant, 0.0, 1e6, {},
       constants.conv_quantity[2], false},
      {names::solar_base, ParamKind::Constant, -1e6, 1e6, {},
       constants.solar_base, false},
      {names::solar_amplitude, ParamKind::Constant, -1e6, 1e6, {},
       constants.solar_amplitude, false},
      {names::production_mean, ParamKind::Constant, 0.0, 1e6, {},
       constants.production_mean, false},
      {names::production_std, ParamKind::Constant, 0.0, 1e6, {},
       constants.production_std, false},
  };
  env.series_specs = {
      {names::demand, SeriesKind::PerStep},
      {names::conv_price_1, SeriesKind::PerStep},
      {names::conv_price_2, SeriesKind::PerStep},
      {names::conv_price_3, SeriesKind::PerStep},
      {names::solar_price, SeriesKind::PerStep},
      {names::solar_quantity_series, SeriesKind::PerStep},
      {names::clearing_price, SeriesKind::PerStep},
      {names::wind_dispatched, SeriesKind::PerStep},
      {names::wind_production, SeriesKind::PerStep},
      {names::shortfall, SeriesKind::PerStep},
      {names::wind_revenue, SeriesKind::PerStep},
  };
  env.init = nullptr;
  env.transition = [](TraceBuilder& trace, const StepContext& ctx) {
    const int hour = ctx.t + 1;  // hourly intervals are 1-based
    const double demand = ctx.stream.next_normal_clamped(
        constant_at(ctx.constants, market_names::demand_mean),
        constant_at(ctx.constants, market_names::demand_std), 0.0);
    const std::vector<Bid> bids =
        generate_bids(hour, ctx.policy, ctx.scenario, ctx.constants, ctx.stream);

    ClearingOutcome outcome;
    try {
      outcome = clear_market(bids, demand);
    } catch (const InsufficientSupply& error) {
      throw InsufficientSupply(error.supply, error.demand, hour);
    }

    const double production = ctx.stream.next_normal_clamped(
        constant_at(ctx.constants, market_names::production_mean),
        constant_at(ctx.constants, market_names::production_std), 0.0);
    const double dispatched = outcome.dispatched.at(market_names::wind);
    const double gap = dispatched - production;
    const double shortfall = gap > 0.0 ? gap : 0.0;
    const double penalty = ctx.policy.scalar(market_names::shortfall_penalty);
    const double revenue =
        wind_settlement(dispatched, production, outcome.clearing_price, penalty);

    trace.push(market_names::demand, demand);
    trace.push(market_names::conv_price_1, bids[0].price);
    trace.push(market_names::conv_price_2, bids[1].price);
    trace.push(market_names::conv_price_3, bids[2].price);
    trace.push(market_names::solar_price, bids[3].price);
    trace.push(market_names::solar_quantity_series, bids[3].quantity);
    trace.push(market_names::clearing_price, outcome.clearing_price);
    trace.push(market_names::wind_dispatched, dispatched);
    trace.push(market_names::wind_production, production);
    trace.push(market_names::shortfall, shortfall);
    trace.push(market_names::wind_revenue, revenue);
  };
  env.audit_manifest = {
      {names::demand, SymbolCategory::Series},
      {names::clearing_price, SymbolCategory::Series},
      {names::wind_dispatched, SymbolCategory::Series},
      {names::wind_production, SymbolCategory::Series},
      {names::shortfall, SymbolCategory::Series},
      {names::wind_revenue, SymbolCategory::Series},
      {names::solar_quantity_series, SymbolCategory::Series},
      {names::solar_price, SymbolCategory::Series},
      {names::conv_price_1, SymbolCategory::Series},
      {names::conv_price_2, SymbolCategory::Series},
      {names::conv_price_3, SymbolCategory::Series},
      {names::wind_bid_quantity, SymbolCategory::Parameter},
      {names::wind_bid_price, SymbolCategory::Parameter},
      {names::shortfall_penalty, SymbolCategory::Parameter},
      {names::conv_price_mean_1, SymbolCategory::Parameter},
      {names::conv_price_mean_2, SymbolCategory::Parameter},
      {names::conv_price_mean_3, SymbolCategory::Parameter},
      {names::conv_price_std_1, SymbolCategory::Parameter},
      {names::conv_price_std_2, SymbolCategory::Parameter},
      {names::conv_price_std_3, SymbolCategory::Parameter},
      {names::solar_price_mean, SymbolCategory::Parameter},
      {names::solar_price_std, SymbolCategory::Parameter},
      {names::demand_mean, SymbolCategory::Parameter},
      {names::demand_std, SymbolCategory::Parameter},
      {names::conv_quantity_1, SymbolCategory::Parameter},
      {names::conv_quantity_2, SymbolCategory::Parameter},
      {names::conv_quantity_3, SymbolCategory::Parameter},
      {names::solar_base, SymbolCategory::Parameter},
      {names::solar_amplitude, SymbolCategory::Parameter},
      {names::production_mean, SymbolCategory::Parameter},
      {names::production_std, SymbolCategory::Parameter},
      {names::daily_revenue, SymbolCategory::Objective},
      {names::total_shortfall, SymbolCategory::Objective},
      {names::mean_clearing_price, SymbolCategory::Objective},
  };

  Perspective wind_producer;
  wind_producer.id = names::wind_producer;
  wind_producer.decision_specs = {
      {names::wind_bid_quantity, ParamKind::Decision, 0.0, 1e5, {}, 300.0,
       false},
      {names::wind_bid_price, ParamKind::Decision, 0.0, 1e4, {}, 50.0, false},
  };
  wind_producer.objective_names = {names::daily_revenue};
  wind_producer.objective_evaluator =
      [](const Trace& trace, const Policy&, const Scenario&, const Constants&) {
        double total = 0.0;
        for (double revenue : trace.at(market_names::wind_revenue))
          total += revenue;
        return std::map<std::string, double>{
            {market_names::daily_revenue, total}};
      };

  Perspective regulator;
  regulator.id = names::regulator;
  regulator.decision_specs = {
      {names::shortfall_penalty, ParamKind::Decision, 0.0, 0.0,
       {0.0, 20.0, 80.0, 140.0}, constants.penalty_default, false},
  };
  regulator.objective_names = {names::total_shortfall,
                               names::mean_clearing_price};
  regulator.objective_evaluator =
      [](const Trace& trace, const Policy&, const Scenario&, const Constants&) {
        double shortfall_sum = 0.0;
        for (double value : trace.at(market_names::shortfall))
          shortfall_sum += value;
        const std::vector<double>& prices =
            trace.at(market_names::clearing_price);
        double price_sum = 0.0;
        for (double value : prices) price_sum += value;
        return std::map<std::string, double>{
            {market_names::total_shortfall, shortfall_sum},
            {market_names::mean_clearing_price,
             price_sum / static_cast<double>(prices.size())}};
      };

  return compose(std::move(env),
                 {std::move(wind_producer), std::move(regulator)});
}

std::pair<Trace, ObjectiveResult> simulate_day(const Policy& policy,
                                               const Scenario& scenario,
                                               const Constants& constants,
                                               RandomStream stream) {
  const ComposedModel model = build_market_model();
  return simulate(model, policy, scenario, constants, stream);
}

}  // namespace deepsim
