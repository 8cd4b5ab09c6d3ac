#pragma once
// Day-ahead electricity market benchmark. Each of 24 hourly intervals:
// demand is drawn, five producers bid (three conventional plants with fixed
// quantities and uncertain prices, a solar producer with a deterministic
// cosine production profile and an uncertain price, and a wind producer
// whose bid is its decision), the market clears by merit order at a uniform
// price, and the wind producer settles against its actual stochastic
// production, paying a per-MWh penalty on any shortfall.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "deepsim/model.hpp"

namespace deepsim {

namespace market_names {
inline constexpr const char* model_id = "market";
// producers
inline constexpr const char* conv1 = "conv1";
inline constexpr const char* conv2 = "conv2";
inline constexpr const char* conv3 = "conv3";
inline constexpr const char* solar = "solar";
inline constexpr const char* wind = "wind";
// series
inline constexpr const char* demand = "demand";
inline constexpr const char* conv_price_1 = "conv_price_1";
inline constexpr const char* conv_price_2 = "conv_price_2";
inline constexpr const char* conv_price_3 = "conv_price_3";
inline constexpr const char* solar_price = "solar_price";
inline constexpr const char* solar_quantity_series = "solar_quantity";
inline constexpr const char* clearing_price = "clearing_price";
inline constexpr const char* wind_dispatched = "wind_dispatched";
inline constexpr const char* wind_production = "wind_production";
inline constexpr const char* shortfall = "shortfall";
inline constexpr const char* wind_revenue = "wind_revenue";
// decisions
inline constexpr const char* wind_bid_quantity = "wind_bid_quantity";
inline constexpr const char* wind_bid_price = "wind_bid_price";
inline constexpr const char* shortfall_penalty = "shortfall_penalty";
// deep uncertainties
inline constexpr const char* conv_price_mean_1 = "conv_price_mean_1";
inline constexpr const char* conv_price_mean_2 = "conv_price_mean_2";
inline constexpr const char* conv_price_mean_3 = "conv_price_mean_3";
inline constexpr const char* conv_price_std_1 = "conv_price_std_1";
inline constexpr const char* conv_price_std_2 = "conv_price_std_2";
inline constexpr const char* conv_price_std_3 = "conv_price_std_3";
inline constexpr const char* solar_price_mean = "solar_price_mean";
inline constexpr const char* solar_price_std = "solar_price_std";
// constants
inline constexpr const char* demand_mean = "demand_mean";
inline constexpr const char* demand_std = "demand_std";
inline constexpr const char* conv_quantity_1 = "conv_quantity_1";
inline constexpr const char* conv_quantity_2 = "conv_quantity_2";
inline constexpr const char* conv_quantity_3 = "conv_quantity_3";
inline constexpr const char* solar_base = "solar_base";
inline constexpr const char* solar_amplitude = "solar_amplitude";
inline constexpr const char* production_mean = "production_mean";
inline constexpr const char* production_std = "production_std";
// objectives
inline constexpr const char* daily_revenue = "daily_revenue";
inline constexpr const char* total_shortfall = "total_shortfall";
inline constexpr const char* mean_clearing_price = "mean_clearing_price";
// perspectives
inline constexpr const char* wind_producer = "wind_producer";
inline constexpr const char* regulator = "regulator";
}  // namespace market_names

inline constexpr int market_horizon = 24;

struct Bid {
  std::string producer_id;
  double quantity = 0.0;  // MWh, >= 0
  double price = 0.0;     // currency/MWh
};

struct MarketConstants {
  double demand_mean = 800.0;
  double demand_std = 200.0;
  double conv_quantity[3] = {300.0, 250.0, 1000.0};
  double solar_base = 0.0;
  double solar_amplitude = -400.0;
  double production_mean = 300.0;
  double production_std = 100.0;
  double penalty_default = 0.0;  // default for the regulator's decision
};

struct ClearingOutcome {
  double clearing_price = 0.0;
  std::map<std::string, double> dispatched;
  double demand_served = 0.0;
};

// Deterministic solar production forecast for hour 1..24:
// max(0, base + amplitude * cos(2 pi hour / 24)).
double solar_quantity(int hour, double base, double amplitude);

// The five bids of one hour, in fixed draw order (three conventional prices,
// then the solar price; four draws total). Prices clamp at 0.
std::vector<Bid> generate_bids(int hour, const Policy& policy,
                               const Scenario& scenario,
                               const Constants& constants,
                               RandomStream& stream);

// Merit order with uniform pricing: the clearing price is the smallest bid
// price at which the cumulative quantity of bids priced at or below it
// covers demand. Every bid priced at or below the clearing price dispatches
// in full (equal-priced bids are all accepted, so supply may overshoot
// demand); every bid priced above dispatches zero.
// Throws InsufficientSupply when all bids together cannot cover demand.
ClearingOutcome clear_market(const std::vector<Bid>& bids, double demand);

// Settlement: shortfall = max(0, dispatched - actual_production);
// revenue = clearing_price * dispatched - penalty * shortfall.
double wind_settlement(double dispatched, double actual_production,
                       double clearing_price, double penalty);

// One full day through the composed market model.
std::pair<Trace, ObjectiveResult> simulate_day(const Policy& policy,
                                               const Scenario& scenario,
                                               const Constants& constants,
                                               RandomStream stream);

// Two perspectives over the shared market: the wind producer decides its bid
// (objective: daily revenue) and the regulator decides the shortfall penalty
// (reported quantities: total shortfall, mean clearing price).
ComposedModel build_market_model(const MarketConstants& constants = {});

}  // namespace deepsim
