// Built-in verification: unit, property, and scenario checks against
// independent oracles, runnable from the CLI. The oracles are exposed so the
// test binaries can reuse them.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deepsim/market.hpp"

namespace deepsim {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // empty on pass, diagnostic on failure
};

// Closed-form equilibria of the quadratic recycling case (exponent 2):
// removal_rate * x = x^2 / (1 + x^2) has roots (1 -+ sqrt(1 - 4 b^2)) / (2 b).
double quadratic_threshold(double removal_rate);
double quadratic_upper_root(double removal_rate);

// Independent threshold locator: dense linear scan plus interval halving,
// structurally unlike the production scan resolution.
double grid_threshold_oracle(double removal_rate, double recycling_exponent);

// Brute-force clearing: enumerate every price-downward-closed subset of bids
// that covers demand and take the one with the smallest maximum price.
// Demand must be positive; returns nullopt when no subset covers it.
std::optional<ClearingOutcome> oracle_clear_market(
    const std::vector<Bid>& bids, double demand);

// The full built-in suite, in fixed order. Each result line is independent;
// a throw inside a check marks it failed with the exception text.
std::vector<CheckResult> run_verification();

}  // namespace deepsim
