#pragma once
// Shallow-lake pollution benchmark. A community emits pollution into a lake
// that recycles phosphorus nonlinearly; a regulator removes pollution. Past
// a critical level the recycling feedback overwhelms natural removal and the
// lake settles at a high-pollution equilibrium.

#include <cstdint>
#include <vector>

#include "deepsim/model.hpp"

namespace deepsim {

namespace lake_names {
inline constexpr const char* model_id = "lake";
// series
inline constexpr const char* pollution = "pollution";
inline constexpr const char* inflow = "inflow";
inline constexpr const char* critical_threshold = "critical_threshold";
// decisions
inline constexpr const char* emission = "emission";
inline constexpr const char* removal = "removal";
// deep uncertainties
inline constexpr const char* removal_rate = "removal_rate";
inline constexpr const char* recycling_exponent = "recycling_exponent";
inline constexpr const char* inflow_mean = "inflow_mean";
inline constexpr const char* inflow_std = "inflow_std";
inline constexpr const char* discount_factor = "discount_factor";
// constants
inline constexpr const char* benefit_rate = "benefit_rate";
inline constexpr const char* initial_pollution = "initial_pollution";
// objectives
inline constexpr const char* economic_benefit_name = "economic_benefit";
inline constexpr const char* reliability_name = "reliability";
inline constexpr const char* total_removal = "total_removal";
// perspectives
inline constexpr const char* community = "community";
inline constexpr const char* regulator = "regulator";
}  // namespace lake_names

struct LakeConstants {
  double benefit_rate = 0.4;
  int horizon = 100;
  double initial_pollution = 0.0;
};

// Fraction of load the lake feeds back: pollution^exponent /
// (1 + pollution^exponent), in [0, 1).
double recycling(double pollution, double recycling_exponent);

// One step of the pollution dynamics. Emission and removal combine as a
// single net term; removal can never drive the state negative.
double lake_step(double pollution, double emission, double removal,
                 double removal_rate, double recycling_exponent,
                 double inflow);

// Smallest strictly positive pollution level where recycling equals natural
// removal, located by a sign-change scan plus bisection to absolute
// tolerance 1e-9. Depends on the scenario, so it is recomputed per run.
// Throws NoPositiveRoot when removal dominates recycling everywhere.
double critical_threshold(double removal_rate, double recycling_exponent);

// Discounted emission benefit: sum over steps of
// benefit_rate * emission_t * discount_factor^t.
double economic_benefit(const std::vector<double>& emissions,
                        double benefit_rate, double discount_factor);

// Fraction of steps t in [1, T] with pollution strictly below the threshold.
double reliability(const std::vector<double>& pollution_series,
                   double threshold);

// The benchmark's fixed community emission sequence: horizon values drawn
// uniformly from [lo, hi] on the auxiliary stream of the master seed, so
// every policy and replication of an experiment shares one sequence.
std::vector<double> frozen_emission_sequence(std::uint64_t master_seed,
                                             int horizon, double lo = 0.02,
                                             double hi = 0.04);

// Two perspectives over the shared lake dynamics: the community decides
// emissions (objectives: economic benefit, reliability) and the regulator
// decides removal (objectives: reliability, total removal effort).
ComposedModel build_lake_model(const LakeConstants& constants = {});

}  // namespace deepsim
