#pragma once
// Scenario generation over interval-bounded parameter specs.

#include <string>
#include <utility>
#include <vector>

#include "deepsim/random.hpp"
#include "deepsim/types.hpp"

namespace deepsim {

// A sampling range for one deeply uncertain parameter. Ranges may be
// narrower than the parameter's validation domain.
struct SamplingRange {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

// Latin hypercube: per dimension, the n samples occupy the n equal-width
// strata exactly once (stratified permutation sampling). Scenario ids are
// "lhs_<i>" in sample order.
std::vector<Scenario> latin_hypercube(int n,
                                      const std::vector<SamplingRange>& ranges,
                                      RandomStream& stream);

// Independent uniforms per dimension; scenario ids "mc_<i>".
std::vector<Scenario> monte_carlo(int n,
                                  const std::vector<SamplingRange>& ranges,
                                  RandomStream& stream);

// Interval specs only; throws UnboundedParameter on a finite-set spec.
std::vector<SamplingRange> ranges_from_specs(
    const std::vector<ParameterSpec>& specs);

}  // namespace deepsim
