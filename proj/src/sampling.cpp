#include "deepsim/sampling.hpp"

#include <numeric>

namespace deepsim {

namespace {

void check_ranges(int n, const std::vector<SamplingRange>& ranges) {
  if (n < 1) throw ConfigError("sample count must be >= 1");
  for (const SamplingRange& range : ranges)
    if (!(range.lo <= range.hi)) throw UnboundedParameter(range.name);
}

std::vector<Scenario> blank_scenarios(int n, const char* prefix) {
  std::vector<Scenario> scenarios(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    scenarios[static_cast<std::size_t>(i)].id = prefix + std::to_string(i);
  return scenarios;
}

}  // namespace

std::vector<Scenario> latin_hypercube(int n,
                                      const std::vector<SamplingRange>& ranges,
                                      RandomStream& stream) {
  check_ranges(n, ranges);
  std::vector<Scenario> scenarios = blank_scenarios(n, "lhs_");
  std::vector<std::size_t> strata(static_cast<std::size_t>(n));
  for (const SamplingRange& range : ranges) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    for (std::size_t i = strata.size() - 1; i > 0; --i) {
      const std::size_t j = stream.next_index(i + 1);
      std::swap(strata[i], strata[j]);
    }
    const double width = (range.hi - range.lo) / n;
    for (int i = 0; i < n; ++i) {
      const double offset = stream.next_uniform();
      scenarios[static_cast<std::size_t>(i)].bindings[range.name] =
          range.lo +
          (static_cast<double>(strata[static_cast<std::size_t>(i)]) + offset) *
              width;
    }
  }
  return scenarios;
}

std::vector<Scenario> monte_carlo(int n,
                                  const std::vector<SamplingRange>& ranges,
                                  RandomStream& stream) {
  check_ranges(n, ranges);
  std::vector<Scenario> scenarios = blank_scenarios(n, "mc_");
  for (const SamplingRange& range : ranges)
    for (int i = 0; i < n; ++i)
      scenarios[static_cast<std::size_t>(i)].bindings[range.name] =
          range.lo + (range.hi - range.lo) * stream.next_uniform();
  return scenarios;
}

std::vector<SamplingRange> ranges_from_specs(
    const std::vector<ParameterSpec>& specs) {
  std::vector<SamplingRange> ranges;
  ranges.reserve(specs.size());
  for (const ParameterSpec& spec : specs) {
    if (!spec.has_interval_domain()) throw UnboundedParameter(spec.name);
    ranges.push_back({spec.name, spec.lo, spec.hi});
  }
  return ranges;
}

}  // namespace deepsim
