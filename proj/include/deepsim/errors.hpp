#pragma once
// Error taxonomy. ConfigError covers everything detectable by validating
// inputs before a simulation runs (CLI exit code 2); ModelError covers
// failures that arise while the dynamics execute (CLI exit code 3).

#include <stdexcept>
#include <string>

namespace deepsim {

struct DeepsimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : DeepsimError {
  using DeepsimError::DeepsimError;
};

struct ModelError : DeepsimError {
  using DeepsimError::DeepsimError;
};

// ---- construction / validation errors ----

struct DuplicateDecisionName : ConfigError {
  explicit DuplicateDecisionName(const std::string& name)
      : ConfigError("duplicate decision name: " + name) {}
};

struct DuplicateSymbol : ConfigError {
  explicit DuplicateSymbol(const std::string& name)
      : ConfigError("symbol declared more than once: " + name) {}
};

struct UnresolvedSymbol : ConfigError {
  explicit UnresolvedSymbol(const std::string& name)
      : ConfigError("unresolved symbol: " + name) {}
};

struct MissingBinding : ConfigError {
  explicit MissingBinding(const std::string& name)
      : ConfigError("missing binding: " + name) {}
};

struct DomainViolation : ConfigError {
  DomainViolation(const std::string& name, double value)
      : ConfigError("value " + std::to_string(value) +
                    " outside the declared domain of " + name) {}
  DomainViolation(const std::string& name, const std::string& what)
      : ConfigError("binding " + name + ": " + what) {}
};

struct UnknownPerspective : ConfigError {
  explicit UnknownPerspective(const std::string& id)
      : ConfigError("unknown perspective: " + id) {}
};

struct UnknownModel : ConfigError {
  UnknownModel(const std::string& id, const std::string& valid)
      : ConfigError("unknown model id: " + id + " (valid ids: " + valid + ")") {}
};

struct UnknownFigure : ConfigError {
  explicit UnknownFigure(const std::string& name)
      : ConfigError("unknown figure name: " + name +
                    " (valid names: lake4, market5)") {}
};

struct UnknownMetric : ConfigError {
  explicit UnknownMetric(const std::string& name)
      : ConfigError("unknown robustness metric: " + name) {}
};

struct UnknownObjective : ConfigError {
  explicit UnknownObjective(const std::string& name)
      : ConfigError("unknown objective column: " + name) {}
};

struct SeriesNotRecorded : ConfigError {
  explicit SeriesNotRecorded(const std::string& name)
      : ConfigError("series not recorded in the results: " + name) {}
};

struct NonPositiveMean : ConfigError {
  explicit NonPositiveMean(double mean)
      : ConfigError("log-normal mean must be > 0, got " + std::to_string(mean)) {}
};

struct NegativeStd : ConfigError {
  explicit NegativeStd(double std_dev)
      : ConfigError("standard deviation must be >= 0, got " +
                    std::to_string(std_dev)) {}
};

struct UnboundedParameter : ConfigError {
  explicit UnboundedParameter(const std::string& name)
      : ConfigError("parameter has no interval domain to sample from: " + name) {}
};

// ---- runtime model errors ----

struct NoPositiveRoot : ModelError {
  NoPositiveRoot(double removal_rate, double recycling_exponent)
      : ModelError("no positive recycling/removal equilibrium for removal rate " +
                   std::to_string(removal_rate) + ", recycling exponent " +
                   std::to_string(recycling_exponent)) {}
};

struct InsufficientSupply : ModelError {
  InsufficientSupply(double supply_, double demand_, int hour_ = 0)
      : ModelError("total offered supply " + std::to_string(supply_) +
                   " cannot meet demand " + std::to_string(demand_) +
                   (hour_ > 0 ? " in hour " + std::to_string(hour_) : "")),
        supply(supply_),
        demand(demand_),
        hour(hour_) {}
  double supply;
  double demand;
  int hour;  // 1-based; 0 when the failing hour is not known yet
};

}  // namespace deepsim
