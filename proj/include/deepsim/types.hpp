#pragma once
// Core data vocabulary shared by every model: parameter declarations,
// scenario / policy / constant bindings, recorded traces, and objective
// results. Everything here is a plain value type; instances are immutable
// by convention once a simulation starts and safe to share across threads.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "deepsim/errors.hpp"

namespace deepsim {

enum class ParamKind { Decision, DeepUncertain, Constant };

// Declaration of one model parameter. The domain is either the closed
// interval [lo, hi] or, when finite_values is nonempty, that finite set.
struct ParameterSpec {
  std::string name;
  ParamKind kind = ParamKind::Constant;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> finite_values;
  double default_value = 0.0;
  bool per_timestep = false;

  bool has_interval_domain() const { return finite_values.empty(); }
  bool admits(double value) const {
    if (!finite_values.empty()) {
      for (double v : finite_values)
        if (v == value) return true;
      return false;
    }
    return value >= lo && value <= hi;
  }
};

// One complete assignment of values to the deeply uncertain parameters.
struct Scenario {
  std::string id;
  std::map<std::string, double> bindings;

  double at(const std::string& name) const {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw MissingBinding(name);
    return it->second;
  }
};

using Constants = std::map<std::string, double>;

inline double constant_at(const Constants& constants, const std::string& name) {
  auto it = constants.find(name);
  if (it == constants.end()) throw MissingBinding(name);
  return it->second;
}

// One complete assignment of values to the decision variables. A binding is
// stored as a sequence; scalars are length-1 and broadcast over time when
// the parameter is per-timestep.
struct Policy {
  std::string id;
  std::map<std::string, std::vector<double>> bindings;

  Policy& set(const std::string& name, double value) {
    bindings[name] = {value};
    return *this;
  }
  Policy& set(const std::string& name, std::vector<double> sequence) {
    bindings[name] = std::move(sequence);
    return *this;
  }

  bool has(const std::string& name) const { return bindings.count(name) != 0; }

  const std::vector<double>& sequence(const std::string& name) const {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw MissingBinding(name);
    return it->second;
  }

  // Scalar binding; rejects genuine sequences.
  double scalar(const std::string& name) const {
    const std::vector<double>& seq = sequence(name);
    if (seq.size() != 1)
      throw DomainViolation(name, "expected a scalar, got a sequence");
    return seq.front();
  }

  // Value at step t with scalar broadcast.
  double at(const std::string& name, std::size_t t) const {
    const std::vector<double>& seq = sequence(name);
    return seq.size() == 1 ? seq.front() : seq.at(t);
  }
};

// Series length contract relative to the model horizon T:
// State series hold T+1 points (initial value included), PerStep series hold
// T points, Scalar series hold a single derived value.
enum class SeriesKind { State, PerStep, Scalar };

struct SeriesSpec {
  std::string name;
  SeriesKind kind = SeriesKind::PerStep;
};

// Time-indexed record of one simulation run.
struct Trace {
  std::map<std::string, std::vector<double>> series;
  std::string policy_id;
  std::string scenario_id;
  std::uint64_t master_seed = 0;
  std::uint32_t scenario_index = 0;
  std::uint32_t replication_index = 0;

  const std::vector<double>& at(const std::string& name) const {
    auto it = series.find(name);
    if (it == series.end()) throw SeriesNotRecorded(name);
    return it->second;
  }
  double scalar(const std::string& name) const {
    const std::vector<double>& values = at(name);
    if (values.size() != 1)
      throw SeriesNotRecorded(name + " (not a scalar series)");
    return values.front();
  }
};

// Objective values grouped by the perspective that declared them.
struct ObjectiveResult {
  std::map<std::string, std::map<std::string, double>> by_perspective;

  const std::map<std::string, double>& of(const std::string& perspective) const {
    auto it = by_perspective.find(perspective);
    if (it == by_perspective.end()) throw UnknownPerspective(perspective);
    return it->second;
  }

  // Flat "perspective.objective" view, the shape results tables store.
  std::map<std::string, double> flat() const {
    std::map<std::string, double> out;
    for (const auto& [perspective, values] : by_perspective)
      for (const auto& [name, value] : values)
        out[perspective + "." + name] = value;
    return out;
  }
};

}  // namespace deepsim
