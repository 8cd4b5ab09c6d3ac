#include "deepsim/csv.hpp"

#include <algorithm>
#include <cstdio>

#include "deepsim/errors.hpp"
#include "deepsim/version.hpp"

namespace deepsim {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char byte : text) {
    hash ^= byte;
    hash *= 0x00000100000001b3ULL;
  }
  return hash;
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void write_provenance(std::ostream& out, const std::string& model_id,
                      std::uint64_t config_hash, std::uint64_t master_seed) {
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash));
  out << "# deepsim " << artifact_version << "\n";
  out << "# model: " << model_id << "\n";
  out << "# config_hash: " << hash_hex << "\n";
  out << "# seed: " << master_seed << "\n";
}

void write_results_csv(std::ostream& out, const ResultsTable& table) {
  out << "policy,scenario,replication,status,error";
  for (const std::string& column : table.objective_columns)
    out << "," << csv_escape(column);
  out << "\n";
  for (const ResultRow& row : table.rows) {
    out << csv_escape(row.policy_id) << "," << csv_escape(row.scenario_id)
        << "," << row.replication_index << "," << (row.ok ? "ok" : "error")
        << "," << csv_escape(row.error);
    for (const std::string& column : table.objective_columns) {
      out << ",";
      if (row.ok) out << format_double(row.objectives.at(column));
    }
    out << "\n";
  }
}

void write_summary_csv(
    std::ostream& out, const std::vector<std::string>& policy_ids,
    const std::map<std::string,
                   std::map<std::string, std::map<std::string, double>>>&
        by_objective) {
  out << "policy,objective,metric,value\n";
  for (const std::string& policy_id : policy_ids)
    for (const auto& [objective, per_policy] : by_objective) {
      auto it = per_policy.find(policy_id);
      if (it == per_policy.end()) continue;
      for (const auto& [metric, value] : it->second)
        out << csv_escape(policy_id) << "," << csv_escape(objective) << ","
            << metric << "," << format_double(value) << "\n";
    }
}

void write_trace_csv(std::ostream& out, const Trace& trace,
                     const std::vector<std::string>& series_names,
                     const std::vector<SeriesSpec>& specs) {
  const auto kind_of = [&](const std::string& name) {
    for (const SeriesSpec& spec : specs)
      if (spec.name == name) return spec.kind;
    throw SeriesNotRecorded(name);
  };

  int first_t = 1;
  int last_t = 0;
  for (const std::string& name : series_names) {
    const SeriesKind kind = kind_of(name);
    const std::size_t length = trace.at(name).size();
    if (kind == SeriesKind::State) {
      first_t = 0;
      last_t = std::max<int>(last_t, static_cast<int>(length) - 1);
    } else if (kind == SeriesKind::PerStep) {
      last_t = std::max<int>(last_t, static_cast<int>(length));
    } else {
      throw ConfigError("series " + name + " is a scalar, not time-indexed");
    }
  }

  out << "t";
  for (const std::string& name : series_names) out << "," << csv_escape(name);
  out << "\n";
  for (int t = first_t; t <= last_t; ++t) {
    out << t;
    for (const std::string& name : series_names) {
      const std::vector<double>& values = trace.at(name);
      const int index = kind_of(name) == SeriesKind::State ? t : t - 1;
      out << ",";
      if (index >= 0 && index < static_cast<int>(values.size()))
        out << format_double(values[static_cast<std::size_t>(index)]);
    }
    out << "\n";
  }
}

void write_figure_csv(std::ostream& out, const std::vector<FigureRow>& rows) {
  out << "series,level,t,mean,std\n";
  for (const FigureRow& row : rows)
    out << csv_escape(row.series) << "," << csv_escape(row.level) << ","
        << row.t << "," << format_double(row.mean) << ","
        << format_double(row.std_dev) << "\n";
}

}  // namespace deepsim
