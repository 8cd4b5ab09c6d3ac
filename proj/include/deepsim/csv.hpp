// CSV emission with provenance headers and reproducible float formatting.
#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "deepsim/explore.hpp"
#include "deepsim/types.hpp"

namespace deepsim {

// FNV-1a over the bytes of text; stable across platforms.
std::uint64_t fnv1a64(const std::string& text);

// Shortest round-trippable decimal form, 17 significant digits, '.' decimal.
std::string format_double(double value);

// Quotes a field when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

// Four comment lines: artifact version, model id, config hash, master seed.
void write_provenance(std::ostream& out, const std::string& model_id,
                      std::uint64_t config_hash, std::uint64_t master_seed);

// One row per (policy, scenario, replication); failed rows keep empty
// objective cells and carry the error message.
void write_results_csv(std::ostream& out, const ResultsTable& table);

// Per-policy robustness metrics in (policy, objective, metric) row order.
void write_summary_csv(
    std::ostream& out, const std::vector<std::string>& policy_ids,
    const std::map<std::string,
                   std::map<std::string, std::map<std::string, double>>>&
        by_objective);

// Time-indexed columns for the named series. Rows start at t=0 when any
// series records the initial state, else at t=1; cells outside a series'
// support stay empty.
void write_trace_csv(std::ostream& out, const Trace& trace,
                     const std::vector<std::string>& series_names,
                     const std::vector<SeriesSpec>& specs);

// Tidy ensemble statistics: one row per (series, level, t).
struct FigureRow {
  std::string series;
  std::string level;
  int t = 0;
  double mean = 0.0;
  double std_dev = 0.0;
};

void write_figure_csv(std::ostream& out, const std::vector<FigureRow>& rows);

}  // namespace deepsim
