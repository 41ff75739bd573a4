#pragma once

#include "scrn/harness/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scrn::harness {

/// Concrete values for the tunable parameters of one algorithm entry.
struct ParameterChoice {
  std::map<std::string, double> values;
};

/// Every combination of the entry's list-valued parameters, in a fixed
/// order. A single-element list yields one choice.
std::vector<ParameterChoice> parameter_grid(const AlgorithmConfig& alg);

/// Theorem-schedule constants, in order of preference: config values,
/// problem hints, empirical estimate around x0.
struct ScheduleConstants {
  double L = 0.0;
  double L_F = 0.0;
  double L_H = 0.0;
  std::string source;  // "config", "hint" or "estimate"
};

ScheduleConstants resolve_schedule_constants(const ProblemInstance& problem, const Vector& x0,
                                             const AlgorithmConfig& alg);

/// One algorithm run with fixed parameters.
RunTrace run_single(const ProblemInstance& problem, const Vector& x0, const AlgorithmConfig& alg,
                    const ParameterChoice& choice, const ScheduleConstants& constants,
                    std::uint64_t K, std::uint64_t seed, const RunConfig& cfg);

struct CellResult {
  std::string label;
  std::string type;
  std::uint64_t seed = 0;
  ParameterChoice choice;
  RunTrace trace;
  /// Set when the run threw; the trace is then empty.
  std::optional<std::string> error;
};

struct SweepResult {
  std::vector<CellResult> cells;  // algorithm-major, then seed order
  std::map<std::string, ScheduleConstants> constants;
  /// Minimum objective over all traces (first `iterations` iterations).
  double f_star = 0.0;
  bool any_failed() const;
};

/// Tunes list-valued parameters on the first seed (best final objective
/// among non-aborted runs), then runs every (algorithm, seed) cell. Cells
/// run on up to cfg.jobs threads. Fills f_gap in every record.
SweepResult run_sweep(const RunConfig& cfg, std::ostream* log = nullptr);

/// Writes trace_<label>_seed<s>.csv per cell, summary.csv, fgap_series.csv,
/// run_meta.json, config.yaml (verbatim) and, with cfg.plots, SVG plots.
void write_outputs(const RunConfig& cfg, const SweepResult& result);

std::filesystem::path trace_path(const std::filesystem::path& dir, const std::string& label,
                                 std::uint64_t seed);

}  // namespace scrn::harness
