#pragma once

#include "scrn/algorithms.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace scrn::harness {

/// Bumped whenever the trace columns change.
inline constexpr int kTraceSchemaVersion = 1;

const std::vector<std::string>& trace_columns();

/// Shortest round-trip decimal; "nan", "inf", "-inf" for the specials.
std::string format_number(double v);

void write_trace_csv(std::ostream& out, const RunTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace);

/// Minimal reader for the unquoted CSV files this harness writes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index, or -1.
  int column(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace scrn::harness
