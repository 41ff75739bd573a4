#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace scrn::harness {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG line chart. With `log_y`, nonpositive values are dropped.
std::string line_plot_svg(const std::vector<Series>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label, bool log_y);

/// Reads trace CSVs and writes fgap_vs_iteration.svg and fgap_vs_time.svg
/// into `output_dir`. Series are labelled by file stem.
void write_fgap_plots(const std::filesystem::path& output_dir,
                      const std::vector<std::filesystem::path>& trace_files);

}  // namespace scrn::harness
