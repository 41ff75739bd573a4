#pragma once

#include "scrn/problems.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scrn {

enum class LabelConvention { zero_one, plus_minus_one };

std::string_view to_string(LabelConvention c);

/// Parsed LIBSVM file. Feature indices are 0-based and strictly increasing
/// within each row.
struct Dataset {
  using Row = std::vector<std::pair<Eigen::Index, double>>;

  std::string name;
  Eigen::Index n = 0;
  std::vector<Row> rows;
  Vector labels;
  /// Empty when the labels fit neither convention.
  std::optional<LabelConvention> label_convention;

  std::size_t m() const { return rows.size(); }
  std::size_t nnz() const;
};

struct ParseOptions {
  std::string name;
  /// Feature count; defaults to the largest index seen. Must be at least
  /// that index.
  std::optional<Eigen::Index> n_features;
};

/// Lines of `label idx:val idx:val ...`; text after `#` is ignored and
/// blank lines are skipped. Throws ParseError with a 1-based line and
/// column for malformed tokens or non-increasing indices, and InvalidInput
/// for inputs with no samples or no features.
Dataset parse_libsvm(std::string_view text, const ParseOptions& opts = {});
Dataset load_libsvm(const std::filesystem::path& path, ParseOptions opts = {});

/// One line per row, shortest round-trip number formatting, 1-based
/// indices, no comments.
std::string serialize_libsvm(const Dataset& d);

/// Maps −1 ↔ 0 (1 stays 1). Throws InvalidInput for labels outside both
/// conventions.
Dataset relabel(const Dataset& d, LabelConvention target);

/// Sparse design matrix and labels. With `scale_columns`, each feature
/// column is divided by its root mean square (zero columns untouched).
GlmData to_glm_data(const Dataset& d, bool scale_columns = false);

/// Where the named binary-classification dataset can be downloaded.
std::string canonical_download_url(std::string_view name);

}  // namespace scrn
