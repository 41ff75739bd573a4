#pragma once

#include "scrn/algorithms.hpp"
#include "scrn/oracles.hpp"
#include "scrn/problems.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scrn::harness {

/// All validation problems of a config, reported together.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct ProblemConfig {
  std::string name = "logistic";  // logistic | nls | robust | quartic
  std::optional<std::filesystem::path> dataset;
  std::optional<Eigen::Index> n_features;
  bool scale_columns = false;
  std::size_t synthetic_m = 200;
  Eigen::Index synthetic_n = 20;
  std::uint64_t data_seed = 1;
  std::optional<double> lambda;
  std::optional<double> gamma;
  bool negate_data_term = true;
  bool robust_regularized = false;
  QuarticOptions quartic;
  Eigen::Index quartic_n = 10;
};

struct X0Config {
  std::string policy = "constant";  // constant | vector | random
  double value = 0.5;
  std::vector<double> vector;
  double scale = 1.0;
};

struct ScheduleConfig {
  std::string kind = "fixed";  // theorem | fixed
  std::vector<double> eta{0.1};
  std::vector<double> theta{1.0};
  double delta = 0.0;
  std::optional<double> L;
  std::optional<double> L_F;
  std::optional<double> L_H;
};

/// One algorithm entry. List-valued parameters with several values are
/// tuned on the first seed; the best final objective wins.
struct AlgorithmConfig {
  std::string label;
  std::string type;  // scrn_pm | scrn_rm | crn | acrn | sgd_momentum
  ScheduleConfig schedule;
  OracleConfig oracles;
  SubproblemOptions subproblem;
  std::vector<double> step_size{0.1};
  std::vector<double> momentum{0.0};
  std::vector<double> sigma0{1.0};
};

struct RunConfig {
  ProblemConfig problem;
  X0Config x0;
  std::vector<AlgorithmConfig> algorithms;
  std::uint64_t iterations = 100;
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir = "out";
  bool debug_certificates = false;
  std::optional<double> early_stop_grad_tol;
  int jobs = 1;
  bool plots = false;
  /// Verbatim config text, echoed into the output directory.
  std::string source_text;
  std::filesystem::path base_dir = ".";
};

/// Parses and validates YAML config text. Relative dataset paths resolve
/// against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

ProblemPtr build_problem(const ProblemConfig& cfg);
Vector build_x0(const X0Config& cfg, Eigen::Index n, std::uint64_t seed);

}  // namespace scrn::harness
