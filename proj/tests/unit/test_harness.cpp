#include "scrn/errors.hpp"
#include "scrn/harness/config.hpp"
#include "scrn/harness/csv.hpp"
#include "scrn/harness/rate_study.hpp"
#include "scrn/harness/runner.hpp"
#include "scrn/harness/svg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace {

using namespace scrn;
using namespace scrn::harness;

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("scrn_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// CSV content with the wall-clock column blanked.
std::string without_wallclock(const std::filesystem::path& p) {
  const CsvTable t = read_csv(p);
  const int w = t.column("wallclock_s");
  std::string out;
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      if (static_cast<int>(i) != w) out += row[i] + ",";
    out += '\n';
  }
  return out;
}

const char* kSmallSweep = R"(
problem:
  name: logistic
  synthetic: {m: 60, n: 6, seed: 2}
iterations: 15
seeds: [1, 2, 3]
algorithms:
  - label: pm
    type: scrn_pm
    schedule: {kind: fixed, eta: [0.5, 2.0], theta: 0.3}
    hessian_oracle: {kind: element_subsample, keep_probability: 0.5}
  - label: sgd
    type: sgd_momentum
    gradient_oracle: {kind: minibatch, batch_fraction: 0.5}
    step_size: 0.1
    momentum: 0.9
)";

TEST(Config, ParsesDefaults) {
  const RunConfig c = parse_config(kSmallSweep);
  EXPECT_EQ(c.problem.name, "logistic");
  EXPECT_EQ(c.x0.policy, "constant");
  EXPECT_EQ(c.x0.value, 0.5);
  ASSERT_EQ(c.algorithms.size(), 2u);
  EXPECT_EQ(c.algorithms[0].schedule.eta.size(), 2u);
  EXPECT_EQ(c.algorithms[0].oracles.hessian.kind, HessianOracleKind::element_subsample);
  EXPECT_EQ(parameter_grid(c.algorithms[0]).size(), 2u);
  EXPECT_EQ(parameter_grid(c.algorithms[1]).size(), 1u);
}

TEST(Config, ErrorsReportedTogether) {
  const char* bad = R"(
problem: {name: nope, dataset: /no/such/file.svm}
iterations: 0
seeds: []
algorithms:
  - {type: magic}
  - {type: crn, schedule: {eta: -1}}
)";
  try {
    parse_config(bad);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_GE(e.errors().size(), 6u);
  }
  EXPECT_THROW(parse_config("problem: [1, 2"), ConfigError);
  EXPECT_THROW(parse_config("problem: {name: quartic}\nalgorithms: []\n"), ConfigError);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_config("problem: {name: quartic, colour: red}\nalgorithms: [{type: crn}]\n"), ConfigError);
}

TEST(Config, BuildX0Policies) {
  X0Config c;
  EXPECT_EQ(build_x0(c, 3, 1), Vector::Constant(3, 0.5));
  c.policy = "vector";
  c.vector = {1.0, 2.0};
  EXPECT_THROW(build_x0(c, 3, 1), ConfigError);
  c.policy = "random";
  EXPECT_EQ(build_x0(c, 4, 9), build_x0(c, 4, 9));
  EXPECT_NE(build_x0(c, 4, 9), build_x0(c, 4, 10));
}

TEST(Sweep, CountingAndFStar) {
  RunConfig cfg = parse_config(kSmallSweep);
  cfg.output_dir = temp_dir("count");
  const auto result = run_sweep(cfg);
  write_outputs(cfg, result);
  int traces = 0;
  for (const auto& e : std::filesystem::directory_iterator(cfg.output_dir))
    if (e.path().filename().string().rfind("trace_", 0) == 0) ++traces;
  EXPECT_EQ(traces, 6);
  EXPECT_TRUE(std::filesystem::exists(cfg.output_dir / "summary.csv"));
  EXPECT_EQ(slurp(cfg.output_dir / "config.yaml"), kSmallSweep);

  double min_f = INFINITY;
  for (const auto& c : result.cells)
    for (const auto& r : c.trace.records) min_f = std::min(min_f, r.f);
  EXPECT_EQ(result.f_star, min_f);
  const CsvTable summary = read_csv(cfg.output_dir / "summary.csv");
  EXPECT_EQ(summary.rows.size(), 6u);
  for (double f : summary.numeric_column("f_star")) EXPECT_EQ(f, min_f);
  for (const auto& c : result.cells)
    for (const auto& r : c.trace.records) EXPECT_EQ(r.f_gap, r.f - min_f);
}

TEST(Sweep, RerunIsBitwiseIdentical) {
  RunConfig a = parse_config(kSmallSweep);
  a.output_dir = temp_dir("det_a");
  a.jobs = 2;
  RunConfig b = parse_config(kSmallSweep);
  b.output_dir = temp_dir("det_b");
  write_outputs(a, run_sweep(a));
  write_outputs(b, run_sweep(b));
  for (const auto& e : std::filesystem::directory_iterator(a.output_dir)) {
    const auto name = e.path().filename();
    if (name.string().rfind("trace_", 0) == 0) {
      EXPECT_EQ(without_wallclock(e.path()), without_wallclock(b.output_dir / name)) << name;
    } else if (name.extension() != ".svg") {
      EXPECT_EQ(slurp(e.path()), slurp(b.output_dir / name)) << name;
    }
  }
}

TEST(Sweep, FailuresAreIsolated) {
  // A Lanczos-only solver with krylov_dim 1 is rejected per run.
  const char* cfg_text = R"(
problem: {name: quartic, quartic: {n: 4}}
iterations: 5
algorithms:
  - {label: broken, type: crn, schedule: {eta: 0.1}, subproblem: {solver: lanczos, krylov_dim: 1}}
  - {label: fine, type: crn, schedule: {eta: 0.1}}
)";
  RunConfig cfg = parse_config(cfg_text);
  const auto result = run_sweep(cfg);
  ASSERT_EQ(result.cells.size(), 2u);
  EXPECT_TRUE(result.cells[0].error.has_value());
  EXPECT_FALSE(result.cells[1].error.has_value());
  EXPECT_TRUE(result.any_failed());
  EXPECT_TRUE(std::isfinite(result.f_star));
}

TEST(Sweep, TheoremScheduleRecordsConstants) {
  const char* cfg_text = R"(
problem: {name: quartic, quartic: {n: 4, q_min: 0.5}}
iterations: 20
algorithms:
  - {label: rm, type: scrn_rm, schedule: {kind: theorem, L_F: 0.5, L_H: 0.5}}
)";
  RunConfig cfg = parse_config(cfg_text);
  const auto result = run_sweep(cfg);
  const auto& c = result.constants.at("rm");
  EXPECT_EQ(c.L_F, 0.5);
  EXPECT_GT(c.L, 0.0);
  ASSERT_TRUE(result.cells[0].trace.schedule);
  EXPECT_EQ(result.cells[0].trace.schedule->method, ScheduleMethod::rm);
}

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, TraceHeader) {
  RunTrace t;
  t.records.resize(2);
  std::ostringstream os;
  write_trace_csv(os, t);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "k,f,f_gap,grad_norm,min_eig,mu_eta,step_norm,hessian_err_frob,grad_err,potential,"
            "kkt_residual,wallclock_s");
}

TEST(Svg, ProducesPolylines) {
  const std::string svg = line_plot_svg({{"a", {0, 1, 2}, {1, 0.1, 0.01}}, {"b<", {0, 1}, {1, 0}}}, "t", "x", "y", true);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("b&lt;"), std::string::npos);
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 5, true);
}

TEST(LogLogFit, ExactPowerLaw) {
  std::vector<double> x{64, 128, 256, 512, 1024}, y;
  for (double k : x) y.push_back(3.0 * std::pow(k, -0.857));
  const auto fit = fit_loglog(x, y);
  EXPECT_NEAR(fit.slope, -0.857, 1e-12);
  EXPECT_NEAR(fit.ci_low, fit.slope, 1e-9);
  EXPECT_NEAR(std::exp(fit.intercept), 3.0, 1e-10);
  EXPECT_THROW(fit_loglog({1, 2}, {1, 2}), InvalidInput);
  EXPECT_THROW(fit_loglog({1, 2, 3}, {1, -2, 3}), InvalidInput);
}

TEST(RateStudy, RejectsThinGrids) {
  RateStudyOptions o;
  o.K_values = {64, 128, 256};
  EXPECT_THROW(rate_study(o), InvalidInput);
  o.K_values = {64, 80, 100, 120};
  EXPECT_THROW(rate_study(o), InvalidInput);
  o.K_values = {64, 128, 256, 1024};
  o.seeds = 5;
  EXPECT_THROW(rate_study(o), InvalidInput);
}

TEST(RateStudy, NoiselessAtLeastAsFastAsNoisy) {
  RateStudyOptions o;
  o.K_values = {32, 64, 128, 320};
  o.seeds = 20;
  const auto noisy = rate_study(o);
  o.noisy = false;
  o.seeds = 20;
  const auto exact = rate_study(o);
  EXPECT_LE(exact.fit.slope, noisy.fit.slope + 0.05);
}

}  // namespace
