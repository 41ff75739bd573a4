// Command-line front end: run, check, rate-study, dataset-info.

#include "scrn/errors.hpp"
#include "scrn/harness/config.hpp"
#include "scrn/harness/rate_study.hpp"
#include "scrn/harness/runner.hpp"
#include "scrn/libsvm.hpp"
#include "scrn/verify/suites.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

namespace {

enum Exit { kOk = 0, kConfigError = 1, kRunFailure = 2, kCheckFailure = 3 };

int cmd_run(const std::string& path, std::optional<int> jobs, std::optional<std::string> output,
            bool plots) {
  scrn::harness::RunConfig cfg;
  try {
    cfg = scrn::harness::load_config(path);
  } catch (const scrn::harness::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  }
  if (jobs) cfg.jobs = *jobs;
  if (output) cfg.output_dir = *output;
  if (plots) cfg.plots = true;
  try {
    const auto result = scrn::harness::run_sweep(cfg, &std::cerr);
    scrn::harness::write_outputs(cfg, result);
    std::cout << "f* = " << result.f_star << "; outputs in " << cfg.output_dir.string() << '\n';
    return result.any_failed() ? kRunFailure : kOk;
  } catch (const scrn::harness::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const scrn::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kRunFailure;
  }
}

int cmd_check(const std::string& suite, std::optional<std::string> json_path) {
  std::vector<scrn::verify::SuiteReport> reports;
  try {
    reports = scrn::verify::run_suites(suite);
  } catch (const scrn::InvalidInput& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  }
  bool ok = true;
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json suite_json{{"suite", r.suite}, {"passed", r.passed()}};
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << r.suite << '/' << c.name << ": " << c.detail
                << " (" << c.seconds << " s)\n";
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds}});
    }
    suite_json["checks"] = std::move(checks);
    j.push_back(std::move(suite_json));
    ok = ok && r.passed();
  }
  if (json_path) std::ofstream(*json_path) << j.dump(2) << '\n';
  return ok ? kOk : kCheckFailure;
}

int cmd_rate_study(scrn::harness::RateStudyOptions opts, const std::string& method,
                   std::optional<std::string> json_path) {
  opts.method = method == "rm" ? scrn::ScheduleMethod::rm : scrn::ScheduleMethod::pm;
  try {
    const auto res = scrn::harness::rate_study(opts);
    nlohmann::ordered_json j;
    j["method"] = method;
    for (const auto& p : res.points) {
      std::cout << "K=" << p.K << "  E[mu]=" << p.mean_mu << " +- " << p.std_error
                << (p.schedule_valid ? "" : "  (schedule outside its validity range)") << '\n';
      j["points"].push_back({{"K", p.K}, {"mean_mu", p.mean_mu}, {"std_error", p.std_error},
                             {"runs", p.runs}, {"schedule_valid", p.schedule_valid}});
    }
    std::cout << "slope " << res.fit.slope << "  " << res.fit.confidence * 100 << "% CI ["
              << res.fit.ci_low << ", " << res.fit.ci_high << "]\n";
    j["slope"] = res.fit.slope;
    j["ci"] = {res.fit.ci_low, res.fit.ci_high};
    if (json_path) std::ofstream(*json_path) << j.dump(2) << '\n';
    return kOk;
  } catch (const scrn::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "rate study failed: " << e.what() << '\n';
    return kRunFailure;
  }
}

int cmd_dataset_info(const std::string& path) {
  try {
    const scrn::Dataset d = scrn::load_libsvm(path);
    std::cout << "samples  " << d.m() << "\nfeatures " << d.n << "\nnonzeros " << d.nnz()
              << "\nlabels   " << (d.label_convention ? scrn::to_string(*d.label_convention) : "other")
              << '\n';
    return kOk;
  } catch (const scrn::ParseError& e) {
    std::cerr << path << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
  }
  return kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic cubic regularized Newton experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a configured sweep");
  std::string config_path;
  std::optional<int> jobs;
  std::optional<std::string> output;
  bool plots = false;
  run->add_option("config", config_path, "YAML config file")->required();
  run->add_option("-j,--jobs", jobs, "parallel cells");
  run->add_option("-o,--output", output, "output directory (overrides the config)");
  run->add_flag("--plots", plots, "write SVG plots");

  auto* check = app.add_subcommand("check", "run property suites");
  std::string suite = "all";
  std::optional<std::string> check_json;
  check->add_option("suite", suite, "lemmas | oracles | subproblem | schedules | all")
      ->check(CLI::IsMember({"lemmas", "oracles", "subproblem", "schedules", "all"}));
  check->add_option("--json", check_json, "write a JSON report");

  auto* rate = app.add_subcommand("rate-study", "fit the convergence exponent on the quartic");
  scrn::harness::RateStudyOptions rate_opts;
  std::string method = "pm";
  std::optional<std::string> rate_json;
  bool exact = false;
  rate->add_option("--method", method)->check(CLI::IsMember({"pm", "rm"}));
  rate->add_option("--K", rate_opts.K_values, "iteration counts")->delimiter(',');
  rate->add_option("--seeds", rate_opts.seeds);
  rate->add_option("--base-seed", rate_opts.base_seed);
  rate->add_option("--L", rate_opts.L);
  rate->add_option("--L-F", rate_opts.L_F);
  rate->add_option("--L-H", rate_opts.L_H);
  rate->add_option("--hessian-sigma", rate_opts.hessian_sigma);
  rate->add_flag("--exact", exact, "noiseless oracles");
  rate->add_option("-j,--jobs", rate_opts.jobs);
  rate->add_option("--json", rate_json);

  auto* info = app.add_subcommand("dataset-info", "summarize a LIBSVM file");
  std::string dataset;
  info->add_option("file", dataset)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  if (*run) return cmd_run(config_path, jobs, output, plots);
  if (*check) return cmd_check(suite, check_json);
  if (*rate) {
    rate_opts.noisy = !exact;
    return cmd_rate_study(rate_opts, method, rate_json);
  }
  return cmd_dataset_info(dataset);
}
