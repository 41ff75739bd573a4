#include "scrn/harness/runner.hpp"

#include "scrn/errors.hpp"
#include "scrn/harness/csv.hpp"
#include "scrn/harness/svg.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <thread>

namespace scrn::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_scrn(const std::string& type) { return type == "scrn_pm" || type == "scrn_rm"; }

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

double final_f(const RunTrace& t) {
  if (t.aborted || t.records.empty()) return kInf;
  const double f = t.records.back().f;
  return std::isfinite(f) ? f : kInf;
}

std::string describe(const ParameterChoice& c) {
  std::string out;
  for (const auto& [k, v] : c.values) {
    if (!out.empty()) out += ';';
    out += k + '=' + format_number(v);
  }
  return out;
}

std::string status_of(const CellResult& c) {
  if (c.error) return "failed";
  if (c.trace.aborted) return "aborted";
  return "ok";
}

}  // namespace

bool SweepResult::any_failed() const {
  return std::any_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.error.has_value(); });
}

std::vector<ParameterChoice> parameter_grid(const AlgorithmConfig& alg) {
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  if (is_scrn(alg.type)) {
    if (alg.schedule.kind == "fixed") {
      axes.emplace_back("eta", alg.schedule.eta);
      axes.emplace_back("theta", alg.schedule.theta);
    }
  } else if (alg.type == "crn") {
    axes.emplace_back("eta", alg.schedule.eta);
  } else if (alg.type == "acrn") {
    axes.emplace_back("sigma0", alg.sigma0);
  } else if (alg.type == "sgd_momentum") {
    axes.emplace_back("step_size", alg.step_size);
    axes.emplace_back("momentum", alg.momentum);
  }
  std::vector<ParameterChoice> grid{ParameterChoice{}};
  for (const auto& [name, values] : axes) {
    std::vector<ParameterChoice> next;
    for (const auto& base : grid) {
      for (double v : values) {
        ParameterChoice c = base;
        c.values[name] = v;
        next.push_back(std::move(c));
      }
    }
    grid = std::move(next);
  }
  return grid;
}

ScheduleConstants resolve_schedule_constants(const ProblemInstance& problem, const Vector& x0,
                                             const AlgorithmConfig& alg) {
  ScheduleConstants c;
  const auto& s = alg.schedule;
  std::optional<LipschitzHints> hints = problem.lipschitz_hints();
  std::optional<LipschitzEstimate> est;
  auto estimate = [&]() -> const LipschitzEstimate& {
    if (!est) est = estimate_lipschitz(problem, x0, 1.0, 0x11b5);
    return *est;
  };
  std::string source = "config";
  auto pick = [&](const std::optional<double>& given, double LipschitzHints::*hint_field,
                  double LipschitzEstimate::*est_field) {
    if (given) return *given;
    if (hints && (*hints).*hint_field > 0.0) {
      if (source == "config") source = "hint";
      return (*hints).*hint_field;
    }
    source = "estimate";
    return estimate().*est_field;
  };
  c.L = pick(s.L, &LipschitzHints::L, &LipschitzEstimate::L);
  c.L_F = pick(s.L_F, &LipschitzHints::L_F, &LipschitzEstimate::L_F);
  if (s.L_H) {
    c.L_H = *s.L_H;
  } else {
    // Mean-cubed smoothness of the sampled Hessians scales with the
    // inverse sampling rate.
    const auto& h = alg.oracles.hessian;
    switch (h.kind) {
      case HessianOracleKind::element_subsample: c.L_H = c.L_F / h.keep_probability; break;
      case HessianOracleKind::minibatch: c.L_H = c.L_F / h.batch_fraction; break;
      default: c.L_H = c.L_F;
    }
  }
  c.source = source;
  return c;
}

RunTrace run_single(const ProblemInstance& problem, const Vector& x0, const AlgorithmConfig& alg,
                    const ParameterChoice& choice, const ScheduleConstants& constants,
                    std::uint64_t K, std::uint64_t seed, const RunConfig& cfg) {
  RunOptions opts;
  opts.subproblem = alg.subproblem;
  opts.seed = seed;
  opts.debug_certificates = cfg.debug_certificates;
  opts.early_stop_grad_tol = cfg.early_stop_grad_tol;
  if (alg.schedule.L) opts.certificate_L = *alg.schedule.L;
  auto param = [&](const char* name) { return choice.values.at(name); };

  RunTrace trace;
  if (is_scrn(alg.type)) {
    const bool pm = alg.type == "scrn_pm";
    ScheduleParams sched;
    if (alg.schedule.kind == "theorem") {
      sched = pm ? pm_schedule(K, constants.L, constants.L_F)
                 : rm_schedule(K, constants.L, constants.L_F, constants.L_H);
      if (!alg.schedule.L && constants.L > 0.0) opts.certificate_L = constants.L;
    } else {
      sched = fixed_schedule(K, param("eta"), param("theta"), alg.schedule.delta,
                             alg.schedule.L.value_or(0.0));
    }
    trace = scrn_run(problem, x0, pm ? MomentumKind::polyak : MomentumKind::recursive, sched,
                     alg.oracles, opts);
  } else if (alg.type == "crn") {
    trace = crn_run(problem, x0, param("eta"), K, opts);
  } else if (alg.type == "acrn") {
    AdaptiveCrnOptions a;
    a.sigma0 = param("sigma0");
    trace = adaptive_crn_run(problem, x0, K, a, opts);
  } else if (alg.type == "sgd_momentum") {
    trace = sgd_momentum_run(problem, x0, param("step_size"), param("momentum"),
                             alg.oracles.gradient, K, opts);
  } else {
    throw InvalidInput("unknown algorithm type " + alg.type);
  }
  trace.algorithm = alg.label;
  return trace;
}

SweepResult run_sweep(const RunConfig& cfg, std::ostream* log) {
  const ProblemPtr problem = build_problem(cfg.problem);
  const Vector x0 = build_x0(cfg.x0, problem->dim(), cfg.problem.data_seed);
  const std::uint64_t K = cfg.iterations;

  SweepResult result;
  std::vector<std::vector<ParameterChoice>> grids;
  for (const auto& alg : cfg.algorithms) {
    grids.push_back(parameter_grid(alg));
    ScheduleConstants c;
    if (is_scrn(alg.type) && alg.schedule.kind == "theorem") {
      c = resolve_schedule_constants(*problem, x0, alg);
    } else {
      c.source = "unused";
    }
    result.constants[alg.label] = c;
  }

  auto run_cell = [&](std::size_t a, const ParameterChoice& choice, std::uint64_t seed) {
    const auto& alg = cfg.algorithms[a];
    CellResult cell;
    cell.label = alg.label;
    cell.type = alg.type;
    cell.seed = seed;
    cell.choice = choice;
    try {
      cell.trace = run_single(*problem, x0, alg, choice, result.constants.at(alg.label), K, seed, cfg);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    return cell;
  };

  // Tuning on the first seed.
  struct TuneTask {
    std::size_t alg;
    std::size_t choice;
  };
  std::vector<TuneTask> tune_tasks;
  for (std::size_t a = 0; a < grids.size(); ++a)
    if (grids[a].size() > 1)
      for (std::size_t c = 0; c < grids[a].size(); ++c) tune_tasks.push_back({a, c});
  std::vector<CellResult> tuned(tune_tasks.size());
  if (log && !tune_tasks.empty()) *log << "tuning: " << tune_tasks.size() << " runs\n";
  parallel_for(tune_tasks.size(), cfg.jobs, [&](std::size_t i) {
    tuned[i] = run_cell(tune_tasks[i].alg, grids[tune_tasks[i].alg][tune_tasks[i].choice], cfg.seeds.front());
  });

  std::vector<std::size_t> best(grids.size(), 0);
  std::vector<std::optional<std::size_t>> best_task(grids.size());
  for (std::size_t i = 0; i < tune_tasks.size(); ++i) {
    const std::size_t a = tune_tasks[i].alg;
    const double f = tuned[i].error ? kInf : final_f(tuned[i].trace);
    const double cur = best_task[a] ? (tuned[*best_task[a]].error ? kInf : final_f(tuned[*best_task[a]].trace)) : kInf;
    if (!best_task[a] || f < cur) {
      best_task[a] = i;
      best[a] = tune_tasks[i].choice;
    }
  }
  if (log) {
    for (std::size_t a = 0; a < grids.size(); ++a)
      if (grids[a].size() > 1)
        *log << "tuned " << cfg.algorithms[a].label << ": " << describe(grids[a][best[a]]) << '\n';
  }

  // Final cells; the tuning run on the first seed is reused.
  struct Task {
    std::size_t alg;
    std::size_t seed_index;
  };
  std::vector<Task> tasks;
  for (std::size_t a = 0; a < grids.size(); ++a)
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) tasks.push_back({a, s});
  result.cells.resize(tasks.size());
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
    const auto [a, s] = tasks[i];
    if (s == 0 && best_task[a]) {
      result.cells[i] = tuned[*best_task[a]];
      return;
    }
    result.cells[i] = run_cell(a, grids[a][best[a]], cfg.seeds[s]);
  });
  if (log) {
    for (const auto& c : result.cells)
      *log << c.label << " seed " << c.seed << ": " << status_of(c)
           << (c.error ? " (" + *c.error + ")" : std::string()) << '\n';
  }

  double f_star = kInf;
  for (const auto& c : result.cells) {
    for (const auto& r : c.trace.records) {
      if (r.k > K) break;
      if (std::isfinite(r.f)) f_star = std::min(f_star, r.f);
    }
  }
  result.f_star = std::isfinite(f_star) ? f_star : kNaN;
  for (auto& c : result.cells)
    for (auto& r : c.trace.records) r.f_gap = r.f - result.f_star;
  return result;
}

std::filesystem::path trace_path(const std::filesystem::path& dir, const std::string& label,
                                 std::uint64_t seed) {
  return dir / ("trace_" + label + "_seed" + std::to_string(seed) + ".csv");
}

void write_outputs(const RunConfig& cfg, const SweepResult& result) {
  const auto& dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "config.yaml") << cfg.source_text;

  std::vector<std::filesystem::path> traces;
  for (const auto& c : result.cells) {
    const auto path = trace_path(dir, c.label, c.seed);
    write_trace_csv(path, c.trace);
    traces.push_back(path);
  }

  {
    std::ofstream out(dir / "summary.csv");
    out << "label,type,seed,status,iterations,final_f,final_f_gap,min_f,final_grad_norm,"
           "final_min_eig,final_mu_eta,sampled_index,schedule_invalid,early_stopped,converged,"
           "certificate_checks,certificate_violations,f_star,params\n";
    for (const auto& c : result.cells) {
      const auto& t = c.trace;
      const IterationRecord last = t.records.empty() ? IterationRecord{} : t.records.back();
      double min_f = kInf;
      for (const auto& r : t.records)
        if (std::isfinite(r.f)) min_f = std::min(min_f, r.f);
      const bool empty = t.records.empty();
      out << c.label << ',' << c.type << ',' << c.seed << ',' << status_of(c) << ','
          << (empty ? 0 : last.k) << ',' << format_number(empty ? kNaN : last.f) << ','
          << format_number(empty ? kNaN : last.f_gap) << ',' << format_number(empty ? kNaN : min_f)
          << ',' << format_number(empty ? kNaN : last.grad_norm) << ','
          << format_number(empty ? kNaN : last.min_eig) << ','
          << format_number(empty ? kNaN : last.mu_eta) << ',' << t.sampled_index << ','
          << t.schedule_invalid << ',' << t.early_stopped << ',' << t.converged << ','
          << t.certificates_checked << ',' << t.violations.size() << ','
          << format_number(result.f_star) << ',' << describe(c.choice) << '\n';
    }
  }

  {
    // Mean f-gap over seeds per algorithm.
    std::vector<std::string> labels;
    for (const auto& alg : cfg.algorithms) labels.push_back(alg.label);
    std::ofstream out(dir / "fgap_series.csv");
    out << "k";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::uint64_t k = 0; k <= cfg.iterations; ++k) {
      out << k;
      for (const auto& l : labels) {
        double sum = 0.0;
        int count = 0;
        for (const auto& c : result.cells) {
          if (c.label != l || k >= c.trace.records.size()) continue;
          sum += c.trace.records[k].f_gap;
          ++count;
        }
        out << ',' << format_number(count ? sum / count : kNaN);
      }
      out << '\n';
    }
  }

  nlohmann::ordered_json meta;
  meta["schema_version"] = kTraceSchemaVersion;
  meta["trace_columns"] = trace_columns();
  meta["iterations"] = cfg.iterations;
  meta["seeds"] = cfg.seeds;
  meta["f_star"] = std::isfinite(result.f_star) ? nlohmann::ordered_json(result.f_star) : nlohmann::ordered_json();
  meta["problem"] = cfg.problem.name;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& c : result.cells) {
    nlohmann::ordered_json j;
    j["label"] = c.label;
    j["type"] = c.type;
    j["seed"] = c.seed;
    j["status"] = status_of(c);
    if (c.error) j["error"] = *c.error;
    if (c.trace.aborted) j["abort_reason"] = c.trace.abort_reason;
    j["params"] = c.choice.values;
    const auto& k = result.constants.at(c.label);
    if (k.source != "unused") {
      j["constants"] = {{"L", k.L}, {"L_F", k.L_F}, {"L_H", k.L_H}, {"source", k.source}};
    }
    if (const auto& s = c.trace.schedule) {
      j["schedule"] = {{"method", std::string(to_string(s->method))},
                       {"K", s->K},
                       {"eta", s->eta},
                       {"theta", s->theta},
                       {"delta", s->delta},
                       {"validity_threshold", s->validity_threshold},
                       {"valid", s->valid}};
    }
    j["sampled_index"] = c.trace.sampled_index;
    j["schedule_invalid"] = c.trace.schedule_invalid;
    j["early_stopped"] = c.trace.early_stopped;
    j["converged"] = c.trace.converged;
    j["certificate_checks"] = c.trace.certificates_checked;
    j["certificate_violations"] = c.trace.violations.size();
    cells.push_back(std::move(j));
  }
  meta["cells"] = std::move(cells);
  std::ofstream(dir / "run_meta.json") << meta.dump(2) << '\n';

  if (cfg.plots) write_fgap_plots(dir, traces);
}

}  // namespace scrn::harness
