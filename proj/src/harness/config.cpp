#include "scrn/harness/config.hpp"

#include "scrn/errors.hpp"
#include "scrn/libsvm.hpp"
#include "scrn/rng.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace scrn::harness {

namespace {

std::string join(const std::vector<std::string>& errors) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& e : errors) os << "\n  - " << e;
  return os.str();
}

class Reader {
 public:
  std::vector<std::string> errors;

  template <typename T>
  void get(const YAML::Node& node, const char* key, T& out, const std::string& where) {
    if (!node || !node[key]) return;
    try {
      out = node[key].as<T>();
    } catch (const YAML::Exception&) {
      errors.push_back(where + "." + key + ": wrong type");
    }
  }

  template <typename T>
  void get_opt(const YAML::Node& node, const char* key, std::optional<T>& out, const std::string& where) {
    if (!node || !node[key]) return;
    T v{};
    get(node, key, v, where);
    out = v;
  }

  // Accepts a scalar or a list of scalars.
  void get_list(const YAML::Node& node, const char* key, std::vector<double>& out, const std::string& where) {
    if (!node || !node[key]) return;
    const YAML::Node v = node[key];
    try {
      if (v.IsSequence()) {
        out = v.as<std::vector<double>>();
        if (out.empty()) errors.push_back(where + "." + key + ": empty list");
      } else {
        out = {v.as<double>()};
      }
    } catch (const YAML::Exception&) {
      errors.push_back(where + "." + key + ": expected a number or a list of numbers");
    }
  }

  void unknown_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
    if (!node || !node.IsMap()) return;
    for (const auto& kv : node) {
      const auto k = kv.first.as<std::string>();
      if (!allowed.count(k)) errors.push_back(where + ": unknown key '" + k + "'");
    }
  }
};

void read_gradient_oracle(Reader& r, const YAML::Node& n, GradientOracleSpec& spec, const std::string& where) {
  if (!n) return;
  r.unknown_keys(n, {"kind", "delta", "batch_fraction", "seed"}, where);
  std::string kind = std::string(to_string(spec.kind));
  r.get(n, "kind", kind, where);
  if (kind == "exact") spec.kind = GradientOracleKind::exact;
  else if (kind == "gaussian_noise") spec.kind = GradientOracleKind::gaussian_noise;
  else if (kind == "minibatch") spec.kind = GradientOracleKind::minibatch;
  else r.errors.push_back(where + ".kind: unknown gradient oracle '" + kind + "'");
  r.get(n, "delta", spec.delta, where);
  r.get(n, "batch_fraction", spec.batch_fraction, where);
  r.get(n, "seed", spec.seed, where);
  try {
    validate(spec);
  } catch (const InvalidInput& e) {
    r.errors.push_back(where + ": " + e.what());
  }
}

void read_hessian_oracle(Reader& r, const YAML::Node& n, HessianOracleSpec& spec, const std::string& where) {
  if (!n) return;
  r.unknown_keys(n, {"kind", "keep_probability", "batch_fraction", "sigma", "seed"}, where);
  std::string kind = std::string(to_string(spec.kind));
  r.get(n, "kind", kind, where);
  if (kind == "exact") spec.kind = HessianOracleKind::exact;
  else if (kind == "element_subsample") spec.kind = HessianOracleKind::element_subsample;
  else if (kind == "minibatch") spec.kind = HessianOracleKind::minibatch;
  else if (kind == "gaussian_noise") spec.kind = HessianOracleKind::gaussian_noise;
  else r.errors.push_back(where + ".kind: unknown hessian oracle '" + kind + "'");
  r.get(n, "keep_probability", spec.keep_probability, where);
  r.get(n, "batch_fraction", spec.batch_fraction, where);
  r.get(n, "sigma", spec.sigma, where);
  r.get(n, "seed", spec.seed, where);
  try {
    validate(spec);
  } catch (const InvalidInput& e) {
    r.errors.push_back(where + ": " + e.what());
  }
}

void require_positive_list(Reader& r, const std::vector<double>& v, const std::string& what) {
  for (double x : v)
    if (!(x > 0.0)) r.errors.push_back(what + ": values must be positive");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("YAML syntax: ") + e.what()});
  }
  if (!root || !root.IsMap()) throw ConfigError({"top level must be a mapping"});

  RunConfig cfg;
  cfg.source_text = text;
  cfg.base_dir = base_dir;
  Reader r;
  r.unknown_keys(root, {"problem", "x0", "algorithms", "iterations", "seeds", "output_dir",
                        "debug_certificates", "early_stop_grad_tol", "jobs", "plots"},
                 "config");

  // problem
  const YAML::Node p = root["problem"];
  if (!p) {
    r.errors.push_back("problem: missing section");
  } else {
    r.unknown_keys(p, {"name", "dataset", "n_features", "scale_columns", "synthetic", "lambda", "gamma",
                       "negate_data_term", "regularized", "quartic"},
                   "problem");
    ProblemConfig& pc = cfg.problem;
    r.get(p, "name", pc.name, "problem");
    if (pc.name != "logistic" && pc.name != "nls" && pc.name != "robust" && pc.name != "quartic") {
      r.errors.push_back("problem.name: unknown problem '" + pc.name + "'");
    }
    std::optional<std::string> dataset;
    r.get_opt(p, "dataset", dataset, "problem");
    if (dataset) {
      std::filesystem::path path = *dataset;
      if (path.is_relative()) path = base_dir / path;
      if (!std::filesystem::exists(path)) r.errors.push_back("problem.dataset: file not found: " + path.string());
      pc.dataset = path;
    }
    std::optional<long long> nf;
    r.get_opt(p, "n_features", nf, "problem");
    if (nf) pc.n_features = static_cast<Eigen::Index>(*nf);
    r.get(p, "scale_columns", pc.scale_columns, "problem");
    if (const YAML::Node s = p["synthetic"]) {
      r.unknown_keys(s, {"m", "n", "seed"}, "problem.synthetic");
      r.get(s, "m", pc.synthetic_m, "problem.synthetic");
      long long n = pc.synthetic_n;
      r.get(s, "n", n, "problem.synthetic");
      pc.synthetic_n = static_cast<Eigen::Index>(n);
      r.get(s, "seed", pc.data_seed, "problem.synthetic");
      if (pc.synthetic_m < 1 || pc.synthetic_n < 1) r.errors.push_back("problem.synthetic: m and n must be >= 1");
    }
    r.get_opt(p, "lambda", pc.lambda, "problem");
    r.get_opt(p, "gamma", pc.gamma, "problem");
    r.get(p, "negate_data_term", pc.negate_data_term, "problem");
    r.get(p, "regularized", pc.robust_regularized, "problem");
    if (const YAML::Node q = p["quartic"]) {
      r.unknown_keys(q, {"n", "seed", "q_min", "q_max", "x_star_scale", "region_radius"}, "problem.quartic");
      long long n = pc.quartic_n;
      r.get(q, "n", n, "problem.quartic");
      pc.quartic_n = static_cast<Eigen::Index>(n);
      r.get(q, "seed", pc.data_seed, "problem.quartic");
      r.get(q, "q_min", pc.quartic.q_min, "problem.quartic");
      r.get(q, "q_max", pc.quartic.q_max, "problem.quartic");
      r.get(q, "x_star_scale", pc.quartic.x_star_scale, "problem.quartic");
      r.get(q, "region_radius", pc.quartic.region_radius, "problem.quartic");
      if (pc.quartic_n < 1) r.errors.push_back("problem.quartic.n must be >= 1");
    }
  }

  // x0
  if (const YAML::Node x = root["x0"]) {
    r.unknown_keys(x, {"policy", "value", "vector", "scale"}, "x0");
    r.get(x, "policy", cfg.x0.policy, "x0");
    r.get(x, "value", cfg.x0.value, "x0");
    r.get(x, "vector", cfg.x0.vector, "x0");
    r.get(x, "scale", cfg.x0.scale, "x0");
    if (cfg.x0.policy != "constant" && cfg.x0.policy != "vector" && cfg.x0.policy != "random") {
      r.errors.push_back("x0.policy: expected constant, vector or random");
    }
    if (cfg.x0.policy == "vector" && cfg.x0.vector.empty()) r.errors.push_back("x0.vector: required for policy vector");
  }

  r.get(root, "iterations", cfg.iterations, "config");
  if (cfg.iterations < 1) r.errors.push_back("iterations: must be >= 1");
  r.get(root, "seeds", cfg.seeds, "config");
  if (cfg.seeds.empty()) r.errors.push_back("seeds: must be nonempty");
  std::string out_dir = cfg.output_dir.string();
  r.get(root, "output_dir", out_dir, "config");
  cfg.output_dir = out_dir;
  r.get(root, "debug_certificates", cfg.debug_certificates, "config");
  r.get_opt(root, "early_stop_grad_tol", cfg.early_stop_grad_tol, "config");
  r.get(root, "jobs", cfg.jobs, "config");
  if (cfg.jobs < 1) r.errors.push_back("jobs: must be >= 1");
  r.get(root, "plots", cfg.plots, "config");

  // algorithms
  const YAML::Node algs = root["algorithms"];
  if (!algs || !algs.IsSequence() || algs.size() == 0) {
    r.errors.push_back("algorithms: need a nonempty list");
  } else {
    std::set<std::string> labels;
    for (std::size_t i = 0; i < algs.size(); ++i) {
      const YAML::Node a = algs[i];
      const std::string where = "algorithms[" + std::to_string(i) + "]";
      r.unknown_keys(a, {"label", "type", "schedule", "gradient_oracle", "hessian_oracle", "subproblem",
                         "step_size", "momentum", "sigma0"},
                     where);
      AlgorithmConfig ac;
      r.get(a, "type", ac.type, where);
      ac.label = ac.type;
      r.get(a, "label", ac.label, where);
      if (ac.type != "scrn_pm" && ac.type != "scrn_rm" && ac.type != "crn" && ac.type != "acrn" &&
          ac.type != "sgd_momentum") {
        r.errors.push_back(where + ".type: unknown algorithm '" + ac.type + "'");
      }
      if (!labels.insert(ac.label).second) r.errors.push_back(where + ".label: duplicate '" + ac.label + "'");
      if (const YAML::Node s = a["schedule"]) {
        const std::string sw = where + ".schedule";
        r.unknown_keys(s, {"kind", "eta", "theta", "delta", "L", "L_F", "L_H"}, sw);
        r.get(s, "kind", ac.schedule.kind, sw);
        if (ac.schedule.kind != "theorem" && ac.schedule.kind != "fixed") {
          r.errors.push_back(sw + ".kind: expected theorem or fixed");
        }
        r.get_list(s, "eta", ac.schedule.eta, sw);
        r.get_list(s, "theta", ac.schedule.theta, sw);
        r.get(s, "delta", ac.schedule.delta, sw);
        r.get_opt(s, "L", ac.schedule.L, sw);
        r.get_opt(s, "L_F", ac.schedule.L_F, sw);
        r.get_opt(s, "L_H", ac.schedule.L_H, sw);
        require_positive_list(r, ac.schedule.eta, sw + ".eta");
        for (double t : ac.schedule.theta)
          if (!(t > 0.0 && t <= 1.0)) r.errors.push_back(sw + ".theta: values must lie in (0, 1]");
      }
      read_gradient_oracle(r, a["gradient_oracle"], ac.oracles.gradient, where + ".gradient_oracle");
      read_hessian_oracle(r, a["hessian_oracle"], ac.oracles.hessian, where + ".hessian_oracle");
      if (const YAML::Node s = a["subproblem"]) {
        const std::string sw = where + ".subproblem";
        r.unknown_keys(s, {"solver", "krylov_dim", "dense_cutoff", "exact_tol", "lanczos_tol"}, sw);
        std::string solver = "automatic";
        r.get(s, "solver", solver, sw);
        if (solver == "automatic") ac.subproblem.solver = SubproblemSolver::automatic;
        else if (solver == "exact") ac.subproblem.solver = SubproblemSolver::exact;
        else if (solver == "lanczos") ac.subproblem.solver = SubproblemSolver::lanczos;
        else r.errors.push_back(sw + ".solver: expected automatic, exact or lanczos");
        r.get(s, "krylov_dim", ac.subproblem.krylov_dim, sw);
        long long cutoff = ac.subproblem.dense_cutoff;
        r.get(s, "dense_cutoff", cutoff, sw);
        ac.subproblem.dense_cutoff = static_cast<Eigen::Index>(cutoff);
        r.get(s, "exact_tol", ac.subproblem.exact_tol, sw);
        r.get(s, "lanczos_tol", ac.subproblem.lanczos_tol, sw);
      }
      r.get_list(a, "step_size", ac.step_size, where);
      r.get_list(a, "momentum", ac.momentum, where);
      r.get_list(a, "sigma0", ac.sigma0, where);
      for (double v : ac.step_size)
        if (!(v >= 0.0)) r.errors.push_back(where + ".step_size: values must be nonnegative");
      for (double v : ac.momentum)
        if (!(v >= 0.0 && v < 1.0)) r.errors.push_back(where + ".momentum: values must lie in [0, 1)");
      require_positive_list(r, ac.sigma0, where + ".sigma0");
      cfg.algorithms.push_back(std::move(ac));
    }
  }

  if (!r.errors.empty()) throw ConfigError(r.errors);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path().empty() ? "." : path.parent_path());
}

ProblemPtr build_problem(const ProblemConfig& cfg) {
  if (cfg.name == "quartic") return synthetic_quartic(cfg.quartic_n, cfg.data_seed, cfg.quartic);

  GlmData data;
  if (cfg.dataset) {
    ParseOptions po;
    po.n_features = cfg.n_features;
    Dataset ds = load_libsvm(*cfg.dataset, po);
    if (cfg.name == "logistic" || cfg.name == "nls") ds = relabel(ds, LabelConvention::zero_one);
    data = to_glm_data(ds, cfg.scale_columns);
  } else {
    data = synthetic_classification(cfg.synthetic_m, cfg.synthetic_n, cfg.data_seed);
  }

  if (cfg.name == "logistic") {
    LogisticOptions lo;
    lo.lambda = cfg.lambda.value_or(0.001);
    lo.gamma = cfg.gamma.value_or(10.0);
    lo.negate_data_term = cfg.negate_data_term;
    return logistic_objective(std::move(data), lo);
  }
  if (cfg.name == "nls") {
    return nls_objective(std::move(data), cfg.lambda.value_or(0.001), cfg.gamma.value_or(1.0));
  }
  std::optional<NonconvexRegularizer> reg;
  if (cfg.robust_regularized) reg = NonconvexRegularizer{cfg.lambda.value_or(0.001), cfg.gamma.value_or(1.0)};
  return robust_regression_objective(std::move(data), reg);
}

Vector build_x0(const X0Config& cfg, Eigen::Index n, std::uint64_t seed) {
  if (cfg.policy == "vector") {
    if (static_cast<Eigen::Index>(cfg.vector.size()) != n) {
      throw ConfigError({"x0.vector: length " + std::to_string(cfg.vector.size()) +
                         " does not match problem dimension " + std::to_string(n)});
    }
    return Eigen::Map<const Vector>(cfg.vector.data(), n);
  }
  if (cfg.policy == "random") {
    RngStream rng(seed, StreamId::start_point, 0);
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = cfg.scale * rng.normal();
    return x;
  }
  return Vector::Constant(n, cfg.value);
}

}  // namespace scrn::harness
