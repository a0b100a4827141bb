// sdglab: configuration-driven experiment runner for the infinity-Laplacian
// stochastic differential game laboratory.
//
// Usage:
//   sdglab <subcommand> [--config PATH] [--<dotted.key> VALUE ...]
//
// Subcommands: validate, lambda-check, strategy-solve, simulate,
//              verify-value, certify, converge.
//
// Config files are INI-style ([section] headers, key = value lines); every
// value is overridable by a flag of the same dotted name, e.g.
//   sdglab verify-value --config run.ini --sim.n_paths 200000
// Shorthand flags: --seed, --paths, --dt, --delta, --out, --quiet.
//
// Exit codes: 0 all checks passed, 1 some check failed, 2 configuration error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sdg/analyze.hpp"

using nlohmann::json;
using namespace sdg;

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::string line, section;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']') {
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("malformed config line: " + line);
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      values_[section.empty() ? key : section + "." + key] = value;
    }
  }

  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
  }
  double get_double(const std::string& key, double dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    return parse_double(key, it->second);
  }
  long get_long(const std::string& key, long dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
      size_t pos = 0;
      const long v = std::stol(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("invalid integer for " + key + ": " + it->second);
    }
  }
  bool get_bool(const std::string& key, bool dflt) const {
    const std::string v = get_string(key, dflt ? "true" : "false");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("invalid boolean for " + key + ": " + v);
  }
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    std::vector<double> out;
    std::string item;
    std::stringstream ss(it->second);
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
  static double parse_double(const std::string& key, const std::string& v) {
    try {
      size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("");
      return x;
    } catch (...) {
      throw ConfigError("invalid number for " + key + ": " + v);
    }
  }

  std::map<std::string, std::string> values_;
};

struct RunContext {
  ProblemSpec spec;
  Vec x0;
  SimConfig sim;
  long n_paths;
  std::string out_dir;
  bool quiet;
};

RunContext make_context(const Config& cfg) {
  const std::string spec_name = cfg.get_string("run.spec", "ms1");
  ProblemSpec spec = spec_by_name(spec_name);

  std::vector<double> x0_default = {2.0, 0.0};
  if (spec.domain().dimension() == 3) x0_default = {2.0, 0.0, 0.0};
  const auto x0v = cfg.get_doubles("run.x0", x0_default);
  if (static_cast<int>(x0v.size()) != spec.domain().dimension())
    throw ConfigError("run.x0 dimension does not match the domain");
  Vec x0(x0v.size());
  for (size_t i = 0; i < x0v.size(); ++i) x0[i] = x0v[i];
  if (spec.domain().signed_distance(x0) > 1e-9)
    throw ConfigError("run.x0 lies outside the domain closure");

  SimConfig sim;
  sim.dt = cfg.get_double("sim.dt", 1e-4);
  sim.t_max = cfg.get_double("sim.t_max", 0.0);
  sim.record_stride = static_cast<int>(cfg.get_long("sim.record_stride", 0));
  sim.seed = static_cast<std::uint64_t>(cfg.get_long("run.seed", 1));
  if (sim.dt <= 0.0) throw ConfigError("sim.dt must be positive");

  RunContext ctx{std::move(spec), std::move(x0), sim,
                 cfg.get_long("sim.n_paths", 10000),
                 cfg.get_string("run.out", "out"),
                 cfg.get_bool("run.quiet", false)};
  if (ctx.n_paths < 2) throw ConfigError("sim.n_paths must be >= 2");
  return ctx;
}

json payoff_json(const PayoffEstimate& est) {
  return {{"mean", est.mean},
          {"stderr", est.stderr_},
          {"ci95", {est.ci_lo, est.ci_hi}},
          {"n", est.n},
          {"censored_fraction", est.censored_fraction}};
}

void write_report(const RunContext& ctx, const std::string& subcommand,
                  json report) {
  report["meta"] = {
      {"timestamp",
       std::chrono::duration_cast<std::chrono::seconds>(
           std::chrono::system_clock::now().time_since_epoch())
           .count()},
      {"tool", "sdglab"}};
  std::filesystem::create_directories(ctx.out_dir);
  const std::string path = ctx.out_dir + "/" + subcommand + "_report.json";
  std::ofstream out(path);
  out << report.dump(2) << "\n";
  if (!ctx.quiet) std::cout << report.dump(2) << std::endl;
}

json base_report(const RunContext& ctx) {
  json j;
  j["spec_name"] = ctx.spec.name();
  j["x0"] = std::vector<double>(ctx.x0.data(), ctx.x0.data() + ctx.x0.size());
  j["dt"] = ctx.sim.dt;
  j["seed"] = ctx.sim.seed;
  j["n_paths"] = ctx.n_paths;
  return j;
}

int cmd_validate(const Config& cfg, const RunContext& ctx) {
  const long grid_size = cfg.get_long("validate.grid_size", 10000);
  const auto grid = halton_grid(ctx.spec.domain(), static_cast<int>(grid_size));

  double max_residual = 0.0, max_ortho = 0.0, max_pbar_err = 0.0;
  for (const Vec& x : grid) {
    const FieldBundle b = ctx.spec.fields(x);
    max_residual = std::max(max_residual, std::abs(ctx.spec.pde_residual(x)));
    const double scale = 1.0 + b.S.norm() * b.p_norm;
    max_ortho = std::max(max_ortho, std::abs(b.q.dot(b.p)) / scale);
    max_pbar_err = std::max(max_pbar_err, std::abs(b.p_bar.norm() - 1.0));
  }
  const AuditReport audit = finite_difference_audit(ctx.spec, 200);

  json j = base_report(ctx);
  j["max_pde_residual"] = max_residual;
  j["max_q_dot_p_scaled"] = max_ortho;
  j["max_pbar_norm_error"] = max_pbar_err;
  j["audit"] = {{"max_grad_error", audit.max_grad_error},
                {"max_hess_error", audit.max_hess_error},
                {"lip_pbar_estimate_lower_bound", audit.lip_pbar_estimate},
                {"pass", audit.pass()}};
  const bool pass = max_residual <= 1e-12 && max_ortho <= 1e-10 &&
                    max_pbar_err <= 1e-12 && audit.pass();
  j["verdicts"] = {{"pass", pass}};
  write_report(ctx, "validate", j);
  return pass ? 0 : 1;
}

int cmd_lambda_check(const Config& cfg, const RunContext& ctx) {
  const long n_cases = cfg.get_long("lambda.n_cases", 200);
  BruteForceOptions opt2, opt3;
  opt2.n_dir = static_cast<int>(cfg.get_long("lambda.n_dir", 720));
  opt3.n_dir = static_cast<int>(cfg.get_long("lambda.n_dir3", 5000));
  opt2.d_grid = opt3.d_grid =
      cfg.get_doubles("lambda.d_grid", {0.0, 1.0, 10.0, 100.0, 1000.0});
  opt2.d_max = opt3.d_max = cfg.get_double("lambda.d_max", 1000.0);

  RngStream rng(ctx.sim.seed, 0xabcdef);
  double max_err2 = 0.0, max_err3 = 0.0;
  for (long i = 0; i < n_cases; ++i) {
    const int m = (i % 2 == 0) ? 2 : 3;
    Vec p(m);
    for (int k = 0; k < m; ++k) p[k] = rng.next_normal();
    if (p.norm() < 1e-3) p[0] += 1.0;
    p /= p.norm();  // Lambda is 0-homogeneous in p; unit scale
    Mat S(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = r; c < m; ++c) S(r, c) = S(c, r) = rng.next_normal();
    const auto& opt = (m == 2) ? opt2 : opt3;
    const double err =
        std::abs(lambda_supinf_bruteforce(p, S, opt) - lambda_analytic(p, S));
    (m == 2 ? max_err2 : max_err3) = std::max(m == 2 ? max_err2 : max_err3, err);
  }

  json j = base_report(ctx);
  j["n_cases"] = n_cases;
  j["max_error_m2"] = max_err2;
  j["max_error_m3"] = max_err3;
  const bool pass = max_err2 <= 2e-2 && max_err3 <= 5e-2;
  j["verdicts"] = {{"pass", pass}};
  write_report(ctx, "lambda-check", j);
  return pass ? 0 : 1;
}

int cmd_strategy_solve(const Config& cfg, const RunContext& ctx) {
  const long grid_size = cfg.get_long("strategy.grid_size", 400);
  const auto grid = halton_grid(ctx.spec.domain(), static_cast<int>(grid_size));
  const auto deltas =
      cfg.get_doubles("strategy.delta_sequence",
                      {cfg.get_double("strategy.delta", 0.01)});

  json sweep = json::array();
  bool all_pass = true;
  std::vector<double> a_gaps, q_gaps;
  for (double delta : deltas) {
    if (delta <= 0.0) throw ConfigError("strategy.delta must be positive");
    StrategyParams params;
    params.delta = delta;
    params.d_delta = calibrate_d_delta(ctx.spec, delta, grid);
    FeedbackFields fields(ctx.spec, params);
    double sup_a = 0.0, sup_q = 0.0, gamma_min = 0.0;
    for (const Vec& x : grid) {
      const FieldBundle b = ctx.spec.fields(x);
      const Vec a = fields.a_delta(b);
      sup_a = std::max(sup_a, (a - b.p_bar).norm());
      sup_q = std::max(sup_q,
                       (params.d_delta * (a - b.p_bar) - 2.0 * b.q).norm());
      gamma_min = std::min(
          gamma_min, solve_a_delta(b, params.d_delta, params.solver).gamma);
    }
    const SaddleReport saddle = verify_near_saddle(ctx.spec, params, grid);
    all_pass = all_pass && saddle.pass;
    a_gaps.push_back(sup_a);
    q_gaps.push_back(sup_q);
    sweep.push_back({{"delta", delta},
                     {"d_delta", params.d_delta},
                     {"grid_min_gamma", gamma_min},
                     {"sup_a_gap", sup_a},
                     {"sup_q_gap", sup_q},
                     {"near_saddle_min", saddle.min_psi},
                     {"near_saddle_max", saddle.max_psi},
                     {"near_saddle_pass", saddle.pass}});
  }

  json j = base_report(ctx);
  j["grid_size"] = grid_size;
  j["sweep"] = sweep;
  j["verdicts"] = {{"pass", all_pass}};
  write_report(ctx, "strategy-solve", j);
  return all_pass ? 0 : 1;
}

int cmd_simulate(const Config& cfg, const RunContext& ctx) {
  const std::string kind = cfg.get_string("sim.kind", "limit");
  const long dump = cfg.get_long("sim.dump_paths", std::min<long>(ctx.n_paths, 10));
  SimConfig sim = ctx.sim;
  if (sim.record_stride <= 0) sim.record_stride = 1;

  std::unique_ptr<FeedbackFields> fields;
  if (kind == "near-optimal") {
    const double delta = cfg.get_double("strategy.delta", 0.01);
    const auto grid = halton_grid(
        ctx.spec.domain(),
        static_cast<int>(cfg.get_long("strategy.grid_size", 400)));
    StrategyParams params;
    params.delta = delta;
    params.d_delta = calibrate_d_delta(ctx.spec, delta, grid);
    fields = std::make_unique<FeedbackFields>(ctx.spec, params);
  } else if (kind != "limit") {
    throw ConfigError("sim.kind must be limit or near-optimal");
  }

  std::filesystem::create_directories(ctx.out_dir);
  long censored = 0;
  const int m = ctx.spec.domain().dimension();
  for (long i = 0; i < ctx.n_paths; ++i) {
    RngStream rng(sim.seed, static_cast<std::uint64_t>(i));
    const TrajectoryOutcome out =
        fields ? simulate_near_optimal(ctx.spec, *fields, ctx.x0, sim, rng)
               : simulate_limit(ctx.spec, ctx.x0, sim, rng);
    if (out.censored) ++censored;
    if (i < dump) {
      std::ofstream csv(ctx.out_dir + "/path_" + std::to_string(i) + ".csv");
      csv << "t";
      for (int k = 1; k <= m; ++k) csv << ",x_" << k;
      csv << ",exited\n";
      for (const auto& [t, x] : out.samples) {
        csv << t;
        for (int k = 0; k < m; ++k) csv << "," << x[k];
        csv << "," << (out.exited && t == out.tau ? 1 : 0) << "\n";
      }
    }
  }

  json j = base_report(ctx);
  j["kind"] = kind;
  j["censored_fraction"] = static_cast<double>(censored) / ctx.n_paths;
  const bool pass = static_cast<double>(censored) / ctx.n_paths <= 0.01;
  j["verdicts"] = {{"pass", pass}};
  write_report(ctx, "simulate", j);
  return pass ? 0 : 1;
}

int cmd_verify_value(const Config& cfg, const RunContext& ctx) {
  (void)cfg;
  const ValueReport rep =
      verify_value_identity(ctx.spec, ctx.x0, ctx.sim, ctx.n_paths);
  json j = base_report(ctx);
  j["payoff"] = payoff_json(rep.estimate);
  j["u_ref"] = rep.u_ref;
  j["gap"] = rep.gap;
  j["tolerance"] = rep.tolerance;
  j["verdicts"] = {{"pass", rep.pass}};
  write_report(ctx, "verify-value", j);
  return rep.pass ? 0 : 1;
}

int cmd_certify(const Config& cfg, const RunContext& ctx) {
  const double delta = cfg.get_double("strategy.delta", 0.01);
  if (delta <= 0.0) throw ConfigError("strategy.delta must be positive");
  const auto grid = halton_grid(
      ctx.spec.domain(),
      static_cast<int>(cfg.get_long("strategy.grid_size", 400)));
  StrategyParams params;
  params.delta = delta;
  params.d_delta = calibrate_d_delta(ctx.spec, delta, grid);
  FeedbackFields fields(ctx.spec, params);

  const CertifyReport rep =
      certify_delta_optimality(ctx.spec, ctx.x0, fields, ctx.sim, ctx.n_paths);
  json j = base_report(ctx);
  j["delta"] = delta;
  j["d_delta"] = params.d_delta;
  j["payoff"] = payoff_json(rep.estimate);
  j["u_ref"] = rep.u_ref;
  j["gap"] = rep.gap;
  j["tau_mean"] = rep.tau_mean;
  j["c1_bound"] = rep.c1_bound;
  j["adversarial_mean"] = rep.adversarial_mean;
  j["verdicts"] = {{"payoff_pass", rep.payoff_pass},
                   {"tau_pass", rep.tau_pass},
                   {"adversarial_pass", rep.adversarial_pass},
                   {"pass", rep.pass}};
  write_report(ctx, "certify", j);
  return rep.pass ? 0 : 1;
}

int cmd_converge(const Config& cfg, const RunContext& ctx) {
  const auto deltas =
      cfg.get_doubles("strategy.delta_sequence", {0.3, 0.1, 0.03});
  const auto grid = halton_grid(
      ctx.spec.domain(),
      static_cast<int>(cfg.get_long("strategy.grid_size", 400)));
  const ConvergenceReport rep = convergence_study(
      ctx.spec, ctx.x0, deltas, grid, ctx.sim, ctx.n_paths);

  json j = base_report(ctx);
  j["delta"] = rep.deltas;
  j["d_delta"] = rep.d_deltas;
  j["sup_a_gap"] = rep.sup_a_gap;
  j["sup_q_gap"] = rep.sup_q_gap;
  j["payoff_gap"] = rep.payoff_gap;
  j["ks"] = rep.ks_tau;
  j["w1_exit_angle"] = rep.w1_angle;
  j["verdicts"] = {{"ks_monotone", rep.ks_monotone},
                   {"gaps_monotone", rep.gaps_monotone},
                   {"final_ks_pass", rep.final_ks_pass},
                   {"pass", rep.pass}};
  write_report(ctx, "converge", j);
  return rep.pass ? 0 : 1;
}

void apply_shorthand(Config& cfg, const std::string& flag,
                     const std::string& value) {
  if (flag == "seed") cfg.set("run.seed", value);
  else if (flag == "paths") cfg.set("sim.n_paths", value);
  else if (flag == "dt") cfg.set("sim.dt", value);
  else if (flag == "delta") cfg.set("strategy.delta", value);
  else if (flag == "out") cfg.set("run.out", value);
  else cfg.set(flag, value);
}

int usage() {
  std::cerr << "usage: sdglab <validate|lambda-check|strategy-solve|simulate|"
               "verify-value|certify|converge> [--config PATH] "
               "[--<dotted.key> VALUE ...]\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return usage();
  const std::string subcommand = argv[1];

  Config cfg;
  try {
    for (int i = 2; i < argc; ++i) {
      std::string arg = argv[i];
      if (arg.rfind("--", 0) != 0) throw ConfigError("unexpected argument: " + arg);
      arg = arg.substr(2);
      std::string value;
      const auto eq = arg.find('=');
      if (eq != std::string::npos) {
        value = arg.substr(eq + 1);
        arg = arg.substr(0, eq);
      } else if (arg == "quiet") {
        value = "true";
      } else {
        if (i + 1 >= argc) throw ConfigError("missing value for --" + arg);
        value = argv[++i];
      }
      if (arg == "config") cfg.load_file(value);
      else if (arg == "quiet") cfg.set("run.quiet", value);
      else apply_shorthand(cfg, arg, value);
    }

    const RunContext ctx = make_context(cfg);
    if (subcommand == "validate") return cmd_validate(cfg, ctx);
    if (subcommand == "lambda-check") return cmd_lambda_check(cfg, ctx);
    if (subcommand == "strategy-solve") return cmd_strategy_solve(cfg, ctx);
    if (subcommand == "simulate") return cmd_simulate(cfg, ctx);
    if (subcommand == "verify-value") return cmd_verify_value(cfg, ctx);
    if (subcommand == "certify") return cmd_certify(cfg, ctx);
    if (subcommand == "converge") return cmd_converge(cfg, ctx);
    return usage();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
