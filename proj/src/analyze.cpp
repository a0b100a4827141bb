#include "sdg/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sdg {

namespace {

constexpr double kCensorWarn = 0.001;
constexpr double kCensorFail = 0.01;

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& xs) {
  const long n = static_cast<long>(xs.size());
  if (n < 1) return {};
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (n < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1) / n)};
}

bool monotone_with_slack(const std::vector<double>& xs, double slack) {
  for (size_t i = 1; i < xs.size(); ++i)
    if (xs[i] > xs[i - 1] * (1.0 + slack)) return false;
  return true;
}

}  // namespace

Ensemble run_ensemble(const PathSampler& sampler, const ProblemSpec& spec,
                      long n_paths) {
  if (n_paths < 2) throw std::invalid_argument("run_ensemble: n_paths >= 2 required");
  const bool angles = spec.domain().dimension() == 2;
  Ensemble ens;
  ens.payoffs.reserve(n_paths);
  ens.taus.reserve(n_paths);
  for (long i = 0; i < n_paths; ++i) {
    const TrajectoryOutcome out = sampler(i);
    double payoff = out.running_cost;
    if (out.exited) payoff += spec.g(out.exit_point);
    else ++ens.censored;
    ens.payoffs.push_back(payoff);
    ens.taus.push_back(out.tau);
    if (angles && out.exited)
      ens.exit_angles.push_back(
          std::atan2(out.exit_point[1] - spec.domain().center()[1],
                     out.exit_point[0] - spec.domain().center()[0]));
  }
  return ens;
}

PayoffEstimate estimate_from(const Ensemble& ens) {
  PayoffEstimate est;
  const auto ms = mean_stderr(ens.payoffs);
  est.mean = ms.mean;
  est.stderr_ = ms.stderr_;
  est.ci_lo = est.mean - 1.96 * est.stderr_;
  est.ci_hi = est.mean + 1.96 * est.stderr_;
  est.n = static_cast<long>(ens.payoffs.size());
  est.censored_fraction =
      est.n > 0 ? static_cast<double>(ens.censored) / est.n : 0.0;
  est.valid = est.censored_fraction <= kCensorFail;
  return est;
}

PayoffEstimate estimate_payoff(const PathSampler& sampler,
                               const ProblemSpec& spec, long n_paths) {
  return estimate_from(run_ensemble(sampler, spec, n_paths));
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double wasserstein1_circle(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("wasserstein1_circle: empty sample");
  const double two_pi = 2.0 * M_PI;
  auto wrap = [&](double t) {
    double w = std::fmod(t, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
  };
  for (auto& t : a) t = wrap(t);
  for (auto& t : b) t = wrap(t);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  // W1 on the circle = min over level shifts s of the integral of
  // |F - G - s|; minimized by the arc-length-weighted median of F - G.
  struct Event {
    double pos;
    double da, db;
  };
  std::vector<Event> events;
  events.reserve(a.size() + b.size());
  for (double t : a) events.push_back({t, 1.0 / a.size(), 0.0});
  for (double t : b) events.push_back({t, 0.0, 1.0 / b.size()});
  std::sort(events.begin(), events.end(),
            [](const Event& x, const Event& y) { return x.pos < y.pos; });

  // piecewise-constant F-G between events
  std::vector<double> values, weights;
  double fg = 0.0, prev = 0.0;
  for (const Event& e : events) {
    if (e.pos > prev) {
      values.push_back(fg);
      weights.push_back(e.pos - prev);
      prev = e.pos;
    }
    fg += e.da - e.db;
  }
  if (two_pi > prev) {
    values.push_back(fg);
    weights.push_back(two_pi - prev);
  }

  // weighted median of the values
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t x, size_t y) { return values[x] < values[y]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double acc = 0.0, median = values[order.back()];
  for (size_t k : order) {
    acc += weights[k];
    if (acc >= 0.5 * total) {
      median = values[k];
      break;
    }
  }

  double w1 = 0.0;
  for (size_t k = 0; k < values.size(); ++k)
    w1 += std::abs(values[k] - median) * weights[k];
  return w1;
}

ValueReport verify_value_identity(const ProblemSpec& spec, const Vec& x0,
                                  const SimConfig& config, long n_paths) {
  auto sampler = [&](long i) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(i));
    return simulate_limit(spec, x0, config, rng);
  };
  ValueReport rep;
  rep.estimate = estimate_payoff(sampler, spec, n_paths);
  if (!rep.estimate.valid)
    throw std::runtime_error("verify_value_identity: censored fraction above 1%");
  rep.u_ref = spec.u(x0);
  rep.gap = rep.estimate.mean - rep.u_ref;
  rep.tolerance = 3.0 * rep.estimate.stderr_ + dt_bias_budget(spec, config.dt);
  rep.pass = std::abs(rep.gap) <= rep.tolerance;
  return rep;
}

ItoReport verify_ito_identity(const ProblemSpec& spec,
                              const ControlField& y_field,
                              const ControlField& z_field, const Vec& x0,
                              double t_horizon, const SimConfig& config,
                              long n_paths) {
  if (t_horizon <= 0.0)
    throw std::invalid_argument("verify_ito_identity: t_horizon must be positive");
  SimConfig cfg = config;
  cfg.t_max = t_horizon;  // censoring here realizes t ^ tau, not a failure

  // cost integrand: psi(x, Y, Z) + h(x) = phi(Y, Z; p, S)
  ScalarField cost = [&](const Vec& x) {
    const FieldBundle b = extend_fields(spec, x);
    return psi(b, y_field(b), z_field(b)) + b.h;
  };

  std::vector<double> samples;
  samples.reserve(n_paths);
  for (long i = 0; i < n_paths; ++i) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(i));
    const TrajectoryOutcome out =
        simulate_game(spec, y_field, z_field, x0, cfg, rng, cost);
    samples.push_back(spec.u(out.final_state) + out.running_cost);
  }

  ItoReport rep;
  const auto ms = mean_stderr(samples);
  rep.mean = ms.mean;
  rep.stderr_ = ms.stderr_;
  rep.u_ref = spec.u(x0);
  rep.gap = rep.mean - rep.u_ref;
  rep.tolerance = 3.0 * rep.stderr_ + dt_bias_budget(spec, config.dt);
  rep.pass = std::abs(rep.gap) <= rep.tolerance;
  return rep;
}

CertifyReport certify_delta_optimality(const ProblemSpec& spec, const Vec& x0,
                                       const FeedbackFields& fields,
                                       const SimConfig& config, long n_paths) {
  CertifyReport rep;
  const double delta = fields.params().delta;

  auto sampler = [&](long i) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(i));
    return simulate_near_optimal(spec, fields, x0, config, rng);
  };
  const Ensemble ens = run_ensemble(sampler, spec, n_paths);
  rep.estimate = estimate_from(ens);
  if (!rep.estimate.valid)
    throw std::runtime_error("certify_delta_optimality: censored fraction above 1%");

  rep.u_ref = spec.u(x0);
  rep.gap = rep.estimate.mean - rep.u_ref;
  rep.c1_bound = spec.c1();
  rep.payoff_tolerance = rep.c1_bound * delta + 3.0 * rep.estimate.stderr_ +
                         dt_bias_budget(spec, config.dt);
  rep.payoff_pass = std::abs(rep.gap) <= rep.payoff_tolerance;

  const auto tau_ms = mean_stderr(ens.taus);
  rep.tau_mean = tau_ms.mean;
  rep.tau_stderr = tau_ms.stderr_;
  rep.tau_pass = rep.tau_mean <= rep.c1_bound + 3.0 * rep.tau_stderr;

  // adversarial control y = (-p_bar, 0) against the strategy z^delta:
  // one-sided guarantee J <= u + c1*delta (+ allowances)
  ControlField y_adv = [](const FieldBundle& b) {
    return ControlAction{-b.p_bar, 0.0};
  };
  ControlField z_fb = [&](const FieldBundle& b) { return fields.z_delta(b); };
  auto adv_sampler = [&](long i) {
    RngStream rng(config.seed ^ 0x5ad5ad5adULL, static_cast<std::uint64_t>(i));
    return simulate_game(spec, y_adv, z_fb, x0, config, rng);
  };
  const PayoffEstimate adv = estimate_payoff(adv_sampler, spec, n_paths);
  rep.adversarial_mean = adv.mean;
  rep.adversarial_stderr = adv.stderr_;
  rep.adversarial_pass =
      adv.mean <= rep.u_ref + rep.c1_bound * delta + 3.0 * adv.stderr_ +
                      dt_bias_budget(spec, config.dt);

  rep.pass = rep.payoff_pass && rep.tau_pass && rep.adversarial_pass;
  return rep;
}

ConvergenceReport convergence_study(const ProblemSpec& spec, const Vec& x0,
                                    const std::vector<double>& deltas,
                                    const std::vector<Vec>& grid,
                                    const SimConfig& config,
                                    long n_paths_per_delta,
                                    const SolverSettings& solver) {
  for (size_t i = 1; i < deltas.size(); ++i)
    if (deltas[i] >= deltas[i - 1] || deltas[i] <= 0.0)
      throw std::invalid_argument("convergence_study: deltas must be positive decreasing");

  ConvergenceReport rep;
  const bool angles = spec.domain().dimension() == 2;
  const double u_ref = spec.u(x0);

  // one shared limit-SDE ensemble as the comparison side
  auto limit_sampler = [&](long i) {
    RngStream rng(config.seed ^ 0x11117777ULL, static_cast<std::uint64_t>(i));
    return simulate_limit(spec, x0, config, rng);
  };
  const Ensemble limit_ens = run_ensemble(limit_sampler, spec, n_paths_per_delta);

  for (double delta : deltas) {
    StrategyParams params;
    params.delta = delta;
    params.solver = solver;
    params.d_delta = calibrate_d_delta(spec, delta, grid, solver);
    FeedbackFields fields(spec, params);

    double sup_a = 0.0, sup_q = 0.0;
    for (const Vec& x : grid) {
      const FieldBundle b = spec.fields(x);
      const Vec a = fields.a_delta(b);
      sup_a = std::max(sup_a, (a - b.p_bar).norm());
      sup_q = std::max(sup_q, (params.d_delta * (a - b.p_bar) - 2.0 * b.q).norm());
    }

    auto near_sampler = [&](long i) {
      RngStream rng(config.seed, static_cast<std::uint64_t>(i));
      return simulate_near_optimal(spec, fields, x0, config, rng);
    };
    const Ensemble near_ens = run_ensemble(near_sampler, spec, n_paths_per_delta);
    const PayoffEstimate est = estimate_from(near_ens);
    if (!est.valid)
      throw std::runtime_error("convergence_study: censored fraction above 1%");

    rep.deltas.push_back(delta);
    rep.d_deltas.push_back(params.d_delta);
    rep.sup_a_gap.push_back(sup_a);
    rep.sup_q_gap.push_back(sup_q);
    rep.payoff_gap.push_back(std::abs(est.mean - u_ref));
    rep.ks_tau.push_back(ks_statistic(near_ens.taus, limit_ens.taus));
    rep.w1_angle.push_back(
        angles ? wasserstein1_circle(near_ens.exit_angles, limit_ens.exit_angles)
               : 0.0);
  }

  rep.ks_monotone = monotone_with_slack(rep.ks_tau, 0.10);
  rep.gaps_monotone = monotone_with_slack(rep.sup_a_gap, 0.10) &&
                      monotone_with_slack(rep.sup_q_gap, 0.10);
  rep.final_ks_pass = !rep.ks_tau.empty() && rep.ks_tau.back() <= 0.05;
  rep.pass = rep.ks_monotone && rep.gaps_monotone && rep.final_ks_pass;
  return rep;
}

}  // namespace sdg
