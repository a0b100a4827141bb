#pragma once

#include <functional>
#include <vector>

#include "sdg/simulate.hpp"

namespace sdg {

struct PayoffEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  double ci_lo = 0.0;  // mean -/+ 1.96 * stderr
  double ci_hi = 0.0;
  long n = 0;
  double censored_fraction = 0.0;
  bool valid = false;  // censored_fraction <= 1%
};

// Deterministic path factory: one outcome per path index.
using PathSampler = std::function<TrajectoryOutcome(long path_index)>;

// Raw ensemble of path statistics; merged in path-index order.
struct Ensemble {
  std::vector<double> payoffs;      // running_cost + g(exit)  (cost only when censored)
  std::vector<double> taus;         // exit times (t_max when censored)
  std::vector<double> exit_angles;  // m=2 only: angle of exit point around the center
  long censored = 0;
};

Ensemble run_ensemble(const PathSampler& sampler, const ProblemSpec& spec,
                      long n_paths);

PayoffEstimate estimate_from(const Ensemble& ens);
PayoffEstimate estimate_payoff(const PathSampler& sampler,
                               const ProblemSpec& spec, long n_paths);

// Two-sample Kolmogorov-Smirnov statistic sup|F - G|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Wasserstein-1 between two empirical distributions of angles on the circle.
double wasserstein1_circle(std::vector<double> a, std::vector<double> b);

// MC/discretization allowance used by the pass criteria below.
inline double dt_bias_budget(const ProblemSpec& spec, double dt) {
  return 10.0 * std::sqrt(dt) * spec.c0();
}

struct ValueReport {
  PayoffEstimate estimate;
  double u_ref = 0.0;
  double gap = 0.0;       // estimate.mean - u_ref
  double tolerance = 0.0;  // 3*stderr + dt budget
  bool pass = false;
};

// Checks that the limit-SDE payoff matches u(x0).
ValueReport verify_value_identity(const ProblemSpec& spec, const Vec& x0,
                                  const SimConfig& config, long n_paths);

struct ItoReport {
  double mean = 0.0;   // E[u(X_{t^tau}) + int (psi+h) ds]
  double stderr_ = 0.0;
  double u_ref = 0.0;
  double gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Ito-identity check for arbitrary feedback fields over a finite horizon.
ItoReport verify_ito_identity(const ProblemSpec& spec,
                              const ControlField& y_field,
                              const ControlField& z_field, const Vec& x0,
                              double t_horizon, const SimConfig& config,
                              long n_paths);

struct CertifyReport {
  PayoffEstimate estimate;       // J under the near-optimal pair
  double u_ref = 0.0;
  double gap = 0.0;
  double payoff_tolerance = 0.0;  // c1*delta + 3*stderr + dt budget
  double tau_mean = 0.0;
  double tau_stderr = 0.0;
  double c1_bound = 0.0;          // 4*c0 / h_lower
  double adversarial_mean = 0.0;  // J under y = (-p_bar, 0) vs beta^delta
  double adversarial_stderr = 0.0;
  bool payoff_pass = false;
  bool tau_pass = false;
  bool adversarial_pass = false;  // one-sided upper bound
  bool pass = false;
};

CertifyReport certify_delta_optimality(const ProblemSpec& spec, const Vec& x0,
                                       const FeedbackFields& fields,
                                       const SimConfig& config, long n_paths);

struct ConvergenceReport {
  std::vector<double> deltas;
  std::vector<double> d_deltas;
  std::vector<double> sup_a_gap;   // sup |a^delta - p_bar| over the grid
  std::vector<double> sup_q_gap;   // sup |Q^delta - 2q| over the grid
  std::vector<double> payoff_gap;  // |J_hat - u(x0)| per delta
  std::vector<double> ks_tau;      // exit-time KS vs the limit SDE
  std::vector<double> w1_angle;    // m=2 only, else zeros
  bool ks_monotone = false;        // non-increasing within 10% slack
  bool gaps_monotone = false;
  bool final_ks_pass = false;      // last KS <= 0.05
  bool pass = false;
};

ConvergenceReport convergence_study(const ProblemSpec& spec, const Vec& x0,
                                    const std::vector<double>& deltas,
                                    const std::vector<Vec>& grid,
                                    const SimConfig& config,
                                    long n_paths_per_delta,
                                    const SolverSettings& solver = {});

}  // namespace sdg
