#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "sdg/geometry.hpp"
#include "sdg/problem.hpp"
#include "sdg/rng.hpp"
#include "sdg/strategy.hpp"

namespace sdg {

struct SimConfig {
  double dt = 1e-4;
  double t_max = 0.0;     // 0 -> default 50 * c1 from the spec in use
  int record_stride = 0;  // 0 -> record nothing
  std::uint64_t seed = 0;
};

struct TrajectoryOutcome {
  bool exited = false;
  bool censored = false;
  double tau = 0.0;        // exit time, or t_max when censored
  Vec exit_point;          // on the boundary when exited
  Vec final_state;         // last state either way
  double running_cost = 0.0;  // left-endpoint quadrature of the cost field
  std::vector<std::pair<double, Vec>> samples;
  double max_c_used = 0.0;  // control-trace digest
  double max_d_used = 0.0;
};

using ControlField = std::function<ControlAction(const FieldBundle&)>;

// All fields evaluated at the closest point of the closure of G; identity on
// the closure itself.
FieldBundle extend_fields(const ProblemSpec& spec, const Vec& x);

// General game dynamics:
//   X_{k+1} = X_k + (A-B) dW_k + (C+D)(A+B) dt,  scalar Gaussian dW_k.
// Rank-one diffusion: a single Brownian increment drives all coordinates.
// First exit detected by segment/boundary intersection; near the boundary
// the step drops to dt/10.  An optional cost integrand replaces h in the
// running-cost quadrature (used by the Ito-identity harness).
TrajectoryOutcome simulate_game(const ProblemSpec& spec,
                                const ControlField& y_field,
                                const ControlField& z_field, const Vec& x0,
                                const SimConfig& config, RngStream& rng,
                                const ScalarField& cost_override = nullptr);

// Near-optimal pair dynamics: dX = P^delta(X) dW + Q^delta(X) ds.
TrajectoryOutcome simulate_near_optimal(const ProblemSpec& spec,
                                        const FeedbackFields& fields,
                                        const Vec& x0, const SimConfig& config,
                                        RngStream& rng,
                                        const ScalarField& cost_override = nullptr);

// Limit diffusion: dX = 2 p_bar(X) dW + 2 q(X) dt.
TrajectoryOutcome simulate_limit(const ProblemSpec& spec, const Vec& x0,
                                 const SimConfig& config, RngStream& rng,
                                 const ScalarField& cost_override = nullptr);

double default_t_max(const ProblemSpec& spec, const SimConfig& config);

}  // namespace sdg
