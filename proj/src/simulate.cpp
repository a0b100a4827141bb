#include "sdg/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace sdg {

namespace {

// One Euler-Maruyama first-exit run.  Coeffs(bundle, sigma, mu, out) fills
// the rank-one diffusion vector and the drift (and may update the
// control-trace digest); cost(bundle) is integrated with left-endpoint
// quadrature.
template <class Coeffs, class Cost>
TrajectoryOutcome integrate(const ProblemSpec& spec, const Vec& x0,
                            const SimConfig& config, RngStream& rng,
                            Coeffs&& coeffs, Cost&& cost) {
  const Domain& dom = spec.domain();
  if (dom.signed_distance(x0) > 1e-9)
    throw std::invalid_argument("simulate: x0 outside the domain closure");
  const double dt = config.dt;
  if (dt <= 0.0) throw std::invalid_argument("simulate: dt must be positive");
  const double t_max = default_t_max(spec, config);

  TrajectoryOutcome out;
  out.final_state = x0;
  if (!dom.contains(x0)) {  // already on the boundary: immediate exit
    out.exited = true;
    out.tau = 0.0;
    out.exit_point = x0;
    return out;
  }

  Vec x = x0;
  Vec sigma(x.size()), mu(x.size()), x_next(x.size());
  double t = 0.0;
  long step_index = 0;
  if (config.record_stride > 0) out.samples.emplace_back(0.0, x);

  const double sqrt_dt = std::sqrt(dt);
  while (t < t_max) {
    const FieldBundle bundle = extend_fields(spec, x);
    coeffs(bundle, sigma, mu, out);

    // sub-step near the boundary to limit exit overshoot
    double step = dt;
    const double dist = -dom.signed_distance(x);
    if (dist < 10.0 * sigma.norm() * sqrt_dt) step = dt / 10.0;
    if (t + step > t_max) step = t_max - t;
    if (step <= 0.0) break;

    const double dw = rng.next_normal() * std::sqrt(step);
    x_next = x + sigma * dw + mu * step;

    if (!dom.contains(x_next)) {
      const auto crossing = dom.boundary_crossing(x, x_next);
      const double theta = crossing ? crossing->theta : 0.0;
      out.running_cost += cost(bundle) * theta * step;
      out.tau = t + theta * step;
      out.exited = true;
      out.exit_point = crossing ? crossing->point : x;
      out.final_state = out.exit_point;
      if (config.record_stride > 0)
        out.samples.emplace_back(out.tau, out.exit_point);
      return out;
    }

    out.running_cost += cost(bundle) * step;
    x = x_next;
    t += step;
    ++step_index;
    if (config.record_stride > 0 && step_index % config.record_stride == 0)
      out.samples.emplace_back(t, x);
  }

  out.censored = true;
  out.tau = t_max;
  out.final_state = x;
  if (config.record_stride > 0) out.samples.emplace_back(t, x);
  return out;
}

template <class Coeffs>
TrajectoryOutcome dispatch_cost(const ProblemSpec& spec, const Vec& x0,
                                const SimConfig& config, RngStream& rng,
                                Coeffs&& coeffs,
                                const ScalarField& cost_override) {
  if (cost_override)
    return integrate(spec, x0, config, rng, coeffs,
                     [&](const FieldBundle& b) { return cost_override(b.x); });
  return integrate(spec, x0, config, rng, coeffs,
                   [](const FieldBundle& b) { return b.h; });
}

}  // namespace

double default_t_max(const ProblemSpec& spec, const SimConfig& config) {
  if (config.t_max > 0.0) return config.t_max;
  return 50.0 * spec.c1();
}

FieldBundle extend_fields(const ProblemSpec& spec, const Vec& x) {
  return spec.fields(spec.domain().project_to_closure(x));
}

TrajectoryOutcome simulate_game(const ProblemSpec& spec,
                                const ControlField& y_field,
                                const ControlField& z_field, const Vec& x0,
                                const SimConfig& config, RngStream& rng,
                                const ScalarField& cost_override) {
  auto coeffs = [&](const FieldBundle& b, Vec& sigma, Vec& mu,
                    TrajectoryOutcome& out) {
    const ControlAction y = y_field(b);
    const ControlAction z = z_field(b);
    sigma = y.direction - z.direction;
    mu = (y.magnitude + z.magnitude) * (y.direction + z.direction);
    out.max_c_used = std::max(out.max_c_used, y.magnitude);
    out.max_d_used = std::max(out.max_d_used, z.magnitude);
  };
  return dispatch_cost(spec, x0, config, rng, coeffs, cost_override);
}

TrajectoryOutcome simulate_near_optimal(const ProblemSpec& spec,
                                        const FeedbackFields& fields,
                                        const Vec& x0, const SimConfig& config,
                                        RngStream& rng,
                                        const ScalarField& cost_override) {
  const double d_delta = fields.params().d_delta;
  auto coeffs = [&](const FieldBundle& b, Vec& sigma, Vec& mu,
                    TrajectoryOutcome& out) {
    const Vec a = fields.a_delta(b);
    // P^delta = a^delta - b^delta, Q^delta = (c^delta + d^delta)(a^delta + b^delta)
    // with b^delta = -p_bar, c^delta = 0; spelled exactly as in the general
    // game so the path-for-path equivalence is bit-exact.
    sigma = a - (-b.p_bar);
    mu = (0.0 + d_delta) * (a + (-b.p_bar));
    out.max_d_used = std::max(out.max_d_used, d_delta);
  };
  return dispatch_cost(spec, x0, config, rng, coeffs, cost_override);
}

TrajectoryOutcome simulate_limit(const ProblemSpec& spec, const Vec& x0,
                                 const SimConfig& config, RngStream& rng,
                                 const ScalarField& cost_override) {
  auto coeffs = [](const FieldBundle& b, Vec& sigma, Vec& mu,
                   TrajectoryOutcome&) {
    sigma = 2.0 * b.p_bar;
    mu = 2.0 * b.q;
  };
  return dispatch_cost(spec, x0, config, rng, coeffs, cost_override);
}

}  // namespace sdg
