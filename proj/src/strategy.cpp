#include "sdg/strategy.hpp"

#include <cmath>
#include <stdexcept>

namespace sdg {

namespace {

// objective being minimized over the sphere:
//   psi(x,(a,0),(-p_bar,d)) = -h - 1/2 (a+p_bar)'S(a+p_bar) - d (a-p_bar).p
double objective(const FieldBundle& b, const Vec& a, double d) {
  const Vec s = a + b.p_bar;
  return -b.h - 0.5 * s.dot(b.S * s) - d * (a - b.p_bar).dot(b.p);
}

MinimizerResult finish(const FieldBundle& b, Vec a, double d,
                       MinimizerMethod method) {
  MinimizerResult r;
  const Vec v = b.S * (a + b.p_bar) + d * b.p;
  r.lagrange_lambda = a.dot(v);  // lambda = a'S(a+p_bar) + d a.p
  r.residual = (r.lagrange_lambda * a - v).norm();
  r.gamma = objective(b, a, d);
  r.a = std::move(a);
  r.method = method;
  return r;
}

Vec bruteforce_minimize(const FieldBundle& b, double d, int n_dirs) {
  const int m = static_cast<int>(b.p.size());
  const auto dirs = sphere_directions(m, n_dirs);
  double best = std::numeric_limits<double>::infinity();
  double best_dist = std::numeric_limits<double>::infinity();
  Vec best_a = b.p_bar;
  for (const Vec& a : dirs) {
    const double v = objective(b, a, d);
    const double dist = (a - b.p_bar).norm();
    // ties (within absolute 1e-13) broken toward p_bar
    if (v < best - 1e-13 || (v < best + 1e-13 && dist < best_dist)) {
      best = std::min(best, v);
      best_dist = dist;
      best_a = a;
    }
  }
  if (m == 2) {
    // ternary refinement on the angle around the best direction
    double theta = std::atan2(best_a[1], best_a[0]);
    double lo = theta - 2.0 * M_PI / n_dirs;
    double hi = theta + 2.0 * M_PI / n_dirs;
    auto val = [&](double t) {
      Vec a(2);
      a << std::cos(t), std::sin(t);
      return objective(b, a, d);
    };
    for (int it = 0; it < 120; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (val(m1) < val(m2))
        hi = m2;
      else
        lo = m1;
    }
    const double t = 0.5 * (lo + hi);
    best_a << std::cos(t), std::sin(t);
  }
  return best_a;
}

}  // namespace

MinimizerResult solve_a_delta(const FieldBundle& bundle, double d,
                              const SolverSettings& settings) {
  if (d <= 0.0) throw std::invalid_argument("solve_a_delta: d must be positive");
  if (bundle.p_norm < 1e-10)
    throw std::runtime_error("solve_a_delta: |p| below tolerance");

  Vec a = bundle.p_bar;
  bool converged = false;
  for (int it = 0; it < settings.max_iterations; ++it) {
    Vec v = bundle.S * (a + bundle.p_bar) + d * bundle.p;
    const double vn = v.norm();
    if (vn < 1e-14) break;  // stationary direction undefined; fall back
    v /= vn;
    const double step = (v - a).norm();
    a = std::move(v);
    if (step <= settings.tolerance) {
      converged = true;
      break;
    }
  }
  if (converged) {
    MinimizerResult r = finish(bundle, a, d, MinimizerMethod::FixedPoint);
    // accept only a genuine minimizer: certificate plus no better value at
    // the start point
    if (r.residual <= settings.residual_tolerance &&
        r.gamma <= objective(bundle, bundle.p_bar, d) + 1e-12)
      return r;
  }

  Vec a_bf = bruteforce_minimize(bundle, d, settings.bruteforce_dirs);
  MinimizerResult r = finish(bundle, a_bf, d, MinimizerMethod::BruteForce);
  if (r.residual > 1e3 * settings.residual_tolerance)
    throw std::runtime_error(
        "solve_a_delta: no convergence (fixed point and brute force); "
        "residual=" + std::to_string(r.residual));
  return r;
}

double calibrate_d_delta(const ProblemSpec& spec, double delta,
                         const std::vector<Vec>& grid,
                         const SolverSettings& settings) {
  if (delta <= 0.0) throw std::invalid_argument("calibrate_d_delta: delta > 0 required");
  std::vector<FieldBundle> bundles;
  bundles.reserve(grid.size());
  for (const Vec& x : grid) bundles.push_back(spec.fields(x));

  const double d0 = 1.0 / delta;
  for (int k = 0; k <= 40; ++k) {
    const double d = d0 * std::ldexp(1.0, k);
    double gamma_min = 0.0;
    for (const FieldBundle& b : bundles)
      gamma_min = std::min(gamma_min, solve_a_delta(b, d, settings).gamma);
    if (gamma_min >= -0.5 * delta) return d;
  }
  throw std::runtime_error("calibrate_d_delta: no admissible d after 40 doublings");
}

size_t FeedbackFields::CacheKeyHash::operator()(const CacheKey& key) const {
  size_t h = 0xcbf29ce484222325ULL;
  for (std::int64_t v : key.k) {
    h ^= static_cast<size_t>(v);
    h *= 0x100000001b3ULL;
  }
  return h;
}

FeedbackFields::FeedbackFields(const ProblemSpec& spec, StrategyParams params)
    : spec_(&spec), params_(std::move(params)) {
  if (params_.d_delta <= 0.0)
    throw std::invalid_argument("FeedbackFields: params not calibrated (d_delta <= 0)");
}

Vec FeedbackFields::a_delta(const FieldBundle& bundle) const {
  CacheKey key{};
  for (int i = 0; i < bundle.x.size(); ++i)
    key.k[i] = static_cast<std::int64_t>(std::llround(bundle.x[i] * 1e9));
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Vec a = solve_a_delta(bundle, params_.d_delta, params_.solver).a;
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cache_.size() < kMaxCacheEntries) cache_.emplace(key, a);
  }
  return a;
}

Vec FeedbackFields::p_delta(const FieldBundle& bundle) const {
  return a_delta(bundle) + bundle.p_bar;
}

Vec FeedbackFields::q_delta(const FieldBundle& bundle) const {
  return params_.d_delta * (a_delta(bundle) - bundle.p_bar);
}

ControlAction FeedbackFields::y_delta(const FieldBundle& bundle) const {
  return {a_delta(bundle), 0.0};
}

ControlAction FeedbackFields::z_delta(const FieldBundle& bundle) const {
  return {-bundle.p_bar, params_.d_delta};
}

SaddleReport verify_near_saddle(const ProblemSpec& spec,
                                const StrategyParams& params,
                                const std::vector<Vec>& grid) {
  SaddleReport rep;
  rep.min_psi = std::numeric_limits<double>::infinity();
  rep.max_psi = -std::numeric_limits<double>::infinity();
  for (const Vec& x : grid) {
    const FieldBundle b = spec.fields(x);
    const double g = solve_a_delta(b, params.d_delta, params.solver).gamma;
    rep.min_psi = std::min(rep.min_psi, g);
    rep.max_psi = std::max(rep.max_psi, g);
  }
  rep.pass = rep.min_psi >= -params.delta && rep.max_psi <= params.delta;
  return rep;
}

}  // namespace sdg
