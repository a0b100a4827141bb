#pragma once

#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "sdg/isaacs.hpp"
#include "sdg/problem.hpp"

namespace sdg {

struct SolverSettings {
  int max_iterations = 500;
  double tolerance = 1e-13;           // fixed-point step tolerance
  double residual_tolerance = 1e-8;   // Lagrange certificate bound
  int bruteforce_dirs = 100000;       // fallback sphere resolution
};

struct StrategyParams {
  double delta = 0.0;
  double d_delta = 0.0;  // calibrated drift bound d^delta
  SolverSettings solver;
};

enum class MinimizerMethod { FixedPoint, BruteForce };

// Solution of min over |a|=1 of psi(x, (a,0), (-p_bar, d)).
struct MinimizerResult {
  Vec a;                   // a^delta(x)
  double lagrange_lambda;  // lambda with lambda*a = S(a+p_bar) + d*p
  double residual;         // |lambda*a - S(a+p_bar) - d*p|
  double gamma;            // minimum value, <= 0
  MinimizerMethod method;
};

// Fixed-point iteration a <- normalize(S(a+p_bar) + d*p) started at p_bar,
// with a brute-force sphere search fallback (m in {2,3}).  Ties resolved
// toward p_bar.
MinimizerResult solve_a_delta(const FieldBundle& bundle, double d,
                              const SolverSettings& settings = {});

// Smallest d of the form 2^k/delta whose grid minimum of gamma is >= -delta/2.
double calibrate_d_delta(const ProblemSpec& spec, double delta,
                         const std::vector<Vec>& grid,
                         const SolverSettings& settings = {});

// Point-evaluable feedback coefficient fields of the near-optimal pair:
//   a^delta(x), P^delta = a^delta + p_bar, Q^delta = d^delta (a^delta - p_bar),
//   z^delta(x) = (-p_bar(x), d^delta), y^delta(x) = (a^delta(x), 0).
// Per-point solves are memoized on coordinates quantized at 1e-9 (bounded
// cache; concurrent use is safe and scheduling-independent).
class FeedbackFields {
 public:
  FeedbackFields(const ProblemSpec& spec, StrategyParams params);

  const StrategyParams& params() const { return params_; }
  const ProblemSpec& spec() const { return *spec_; }

  Vec a_delta(const FieldBundle& bundle) const;
  Vec a_delta(const Vec& x) const { return a_delta(spec_->fields(x)); }
  Vec p_delta(const FieldBundle& bundle) const;  // diffusion coefficient
  Vec q_delta(const FieldBundle& bundle) const;  // drift coefficient
  ControlAction y_delta(const FieldBundle& bundle) const;
  ControlAction z_delta(const FieldBundle& bundle) const;

 private:
  const ProblemSpec* spec_;
  StrategyParams params_;

  struct CacheKey {
    std::int64_t k[kMaxDim];
    bool operator==(const CacheKey&) const = default;
  };
  struct CacheKeyHash {
    size_t operator()(const CacheKey& key) const;
  };
  static constexpr size_t kMaxCacheEntries = 1 << 20;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<CacheKey, Vec, CacheKeyHash> cache_;
};

struct SaddleReport {
  double min_psi = 0.0;
  double max_psi = 0.0;
  bool pass = false;  // all grid values in [-delta, delta]
};

// Evaluates psi(x, y^delta(x), z^delta(x)) over the grid.
SaddleReport verify_near_saddle(const ProblemSpec& spec,
                                const StrategyParams& params,
                                const std::vector<Vec>& grid);

}  // namespace sdg
