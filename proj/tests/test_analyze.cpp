#include <doctest.h>

#include <cmath>

#include "sdg/analyze.hpp"

using namespace sdg;

namespace {
Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}
}  // namespace

TEST_CASE("degenerate sampler: exact mean, zero stderr") {
  const ProblemSpec spec = make_ms1();
  const Vec exit = v2(3.0, 0.0);
  PathSampler sampler = [&](long) {
    TrajectoryOutcome out;
    out.exited = true;
    out.tau = 0.25;
    out.exit_point = exit;
    out.final_state = exit;
    out.running_cost = 2.0 - spec.g(exit);  // payoff pinned to 2
    return out;
  };
  const PayoffEstimate est = estimate_payoff(sampler, spec, 100);
  CHECK(est.mean == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(est.stderr_ == 0.0);
  CHECK(est.ci_lo == est.mean);
  CHECK(est.n == 100);
  CHECK(est.valid);
}

TEST_CASE("boundary start recovers the boundary data") {
  const ProblemSpec spec = make_ms1();
  const Vec x0 = v2(2.0, 1.0);
  SimConfig config;
  PathSampler sampler = [&](long i) {
    RngStream rng(1, static_cast<std::uint64_t>(i));
    return simulate_limit(spec, x0, config, rng);
  };
  const PayoffEstimate est = estimate_payoff(sampler, spec, 10);
  CHECK(est.mean == doctest::Approx(spec.g(x0)).epsilon(1e-14));
  CHECK(est.stderr_ == 0.0);
}

TEST_CASE("censoring above one percent invalidates the estimate") {
  const ProblemSpec spec = make_ms1();
  PathSampler sampler = [&](long i) {
    TrajectoryOutcome out;
    out.final_state = v2(2.0, 0.0);
    if (i % 50 == 0) {  // 2% censored
      out.censored = true;
      out.tau = 1.0;
    } else {
      out.exited = true;
      out.tau = 0.1;
      out.exit_point = v2(3.0, 0.0);
    }
    return out;
  };
  const PayoffEstimate est = estimate_payoff(sampler, spec, 1000);
  CHECK(est.censored_fraction == doctest::Approx(0.02));
  CHECK_FALSE(est.valid);
}

TEST_CASE("stderr shrinks like one over sqrt n") {
  const ProblemSpec spec = make_ms1();
  const Vec x0 = v2(2.0, 0.0);
  SimConfig config;
  config.dt = 1e-3;
  auto run = [&](long n, std::uint64_t salt) {
    PathSampler sampler = [&, salt](long i) {
      RngStream rng(salt, static_cast<std::uint64_t>(i));
      return simulate_limit(spec, x0, config, rng);
    };
    return estimate_payoff(sampler, spec, n);
  };
  const PayoffEstimate small = run(500, 7);
  const PayoffEstimate large = run(8000, 7);
  const double ratio = small.stderr_ / large.stderr_;
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("ks statistic: identical samples and disjoint samples") {
  std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(ks_statistic(a, a) == 0.0);
  std::vector<double> b{10.0, 11.0, 12.0};
  CHECK(ks_statistic(a, b) == doctest::Approx(1.0));
  // split mass: F jumps to 1 at 2, G jumps to 1 at 3 -> D = 1 on [2,3)
  CHECK(ks_statistic({1.0, 2.0}, {3.0, 4.0}) == doctest::Approx(1.0));
  CHECK(ks_statistic({1.0, 3.0}, {2.0, 4.0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_statistic({}, a), std::invalid_argument);
}

TEST_CASE("ks statistic on resamples of one distribution is small") {
  RngStream rng(21);
  std::vector<double> a, b;
  for (int i = 0; i < 5000; ++i) {
    a.push_back(rng.next_normal());
    b.push_back(rng.next_normal());
  }
  CHECK(ks_statistic(a, b) <= 0.05);
}

TEST_CASE("circular wasserstein on point masses") {
  // two point masses an arc 0.5 apart
  std::vector<double> a{0.0, 0.0};
  std::vector<double> b{0.5, 0.5};
  CHECK(wasserstein1_circle(a, b) == doctest::Approx(0.5).epsilon(1e-12));
  // equal distributions
  CHECK(wasserstein1_circle(b, b) == doctest::Approx(0.0));
  // wrap-around: masses at 0.1 and 2*pi - 0.1 are 0.2 apart on the circle
  std::vector<double> c{0.1};
  std::vector<double> d{2.0 * M_PI - 0.1};
  CHECK(wasserstein1_circle(c, d) == doctest::Approx(0.2).epsilon(1e-12));
  // shift invariance of the metric under rotating both samples
  std::vector<double> a2{1.0, 4.0};
  std::vector<double> b2{2.0, 5.5};
  const double w = wasserstein1_circle(a2, b2);
  for (auto& t : a2) t += 1.234;
  for (auto& t : b2) t += 1.234;
  CHECK(wasserstein1_circle(a2, b2) == doctest::Approx(w).epsilon(1e-12));
}

TEST_CASE("ensemble bookkeeping: angles only for exits, taus always") {
  const ProblemSpec spec = make_ms1();
  PathSampler sampler = [&](long i) {
    TrajectoryOutcome out;
    out.final_state = v2(2.0, 0.0);
    if (i == 0) {
      out.censored = true;
      out.tau = 9.0;
    } else {
      out.exited = true;
      out.tau = 0.5;
      out.exit_point = v2(2.0, 1.0);  // angle pi/2 around the center
    }
    return out;
  };
  const Ensemble ens = run_ensemble(sampler, spec, 4);
  CHECK(ens.censored == 1);
  CHECK(ens.taus.size() == 4);
  CHECK(ens.exit_angles.size() == 3);
  CHECK(ens.exit_angles[0] == doctest::Approx(M_PI / 2.0));
  // censored paths contribute the running cost only
  CHECK(ens.payoffs[0] == 0.0);
}

TEST_CASE("ito identity holds for a hand-picked control pair") {
  const ProblemSpec spec = make_ms1();
  const Vec x0 = v2(2.0, 0.0);
  ControlField y = [](const FieldBundle& b) {
    return ControlAction{b.p_bar, 0.3};
  };
  ControlField z = [](const FieldBundle& b) {
    Vec dir = -b.p_bar;
    std::swap(dir[0], dir[1]);  // rotated opponent direction
    return ControlAction{dir, 0.7};
  };
  SimConfig config;
  config.dt = 1e-4;
  config.seed = 31;
  const ItoReport rep = verify_ito_identity(spec, y, z, x0, 0.02, config, 2000);
  CHECK(rep.pass);
  CHECK(std::abs(rep.gap) <= rep.tolerance);
}
