#include "sdg/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace sdg {

namespace {

constexpr int kManufactureGrid = 10000;
constexpr double kMinGradNorm = 1e-10;

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  int i = index;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

}  // namespace

std::vector<Vec> halton_grid(const Domain& domain, int n) {
  static const int bases[kMaxDim] = {2, 3, 5, 7, 11, 13, 17, 19};
  const int m = domain.dimension();
  std::vector<Vec> pts;
  pts.reserve(n);
  Vec x(m);
  for (int idx = 1; static_cast<int>(pts.size()) < n; ++idx) {
    for (int j = 0; j < m; ++j) {
      const double u = halton(idx, bases[j]);
      x[j] = domain.center()[j] + (2.0 * u - 1.0) * domain.radii()[j];
    }
    if (domain.signed_distance(x) <= 0.0) pts.push_back(x);
    if (idx > 1000 * n)
      throw std::runtime_error("halton_grid: rejection sampling stalled");
  }
  return pts;
}

double ProblemSpec::h(const Vec& x) const {
  const Vec p = grad_eval_(x);
  const double pn2 = p.squaredNorm();
  if (pn2 < kMinGradNorm * kMinGradNorm)
    throw std::runtime_error("vanishing gradient in h evaluation");
  return -2.0 * p.dot(hess_eval_(x) * p) / pn2;
}

FieldBundle ProblemSpec::fields(const Vec& x) const {
  FieldBundle b;
  b.x = x;
  b.p = grad_eval_(x);
  b.p_norm = b.p.norm();
  if (b.p_norm < kMinGradNorm)
    throw std::runtime_error("field_bundle: |Du| below 1e-10 (Assumption violated)");
  b.p_bar = b.p / b.p_norm;
  b.S = hess_eval_(x);
  b.inf_lap = b.p_bar.dot(b.S * b.p_bar);
  b.q = (b.S * b.p - b.inf_lap * b.p) / (b.p_norm * b.p_norm);
  b.h = -2.0 * b.inf_lap;
  return b;
}

double ProblemSpec::pde_residual(const Vec& x) const {
  const FieldBundle b = fields(x);
  return -2.0 * b.inf_lap - b.h;
}

ProblemSpec manufacture(std::string name, Domain domain, ScalarField u,
                        VectorField grad, MatrixField hess) {
  ProblemSpec spec(std::move(domain));
  spec.name_ = std::move(name);
  spec.u_eval_ = std::move(u);
  spec.grad_eval_ = std::move(grad);
  spec.hess_eval_ = std::move(hess);

  const auto grid = halton_grid(spec.domain_, kManufactureGrid);
  double min_abs_h = std::numeric_limits<double>::infinity();
  double max_interior = 0.0;  // |h| + |u| + |Du|
  double sign = 0.0;
  std::vector<Vec> pbars(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const Vec& x = grid[i];
    const Vec p = spec.grad_eval_(x);
    const double pn = p.norm();
    if (pn < kMinGradNorm)
      throw std::invalid_argument("manufacture: vanishing gradient on the grid");
    const double hv = -2.0 * p.dot(spec.hess_eval_(x) * p) / (pn * pn);
    const double s = hv > 0.0 ? 1.0 : -1.0;
    if (sign == 0.0) sign = s;
    if (s != sign || std::abs(hv) < 1e-12)
      throw std::invalid_argument("manufacture: h changes sign or approaches 0");
    min_abs_h = std::min(min_abs_h, std::abs(hv));
    max_interior = std::max(
        max_interior, std::abs(hv) + std::abs(spec.u_eval_(x)) + pn);
    pbars[i] = p / pn;
  }

  // boundary data bound: |g| over boundary projections of the grid
  double max_g = 0.0;
  for (size_t i = 0; i < grid.size(); i += 7) {
    const Vec y = spec.domain_.project_to_closure(
        spec.domain_.center() +
        (grid[i] - spec.domain_.center()) * 1e6);  // radial pushout
    max_g = std::max(max_g, std::abs(spec.u_eval_(y)));
  }

  // Lip(p_bar) by difference quotients between consecutive grid points;
  // a grid lower bound only (flagged in the audit report).
  double lip = 0.0;
  for (size_t i = 1; i < grid.size(); ++i) {
    const double dx = (grid[i] - grid[i - 1]).norm();
    if (dx > 1e-12)
      lip = std::max(lip, (pbars[i] - pbars[i - 1]).norm() / dx);
  }

  spec.h_sign_ = sign;
  spec.h_lower_ = 0.99 * min_abs_h;
  spec.c0_ = max_interior + max_g + lip;
  spec.lip_pbar_ = lip;
  return spec;
}

AuditReport finite_difference_audit(const ProblemSpec& spec, int grid_size) {
  const double step = 1e-5;
  const auto grid = halton_grid(spec.domain(), grid_size);
  const int m = spec.domain().dimension();
  AuditReport rep;
  rep.grid_size = grid_size;
  rep.lip_pbar_estimate = spec.lip_pbar_estimate();
  for (const Vec& x : grid) {
    const Vec p = spec.grad(x);
    const Mat S = spec.hess(x);
    for (int i = 0; i < m; ++i) {
      Vec xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      const double fd_grad = (spec.u(xp) - spec.u(xm)) / (2.0 * step);
      rep.max_grad_error =
          std::max(rep.max_grad_error, std::abs(fd_grad - p[i]));
      const Vec fd_hess_col = (spec.grad(xp) - spec.grad(xm)) / (2.0 * step);
      rep.max_hess_error =
          std::max(rep.max_hess_error, (fd_hess_col - Vec(S.col(i))).norm());
    }
  }
  rep.grad_pass = rep.max_grad_error <= 1e-6;
  rep.hess_pass = rep.max_hess_error <= 1e-4;
  return rep;
}

ProblemSpec make_ms1() {
  Vec c(2);
  c << 2.0, 0.0;
  return manufacture(
      "ms1", Domain::ball(c, 1.0),
      [](const Vec& x) { return 0.5 * x[0] * x[0] + x[1]; },
      [](const Vec& x) {
        Vec g(2);
        g << x[0], 1.0;
        return g;
      },
      [](const Vec&) {
        Mat s = Mat::Zero(2, 2);
        s(0, 0) = 1.0;
        return s;
      });
}

ProblemSpec make_ms2() {
  Vec c(2);
  c << 2.0, 0.0;
  return manufacture(
      "ms2", Domain::ball(c, 1.0),
      [](const Vec& x) { return -(0.5 * x[0] * x[0] + x[1]); },
      [](const Vec& x) {
        Vec g(2);
        g << -x[0], -1.0;
        return g;
      },
      [](const Vec&) {
        Mat s = Mat::Zero(2, 2);
        s(0, 0) = -1.0;
        return s;
      });
}

ProblemSpec make_ms1_3d() {
  Vec c(3);
  c << 2.0, 0.0, 0.0;
  return manufacture(
      "ms1-3d", Domain::ball(c, 1.0),
      [](const Vec& x) { return 0.5 * x[0] * x[0] + x[1] + x[2]; },
      [](const Vec& x) {
        Vec g(3);
        g << x[0], 1.0, 1.0;
        return g;
      },
      [](const Vec&) {
        Mat s = Mat::Zero(3, 3);
        s(0, 0) = 1.0;
        return s;
      });
}

ProblemSpec spec_by_name(const std::string& name) {
  if (name == "ms1") return make_ms1();
  if (name == "ms2") return make_ms2();
  if (name == "ms1-3d") return make_ms1_3d();
  throw std::invalid_argument("unknown spec: " + name);
}

std::vector<std::string> catalogue_names() { return {"ms1", "ms2", "ms1-3d"}; }

}  // namespace sdg
