#include "sdg/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sdg {

namespace {
constexpr double kBoundaryTol = 1e-12;
}

Domain::Domain(DomainKind kind, Vec center, Vec radii)
    : kind_(kind), center_(std::move(center)), radii_(std::move(radii)) {
  if (center_.size() < 2 || center_.size() > kMaxDim)
    throw std::invalid_argument("domain dimension must be in [2, 8]");
  if (radii_.size() != center_.size())
    throw std::invalid_argument("radii/center dimension mismatch");
  if ((radii_.array() <= 0.0).any())
    throw std::invalid_argument("radii must be strictly positive");
}

Domain Domain::ball(Vec center, double radius) {
  Vec radii = Vec::Constant(center.size(), radius);
  return Domain(DomainKind::Ball, std::move(center), std::move(radii));
}

Domain Domain::ellipsoid(Vec center, Vec radii) {
  const bool all_equal =
      (radii.array() == radii[0]).all();
  return Domain(all_equal ? DomainKind::Ball : DomainKind::Ellipsoid,
                std::move(center), std::move(radii));
}

void Domain::check_dim(const Vec& x) const {
  if (x.size() != center_.size())
    throw std::invalid_argument("point/domain dimension mismatch");
}

double Domain::level(const Vec& x) const {
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double w = (x[i] - center_[i]) / radii_[i];
    s += w * w;
  }
  return s - 1.0;
}

bool Domain::contains(const Vec& x) const {
  check_dim(x);
  return level(x) < 0.0;
}

Vec Domain::closest_boundary_point(const Vec& x) const {
  const Vec y = x - center_;
  if (kind_ == DomainKind::Ball) {
    const double r = radii_[0];
    const double n = y.norm();
    if (n < 1e-300) {
      Vec e = Vec::Zero(x.size());
      e[0] = r;
      return center_ + e;
    }
    return center_ + y * (r / n);
  }

  // Ellipsoid: closest point z_i = y_i r_i^2 / (r_i^2 + t), with t the root
  // of g(t) = sum (y_i r_i / (r_i^2 + t))^2 - 1 on (-min r_i^2, inf).
  const int m = static_cast<int>(y.size());
  double rmin2 = radii_.minCoeff();
  rmin2 *= rmin2;
  auto g = [&](double t) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double d = y[i] * radii_[i] / (radii_[i] * radii_[i] + t);
      s += d * d;
    }
    return s - 1.0;
  };

  // bracket the root; g is strictly decreasing where defined
  double lo = -rmin2 * (1.0 - 1e-12);
  double hi = std::max(1.0, y.norm() * radii_.maxCoeff());
  while (g(hi) > 0.0) hi *= 2.0;
  if (g(lo) < 0.0) {
    // degenerate interior point aligned with the short axis: fall back to
    // the scaled radial projection (g cannot be bracketed)
    Vec w = y.cwiseQuotient(radii_);
    const double n = w.norm();
    if (n < 1e-300) {
      int j = 0;
      radii_.minCoeff(&j);
      Vec e = Vec::Zero(m);
      e[j] = radii_[j];
      return center_ + e;
    }
    Vec z = Vec(m);
    for (int i = 0; i < m; ++i) z[i] = radii_[i] * w[i] / n;
    return center_ + z;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  Vec z = Vec(m);
  for (int i = 0; i < m; ++i)
    z[i] = y[i] * radii_[i] * radii_[i] / (radii_[i] * radii_[i] + t);
  return center_ + z;
}

double Domain::signed_distance(const Vec& x) const {
  check_dim(x);
  if (kind_ == DomainKind::Ball) return (x - center_).norm() - radii_[0];
  const Vec b = closest_boundary_point(x);
  const double d = (x - b).norm();
  return level(x) < 0.0 ? -d : d;
}

Vec Domain::project_to_closure(const Vec& x) const {
  check_dim(x);
  if (level(x) <= 0.0) return x;
  return closest_boundary_point(x);
}

std::optional<Crossing> Domain::boundary_crossing(const Vec& a,
                                                  const Vec& b) const {
  check_dim(a);
  check_dim(b);
  if (level(a) > kBoundaryTol * 1e3)
    throw std::invalid_argument("boundary_crossing: segment start outside closure");
  if (level(b) < 0.0) return std::nullopt;

  // In coordinates scaled by the radii both kinds are the unit ball, and the
  // crossing parameter solves a quadratic exactly.
  const int m = dimension();
  Vec wa(m), wd(m);
  for (int i = 0; i < m; ++i) {
    wa[i] = (a[i] - center_[i]) / radii_[i];
    wd[i] = (b[i] - a[i]) / radii_[i];
  }
  const double alpha = wd.squaredNorm();
  const double beta = wa.dot(wd);
  const double gamma = wa.squaredNorm() - 1.0;
  if (alpha < 1e-300) return std::nullopt;  // a == b inside the closure
  const double disc = beta * beta - alpha * gamma;
  const double sq = std::sqrt(std::max(disc, 0.0));
  double theta = (-beta + sq) / alpha;  // the nonnegative root (gamma <= 0)
  theta = std::clamp(theta, 0.0, 1.0);
  Crossing c;
  c.theta = theta;
  c.point = a + theta * (b - a);
  return c;
}

}  // namespace sdg
