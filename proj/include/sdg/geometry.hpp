#pragma once

#include <optional>
#include <stdexcept>

#include "sdg/types.hpp"

namespace sdg {

enum class DomainKind { Ball, Ellipsoid };

// First intersection of a segment with the boundary.
struct Crossing {
  Vec point;     // point on the boundary
  double theta;  // a + theta*(b-a) hits the boundary, theta in [0,1]
};

// Bounded C^2 domain: an open ball or open axis-aligned ellipsoid in R^m.
// Immutable after construction.
class Domain {
 public:
  static Domain ball(Vec center, double radius);
  static Domain ellipsoid(Vec center, Vec radii);

  DomainKind kind() const { return kind_; }
  int dimension() const { return static_cast<int>(center_.size()); }
  const Vec& center() const { return center_; }
  const Vec& radii() const { return radii_; }

  // true iff x lies in the open set G (boundary points excluded)
  bool contains(const Vec& x) const;

  // negative inside, zero on the boundary, positive outside
  double signed_distance(const Vec& x) const;

  // closest point of the closure; identity on points already inside
  Vec project_to_closure(const Vec& x) const;

  // Requires a in the closure.  Returns the first boundary intersection of
  // the segment a -> b, or nullopt when b stays inside G.
  std::optional<Crossing> boundary_crossing(const Vec& a, const Vec& b) const;

 private:
  Domain(DomainKind kind, Vec center, Vec radii);

  // sum((x_i-c_i)^2/r_i^2) - 1; negative inside, zero on the boundary
  double level(const Vec& x) const;
  Vec closest_boundary_point(const Vec& x) const;
  void check_dim(const Vec& x) const;

  DomainKind kind_;
  Vec center_;
  Vec radii_;
};

}  // namespace sdg
