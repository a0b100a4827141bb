#include <doctest.h>

#include "sdg/geometry.hpp"
#include "sdg/rng.hpp"

using namespace sdg;

namespace {
Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}
}  // namespace

TEST_CASE("ball membership") {
  const Domain ball = Domain::ball(v2(2, 0), 1.0);
  CHECK(ball.contains(v2(2, 0)));
  CHECK_FALSE(ball.contains(v2(3.5, 0)));
  // boundary points are not in the open set
  CHECK_FALSE(ball.contains(v2(3, 0)));
  CHECK_THROWS_AS(ball.contains(Vec::Zero(3)), std::invalid_argument);
}

TEST_CASE("ball signed distance") {
  const Domain ball = Domain::ball(v2(2, 0), 1.0);
  CHECK(ball.signed_distance(v2(2, 0)) == doctest::Approx(-1.0));
  CHECK(ball.signed_distance(v2(3, 0)) == doctest::Approx(0.0));
  CHECK(ball.signed_distance(v2(4, 0)) == doctest::Approx(1.0));
}

TEST_CASE("ball boundary crossing") {
  const Domain ball = Domain::ball(v2(2, 0), 1.0);

  auto c = ball.boundary_crossing(v2(2.9, 0), v2(3.1, 0));
  REQUIRE(c.has_value());
  CHECK(c->theta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c->point[0] == doctest::Approx(3.0).epsilon(1e-12));

  CHECK_FALSE(ball.boundary_crossing(v2(2, 0), v2(2.5, 0)).has_value());

  c = ball.boundary_crossing(v2(2, 0.9), v2(2, 1.1));
  REQUIRE(c.has_value());
  CHECK(c->theta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c->point[1] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(ball.boundary_crossing(v2(5, 0), v2(6, 0)),
                  std::invalid_argument);
}

TEST_CASE("contains iff negative signed distance (random points)") {
  const Domain ball = Domain::ball(v2(2, 0), 1.0);
  Vec radii(2);
  radii << 1.5, 0.6;
  const Domain ell = Domain::ellipsoid(v2(-1, 3), radii);
  RngStream rng(42);
  for (int i = 0; i < 2000; ++i) {
    Vec x(2);
    x << 4.0 * rng.next_uniform(), 6.0 * rng.next_uniform() - 1.0;
    for (const Domain* d : {&ball, &ell}) {
      const double sd = d->signed_distance(x);
      if (std::abs(sd) > 1e-12) CHECK(d->contains(x) == (sd < 0.0));
    }
  }
}

TEST_CASE("ellipsoid signed distance and crossing accuracy") {
  Vec radii(2);
  radii << 2.0, 0.5;
  const Domain ell = Domain::ellipsoid(v2(0, 0), radii);

  // axis points have exact distances
  CHECK(ell.signed_distance(v2(3, 0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ell.signed_distance(v2(0, 1)) == doctest::Approx(0.5).epsilon(1e-10));

  // projection of generic points lands on the boundary
  RngStream rng(7);
  for (int i = 0; i < 500; ++i) {
    Vec x(2);
    x << 6.0 * rng.next_uniform() - 3.0, 3.0 * rng.next_uniform() - 1.5;
    const Vec z = x * 10.0;
    const Vec y = ell.project_to_closure(z);
    if (ell.contains(z))
      CHECK((y - z).norm() == 0.0);  // projection is the identity inside
    else
      CHECK(std::abs(ell.signed_distance(y)) <= 1e-10);
  }

  // crossing points satisfy the boundary equation
  for (int i = 0; i < 500; ++i) {
    const double t = 2 * M_PI * rng.next_uniform();
    const Vec a = v2(0.3 * std::cos(t), 0.1 * std::sin(t));
    const Vec b = v2(5.0 * std::cos(t + 0.3), 5.0 * std::sin(t + 0.3));
    const auto c = ell.boundary_crossing(a, b);
    REQUIRE(c.has_value());
    CHECK(std::abs(ell.signed_distance(c->point)) <= 1e-10);
  }
}

TEST_CASE("ball crossing matches the closed-form quadratic") {
  const Domain ball = Domain::ball(v2(2, 0), 1.0);
  RngStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double t = 2 * M_PI * rng.next_uniform();
    const double r = 0.99 * rng.next_uniform();
    const Vec a = v2(2.0 + r * std::cos(t), r * std::sin(t));
    const Vec b = v2(2.0 + 3.0 * std::cos(t + 1.0), 3.0 * std::sin(t + 1.0));
    if (ball.contains(b)) continue;
    const auto c = ball.boundary_crossing(a, b);
    REQUIRE(c.has_value());
    CHECK((c->point - v2(2, 0)).norm() == doctest::Approx(1.0).epsilon(1e-12));
    // exit point is the first crossing: everything before stays inside
    for (double s : {0.25, 0.5, 0.75})
      CHECK(ball.signed_distance(a + s * c->theta * (b - a)) < 1e-12);
  }
}

TEST_CASE("domain construction rejects bad input") {
  CHECK_THROWS_AS(Domain::ball(v2(0, 0), -1.0), std::invalid_argument);
  Vec c1(1);
  c1 << 0.0;
  CHECK_THROWS_AS(Domain::ball(c1, 1.0), std::invalid_argument);
}
