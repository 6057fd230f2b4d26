#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pinch/frame.hh"
#include "pinch/rng.hh"

using namespace pinch;

TEST_CASE("axis-aligned corner frame is the identity") {
  auto f = corner_frame({0, 0, 0}, {2, 0, 0}, {0.3, 0.7, 0});
  CHECK((f.rot - Mat3::Identity()).norm() <= 1e-12);
  CHECK(f.origin.norm() <= 1e-12);
}

TEST_CASE("corner frame properties on random inputs") {
  Rng rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    Vec3 a(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    Vec3 ap = a + Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    Vec3 c = a + Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double len = (ap - a).norm();
    const double off_axis = ((c - a) - (c - a).dot((ap - a).normalized()) * (ap - a).normalized()).norm();
    if (len < 1e-3 || off_axis < 1e-3) continue;

    auto f = corner_frame(a, ap, c);
    CHECK((f.rot * f.rot.transpose() - Mat3::Identity()).norm() <= 1e-12);
    CHECK(f.rot.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.to_local(a).norm() <= 1e-12);

    const Vec3 lap = f.to_local(ap);
    CHECK(lap[0] == doctest::Approx(len).epsilon(1e-12));
    CHECK(std::abs(lap[1]) <= 1e-12 * len);
    CHECK(std::abs(lap[2]) <= 1e-12 * len);

    const Vec3 lc = f.to_local(c);
    CHECK(lc[1] > 0.0);
    CHECK(std::abs(lc[2]) <= 1e-12 * (c - a).norm());

    // rigid round trip
    for (int k = 0; k < 5; ++k) {
      Vec3 x(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
      CHECK((f.to_world(f.to_local(x)) - x).norm() <= 1e-12);
      Vec3 y(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
      // isometry
      CHECK((f.to_local(x) - f.to_local(y)).norm() ==
            doctest::Approx((x - y).norm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("corner frame rejects degenerate geometry") {
  CHECK_THROWS_AS(corner_frame({0, 0, 0}, {0, 0, 0}, {1, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(corner_frame({0, 0, 0}, {1, 0, 0}, {0.5, 0, 0}), std::invalid_argument);
}

TEST_CASE("edge frame in the plane") {
  auto f = edge_frame({1, 1}, {3, 1});
  CHECK((f.u - Vec2(1, 0)).norm() <= 1e-12);
  CHECK((f.n - Vec2(0, 1)).norm() <= 1e-12);
  const Vec2 p = f.to_local({1.5, 1.3});
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.3).epsilon(1e-12));

  Rng rng(555);
  for (int trial = 0; trial < 200; ++trial) {
    Vec2 s(rng.uniform(-2, 2), rng.uniform(-2, 2));
    Vec2 sp = s + Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
    if ((sp - s).norm() < 1e-3) continue;
    auto g = edge_frame(s, sp);
    CHECK(g.u.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(g.u.dot(g.n)) <= 1e-12);
    // positively oriented pair
    CHECK(g.u[0] * g.n[1] - g.u[1] * g.n[0] == doctest::Approx(1.0).epsilon(1e-12));
    Vec2 x(rng.uniform(-3, 3), rng.uniform(-3, 3));
    CHECK((g.to_world(g.to_local(x)) - x).norm() <= 1e-12);
    CHECK((g.rot() * g.u - Vec2(1, 0)).norm() <= 1e-12);
  }
  CHECK_THROWS_AS(edge_frame({0, 0}, {0, 0}), std::invalid_argument);
}
