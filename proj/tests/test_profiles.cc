#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pinch/profiles.hh"
#include "pinch/rng.hh"

using namespace pinch;

TEST_CASE("pinch profile exact values") {
  Rng rng(17);
  for (int k = 0; k < 50; ++k) {
    const double delta = rng.uniform(1e-6, 10.0);
    CAPTURE(delta);
    CHECK(pinch_profile(0.0, delta) == 0.0);
    CHECK(pinch_profile_deriv(0.0, delta) == 0.0);
    CHECK(std::abs(pinch_profile(delta, delta) - delta) <= 1e-12 * delta);
    CHECK(std::abs(pinch_profile(-delta, delta) + delta) <= 1e-12 * delta);
    CHECK(std::abs(pinch_profile_deriv(delta, delta) - 1.0) <= 1e-12);
    CHECK(std::abs(pinch_profile_deriv(-delta, delta) - 1.0) <= 1e-12);
    // interior landmarks of the cubic: value 3*delta/8 at delta/2, slope
    // maximum 4/3 attained at 2*delta/3
    CHECK(std::abs(pinch_profile(delta / 2, delta) - 3.0 * delta / 8.0) <= 1e-12 * delta);
    CHECK(std::abs(pinch_profile_deriv(2.0 * delta / 3.0, delta) - 4.0 / 3.0) <= 1e-12);
    CHECK(std::abs(pinch_profile(2.0 * delta, delta) - 2.0 * delta) == 0.0);
  }
}

TEST_CASE("pinch profile shape properties") {
  Rng rng(18);
  for (int k = 0; k < 50; ++k) {
    const double delta = rng.uniform(1e-6, 10.0);
    CAPTURE(delta);
    double prev = pinch_profile(-2.0 * delta, delta);
    double supd = 0.0;
    for (int i = 1; i <= 10000; ++i) {
      const double x = -2.0 * delta + 4.0 * delta * i / 10000.0;
      const double v = pinch_profile(x, delta);
      REQUIRE(v > prev);  // strictly increasing
      prev = v;
      REQUIRE(std::abs(v) <= std::abs(x) + 1e-15 * delta);
      supd = std::max(supd, pinch_profile_deriv(x, delta));
    }
    CHECK(supd <= 4.0 / 3.0 + 1e-12);
    CHECK(supd > 4.0 / 3.0 - 1e-3);
    // C1 junction at the boundary of the profile window
    CHECK(std::abs(pinch_profile(std::nextafter(delta, 0.0), delta) -
                   pinch_profile(std::nextafter(delta, 2 * delta), delta)) <= 1e-12 * delta);
    CHECK(std::abs(pinch_profile_deriv(std::nextafter(delta, 0.0), delta) - 1.0) <= 1e-9);
  }
}

TEST_CASE("pinch profile derivative matches finite differences") {
  Rng rng(19);
  for (int k = 0; k < 50; ++k) {
    const double delta = rng.uniform(1e-3, 10.0);
    const double h = 1e-6 * delta;
    for (int i = 0; i < 40; ++i) {
      const double x = rng.uniform(-0.99 * delta, 0.99 * delta);
      const double fd = (pinch_profile(x + h, delta) - pinch_profile(x - h, delta)) / (2 * h);
      const double an = pinch_profile_deriv(x, delta);
      CHECK(std::abs(fd - an) <= 1e-5 * (1.0 + std::abs(an)));
      const double fdw =
          (pinch_profile(x, delta + h) - pinch_profile(x, delta - h)) / (2 * h);
      const double anw = pinch_profile_dwidth(x, delta);
      CHECK(std::abs(fdw - anw) <= 1e-5 * (1.0 + std::abs(anw)));
    }
  }
  // widening the pinch lowers the profile on the positive side
  CHECK(pinch_profile_dwidth(0.5, 1.0) < 0.0);
  CHECK(pinch_profile_dwidth(-0.5, 1.0) > 0.0);
  CHECK(pinch_profile_dwidth(0.0, 1.0) == 0.0);
  CHECK(pinch_profile_dwidth(2.0, 1.0) == 0.0);
}

TEST_CASE("power profile") {
  Rng rng(20);
  for (int k = 0; k < 20; ++k) {
    const double delta = rng.uniform(1e-3, 5.0);
    // alpha = 1 is the cubic
    for (int i = 0; i < 100; ++i) {
      const double x = rng.uniform(-2 * delta, 2 * delta);
      CHECK(std::abs(pinch_profile_pow(x, delta, 1.0) - pinch_profile(x, delta)) <=
            1e-14 * (1.0 + delta));
    }
    // alpha = 0 is the identity
    const double x0 = rng.uniform(-delta, delta);
    CHECK(pinch_profile_pow(x0, delta, 0.0) == doctest::Approx(x0).epsilon(1e-14));
    CHECK(std::abs(pinch_profile_pow(delta / 2, delta, 1.0) - 3.0 * delta / 8.0) <= 1e-12 * delta);
    CHECK(std::abs(pinch_profile_pow(delta, delta, 2.5) - delta) <= 1e-12 * delta);
    // monotone and derivative consistent for assorted alpha
    for (double alpha : {0.5, 2.0, 3.5}) {
      double prev = pinch_profile_pow(-1.5 * delta, delta, alpha);
      for (int i = 1; i <= 2000; ++i) {
        const double x = -1.5 * delta + 3.0 * delta * i / 2000.0;
        const double v = pinch_profile_pow(x, delta, alpha);
        REQUIRE(v > prev);
        prev = v;
      }
      const double xx = rng.uniform(-0.9 * delta, 0.9 * delta);
      const double h = 1e-6 * delta;
      const double fd =
          (pinch_profile_pow(xx + h, delta, alpha) - pinch_profile_pow(xx - h, delta, alpha)) /
          (2 * h);
      CHECK(std::abs(fd - pinch_profile_pow_deriv(xx, delta, alpha)) <= 1e-4 * (1 + std::abs(fd)));
    }
  }
  CHECK_THROWS_AS(pinch_profile_pow(0.1, 1.0, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(pinch_profile(0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pinch_profile(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("ramp endpoints and derivative") {
  Rng rng(21);
  for (int k = 0; k < 50; ++k) {
    const double a = rng.uniform(1e-6, 1.0);
    const double b = a + rng.uniform(1e-6, 2.0);
    CHECK(ramp(a, a, b) == 0.0);
    CHECK(ramp(b, a, b) == 1.0);
    CHECK(ramp(a - 1.0, a, b) == 0.0);
    CHECK(ramp(b + 1.0, a, b) == 1.0);
    CHECK(std::abs(ramp(0.5 * (a + b), a, b) - 0.5) <= 1e-12);
    CHECK(std::abs(ramp_deriv(std::nextafter(a, b), a, b)) <= 1e-6 / (b - a));
    CHECK(std::abs(ramp_deriv(std::nextafter(b, a), a, b)) <= 1e-6 / (b - a));
    // max slope at the midpoint
    const double dmid = ramp_deriv(0.5 * (a + b), a, b);
    CHECK(std::abs(dmid - M_PI_2 / (b - a)) <= 1e-12 / (b - a));
    const double x = rng.uniform(a, b);
    const double h = 1e-7 * (b - a);
    const double fd = (ramp(x + h, a, b) - ramp(x - h, a, b)) / (2 * h);
    CHECK(std::abs(fd - ramp_deriv(x, a, b)) <= 1e-4 * (1.0 + std::abs(fd)));
  }
  CHECK_THROWS_AS(ramp(0.5, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ramp(0.5, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ramp(0.5, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ramp(0.5, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("cylindrical round trip") {
  Rng rng(22);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 x(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    if (std::hypot(x[1], x[2]) <= 1e-8) continue;
    const Vec3 c = cart_to_cyl(x);
    CHECK((cyl_to_cart(c) - x).norm() <= 1e-12 * (1.0 + x.norm()));
    CHECK(c[1] >= 0.0);
    CHECK(c[2] >= -M_PI);
    CHECK(c[2] <= M_PI);
  }
  // axis convention
  const Vec3 on_axis(0.7, 0.0, 0.0);
  CHECK(cart_to_cyl(on_axis)[2] == 0.0);
  CHECK(cart_to_cyl(on_axis)[1] == 0.0);
}
