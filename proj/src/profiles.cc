#include "pinch/profiles.hh"

#include <cmath>
#include <stdexcept>

namespace pinch {

double pinch_profile(double x, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("pinch_profile: delta must be positive");
  const double ax = std::abs(x);
  if (ax >= delta) return x;
  const double v = (2.0 / delta) * ax * ax - (1.0 / (delta * delta)) * ax * ax * ax;
  return std::copysign(v, x);
}

double pinch_profile_deriv(double x, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("pinch_profile_deriv: delta must be positive");
  const double ax = std::abs(x);
  if (ax >= delta) return 1.0;
  return (4.0 / delta) * ax - (3.0 / (delta * delta)) * ax * ax;
}

double pinch_profile_dwidth(double x, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("pinch_profile_dwidth: delta must be positive");
  const double ax = std::abs(x);
  if (ax >= delta) return 0.0;
  // d/d(delta) of 2 x^2/delta - x^3/delta^2, odd in x and negative for x > 0
  const double v = 2.0 * ax * ax * (ax - delta) / (delta * delta * delta);
  return x < 0.0 ? -v : v;
}

double pinch_profile_pow(double x, double delta, double alpha) {
  if (!(delta > 0.0)) throw std::invalid_argument("pinch_profile_pow: delta must be positive");
  if (alpha < 0.0) throw std::invalid_argument("pinch_profile_pow: alpha must be nonnegative");
  const double ax = std::abs(x);
  if (ax >= delta) return x;
  const double v = (1.0 + alpha) / std::pow(delta, alpha) * std::pow(ax, 1.0 + alpha) -
                   alpha / std::pow(delta, 1.0 + alpha) * std::pow(ax, 2.0 + alpha);
  return std::copysign(v, x);
}

double pinch_profile_pow_deriv(double x, double delta, double alpha) {
  if (!(delta > 0.0)) throw std::invalid_argument("pinch_profile_pow_deriv: delta must be positive");
  if (alpha < 0.0) throw std::invalid_argument("pinch_profile_pow_deriv: alpha must be nonnegative");
  const double ax = std::abs(x);
  if (ax >= delta) return 1.0;
  return (1.0 + alpha) * (1.0 + alpha) / std::pow(delta, alpha) * std::pow(ax, alpha) -
         alpha * (2.0 + alpha) / std::pow(delta, 1.0 + alpha) * std::pow(ax, 1.0 + alpha);
}

double ramp01(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 0.5 * (1.0 + std::sin(M_PI * t - M_PI_2));
}

double ramp01_deriv(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 0.5 * M_PI * std::cos(M_PI * t - M_PI_2);
}

double ramp(double x, double a, double b) {
  if (!(0.0 < a && a < b)) throw std::invalid_argument("ramp: requires 0 < a < b");
  return ramp01((x - a) / (b - a));
}

double ramp_deriv(double x, double a, double b) {
  if (!(0.0 < a && a < b)) throw std::invalid_argument("ramp_deriv: requires 0 < a < b");
  return ramp01_deriv((x - a) / (b - a)) / (b - a);
}

Vec3 cyl_to_cart(const Vec3& yrphi) {
  const double r = yrphi[1];
  return Vec3(yrphi[0], r * std::cos(yrphi[2]), r * std::sin(yrphi[2]));
}

Vec3 cart_to_cyl(const Vec3& x) {
  const double r = std::hypot(x[1], x[2]);
  const double phi = (r > 0.0) ? std::atan2(x[2], x[1]) : 0.0;
  return Vec3(x[0], r, phi);
}

}  // namespace pinch
