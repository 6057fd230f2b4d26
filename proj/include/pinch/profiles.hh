#pragma once

#include "pinch/types.hh"

namespace pinch {

// Cubic pinch profile: odd, C1, increasing, identity outside [-delta, delta],
// zero derivative at 0, fixed points at +-delta. Throws for delta <= 0.
double pinch_profile(double x, double delta);
double pinch_profile_deriv(double x, double delta);
// partial derivative of pinch_profile(x, delta) with respect to delta
double pinch_profile_dwidth(double x, double delta);

// Power-alpha variant; alpha = 1 reproduces the cubic, alpha = 0 the identity.
// Odd extension on [-delta, delta], identity outside. Throws for alpha < 0.
double pinch_profile_pow(double x, double delta, double alpha);
double pinch_profile_pow_deriv(double x, double delta, double alpha);

// Smooth ramp: 0 below a, 1 above b, sine transition on [a, b].
// Requires 0 < a < b.
double ramp(double x, double a, double b);
double ramp_deriv(double x, double a, double b);

// Same ramp on the unit interval (0 below 0, 1 above 1); no parameter checks,
// used by the analytic Jacobians where the ramp bounds depend on coordinates.
double ramp01(double t);
double ramp01_deriv(double t);

// Cylindrical coordinates (x1, r, phi) <-> (x1, x2, x3), phi measured from
// the positive x2 axis.  On the axis (r below axis_tol) phi is reported as 0.
Vec3 cyl_to_cart(const Vec3& yrphi);
Vec3 cart_to_cyl(const Vec3& x);

}  // namespace pinch
