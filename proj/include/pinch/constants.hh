#pragma once

#include <vector>

#include "pinch/complex.hh"

namespace pinch {

// Per-entity geometric quantities steering the planar construction.  Angles
// live in radians and are clamped at pi/4 where noted; empty minima fall back
// to the clamp value (angles) or the complex diameter (lengths).
struct Constants2 {
  // per vertex: sharpest incident corner (clamped), its one-ring minimum, and
  // the safe pinch radius factor
  std::vector<double> alpha1, alpha2, eta;
  // per edge: sharpest corner constant of the edge, length scale factor for
  // the pinch offset, edge length, and tan(alpha/3)
  std::vector<double> alpha, m, len, t;
  // supremum of admissible widths (strict)
  double delta_cap = 1.0;

  // offset of the pinch band from the edge endpoints at width delta
  double d(int edge, double delta) const { return 0.5 * delta * m[edge]; }
};

Constants2 compute_constants2(const SimplicialComplex& cpx);

// Spatial analogue: clearance radii and clamped angles per vertex, edge and
// face.  Monotone along incidence: d_face <= d_edge <= d_vertex and
// theta_edge <= theta_vertex, omega_face <= omega_edge.
struct Constants3 {
  std::vector<double> d_vertex, theta_vertex;
  std::vector<double> d_edge, omega_edge, theta_edge, len;
  std::vector<double> d_face, omega_face;
  // interior angle of face f at corner slot j (vertex face(f)[j]), unclamped;
  // at most pi/2 after right-angle subdivision
  std::vector<double> theta_face_corner;
  double delta_cap = 1.0;

  double corner_angle(int face, int slot) const { return theta_face_corner[3 * face + slot]; }
};

Constants3 compute_constants3(const SimplicialComplex& cpx);

}  // namespace pinch
