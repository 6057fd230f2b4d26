#pragma once

#include <array>
#include <string>
#include <vector>

#include "pinch/complex.hh"
#include "pinch/constants.hh"

namespace pinch {

// In-face cone at a face corner around one of the corner's edges: the region
// swept by the corner-stage angular pinch.  In the (u1, u2) coordinates of
// the face the planar footprint is {0 < y <= delta, 0 < r <= 3 t y}.
struct CornerCone {
  int face = -1, edge = -1, vertex = -1;
  Vec3 apex;
  Vec3 u1, u2, u3;  // edge direction, in-face inward normal, face normal
  double t = 0.0;   // slope parameter of the pinched band
  std::array<int, 2> side_cell{-1, -1};  // cell on the +u3 / -u3 side, -1 when open
};

std::vector<CornerCone> corner_cones_at(const SimplicialComplex& cpx, const Constants3& k,
                                        int vertex);

// Exact first-exit rotation of the cone footprint about its edge toward
// sign * u3, against one cell's half-spaces.  The footprint is linear in its
// corner points, so the first exit is the minimum over corners of a
// sinusoidal crossing; the result lies in [0, pi].
double cone_rotation_clearance(const SimplicialComplex& cpx, const CornerCone& cone, int cell,
                               int sign, double delta);

struct ConeCertificate {
  bool ok = true;
  std::string detail;
};

// Sampled post-conditions at the given per-axis resolution: (a) every sample
// of every rotated cone lies inside the cells incident to the cone's face;
// (b) samples of cones at distinct faces meet other cones only within the
// shared subsimplex of the two faces.
ConeCertificate certify_corner_cones(const SimplicialComplex& cpx, const Constants3& k, int vertex,
                                     double delta, double alpha, int resolution);

// Pinch angle of the corner stage at a vertex: half the minimal exact
// clearance over incident cones and available sides, capped by a third of
// the incident dihedral constants, then certified by sampling with halving
// retries.  Requires 3 delta < d_vertex.  Throws when no positive angle
// certifies, naming the blocking pair.
double compute_corner_angle(const SimplicialComplex& cpx, const Constants3& k, int vertex,
                            double delta);

}  // namespace pinch
