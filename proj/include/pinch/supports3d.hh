#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pinch/complex.hh"
#include "pinch/constants.hh"
#include "pinch/frame.hh"
#include "pinch/types.hh"

namespace pinch {

class Rng;

// Smooth plateau weight of a face: the product over the three side lines of
// an in-plane ramp of the signed inward distance, rising from 0 at lo to 1 at
// hi.  Negative distances (outside a side's half-plane) give weight 0, so the
// weight vanishes off the face footprint.  The value depends only on the
// in-plane coordinates and is C1 in space.
struct FaceBump {
  int face = -1;
  Frame3 frame;      // origin at a face corner, local z along the face normal
  double lo = 0.0;   // ramp start, t * delta / 32
  double hi = 0.0;   // ramp end, t * delta / 16
  Mat3 side_normal;  // rows: inward unit normals of the side lines, local xy
  Vec3 side_offset;  // inward distance to side i is side_normal.row(i) . p + side_offset[i]
  Mat3 corner;       // columns: local coordinates of the face corners, z = 0

  double value(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;  // world coordinates, in-plane direction
};

// requires 2 delta < d_face; delta is the slab stage width
FaceBump build_face_bump(const SimplicialComplex& cpx, const Constants3& k, int face,
                         double delta);

// Envelope families, one per pinch family whose support the pairwise
// separation statements speak about.  Vertex balls need none: the ball is its
// own envelope.
enum class SupportRegion3D { corner_wedge, corner_cone, edge_band, edge_tube, face_slab };

// One envelope around a subsimplex, described in an axis frame with local x
// along the owning edge (slabs use the face frame instead).  Cone families
// bound r by slope * y, tube families by a fixed radius; a negative
// half_angle leaves the azimuth free.  Slabs are the positive set of their
// bump, thickened by thickness * value in the normal direction.
struct SupportSet {
  SupportRegion3D family = SupportRegion3D::corner_wedge;
  int face = -1, edge = -1, vertex = -1;
  Frame3 frame;
  double delta = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double slope = 0.0;
  double radius = 0.0;
  double half_angle = -1.0;
  bool open = false;  // strict inequalities in y and r
  FaceBump bump;
  double thickness = 0.0;
  Vec3 center = Vec3::Zero();  // bounding ball of the whole set
  double bound = 0.0;
};

bool support_membership(const SupportSet& set, const Vec3& x);

// uniform draw from the set; slabs mix uniform in-plane draws with draws from
// the boundary ramp annulus where the weight climbs from 0 to 1
Vec3 sample_support_set(const SupportSet& set, Rng& rng);

// margin to the complement, in length units; positive inside, 0 outside
double support_slack(const SupportSet& set, const Vec3& x);

// Builders for the five families.  Each validates its width precondition
// against the clearance constants and throws std::invalid_argument naming the
// constant and subsimplex otherwise.
SupportSet corner_wedge_region(const SimplicialComplex& cpx, const Constants3& k, int face,
                               int edge, int vertex, double delta, double alpha);
SupportSet corner_cone_region(const SimplicialComplex& cpx, const Constants3& k, int edge,
                              int slot, double delta);
SupportSet edge_band_region(const SimplicialComplex& cpx, const Constants3& k, int face,
                            int edge, double delta);
SupportSet edge_tube_region(const SimplicialComplex& cpx, const Constants3& k, int edge,
                            double delta);
SupportSet face_slab_region(const SimplicialComplex& cpx, const Constants3& k, int face,
                            double delta);

// Azimuthal pinch half-angle per vertex: the rotation-certified cone
// clearance, further capped so that a corner wedge stays below every other
// face plane through one of its sides: sin(alpha) * tan(15 theta / 16) must
// not exceed tan of the smallest dihedral constant among the corner's sides.
std::vector<double> corner_pinch_angles(const SimplicialComplex& cpx, const Constants3& k,
                                        const std::vector<double>& delta_vertex);
std::vector<double> corner_pinch_angles(const SimplicialComplex& cpx, const Constants3& k,
                                        double delta);

// Every envelope of the complex at uniform width delta: six corner wedges and
// three edge bands per face, two corner cones per edge, one tube per edge,
// one slab per face at width delta * tan(omega_face / 3).
std::vector<SupportSet> all_support_regions(const SimplicialComplex& cpx, const Constants3& k,
                                            double delta,
                                            const std::vector<double>& alpha_vertex);

struct RegionCertificate {
  bool ok = true;
  long pairs_checked = 0;
  long samples = 0;
  int violations = 0;
  double max_violation = 0.0;
  std::string detail;  // first witness
};

// Sampled check of the pairwise separation statements: cones, tubes and slabs
// of distinct subsimplices claim empty intersection; bands of the same edge
// claim intersection only on the edge; wedges of the same vertex across two
// faces claim intersection only in the shared subsimplex within 2 delta of
// the vertex.  Same-face wedge pairs make no claim and are skipped.
RegionCertificate certify_support_disjointness(const SimplicialComplex& cpx,
                                               const std::vector<SupportSet>& sets,
                                               int samples_per_set, std::uint64_t seed,
                                               double tol = 1e-9);

// Sampled check of the collar containments: wedges and slabs stay within
// delta of their face, cones within delta of their edge, bands and tubes
// within delta / 4 of their edge.
RegionCertificate certify_support_containment(const SimplicialComplex& cpx,
                                              const std::vector<SupportSet>& sets,
                                              int samples_per_set, std::uint64_t seed,
                                              double tol = 1e-9);

}  // namespace pinch
