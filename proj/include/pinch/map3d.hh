#pragma once

#include <string>
#include <vector>

#include "pinch/certificate.hh"
#include "pinch/complex.hh"
#include "pinch/constants.hh"
#include "pinch/frame.hh"
#include "pinch/supports3d.hh"
#include "pinch/types.hh"

namespace pinch {

// Spatial reparametrization stage.  Six families of elementary maps flatten
// the normal derivative of a piecewise affine map across the 2-skeleton:
//   corner_wedge  pinches azimuth around an edge toward one incident face,
//                 acting near a face corner,
//   corner_cone   pinches radially onto an edge near one of its endpoints,
//   vertex_ball   pinches radially into a vertex,
//   edge_band     pinches azimuth around an edge toward one incident face,
//                 acting along the middle part of the edge,
//   edge_tube     pinches radially onto an edge along its middle part,
//   face_slab     pinches normally onto a face over its interior.
// Each map is identity (bitwise) outside an explicit support region.  The
// composition applies the stages in the order above; maps inside one stage
// have pairwise disjoint supports (the two wedges of one face corner count
// as a unit), so their relative order is immaterial, while the stage order
// is fixed.

enum class PinchKind3D {
  corner_wedge,
  corner_cone,
  vertex_ball,
  edge_band,
  edge_tube,
  face_slab
};

struct ElementaryPinchMap3D {
  PinchKind3D kind = PinchKind3D::corner_wedge;
  int face = -1;    // owning face (corner_wedge, edge_band, face_slab)
  int edge = -1;    // owning edge (corner_wedge, corner_cone, edge_band, edge_tube)
  int vertex = -1;  // owning vertex (corner_wedge, corner_cone, vertex_ball)
  Frame3 frame;     // x-axis along the owning edge resp. the slab plane frame
  double delta = 0.0;
  double t = 0.0;      // radial aspect: wedge tan(5 theta/8)/2, cone tan(theta_A/3),
                       // band/tube tan(theta_S/3), slab tan(omega_F/3)
  double alpha = 0.0;  // azimuth pinch half-angle: wedge alpha_A, band omega_S/3
  double ell = 0.0;    // edge length (edge_band, edge_tube)
  double width = 0.0;  // normal pinch half-width (face_slab)
  FaceBump bump;       // plateau weight over the face (face_slab)
  int group = -1;      // the two wedges of one face corner share a group

  Vec3 evaluate(const Vec3& x) const;
  // One-sided limits where the map is not C1 (on the owning edge): wedge and
  // band return diag(1,0,0) there, the chain factor that a later radial
  // pinch forces anyway; cone and tube are differentiable on the edge.
  Mat3 jacobian(const Vec3& x) const;
  // exact predicate for {evaluate != id}; evaluate returns its argument
  // bitwise outside this set
  bool in_support(const Vec3& x) const;
};

struct SmoothingMap3D {
  SimplicialComplex complex;
  Constants3 constants;
  VecX cell_deltas;
  // width tables: entity width = min over incident cells resp. entities
  std::vector<double> delta_vertex, delta_edge, delta_face;
  std::vector<double> alpha_vertex;
  // all corner wedges, then corner cones, vertex balls, edge bands,
  // edge tubes, face slabs
  std::vector<ElementaryPinchMap3D> maps;
  DisjointnessCertificate certificate;

  Vec3 evaluate(Vec3 x) const;
  // chain-rule product of the elementary Jacobians; the zero matrix at
  // complex vertices (the continuous limit there)
  Mat3 jacobian(const Vec3& x) const;
  bool in_support(const Vec3& x) const;
};

ElementaryPinchMap3D build_corner_wedge_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                              int face, int edge, int vertex, double delta,
                                              double alpha);
ElementaryPinchMap3D build_corner_cone_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                             int edge, int slot, double delta);
ElementaryPinchMap3D build_vertex_ball_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                             int vertex, double delta);
ElementaryPinchMap3D build_edge_band_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                           int face, int edge, double delta);
ElementaryPinchMap3D build_edge_tube_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                           int edge, double delta);
// delta here is the slab stage width, delta_face * tan(omega_face / 3)
ElementaryPinchMap3D build_face_slab_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                           int face, double delta);

// Draw a point distributed over the support region of one elementary map.
Vec3 sample_support(const ElementaryPinchMap3D& map, class Rng& rng);

// Sample every same-stage pair of supports (same-group wedges exempt) and
// require the sibling map to be exactly identity on each drawn point.
DisjointnessCertificate certify_disjoint_supports(const std::vector<ElementaryPinchMap3D>& maps,
                                                  int samples_per_support, unsigned long seed);

// Assemble the full reparametrization.  cell_deltas gives one width per
// cell; each must be positive and smaller than every d_face constant of a
// face meeting that cell.  Throws on inadmissible widths or on a failed
// disjointness certificate.
SmoothingMap3D build_xi_3d(const SimplicialComplex& cpx, const Constants3& k,
                           const VecX& cell_deltas);
SmoothingMap3D build_xi_3d(const SimplicialComplex& cpx, const Constants3& k, double delta);
SmoothingMap3D build_xi_3d(const SimplicialComplex& cpx, double delta);

}  // namespace pinch
