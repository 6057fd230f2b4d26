#pragma once

#include <string>
#include <vector>

#include "pinch/certificate.hh"
#include "pinch/complex.hh"
#include "pinch/constants.hh"
#include "pinch/frame.hh"
#include "pinch/types.hh"

namespace pinch {

// Planar reparametrization stage.  Three families of elementary maps flatten
// the normal derivative of a piecewise affine map across the skeleton:
//   edge_b    pinches across an edge along its middle part,
//   corner_a  pinches angularly around a vertex toward one incident edge,
//   vertex_e  pinches radially into a vertex.
// Each map is identity (bitwise) outside an explicit support region.  The
// composition applies all edge maps, then all corner maps, then all vertex
// maps; maps inside one stage have pairwise disjoint supports, so their
// relative order is immaterial, while the stage order is fixed.

enum class PinchKind2D { edge_b, corner_a, vertex_e };

struct ElementaryPinchMap2D {
  PinchKind2D kind = PinchKind2D::edge_b;
  int edge = -1;    // owning edge (edge_b, corner_a)
  int vertex = -1;  // owning vertex (corner_a, vertex_e)
  Frame2 frame;     // origin at the owning vertex resp. edge start
  double ell = 0.0;    // edge length
  double d = 0.0;      // pinch band offset, d = delta * m / 2
  double t = 0.0;      // band aspect, tan(alpha/3)
  double alpha = 0.0;  // corner angle bound of the edge
  double eta = 0.0;    // vertex clearance factor
  double delta = 0.0;

  Vec2 evaluate(const Vec2& x) const;
  Mat2 jacobian(const Vec2& x) const;
  // exact predicate for {evaluate != id}; evaluate returns its argument
  // bitwise outside this set
  bool in_support(const Vec2& x) const;
};

struct SmoothingMap2D {
  SimplicialComplex complex;
  Constants2 constants;
  double delta = 0.0;
  // all edge maps, then all corner maps, then all vertex maps
  std::vector<ElementaryPinchMap2D> maps;
  DisjointnessCertificate certificate;

  Vec2 evaluate(Vec2 x) const;
  // chain-rule product of the elementary Jacobians; the zero matrix at
  // complex vertices (the continuous limit there)
  Mat2 jacobian(const Vec2& x) const;
  bool in_support(const Vec2& x) const;
};

ElementaryPinchMap2D build_edge_pinch(const SimplicialComplex& cpx, const Constants2& k,
                                      int edge, double delta);
ElementaryPinchMap2D build_corner_pinch(const SimplicialComplex& cpx, const Constants2& k,
                                        int vertex, int edge, double delta);
ElementaryPinchMap2D build_vertex_pinch(const SimplicialComplex& cpx, const Constants2& k,
                                        int vertex, double delta);

// Draw a point distributed over the support region of one elementary map.
Vec2 sample_support(const ElementaryPinchMap2D& map, class Rng& rng);

// Sample every same-stage pair of supports and require the sibling map to be
// exactly identity on each drawn point.
DisjointnessCertificate certify_disjoint_supports(const std::vector<ElementaryPinchMap2D>& maps,
                                                  int samples_per_support, unsigned long seed);

// Assemble the full reparametrization at width delta.  Requires a validated
// planar complex and 0 < delta < k.delta_cap; throws on inadmissible delta or
// on a failed disjointness certificate.
SmoothingMap2D build_xi_2d(const SimplicialComplex& cpx, const Constants2& k, double delta);
SmoothingMap2D build_xi_2d(const SimplicialComplex& cpx, double delta);

}  // namespace pinch
