#pragma once

#include <vector>

#include "pinch/complex.hh"
#include "pinch/types.hh"

namespace pinch {

// Piecewise affine map over a simplicial complex: x |-> M_c x + b_c on cell c.
// A valid map glues to a continuous injection of the covered domain, so the
// pieces agree wherever cells share a subsimplex and every determinant carries
// the same sign.
struct PiecewiseAffineMap {
  SimplicialComplex complex;
  std::vector<MatX> matrix;  // one dim x dim block per cell
  std::vector<VecX> offset;  // one dim-vector per cell
  int orientation = 0;       // common determinant sign

  int dim() const { return complex.dim(); }

  // value of the named cell's piece, no point location
  VecX evaluate_on(int cell, const VecX& x) const;

  // locate x in the complex and apply that piece; location ties resolve to the
  // lowest cell id, which is consistent because valid pieces agree on shared
  // subsimplices.  Throws std::domain_error when x lies outside the domain.
  VecX evaluate(const VecX& x) const;

  // gradient at x (constant per cell); same location rule as evaluate
  const MatX& jacobian(const VecX& x) const;

  // largest operator 2-norm over the pieces
  double max_gradient_norm() const;
  // operator 2-norm of one piece
  double gradient_norm(int cell) const;
};

// Structural soundness of a candidate map: per-cell shapes, nonzero
// determinants of one common sign, piece agreement on shared subsimplices
// (vertex images within tol, which extends to the spanned subsimplex by
// affinity), and sampled injectivity across cell pairs.
ValidationReport validate_pa_map(const PiecewiseAffineMap& f, double tol = 1e-10,
                                 int injectivity_samples = 4096, unsigned long seed = 1u);

// Assemble and validate; throws std::invalid_argument with the report text
// when validation fails.
PiecewiseAffineMap make_pa_map(const SimplicialComplex& cpx, std::vector<MatX> matrices,
                               std::vector<VecX> offsets);

PiecewiseAffineMap identity_pa_map(const SimplicialComplex& cpx);

// Interpolate from vertex images (rows of images, aligned with the complex
// vertices): each cell maps affinely onto its displaced vertex tuple.
// Continuity holds by construction; orientation and injectivity are still
// validated.
PiecewiseAffineMap pa_from_vertex_images(const SimplicialComplex& cpx, const MatX& images);

}  // namespace pinch
