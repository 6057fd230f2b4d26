#pragma once

#include <functional>
#include <vector>

#include "pinch/types.hh"

namespace pinch {

// Symmetric quadrature rule on the reference simplex: one row of barycentric
// coordinates per node, weights summing to one (scaled by the cell measure
// when applied).
struct SimplexRule {
  MatX nodes;
  VecX weights;
};

// degree-4 exact rule: 6 nodes on triangles, 14 on tetrahedra
SimplexRule simplex_rule_deg4(int dim);

// vertices as columns of an n x (n+1) block
double simplex_measure(const MatX& verts);
double simplex_diameter(const MatX& verts);

double integrate_cell(const MatX& verts, const SimplexRule& rule,
                      const std::function<double(const VecX&)>& fn);

// one level of edge-midpoint refinement: 4 triangles resp. 8 tetrahedra that
// partition the parent exactly
std::vector<MatX> refine_simplex(const MatX& verts);

// Recursive adaptive integration: a cell is split while needs_refine holds for
// it, its diameter exceeds floor_diam and the depth cap is not reached,
// otherwise the fixed rule is applied.  Passing floor_diam = w/4 resolves a
// feature of width w by at least four cells across.
double integrate_adaptive(const MatX& verts, const SimplexRule& rule,
                          const std::function<double(const VecX&)>& fn,
                          const std::function<bool(const MatX&, double)>& needs_refine,
                          double floor_diam, int max_depth);

}  // namespace pinch
