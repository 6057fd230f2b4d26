#pragma once

#include <string>
#include <vector>

#include "pinch/complex.hh"
#include "pinch/pa_map.hh"

namespace pinch {

// Reference fixtures used by the command line tool and the test suite.
//
// Meshes
//   square     unit square fanned into four triangles around its center
//   cube       unit cube cut into six tetrahedra along vertex-order chains
//   tet        one regular tetrahedron of unit edge
//   overlap2d  two interior-overlapping triangles (fails validation)
//   overlap3d  two interior-overlapping tetrahedra (fails validation)
//
// Maps
//   identity   x per cell
//   shear2d    x + 2/5 max(x1 - x2, 0) e1, affine on the square fan
//   twist3d    x + 2/5 max(x1 - x2, 0) e3, volume preserving on the cube
//   random     vertex-jitter interpolation seeded by the caller

SimplicialComplex builtin_mesh(const std::string& name);
PiecewiseAffineMap builtin_map(const std::string& name, const SimplicialComplex& cpx,
                               unsigned long seed = 1u);

const std::vector<std::string>& builtin_mesh_names();
const std::vector<std::string>& builtin_map_names();

}  // namespace pinch
