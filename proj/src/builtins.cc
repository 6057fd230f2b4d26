#include "pinch/builtins.hh"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "pinch/rng.hh"

namespace pinch {

namespace {

SimplicialComplex square_mesh() {
  MatX v(5, 2);
  v << 0, 0, 1, 0, 1, 1, 0, 1, 0.5, 0.5;
  Eigen::MatrixXi c(4, 3);
  c << 0, 1, 4, 1, 2, 4, 2, 3, 4, 3, 0, 4;
  return SimplicialComplex(2, std::move(v), std::move(c));
}

SimplicialComplex cube_mesh() {
  MatX v(8, 3);
  for (int b = 0; b < 8; ++b) v.row(b) << (b & 1), ((b >> 1) & 1), ((b >> 2) & 1);
  const int steps[6][2] = {{1, 2}, {1, 4}, {2, 1}, {2, 4}, {4, 1}, {4, 2}};
  Eigen::MatrixXi c(6, 4);
  for (int i = 0; i < 6; ++i) {
    c(i, 0) = 0;
    c(i, 1) = steps[i][0];
    c(i, 2) = steps[i][0] | steps[i][1];
    c(i, 3) = 7;
  }
  // orient every chain positively
  for (int i = 0; i < 6; ++i) {
    Eigen::Matrix3d span;
    for (int j = 0; j < 3; ++j)
      span.col(j) = Vec3(v.row(c(i, j + 1)) - v.row(c(i, 0))).transpose();
    if (span.determinant() < 0) std::swap(c(i, 2), c(i, 3));
  }
  return SimplicialComplex(3, std::move(v), std::move(c));
}

SimplicialComplex tet_mesh() {
  MatX v(4, 3);
  v << 0, 0, 0, 1, 0, 0, 0.5, std::sqrt(3.0) / 2.0, 0, 0.5, std::sqrt(3.0) / 6.0,
      std::sqrt(2.0 / 3.0);
  Eigen::MatrixXi c(1, 4);
  c << 0, 1, 2, 3;
  return SimplicialComplex(3, std::move(v), std::move(c));
}

SimplicialComplex overlap2d_mesh() {
  MatX v(6, 2);
  v << 0, 0, 1, 0, 0, 1, 0.2, 0.2, 1.2, 0.2, 0.2, 1.2;
  Eigen::MatrixXi c(2, 3);
  c << 0, 1, 2, 3, 4, 5;
  return SimplicialComplex(2, std::move(v), std::move(c));
}

SimplicialComplex overlap3d_mesh() {
  MatX v(8, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0.2, 0.2, 0.2, 1.2, 0.2, 0.2, 0.2, 1.2, 0.2, 0.2, 0.2,
      1.2;
  Eigen::MatrixXi c(2, 4);
  c << 0, 1, 2, 3, 4, 5, 6, 7;
  return SimplicialComplex(3, std::move(v), std::move(c));
}

// x + 2/5 max(x1 - x2, 0) along a fixed direction; affine on any mesh whose
// cells keep to one side of the x1 = x2 cut
PiecewiseAffineMap one_sided_shear(const SimplicialComplex& cpx, int push_axis) {
  const int n = cpx.dim();
  std::vector<MatX> mats;
  std::vector<VecX> offs;
  for (int c = 0; c < cpx.num_cells(); ++c) {
    VecX centroid = VecX::Zero(n);
    for (int j = 0; j <= n; ++j) centroid += cpx.vertex(cpx.cells()(c, j));
    centroid /= n + 1.0;
    MatX m = MatX::Identity(n, n);
    if (centroid[0] > centroid[1]) {
      m(push_axis, 0) += 0.4;
      m(push_axis, 1) -= 0.4;
    }
    mats.push_back(std::move(m));
    offs.push_back(VecX::Zero(n));
  }
  return make_pa_map(cpx, std::move(mats), std::move(offs));
}

}  // namespace

const std::vector<std::string>& builtin_mesh_names() {
  static const std::vector<std::string> names = {"square", "cube", "tet", "overlap2d", "overlap3d"};
  return names;
}

const std::vector<std::string>& builtin_map_names() {
  static const std::vector<std::string> names = {"identity", "shear2d", "twist3d", "random"};
  return names;
}

SimplicialComplex builtin_mesh(const std::string& name) {
  if (name == "square") return square_mesh();
  if (name == "cube") return cube_mesh();
  if (name == "tet") return tet_mesh();
  if (name == "overlap2d") return overlap2d_mesh();
  if (name == "overlap3d") return overlap3d_mesh();
  throw std::invalid_argument("unknown builtin mesh: " + name);
}

PiecewiseAffineMap builtin_map(const std::string& name, const SimplicialComplex& cpx,
                               unsigned long seed) {
  if (name == "identity") return identity_pa_map(cpx);
  if (name == "shear2d") {
    if (cpx.dim() != 2) throw std::invalid_argument("shear2d needs a planar mesh");
    return one_sided_shear(cpx, 0);
  }
  if (name == "twist3d") {
    if (cpx.dim() != 3) throw std::invalid_argument("twist3d needs a spatial mesh");
    return one_sided_shear(cpx, 2);
  }
  if (name == "random") {
    Rng rng(seed);
    double shortest = cpx.diameter();
    for (int e = 0; e < cpx.num_edges(); ++e) shortest = std::min(shortest, cpx.edge_length(e));
    const double amp = 0.1 * shortest;
    MatX images = cpx.vertices();
    for (int i = 0; i < images.rows(); ++i)
      for (int j = 0; j < images.cols(); ++j) images(i, j) += rng.uniform(-amp, amp);
    return pa_from_vertex_images(cpx, images);
  }
  throw std::invalid_argument("unknown builtin map: " + name);
}

}  // namespace pinch
