#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "pinch/types.hh"

namespace pinch {

struct Violation {
  std::string predicate;
  int a = -1;
  int b = -1;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Orthonormal bases attached to a k-subsimplex: tangent spans the subsimplex,
// normal spans its perpendicular complement.
struct SubsimplexRef {
  int k = 0;
  int index = 0;
  std::vector<int> verts;
  MatX tangent;  // dim x k
  MatX normal;   // dim x (dim - k)
};

// Conforming collection of n-simplices (n = 2 or 3) with shared-subsimplex
// connectivity built eagerly.  Vertices are rows of an N x dim matrix; cells
// hold dim+1 vertex ids each.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;
  SimplicialComplex(int dim, MatX vertices, Eigen::MatrixXi cells);

  int dim() const { return dim_; }
  int num_vertices() const { return static_cast<int>(vertices_.rows()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_cells() const { return static_cast<int>(cells_.rows()); }
  int num_subsimplices(int k) const;

  const MatX& vertices() const { return vertices_; }
  const Eigen::MatrixXi& cells() const { return cells_; }
  VecX vertex(int v) const { return vertices_.row(v).transpose(); }
  Vec2 vertex2(int v) const;
  Vec3 vertex3(int v) const;
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  const std::array<int, 3>& face(int f) const { return faces_[f]; }
  Eigen::VectorXi cell(int c) const { return cells_.row(c).transpose(); }

  double edge_length(int e) const;
  double face_area(int f) const;
  double cell_measure(int c) const;
  double signed_cell_measure(int c) const;
  double diameter() const;

  const std::vector<int>& cells_of_vertex(int v) const { return vertex_cells_[v]; }
  const std::vector<int>& cells_of_edge(int e) const { return edge_cells_[e]; }
  const std::vector<int>& cells_of_face(int f) const { return face_cells_[f]; }
  const std::vector<int>& edges_of_vertex(int v) const { return vertex_edges_[v]; }
  const std::vector<int>& faces_of_edge(int e) const { return edge_faces_[e]; }
  const std::array<int, 3>& edges_of_face(int f) const { return face_edges_[f]; }
  const std::vector<int>& edges_of_cell(int c) const { return cell_edges_[c]; }
  const std::vector<int>& faces_of_cell(int c) const { return cell_faces_[c]; }
  int find_edge(int a, int b) const;
  int find_face(int a, int b, int c) const;

  VecX barycentric(int c, const VecX& x) const;
  bool cell_contains(int c, const VecX& x, double tol) const;
  // lowest id of a cell containing x, -1 when outside the covered domain
  int locate(const VecX& x, double tol = 1e-10) const;

  SubsimplexRef subsimplex(int k, int index) const;

 private:
  int dim_ = 0;
  MatX vertices_;
  Eigen::MatrixXi cells_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> faces_;
  std::map<std::array<int, 2>, int> edge_index_;
  std::map<std::array<int, 3>, int> face_index_;
  std::vector<std::vector<int>> vertex_cells_, edge_cells_, face_cells_;
  std::vector<std::vector<int>> vertex_edges_, edge_faces_;
  std::vector<std::array<int, 3>> face_edges_;
  std::vector<std::vector<int>> cell_edges_, cell_faces_;
};

// Structural and geometric soundness: degenerate cells, duplicate vertices,
// pairwise interior overlaps (separating-axis test), hanging vertices,
// orientation sign.  Violations name the offending entities.
ValidationReport validate_complex(const SimplicialComplex& complex);

struct SubdivisionResult {
  SimplicialComplex complex;
  std::vector<int> parent;  // originating input cell of each output cell
};

// Longest-edge bisection until every triangle angle (2D) or every face angle
// of every cell (3D) is at most pi/2.  Children stay inside their parent so a
// piecewise affine map restricts.  Throws if the per-cell depth cap of 30 is
// exceeded.
SubdivisionResult subdivide_for_angles(const SimplicialComplex& complex);

// distance helpers shared by the constants computations and tests
double dist_point_segment(const Vec3& p, const Vec3& a, const Vec3& b);
double dist_segment_segment(const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1);
double dist_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);
double dist_triangle_triangle(const Eigen::Matrix3d& abc, const Eigen::Matrix3d& def);

}  // namespace pinch
