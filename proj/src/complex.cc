#include "pinch/complex.hh"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pinch {

namespace {

std::array<int, 2> sorted2(int a, int b) {
  if (a > b) std::swap(a, b);
  return {a, b};
}

std::array<int, 3> sorted3(int a, int b, int c) {
  std::array<int, 3> s{a, b, c};
  std::sort(s.begin(), s.end());
  return s;
}

double clamp_unit(double x) { return std::max(-1.0, std::min(1.0, x)); }

// interior angle at vertex p0 of the triangle (p0, p1, p2)
double corner_angle(const VecX& p0, const VecX& p1, const VecX& p2) {
  VecX u = p1 - p0, v = p2 - p0;
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::acos(clamp_unit(u.dot(v) / (nu * nv)));
}

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  if (violations.empty()) {
    os << "valid\n";
    return os.str();
  }
  for (const auto& v : violations) {
    os << v.predicate << " (" << v.a;
    if (v.b >= 0) os << ", " << v.b;
    os << ")";
    if (!v.detail.empty()) os << ": " << v.detail;
    os << "\n";
  }
  return os.str();
}

SimplicialComplex::SimplicialComplex(int dim, MatX vertices, Eigen::MatrixXi cells)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("SimplicialComplex: dim must be 2 or 3");
  if (vertices_.cols() != dim_)
    throw std::invalid_argument("SimplicialComplex: vertex dimension mismatch");
  if (cells_.cols() != dim_ + 1)
    throw std::invalid_argument("SimplicialComplex: cells need dim+1 vertices");
  const int nv = num_vertices();
  for (int c = 0; c < cells_.rows(); ++c)
    for (int j = 0; j < cells_.cols(); ++j)
      if (cells_(c, j) < 0 || cells_(c, j) >= nv)
        throw std::invalid_argument("SimplicialComplex: vertex id out of range");

  vertex_cells_.assign(nv, {});
  vertex_edges_.assign(nv, {});
  cell_edges_.assign(num_cells(), {});
  cell_faces_.assign(num_cells(), {});

  for (int c = 0; c < num_cells(); ++c) {
    const auto row = cells_.row(c);
    for (int j = 0; j <= dim_; ++j) vertex_cells_[row[j]].push_back(c);
    for (int i = 0; i <= dim_; ++i)
      for (int j = i + 1; j <= dim_; ++j) {
        auto key = sorted2(row[i], row[j]);
        auto it = edge_index_.find(key);
        int e;
        if (it == edge_index_.end()) {
          e = static_cast<int>(edges_.size());
          edge_index_[key] = e;
          edges_.push_back(key);
          edge_cells_.push_back({});
          vertex_edges_[key[0]].push_back(e);
          vertex_edges_[key[1]].push_back(e);
        } else {
          e = it->second;
        }
        edge_cells_[e].push_back(c);
        cell_edges_[c].push_back(e);
      }
    if (dim_ == 3) {
      for (int skip = 0; skip <= 3; ++skip) {
        std::array<int, 3> tri;
        int k = 0;
        for (int j = 0; j <= 3; ++j)
          if (j != skip) tri[k++] = row[j];
        auto key = sorted3(tri[0], tri[1], tri[2]);
        auto it = face_index_.find(key);
        int f;
        if (it == face_index_.end()) {
          f = static_cast<int>(faces_.size());
          face_index_[key] = f;
          faces_.push_back(key);
          face_cells_.push_back({});
          face_edges_.push_back({find_edge(key[0], key[1]), find_edge(key[0], key[2]),
                                 find_edge(key[1], key[2])});
        } else {
          f = it->second;
        }
        face_cells_[f].push_back(c);
        cell_faces_[c].push_back(f);
      }
    }
  }
  if (dim_ == 3) {
    edge_faces_.assign(num_edges(), {});
    for (int f = 0; f < num_faces(); ++f)
      for (int e : face_edges_[f]) edge_faces_[e].push_back(f);
  }
}

int SimplicialComplex::num_subsimplices(int k) const {
  if (k == 0) return num_vertices();
  if (k == 1) return num_edges();
  if (k == dim_) return num_cells();
  if (k == 2 && dim_ == 3) return num_faces();
  throw std::invalid_argument("num_subsimplices: bad k");
}

Vec2 SimplicialComplex::vertex2(int v) const {
  if (dim_ != 2) throw std::logic_error("vertex2 on a 3D complex");
  return vertices_.row(v).transpose();
}

Vec3 SimplicialComplex::vertex3(int v) const {
  if (dim_ != 3) throw std::logic_error("vertex3 on a 2D complex");
  return vertices_.row(v).transpose();
}

double SimplicialComplex::edge_length(int e) const {
  return (vertices_.row(edges_[e][0]) - vertices_.row(edges_[e][1])).norm();
}

double SimplicialComplex::face_area(int f) const {
  const Vec3 a = vertices_.row(faces_[f][0]), b = vertices_.row(faces_[f][1]),
             c = vertices_.row(faces_[f][2]);
  return 0.5 * (b - a).cross(c - a).norm();
}

double SimplicialComplex::signed_cell_measure(int c) const {
  MatX edge_mat(dim_, dim_);
  const VecX v0 = vertex(cells_(c, 0));
  for (int j = 1; j <= dim_; ++j) edge_mat.col(j - 1) = vertex(cells_(c, j)) - v0;
  double fact = (dim_ == 2) ? 2.0 : 6.0;
  return edge_mat.determinant() / fact;
}

double SimplicialComplex::cell_measure(int c) const { return std::abs(signed_cell_measure(c)); }

double SimplicialComplex::diameter() const {
  if (vertices_.rows() == 0) return 0.0;
  VecX lo = vertices_.colwise().minCoeff(), hi = vertices_.colwise().maxCoeff();
  return (hi - lo).norm();
}

int SimplicialComplex::find_edge(int a, int b) const {
  auto it = edge_index_.find(sorted2(a, b));
  return it == edge_index_.end() ? -1 : it->second;
}

int SimplicialComplex::find_face(int a, int b, int c) const {
  auto it = face_index_.find(sorted3(a, b, c));
  return it == face_index_.end() ? -1 : it->second;
}

VecX SimplicialComplex::barycentric(int c, const VecX& x) const {
  MatX edge_mat(dim_, dim_);
  const VecX v0 = vertex(cells_(c, 0));
  for (int j = 1; j <= dim_; ++j) edge_mat.col(j - 1) = vertex(cells_(c, j)) - v0;
  VecX w = edge_mat.partialPivLu().solve(x - v0);
  VecX b(dim_ + 1);
  b[0] = 1.0 - w.sum();
  b.tail(dim_) = w;
  return b;
}

bool SimplicialComplex::cell_contains(int c, const VecX& x, double tol) const {
  VecX b = barycentric(c, x);
  return b.minCoeff() >= -tol;
}

int SimplicialComplex::locate(const VecX& x, double tol) const {
  for (int c = 0; c < num_cells(); ++c)
    if (cell_contains(c, x, tol)) return c;
  return -1;
}

SubsimplexRef SimplicialComplex::subsimplex(int k, int index) const {
  SubsimplexRef ref;
  ref.k = k;
  ref.index = index;
  if (k == 0) {
    ref.verts = {index};
  } else if (k == 1) {
    ref.verts = {edges_[index][0], edges_[index][1]};
  } else if (k == 2 && dim_ == 3) {
    ref.verts = {faces_[index][0], faces_[index][1], faces_[index][2]};
  } else if (k == dim_) {
    ref.verts.resize(dim_ + 1);
    for (int j = 0; j <= dim_; ++j) ref.verts[j] = cells_(index, j);
  } else {
    throw std::invalid_argument("subsimplex: bad k");
  }
  if (k == 0) {
    ref.tangent = MatX::Zero(dim_, 0);
    ref.normal = MatX::Identity(dim_, dim_);
    return ref;
  }
  MatX span(dim_, k);
  const VecX v0 = vertex(ref.verts[0]);
  for (int j = 1; j <= k; ++j) span.col(j - 1) = vertex(ref.verts[j]) - v0;
  Eigen::HouseholderQR<MatX> qr(span);
  MatX q = qr.householderQ() * MatX::Identity(dim_, dim_);
  ref.tangent = q.leftCols(k);
  ref.normal = q.rightCols(dim_ - k);
  return ref;
}

namespace {

// project the vertices of a simplex onto an axis
std::pair<double, double> project(const MatX& pts, const VecX& axis) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < pts.rows(); ++i) {
    const double v = pts.row(i).dot(axis.transpose());
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

// true when two simplices overlap with positive measure (separating-axis test;
// touching along a shared subsimplex is not an overlap)
bool interiors_overlap(const SimplicialComplex& cpx, int ca, int cb, double tol) {
  const int dim = cpx.dim();
  MatX pa(dim + 1, dim), pb(dim + 1, dim);
  for (int j = 0; j <= dim; ++j) {
    pa.row(j) = cpx.vertex(cpx.cells()(ca, j)).transpose();
    pb.row(j) = cpx.vertex(cpx.cells()(cb, j)).transpose();
  }
  std::vector<VecX> axes;
  if (dim == 2) {
    for (const MatX* p : {&pa, &pb})
      for (int i = 0; i < 3; ++i) {
        VecX e = ((*p).row((i + 1) % 3) - (*p).row(i)).transpose();
        VecX n(2);
        n << -e[1], e[0];
        if (n.norm() > 0) axes.push_back(n.normalized());
      }
  } else {
    auto face_normal = [](const MatX& p, int skip) {
      std::array<int, 3> id;
      int k = 0;
      for (int j = 0; j < 4; ++j)
        if (j != skip) id[k++] = j;
      Vec3 a = p.row(id[0]), b = p.row(id[1]), c = p.row(id[2]);
      return Vec3((b - a).cross(c - a));
    };
    for (const MatX* p : {&pa, &pb})
      for (int s = 0; s < 4; ++s) {
        Vec3 n = face_normal(*p, s);
        if (n.norm() > 0) axes.push_back(n.normalized());
      }
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = k + 1; l < 4; ++l) {
            Vec3 ea = pa.row(j) - pa.row(i), eb = pb.row(l) - pb.row(k);
            Vec3 n = ea.cross(eb);
            if (n.norm() > 1e-14) axes.push_back(n.normalized());
          }
  }
  for (const VecX& axis : axes) {
    auto [la, ha] = project(pa, axis);
    auto [lb, hb] = project(pb, axis);
    const double overlap = std::min(ha, hb) - std::max(la, lb);
    if (overlap <= tol) return false;
  }
  return true;
}

}  // namespace

ValidationReport validate_complex(const SimplicialComplex& cpx) {
  ValidationReport report;
  const double diam = cpx.diameter();
  const double tol = 1e-9 * std::max(diam, 1e-300);
  const int dim = cpx.dim();

  for (int v = 0; v < cpx.num_vertices(); ++v)
    for (int w = v + 1; w < cpx.num_vertices(); ++w)
      if ((cpx.vertex(v) - cpx.vertex(w)).norm() <= tol)
        report.violations.push_back({"duplicate-vertex", v, w, ""});

  double meas_floor = 1e-12 * std::pow(std::max(diam, 1e-300), dim);
  for (int c = 0; c < cpx.num_cells(); ++c) {
    const double sm = cpx.signed_cell_measure(c);
    if (std::abs(sm) <= meas_floor) {
      report.violations.push_back({"degenerate-cell", c, -1, ""});
    } else if (sm < 0.0) {
      report.violations.push_back({"negative-orientation", c, -1, ""});
    }
  }
  if (!report.ok()) return report;  // geometric predicates below assume sane cells

  for (int a = 0; a < cpx.num_cells(); ++a)
    for (int b = a + 1; b < cpx.num_cells(); ++b)
      if (interiors_overlap(cpx, a, b, tol))
        report.violations.push_back({"interior-overlap", a, b, "positive-measure intersection"});

  // hanging vertices: a vertex lying on a cell it is not a vertex of
  for (int v = 0; v < cpx.num_vertices(); ++v) {
    const VecX p = cpx.vertex(v);
    for (int c = 0; c < cpx.num_cells(); ++c) {
      bool own = false;
      for (int j = 0; j <= dim; ++j) own |= (cpx.cells()(c, j) == v);
      if (own) continue;
      if (cpx.cell_contains(c, p, 1e-9)) {
        report.violations.push_back({"hanging-vertex", v, c, "vertex lies on a foreign cell"});
      }
    }
  }
  return report;
}

namespace {

struct WorkMesh {
  int dim;
  std::vector<VecX> verts;
  std::vector<std::vector<int>> cells;
  std::vector<int> parent;
  std::vector<int> depth;
  std::map<std::array<int, 2>, int> midpoint;

  double max_face_angle(int c, int* edge_a, int* edge_b) const {
    // worst triangle corner over the cell (2D) or over its four faces (3D),
    // returning the longest edge of the offending triangle
    double worst = -1.0;
    auto consider = [&](int i, int j, int k) {
      const VecX &p = verts[i], &q = verts[j], &r = verts[k];
      struct {
        double ang;
        int a, b;
      } corners[3] = {{corner_angle(p, q, r), j, k},
                      {corner_angle(q, r, p), k, i},
                      {corner_angle(r, p, q), i, j}};
      for (auto& cr : corners)
        if (cr.ang > worst) {
          worst = cr.ang;
          *edge_a = cr.a;  // edge opposite the worst corner, also the longest
          *edge_b = cr.b;
        }
    };
    const auto& cv = cells[c];
    if (dim == 2) {
      consider(cv[0], cv[1], cv[2]);
    } else {
      consider(cv[0], cv[1], cv[2]);
      consider(cv[0], cv[1], cv[3]);
      consider(cv[0], cv[2], cv[3]);
      consider(cv[1], cv[2], cv[3]);
    }
    return worst;
  }

  int midpoint_of(int a, int b) {
    auto key = sorted2(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int m = static_cast<int>(verts.size());
    verts.push_back(0.5 * (verts[a] + verts[b]));
    midpoint[key] = m;
    return m;
  }

  void bisect_edge(int a, int b) {
    const int m = midpoint_of(a, b);
    std::vector<std::vector<int>> fresh;
    std::vector<int> fresh_parent, fresh_depth;
    for (size_t c = 0; c < cells.size(); ++c) {
      const auto& cv = cells[c];
      const bool has_a = std::count(cv.begin(), cv.end(), a) > 0;
      const bool has_b = std::count(cv.begin(), cv.end(), b) > 0;
      if (!(has_a && has_b)) {
        fresh.push_back(cv);
        fresh_parent.push_back(parent[c]);
        fresh_depth.push_back(depth[c]);
        continue;
      }
      if (depth[c] + 1 > 30)
        throw std::runtime_error("subdivide_for_angles: bisection depth cap (30) exceeded");
      for (int drop : {b, a}) {
        std::vector<int> child = cv;
        std::replace(child.begin(), child.end(), drop, m);
        fresh.push_back(child);
        fresh_parent.push_back(parent[c]);
        fresh_depth.push_back(depth[c] + 1);
      }
    }
    cells = std::move(fresh);
    parent = std::move(fresh_parent);
    depth = std::move(fresh_depth);
  }
};

}  // namespace

SubdivisionResult subdivide_for_angles(const SimplicialComplex& cpx) {
  WorkMesh wm;
  wm.dim = cpx.dim();
  for (int v = 0; v < cpx.num_vertices(); ++v) wm.verts.push_back(cpx.vertex(v));
  for (int c = 0; c < cpx.num_cells(); ++c) {
    std::vector<int> cv(cpx.dim() + 1);
    for (int j = 0; j <= cpx.dim(); ++j) cv[j] = cpx.cells()(c, j);
    wm.cells.push_back(cv);
    wm.parent.push_back(c);
    wm.depth.push_back(0);
  }
  const double limit = M_PI_2 + 1e-12;
  for (long iter = 0;; ++iter) {
    if (iter > 1000000) throw std::runtime_error("subdivide_for_angles: did not terminate");
    double worst = -1.0;
    int wc = -1, wa = -1, wb = -1;
    for (size_t c = 0; c < wm.cells.size(); ++c) {
      int a = -1, b = -1;
      const double ang = wm.max_face_angle(static_cast<int>(c), &a, &b);
      if (ang > worst) {
        worst = ang;
        wc = static_cast<int>(c);
        wa = a;
        wb = b;
      }
    }
    if (worst <= limit || wc < 0) break;
    wm.bisect_edge(wa, wb);
  }
  MatX verts(wm.verts.size(), wm.dim);
  for (size_t v = 0; v < wm.verts.size(); ++v) verts.row(v) = wm.verts[v].transpose();
  Eigen::MatrixXi cells(wm.cells.size(), wm.dim + 1);
  for (size_t c = 0; c < wm.cells.size(); ++c)
    for (int j = 0; j <= wm.dim; ++j) cells(static_cast<int>(c), j) = wm.cells[c][j];
  return {SimplicialComplex(wm.dim, std::move(verts), std::move(cells)), wm.parent};
}

double dist_point_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::max(0.0, std::min(1.0, (p - a).dot(ab) / len2));
  return (p - (a + t * ab)).norm();
}

double dist_segment_segment(const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1) {
  // closest points of two segments (standard quadratic minimization with
  // clamping to the unit square of parameters)
  const Vec3 u = a1 - a0, v = b1 - b0, w = a0 - b0;
  const double A = u.dot(u), B = u.dot(v), C = v.dot(v), D = u.dot(w), E = v.dot(w);
  const double den = A * C - B * B;
  double s, t;
  if (den > 1e-14 * std::max(A * C, 1e-300)) {
    s = (B * E - C * D) / den;
    t = (A * E - B * D) / den;
  } else {
    s = 0.0;
    t = (C > 0) ? E / C : 0.0;
  }
  s = std::max(0.0, std::min(1.0, s));
  // re-optimize t for clamped s, then s for clamped t
  t = (C > 0) ? (E + s * B) / C : 0.0;
  t = std::max(0.0, std::min(1.0, t));
  s = (A > 0) ? (t * B - D) / A : 0.0;
  s = std::max(0.0, std::min(1.0, s));
  return (a0 + s * u - (b0 + t * v)).norm();
}

double dist_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const double n2 = n.squaredNorm();
  if (n2 > 0.0) {
    const Vec3 q = p - n.dot(p - a) / n2 * n;
    // barycentric test of the in-plane projection
    const Vec3 v0 = b - a, v1 = c - a, v2 = q - a;
    const double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
    const double d20 = v2.dot(v0), d21 = v2.dot(v1);
    const double den = d00 * d11 - d01 * d01;
    if (den > 0.0) {
      const double w1 = (d11 * d20 - d01 * d21) / den;
      const double w2 = (d00 * d21 - d01 * d20) / den;
      if (w1 >= 0.0 && w2 >= 0.0 && w1 + w2 <= 1.0) return (p - q).norm();
    }
  }
  return std::min({dist_point_segment(p, a, b), dist_point_segment(p, b, c),
                   dist_point_segment(p, c, a)});
}

namespace {

bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                           const Vec3& c) {
  const Vec3 dir = q - p, e1 = b - a, e2 = c - a;
  const Vec3 h = dir.cross(e2);
  const double det = e1.dot(h);
  if (std::abs(det) < 1e-14) return false;
  const Vec3 s = p - a;
  const double u = s.dot(h) / det;
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 qv = s.cross(e1);
  const double v = dir.dot(qv) / det;
  if (v < 0.0 || u + v > 1.0) return false;
  const double t = e2.dot(qv) / det;
  return t >= 0.0 && t <= 1.0;
}

}  // namespace

double dist_triangle_triangle(const Eigen::Matrix3d& abc, const Eigen::Matrix3d& def) {
  const Vec3 a = abc.col(0), b = abc.col(1), c = abc.col(2);
  const Vec3 d = def.col(0), e = def.col(1), f = def.col(2);
  const Vec3 ta[3][2] = {{a, b}, {b, c}, {c, a}};
  const Vec3 tb[3][2] = {{d, e}, {e, f}, {f, d}};
  for (auto& s : ta)
    if (segment_hits_triangle(s[0], s[1], d, e, f)) return 0.0;
  for (auto& s : tb)
    if (segment_hits_triangle(s[0], s[1], a, b, c)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (auto& sa : ta)
    for (auto& sb : tb)
      best = std::min(best, dist_segment_segment(sa[0], sa[1], sb[0], sb[1]));
  for (const Vec3& p : {a, b, c}) best = std::min(best, dist_point_triangle(p, d, e, f));
  for (const Vec3& p : {d, e, f}) best = std::min(best, dist_point_triangle(p, a, b, c));
  return best;
}

}  // namespace pinch
