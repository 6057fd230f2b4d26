#include "pinch/constants.hh"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pinch {

namespace {

constexpr double kAngleClamp = M_PI / 4.0;

double angle_between(const VecX& u, const VecX& v) {
  const double nu = u.norm(), nv = v.norm();
  return std::acos(std::max(-1.0, std::min(1.0, u.dot(v) / (nu * nv))));
}

// sharpest angle between distinct edges leaving v, clamped
double min_edge_angle_at(const SimplicialComplex& cpx, int v) {
  const auto& edges = cpx.edges_of_vertex(v);
  double best = kAngleClamp;
  for (size_t i = 0; i < edges.size(); ++i)
    for (size_t j = i + 1; j < edges.size(); ++j) {
      auto dir = [&](int e) {
        const auto& ev = cpx.edge(e);
        const int other = (ev[0] == v) ? ev[1] : ev[0];
        return VecX(cpx.vertex(other) - cpx.vertex(v));
      };
      best = std::min(best, angle_between(dir(edges[i]), dir(edges[j])));
    }
  return best;
}

// dihedral angle of cell c at edge e: angle between the two in-cell directions
// perpendicular to the edge
double dihedral_in_cell(const SimplicialComplex& cpx, int c, int e) {
  const auto& ev = cpx.edge(e);
  const Vec3 a = cpx.vertex3(ev[0]), b = cpx.vertex3(ev[1]);
  const Vec3 axis = (b - a).normalized();
  std::vector<Vec3> wings;
  for (int j = 0; j <= 3; ++j) {
    const int w = cpx.cells()(c, j);
    if (w == ev[0] || w == ev[1]) continue;
    Vec3 d = cpx.vertex3(w) - a;
    d -= d.dot(axis) * axis;
    wings.push_back(d);
  }
  return angle_between(wings[0], wings[1]);
}

}  // namespace

Constants2 compute_constants2(const SimplicialComplex& cpx) {
  if (cpx.dim() != 2) throw std::invalid_argument("compute_constants2: 2D complex required");
  const int nv = cpx.num_vertices(), ne = cpx.num_edges();
  const double diam = cpx.diameter();
  Constants2 k;
  k.alpha1.resize(nv);
  k.alpha2.resize(nv);
  k.eta.resize(nv);
  k.alpha.resize(ne);
  k.m.resize(ne);
  k.len.resize(ne);
  k.t.resize(ne);

  for (int v = 0; v < nv; ++v) k.alpha1[v] = min_edge_angle_at(cpx, v);
  for (int v = 0; v < nv; ++v) {
    double a2 = k.alpha1[v];
    for (int e : cpx.edges_of_vertex(v)) {
      const auto& ev = cpx.edge(e);
      a2 = std::min(a2, k.alpha1[(ev[0] == v) ? ev[1] : ev[0]]);
    }
    k.alpha2[v] = a2;
  }

  // per-edge length factor: unit scale, the length itself, and incident area
  // per unit length
  std::vector<double> m1(ne);
  for (int e = 0; e < ne; ++e) {
    k.len[e] = cpx.edge_length(e);
    double m = std::min(1.0, k.len[e]);
    for (int c : cpx.cells_of_edge(e)) m = std::min(m, cpx.cell_measure(c) / k.len[e]);
    m1[e] = m;
  }
  std::vector<double> m2(nv, std::numeric_limits<double>::infinity());
  for (int v = 0; v < nv; ++v) {
    for (int e : cpx.edges_of_vertex(v)) m2[v] = std::min(m2[v], m1[e]);
    if (!std::isfinite(m2[v])) m2[v] = 1.0;  // isolated vertex
  }
  for (int e = 0; e < ne; ++e) {
    const auto& ev = cpx.edge(e);
    k.alpha[e] = std::min(k.alpha2[ev[0]], k.alpha2[ev[1]]);
    k.m[e] = std::min(m2[ev[0]], m2[ev[1]]);
    k.t[e] = std::tan(k.alpha[e] / 3.0);
  }

  for (int v = 0; v < nv; ++v) {
    double e1 = diam > 0 ? diam : 1.0;
    for (int c : cpx.cells_of_vertex(v)) e1 = std::min(e1, std::sqrt(cpx.cell_measure(c)));
    double e2 = std::numeric_limits<double>::infinity();
    for (int w = 0; w < nv; ++w)
      if (w != v) e2 = std::min(e2, (cpx.vertex(w) - cpx.vertex(v)).norm());
    if (!std::isfinite(e2)) e2 = diam > 0 ? diam : 1.0;
    k.eta[v] = std::min(e1, 0.5 * e2);
  }

  // admissibility: below the cap the edge pinch plateau is reached before the
  // midpoint seam (2d < l/2), the two corner pinch balls of an edge stay
  // separated (6d < l), and every corner pinch sector and vertex pinch ball
  // stays inside the star of its vertex (radii 3d and eta*delta both below
  // the clearance to foreign edges)
  k.delta_cap = 1.0;
  for (int e = 0; e < ne; ++e) k.delta_cap = std::min(k.delta_cap, k.len[e] / (3.0 * k.m[e]));
  for (int v = 0; v < nv; ++v) {
    const Vec3 p(cpx.vertex2(v).x(), cpx.vertex2(v).y(), 0.0);
    double clear = std::numeric_limits<double>::infinity();
    for (int e = 0; e < ne; ++e) {
      const auto& ev = cpx.edge(e);
      if (ev[0] == v || ev[1] == v) continue;
      const Vec3 a(cpx.vertex2(ev[0]).x(), cpx.vertex2(ev[0]).y(), 0.0);
      const Vec3 b(cpx.vertex2(ev[1]).x(), cpx.vertex2(ev[1]).y(), 0.0);
      clear = std::min(clear, dist_point_segment(p, a, b));
    }
    if (!std::isfinite(clear)) continue;
    double mmax = 0.0;
    for (int e : cpx.edges_of_vertex(v)) mmax = std::max(mmax, k.m[e]);
    if (mmax > 0.0) k.delta_cap = std::min(k.delta_cap, clear / (1.5 * mmax));
    if (k.eta[v] > 0.0) k.delta_cap = std::min(k.delta_cap, clear / k.eta[v]);
  }
  return k;
}

Constants3 compute_constants3(const SimplicialComplex& cpx) {
  if (cpx.dim() != 3) throw std::invalid_argument("compute_constants3: 3D complex required");
  const int nv = cpx.num_vertices(), ne = cpx.num_edges(), nf = cpx.num_faces();
  const double diam = cpx.diameter() > 0 ? cpx.diameter() : 1.0;
  Constants3 k;
  k.d_vertex.resize(nv);
  k.theta_vertex.resize(nv);
  k.d_edge.resize(ne);
  k.omega_edge.resize(ne);
  k.theta_edge.resize(ne);
  k.len.resize(ne);
  k.d_face.resize(nf);
  k.omega_face.resize(nf);
  k.theta_face_corner.resize(3 * nf);

  for (int v = 0; v < nv; ++v) {
    double d = std::numeric_limits<double>::infinity();
    for (int w = 0; w < nv; ++w)
      if (w != v) d = std::min(d, (cpx.vertex(w) - cpx.vertex(v)).norm());
    k.d_vertex[v] = std::isfinite(d) ? d : diam;
    k.theta_vertex[v] = min_edge_angle_at(cpx, v);
  }

  for (int e = 0; e < ne; ++e) {
    const auto& ev = cpx.edge(e);
    k.len[e] = cpx.edge_length(e);
    k.theta_edge[e] = std::min(k.theta_vertex[ev[0]], k.theta_vertex[ev[1]]);
    double om = kAngleClamp;
    for (int c : cpx.cells_of_edge(e)) om = std::min(om, dihedral_in_cell(cpx, c, e));
    k.omega_edge[e] = om;

    double d = std::min(k.d_vertex[ev[0]], k.d_vertex[ev[1]]);
    const Vec3 a = cpx.vertex3(ev[0]), b = cpx.vertex3(ev[1]);
    for (int e2 = 0; e2 < ne; ++e2) {
      const auto& fv = cpx.edge(e2);
      if (fv[0] == ev[0] || fv[0] == ev[1] || fv[1] == ev[0] || fv[1] == ev[1]) continue;
      d = std::min(d, dist_segment_segment(a, b, cpx.vertex3(fv[0]), cpx.vertex3(fv[1])));
    }
    k.d_edge[e] = d;
  }

  for (int f = 0; f < nf; ++f) {
    const auto& fv = cpx.face(f);
    const Vec3 p0 = cpx.vertex3(fv[0]), p1 = cpx.vertex3(fv[1]), p2 = cpx.vertex3(fv[2]);
    k.theta_face_corner[3 * f + 0] = angle_between(p1 - p0, p2 - p0);
    k.theta_face_corner[3 * f + 1] = angle_between(p0 - p1, p2 - p1);
    k.theta_face_corner[3 * f + 2] = angle_between(p0 - p2, p1 - p2);

    double om = kAngleClamp;
    for (int e : cpx.edges_of_face(f)) om = std::min(om, k.omega_edge[e]);
    for (int j = 0; j < 3; ++j) om = std::min(om, k.theta_vertex[fv[j]]);
    k.omega_face[f] = om;

    double d = diam;
    for (int e : cpx.edges_of_face(f)) d = std::min(d, k.d_edge[e]);
    Eigen::Matrix3d tri;
    tri.col(0) = p0;
    tri.col(1) = p1;
    tri.col(2) = p2;
    for (int f2 = 0; f2 < nf; ++f2) {
      const auto& gv = cpx.face(f2);
      bool shares = false;
      for (int i : fv)
        for (int j : gv) shares |= (i == j);
      if (shares) continue;
      Eigen::Matrix3d other;
      other.col(0) = cpx.vertex3(gv[0]);
      other.col(1) = cpx.vertex3(gv[1]);
      other.col(2) = cpx.vertex3(gv[2]);
      d = std::min(d, dist_triangle_triangle(tri, other));
    }
    k.d_face[f] = d;
  }

  // sup of widths keeping every stage's clearance requirement strict:
  // face slabs need delta < d_face, edge tubes delta < d_edge / 4, corner
  // cones and balls delta < d_vertex / 4
  double cap = std::numeric_limits<double>::infinity();
  for (int f = 0; f < nf; ++f) cap = std::min(cap, k.d_face[f]);
  for (int e = 0; e < ne; ++e) cap = std::min(cap, k.d_edge[e] / 4.0);
  for (int v = 0; v < nv; ++v) cap = std::min(cap, k.d_vertex[v] / 4.0);
  k.delta_cap = std::isfinite(cap) ? cap : 1.0;
  return k;
}

}  // namespace pinch
