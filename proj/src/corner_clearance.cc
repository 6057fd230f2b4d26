#include "pinch/corner_clearance.hh"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pinch/frame.hh"

namespace pinch {

namespace {

struct HalfSpace {
  Vec3 n;     // unit outward normal
  double c;   // n . x <= c inside
};

std::array<HalfSpace, 4> cell_half_spaces(const SimplicialComplex& cpx, int cell) {
  std::array<HalfSpace, 4> hs;
  for (int skip = 0; skip <= 3; ++skip) {
    std::array<Vec3, 3> tri;
    int k = 0;
    Vec3 opp;
    for (int j = 0; j <= 3; ++j) {
      const Vec3 p = cpx.vertex3(cpx.cells()(cell, j));
      if (j == skip)
        opp = p;
      else
        tri[k++] = p;
    }
    Vec3 n = (tri[1] - tri[0]).cross(tri[2] - tri[0]).normalized();
    if (n.dot(opp - tri[0]) > 0) n = -n;
    hs[skip] = {n, n.dot(tri[0])};
  }
  return hs;
}

// first chi in (0, pi] where base + B cos(chi) + C sin(chi) exceeds c, or pi
// when the constraint holds on all of (0, pi]
double sinusoid_first_exit(double base, double B, double C, double c, double tol) {
  const double R = std::hypot(B, C);
  const double D = c - base;
  if (R <= tol) return (D >= -tol) ? M_PI : 0.0;
  if (base + B > c + tol) return 0.0;  // violated already at chi = 0
  const double ratio = D / R;
  if (ratio >= 1.0) return M_PI;
  if (ratio <= -1.0) return 0.0;
  const double phi0 = std::atan2(C, B);
  const double beta = std::acos(ratio);
  // violation arc is (phi0 - beta, phi0 + beta) mod 2 pi; chi = 0 is outside
  double enter = phi0 - beta;
  while (enter <= 0.0) enter += 2.0 * M_PI;
  // guard against chi = 0 sitting just inside the arc within rounding
  const double probe = std::min(enter, M_PI) * 0.5;
  if (base + B * std::cos(probe) + C * std::sin(probe) > c + tol) return 0.0;
  return std::min(enter, M_PI);
}

int slot_of(const SimplicialComplex& cpx, int face, int vertex) {
  const auto& fv = cpx.face(face);
  for (int j = 0; j < 3; ++j)
    if (fv[j] == vertex) return j;
  throw std::logic_error("slot_of: vertex not on face");
}

}  // namespace

std::vector<CornerCone> corner_cones_at(const SimplicialComplex& cpx, const Constants3& k,
                                        int vertex) {
  std::vector<CornerCone> cones;
  for (int f = 0; f < cpx.num_faces(); ++f) {
    const auto& fv = cpx.face(f);
    if (fv[0] != vertex && fv[1] != vertex && fv[2] != vertex) continue;
    for (int e : cpx.edges_of_face(f)) {
      const auto& ev = cpx.edge(e);
      if (ev[0] != vertex && ev[1] != vertex) continue;
      CornerCone cone;
      cone.face = f;
      cone.edge = e;
      cone.vertex = vertex;
      cone.apex = cpx.vertex3(vertex);
      const int far = (ev[0] == vertex) ? ev[1] : ev[0];
      int third = -1;
      for (int j = 0; j < 3; ++j)
        if (fv[j] != vertex && fv[j] != far) third = fv[j];
      const Frame3 fr = corner_frame(cone.apex, cpx.vertex3(far), cpx.vertex3(third));
      cone.u1 = fr.rot.row(0).transpose();
      cone.u2 = fr.rot.row(1).transpose();
      cone.u3 = fr.rot.row(2).transpose();
      const double theta = k.corner_angle(f, slot_of(cpx, f, vertex));
      cone.t = 0.5 * std::tan(5.0 * theta / 8.0);
      for (int c : cpx.cells_of_face(f)) {
        Vec3 centroid = Vec3::Zero();
        for (int j = 0; j <= 3; ++j) centroid += cpx.vertex3(cpx.cells()(c, j));
        centroid /= 4.0;
        cone.side_cell[(cone.u3.dot(centroid - cone.apex) > 0) ? 0 : 1] = c;
      }
      cones.push_back(cone);
    }
  }
  return cones;
}

double cone_rotation_clearance(const SimplicialComplex& cpx, const CornerCone& cone, int cell,
                               int sign, double delta) {
  const auto hs = cell_half_spaces(cpx, cell);
  const Vec3 w3 = sign >= 0 ? Vec3(cone.u3) : Vec3(-cone.u3);
  const double tol = 1e-12 * (1.0 + cone.apex.norm() + delta);
  double clearance = M_PI;
  // footprint corners (y, r) = (delta, 0) and (delta, 3 t delta); the corner
  // at the apex is constraint-free
  const double corners[2][2] = {{delta, 0.0}, {delta, 3.0 * cone.t * delta}};
  for (const auto& h : hs) {
    for (const auto& yr : corners) {
      const double base = h.n.dot(cone.apex) + yr[0] * h.n.dot(cone.u1);
      const double B = yr[1] * h.n.dot(cone.u2);
      const double C = yr[1] * h.n.dot(w3);
      clearance = std::min(clearance, sinusoid_first_exit(base, B, C, h.c, tol));
    }
  }
  return clearance;
}

namespace {

struct LocalCoords {
  double y, r, phi;
};

LocalCoords to_cone_coords(const CornerCone& cone, const Vec3& p) {
  const Vec3 d = p - cone.apex;
  const double a = d.dot(cone.u2), b = d.dot(cone.u3);
  return {d.dot(cone.u1), std::hypot(a, b), std::atan2(b, a)};
}

bool side_available(const CornerCone& cone, double phi) {
  if (std::abs(phi) < 1e-12) return cone.side_cell[0] >= 0 || cone.side_cell[1] >= 0;
  return cone.side_cell[(phi > 0) ? 0 : 1] >= 0;
}

}  // namespace

ConeCertificate certify_corner_cones(const SimplicialComplex& cpx, const Constants3& k, int vertex,
                                     double delta, double alpha, int resolution) {
  ConeCertificate cert;
  const auto cones = corner_cones_at(cpx, k, vertex);
  const int res = std::max(2, resolution);

  auto sample = [&](const CornerCone& cone, int sgn, int iy, int ir, int ip) {
    const double y = delta * double(iy + 1) / res;
    const double r = 3.0 * cone.t * y * double(ir + 1) / res;
    const double phi = sgn * alpha * double(ip) / res;
    return Vec3(cone.apex + y * cone.u1 +
                r * (std::cos(phi) * cone.u2 + std::sin(phi) * cone.u3));
  };

  // (a) containment in the cells incident to the cone's face
  for (const auto& cone : cones) {
    for (int s = 0; s < 2; ++s) {
      if (cone.side_cell[s] < 0) continue;
      const int sgn = (s == 0) ? 1 : -1;
      for (int iy = 0; iy < res; ++iy)
        for (int ir = 0; ir < res; ++ir)
          for (int ip = 0; ip <= res; ++ip) {
            const Vec3 p = sample(cone, sgn, iy, ir, ip);
            bool inside = false;
            for (int c : {cone.side_cell[0], cone.side_cell[1]})
              if (c >= 0 && cpx.cell_contains(c, p, 1e-9)) inside = true;
            if (!inside) {
              std::ostringstream os;
              os << "cone escape: vertex " << vertex << " face " << cone.face << " edge "
                 << cone.edge << " side " << sgn << " sample (" << iy << "," << ir << "," << ip
                 << ")";
              return {false, os.str()};
            }
          }
    }
  }

  // (b) cones of distinct faces overlap only within the faces' shared
  // subsimplex
  for (size_t i = 0; i < cones.size(); ++i)
    for (size_t j = 0; j < cones.size(); ++j) {
      if (i == j || cones[i].face == cones[j].face) continue;
      const auto& ca = cones[i];
      const auto& cb = cones[j];
      // shared vertices of the two faces define the allowed meeting set
      std::vector<Vec3> shared;
      for (int a : cpx.face(ca.face))
        for (int b : cpx.face(cb.face))
          if (a == b) shared.push_back(cpx.vertex3(a));
      for (int s = 0; s < 2; ++s) {
        if (ca.side_cell[s] < 0) continue;
        const int sgn = (s == 0) ? 1 : -1;
        for (int iy = 0; iy < res; ++iy)
          for (int ir = 0; ir < res; ++ir)
            for (int ip = 0; ip <= res; ++ip) {
              const Vec3 p = sample(ca, sgn, iy, ir, ip);
              const LocalCoords lc = to_cone_coords(cb, p);
              const double shrink = 1.0 - 1e-9;
              if (lc.y <= 1e-12 * delta || lc.y > delta) continue;
              if (lc.r <= 1e-12 * delta) continue;  // on the other cone's axis
              if (lc.r > 3.0 * cb.t * lc.y * shrink) continue;
              if (std::abs(lc.phi) > alpha * shrink) continue;
              if (!side_available(cb, lc.phi)) continue;
              double dist;
              if (shared.size() >= 2)
                dist = dist_point_segment(p, shared[0], shared[1]);
              else
                dist = (p - shared[0]).norm();
              if (dist > 1e-6 * delta) {
                std::ostringstream os;
                os << "cone overlap: vertex " << vertex << " faces " << ca.face << " and "
                   << cb.face << " meet off their shared set (dist " << dist << ")";
                return {false, os.str()};
              }
            }
      }
    }
  return cert;
}

double compute_corner_angle(const SimplicialComplex& cpx, const Constants3& k, int vertex,
                            double delta) {
  if (!(3.0 * delta < k.d_vertex[vertex]))
    throw std::invalid_argument("compute_corner_angle: width too large for the vertex clearance");
  const auto cones = corner_cones_at(cpx, k, vertex);
  if (cones.empty())
    throw std::invalid_argument("compute_corner_angle: vertex has no incident faces");

  double raw = M_PI;
  int block_face = -1, block_edge = -1;
  for (const auto& cone : cones)
    for (int s = 0; s < 2; ++s) {
      if (cone.side_cell[s] < 0) continue;
      const double ch =
          cone_rotation_clearance(cpx, cone, cone.side_cell[s], (s == 0) ? 1 : -1, delta);
      if (ch < raw) {
        raw = ch;
        block_face = cone.face;
        block_edge = cone.edge;
      }
    }

  double alpha = raw / 2.0;
  for (int e : cpx.edges_of_vertex(vertex)) alpha = std::min(alpha, k.omega_edge[e] / 3.0);

  if (alpha <= 1e-12) {
    std::ostringstream os;
    os << "compute_corner_angle: zero clearance at vertex " << vertex << " (face " << block_face
       << ", edge " << block_edge << ")";
    throw std::runtime_error(os.str());
  }

  std::string last;
  for (int attempt = 0; attempt < 40; ++attempt) {
    const auto coarse = certify_corner_cones(cpx, k, vertex, delta, alpha, 12);
    if (!coarse.ok) {
      last = coarse.detail;
      alpha *= 0.5;
      continue;
    }
    // accept only when the doubled resolution agrees
    const auto fine = certify_corner_cones(cpx, k, vertex, delta, alpha, 24);
    if (fine.ok) return alpha;
    last = fine.detail;
    alpha *= 0.5;
  }
  throw std::runtime_error("compute_corner_angle: certification kept failing: " + last);
}

}  // namespace pinch
