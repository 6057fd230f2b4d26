#include "pinch/map3d.hh"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pinch/profiles.hh"
#include "pinch/rng.hh"

namespace pinch {

namespace {

Mat3 conjugate_to_world(const Frame3& f, const Mat3& jl) {
  return f.rot.transpose() * jl * f.rot;
}

// Jacobian of (y, p2, p3) -> (y, r cos out, r sin out) at azimuth phi,
// radius r > 0, with the partials of out(y, r, phi).
Mat3 azimuth_jacobian(double r, double phi, double out, double d_y, double d_r, double d_phi) {
  const Eigen::Vector2d er(std::cos(phi), std::sin(phi));
  const Eigen::Vector2d et(-std::sin(phi), std::cos(phi));
  const Eigen::Vector2d er2(std::cos(out), std::sin(out));
  const Eigen::Vector2d et2(-std::sin(out), std::cos(out));
  Mat3 j = Mat3::Zero();
  j(0, 0) = 1.0;
  j.block<2, 1>(1, 0) = r * d_y * et2;
  j.block<2, 2>(1, 1) =
      er2 * er.transpose() + r * d_r * et2 * er.transpose() + d_phi * et2 * et.transpose();
  return j;
}

// Jacobian of (y, p2, p3) -> (y, (rho/r) p2, (rho/r) p3) at radius r > 0,
// with the partials of rho(y, r).
Mat3 radial_jacobian(const Eigen::Vector2d& dir, double rho_over_r, double d_y, double d_r) {
  Mat3 j = Mat3::Zero();
  j(0, 0) = 1.0;
  j.block<2, 1>(1, 0) = d_y * dir;
  const Mat2 pr = dir * dir.transpose();
  j.block<2, 2>(1, 1) = d_r * pr + rho_over_r * (Mat2::Identity() - pr);
  return j;
}

int other_endpoint(const std::array<int, 2>& ev, int v) { return ev[0] == v ? ev[1] : ev[0]; }

int third_vertex(const std::array<int, 3>& fv, int a, int b) {
  for (int v : fv)
    if (v != a && v != b) return v;
  throw std::logic_error("third_vertex: degenerate face");
}

int corner_slot(const SimplicialComplex& cpx, int face, int vertex) {
  const auto& fv = cpx.face(face);
  for (int j = 0; j < 3; ++j)
    if (fv[j] == vertex) return j;
  throw std::invalid_argument("corner_slot: vertex not on face");
}

std::array<int, 2> face_edges_at(const SimplicialComplex& cpx, int face, int vertex) {
  std::array<int, 2> out{-1, -1};
  int n = 0;
  for (int e : cpx.edges_of_face(face)) {
    const auto& ev = cpx.edge(e);
    if (ev[0] == vertex || ev[1] == vertex) out[n++] = e;
  }
  if (n != 2) throw std::logic_error("face_edges_at: corner without two sides");
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

std::string entity(const char* kind, int id) {
  std::ostringstream os;
  os << kind << " " << id;
  return os.str();
}

const char* kind_name(PinchKind3D k) {
  switch (k) {
    case PinchKind3D::corner_wedge:
      return "corner wedge";
    case PinchKind3D::corner_cone:
      return "corner cone";
    case PinchKind3D::vertex_ball:
      return "vertex ball";
    case PinchKind3D::edge_band:
      return "edge band";
    case PinchKind3D::edge_tube:
      return "edge tube";
    case PinchKind3D::face_slab:
      return "face slab";
  }
  return "?";
}

// combined onset/offset weight of the middle part of an edge of length ell
double band_weight(double y, double delta, double ell) {
  return ramp(y, delta / 4.0, delta / 2.0) - ramp(y, ell - delta / 2.0, ell - delta / 4.0);
}

double band_weight_deriv(double y, double delta, double ell) {
  return ramp_deriv(y, delta / 4.0, delta / 2.0) -
         ramp_deriv(y, ell - delta / 2.0, ell - delta / 4.0);
}

}  // namespace

bool ElementaryPinchMap3D::in_support(const Vec3& x) const {
  switch (kind) {
    case PinchKind3D::corner_wedge: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= 0.0 || y >= delta) return false;
      const double r = std::hypot(p[1], p[2]);
      if (r <= 0.0 || r >= 3.0 * t * y) return false;
      const double phi = std::atan2(p[2], p[1]);
      return phi != 0.0 && std::abs(phi) < alpha;
    }
    case PinchKind3D::corner_cone: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= 0.0 || y >= delta) return false;
      const double r = std::hypot(p[1], p[2]);
      return r > 0.0 && r < t * y;
    }
    case PinchKind3D::vertex_ball: {
      const double rho = (x - frame.origin).norm();
      return rho > 0.0 && rho < delta;
    }
    case PinchKind3D::edge_band: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= delta / 4.0 || y >= ell - delta / 4.0) return false;
      const double r = std::hypot(p[1], p[2]);
      if (r <= 0.0 || r >= delta * t / 4.0) return false;
      const double phi = std::atan2(p[2], p[1]);
      return phi != 0.0 && std::abs(phi) < alpha;
    }
    case PinchKind3D::edge_tube: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= delta / 4.0 || y >= ell - delta / 4.0) return false;
      const double r = std::hypot(p[1], p[2]);
      return r > 0.0 && r < delta * t / 4.0;
    }
    case PinchKind3D::face_slab: {
      const Vec3 p = frame.to_local(x);
      if (p[2] == 0.0 || std::abs(p[2]) >= width) return false;
      return bump.value(x) > 0.0;
    }
  }
  return false;
}

Vec3 ElementaryPinchMap3D::evaluate(const Vec3& x) const {
  switch (kind) {
    case PinchKind3D::corner_wedge: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= 0.0 || y >= delta) return x;
      const double r = std::hypot(p[1], p[2]);
      if (r <= 0.0 || r >= 3.0 * t * y) return x;
      const double phi = std::atan2(p[2], p[1]);
      if (phi == 0.0 || std::abs(phi) >= alpha) return x;
      const double c1 = ramp(y, delta / 2.0, delta);
      const double c2 = ramp01(r / (t * y) - 2.0);
      const double g = pinch_profile(phi, alpha);
      const double mid = (1.0 - c2) * g + c2 * phi;
      const double out = (1.0 - c1) * mid + c1 * phi;
      return frame.to_world({y, r * std::cos(out), r * std::sin(out)});
    }
    case PinchKind3D::corner_cone: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= 0.0 || y >= delta) return x;
      const double r = std::hypot(p[1], p[2]);
      if (r <= 0.0 || r >= t * y) return x;
      const double c1 = ramp(y, delta / 2.0, delta);
      const double rho = (1.0 - c1) * pinch_profile(r, t * y) + c1 * r;
      return frame.to_world({y, p[1] * rho / r, p[2] * rho / r});
    }
    case PinchKind3D::vertex_ball: {
      const Vec3 v = x - frame.origin;
      const double rho = v.norm();
      if (rho <= 0.0 || rho >= delta) return x;
      return frame.origin + v * (pinch_profile(rho, delta) / rho);
    }
    case PinchKind3D::edge_band: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= delta / 4.0 || y >= ell - delta / 4.0) return x;
      const double r = std::hypot(p[1], p[2]);
      if (r <= 0.0 || r >= delta * t / 4.0) return x;
      const double phi = std::atan2(p[2], p[1]);
      if (phi == 0.0 || std::abs(phi) >= alpha) return x;
      const double c1 = band_weight(y, delta, ell);
      const double c2 = ramp(r, delta * t / 8.0, delta * t / 4.0);
      const double g = pinch_profile(phi, alpha);
      const double mid = (1.0 - c2) * g + c2 * phi;
      const double out = c1 * mid + (1.0 - c1) * phi;
      return frame.to_world({y, r * std::cos(out), r * std::sin(out)});
    }
    case PinchKind3D::edge_tube: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= delta / 4.0 || y >= ell - delta / 4.0) return x;
      const double r = std::hypot(p[1], p[2]);
      if (r <= 0.0 || r >= delta * t / 4.0) return x;
      const double c = band_weight(y, delta, ell);
      const double rho = c * pinch_profile(r, delta * t / 4.0) + (1.0 - c) * r;
      return frame.to_world({y, p[1] * rho / r, p[2] * rho / r});
    }
    case PinchKind3D::face_slab: {
      const Vec3 p = frame.to_local(x);
      if (p[2] == 0.0 || std::abs(p[2]) >= width) return x;
      const double lam = bump.value(x);
      if (lam <= 0.0) return x;
      const double z = lam * pinch_profile(p[2], width) + (1.0 - lam) * p[2];
      return frame.to_world({p[0], p[1], z});
    }
  }
  return x;
}

Mat3 ElementaryPinchMap3D::jacobian(const Vec3& x) const {
  // gates are wider than in_support: the Jacobian differs from identity on
  // the closure of the support in the cross directions (phi = 0, p3 = 0 and
  // the axis r = 0 included)
  switch (kind) {
    case PinchKind3D::corner_wedge: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= 0.0 || y >= delta) return Mat3::Identity();
      const double r = std::hypot(p[1], p[2]);
      if (r >= 3.0 * t * y) return Mat3::Identity();
      if (r <= 0.0) {
        // azimuth pinch is not C1 on its axis; the one-sided limit below is
        // the factor the chain needs, the following radial pinch stages zero
        // the transverse block here anyway
        Mat3 jl = Mat3::Zero();
        jl(0, 0) = 1.0;
        return conjugate_to_world(frame, jl);
      }
      const double phi = std::atan2(p[2], p[1]);
      if (std::abs(phi) >= alpha) return Mat3::Identity();
      const double c1 = ramp(y, delta / 2.0, delta);
      const double c1p = ramp_deriv(y, delta / 2.0, delta);
      const double u = r / (t * y);
      const double c2 = ramp01(u - 2.0);
      const double c2p = ramp01_deriv(u - 2.0);
      const double g = pinch_profile(phi, alpha);
      const double gp = pinch_profile_deriv(phi, alpha);
      const double mid = (1.0 - c2) * g + c2 * phi;
      const double out = (1.0 - c1) * mid + c1 * phi;
      const double d_y = c1p * (phi - mid) + (1.0 - c1) * c2p * (-r / (t * y * y)) * (phi - g);
      const double d_r = (1.0 - c1) * c2p * (phi - g) / (t * y);
      const double d_phi = (1.0 - c1) * ((1.0 - c2) * gp + c2) + c1;
      return conjugate_to_world(frame, azimuth_jacobian(r, phi, out, d_y, d_r, d_phi));
    }
    case PinchKind3D::corner_cone: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= 0.0 || y >= delta) return Mat3::Identity();
      const double r = std::hypot(p[1], p[2]);
      if (r >= t * y) return Mat3::Identity();
      const double c1 = ramp(y, delta / 2.0, delta);
      if (r <= 0.0) {
        Mat3 jl = Mat3::Identity();
        jl(1, 1) = jl(2, 2) = c1;  // radial profile has zero slope on the axis
        return conjugate_to_world(frame, jl);
      }
      const double c1p = ramp_deriv(y, delta / 2.0, delta);
      const double g = pinch_profile(r, t * y);
      const double gp = pinch_profile_deriv(r, t * y);
      const double gw = pinch_profile_dwidth(r, t * y);
      const double rho = (1.0 - c1) * g + c1 * r;
      const double d_y = c1p * (r - g) + (1.0 - c1) * gw * t;
      const double d_r = (1.0 - c1) * gp + c1;
      const Eigen::Vector2d dir(p[1] / r, p[2] / r);
      return conjugate_to_world(frame, radial_jacobian(dir, rho / r, d_y, d_r));
    }
    case PinchKind3D::vertex_ball: {
      const Vec3 v = x - frame.origin;
      const double rho = v.norm();
      if (rho >= delta) return Mat3::Identity();
      if (rho <= 0.0) return Mat3::Zero();  // radial profile has zero slope at the center
      const Vec3 dir = v / rho;
      const Mat3 pr = dir * dir.transpose();
      const double g = pinch_profile(rho, delta);
      const double gp = pinch_profile_deriv(rho, delta);
      return gp * pr + (g / rho) * (Mat3::Identity() - pr);
    }
    case PinchKind3D::edge_band: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= delta / 4.0 || y >= ell - delta / 4.0) return Mat3::Identity();
      const double r = std::hypot(p[1], p[2]);
      if (r >= delta * t / 4.0) return Mat3::Identity();
      if (r <= 0.0) {
        Mat3 jl = Mat3::Zero();
        jl(0, 0) = 1.0;
        return conjugate_to_world(frame, jl);
      }
      const double phi = std::atan2(p[2], p[1]);
      if (std::abs(phi) >= alpha) return Mat3::Identity();
      const double c1 = band_weight(y, delta, ell);
      const double c1p = band_weight_deriv(y, delta, ell);
      const double c2 = ramp(r, delta * t / 8.0, delta * t / 4.0);
      const double c2p = ramp_deriv(r, delta * t / 8.0, delta * t / 4.0);
      const double g = pinch_profile(phi, alpha);
      const double gp = pinch_profile_deriv(phi, alpha);
      const double mid = (1.0 - c2) * g + c2 * phi;
      const double out = c1 * mid + (1.0 - c1) * phi;
      const double d_y = c1p * (mid - phi);
      const double d_r = c1 * c2p * (phi - g);
      const double d_phi = c1 * ((1.0 - c2) * gp + c2) + (1.0 - c1);
      return conjugate_to_world(frame, azimuth_jacobian(r, phi, out, d_y, d_r, d_phi));
    }
    case PinchKind3D::edge_tube: {
      const Vec3 p = frame.to_local(x);
      const double y = p[0];
      if (y <= delta / 4.0 || y >= ell - delta / 4.0) return Mat3::Identity();
      const double r = std::hypot(p[1], p[2]);
      if (r >= delta * t / 4.0) return Mat3::Identity();
      const double c = band_weight(y, delta, ell);
      if (r <= 0.0) {
        Mat3 jl = Mat3::Identity();
        jl(1, 1) = jl(2, 2) = 1.0 - c;
        return conjugate_to_world(frame, jl);
      }
      const double cp = band_weight_deriv(y, delta, ell);
      const double g = pinch_profile(r, delta * t / 4.0);
      const double gp = pinch_profile_deriv(r, delta * t / 4.0);
      const double rho = c * g + (1.0 - c) * r;
      const double d_y = cp * (g - r);
      const double d_r = c * gp + (1.0 - c);
      const Eigen::Vector2d dir(p[1] / r, p[2] / r);
      return conjugate_to_world(frame, radial_jacobian(dir, rho / r, d_y, d_r));
    }
    case PinchKind3D::face_slab: {
      const Vec3 p = frame.to_local(x);
      if (std::abs(p[2]) >= width) return Mat3::Identity();
      const double lam = bump.value(x);
      if (lam <= 0.0) return Mat3::Identity();
      const double g = pinch_profile(p[2], width);
      const double gp = pinch_profile_deriv(p[2], width);
      const Vec3 gl = frame.rot * bump.gradient(x);
      Mat3 jl = Mat3::Identity();
      jl(2, 0) = gl[0] * (g - p[2]);
      jl(2, 1) = gl[1] * (g - p[2]);
      jl(2, 2) = lam * gp + (1.0 - lam);
      return conjugate_to_world(frame, jl);
    }
  }
  return Mat3::Identity();
}

ElementaryPinchMap3D build_corner_wedge_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                              int face, int edge, int vertex, double delta,
                                              double alpha) {
  require(delta > 0.0, "build_corner_wedge_pinch: delta must be positive");
  require(3.0 * delta < k.d_vertex[vertex],
          "build_corner_wedge_pinch: 3 delta >= d_vertex at " + entity("vertex", vertex));
  require(alpha > 0.0, "build_corner_wedge_pinch: pinch angle must be positive");
  const auto& ev = cpx.edge(edge);
  require(ev[0] == vertex || ev[1] == vertex, "build_corner_wedge_pinch: vertex not on edge");
  const int b = other_endpoint(ev, vertex);
  const int c = third_vertex(cpx.face(face), vertex, b);
  const double theta = k.corner_angle(face, corner_slot(cpx, face, vertex));

  ElementaryPinchMap3D m;
  m.kind = PinchKind3D::corner_wedge;
  m.face = face;
  m.edge = edge;
  m.vertex = vertex;
  m.frame = corner_frame(cpx.vertex3(vertex), cpx.vertex3(b), cpx.vertex3(c));
  m.delta = delta;
  m.t = 0.5 * std::tan(5.0 * theta / 8.0);
  m.alpha = alpha;
  require(3.0 * m.t < std::tan(15.0 * theta / 16.0),
          "build_corner_wedge_pinch: support cone exceeds its angular envelope at " +
              entity("face", face));
  return m;
}

ElementaryPinchMap3D build_corner_cone_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                             int edge, int slot, double delta) {
  const auto& ev = cpx.edge(edge);
  const int vertex = ev[slot];
  require(delta > 0.0, "build_corner_cone_pinch: delta must be positive");
  require(4.0 * delta < k.d_vertex[vertex],
          "build_corner_cone_pinch: 4 delta >= d_vertex at " + entity("vertex", vertex));
  const int b = other_endpoint(ev, vertex);
  const int f0 = cpx.faces_of_edge(edge).front();
  const int c = third_vertex(cpx.face(f0), ev[0], ev[1]);

  ElementaryPinchMap3D m;
  m.kind = PinchKind3D::corner_cone;
  m.edge = edge;
  m.vertex = vertex;
  m.frame = corner_frame(cpx.vertex3(vertex), cpx.vertex3(b), cpx.vertex3(c));
  m.delta = delta;
  m.t = std::tan(k.theta_vertex[vertex] / 3.0);
  return m;
}

ElementaryPinchMap3D build_vertex_ball_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                             int vertex, double delta) {
  require(delta > 0.0, "build_vertex_ball_pinch: delta must be positive");
  require(3.0 * delta < k.d_vertex[vertex],
          "build_vertex_ball_pinch: 3 delta >= d_vertex at " + entity("vertex", vertex));
  ElementaryPinchMap3D m;
  m.kind = PinchKind3D::vertex_ball;
  m.vertex = vertex;
  m.frame.origin = cpx.vertex3(vertex);
  m.frame.rot = Mat3::Identity();
  m.delta = delta;
  return m;
}

ElementaryPinchMap3D build_edge_band_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                           int face, int edge, double delta) {
  require(delta > 0.0, "build_edge_band_pinch: delta must be positive");
  require(4.0 * delta < k.d_edge[edge],
          "build_edge_band_pinch: 4 delta >= d_edge at " + entity("edge", edge));
  const auto& ev = cpx.edge(edge);
  const int a = std::min(ev[0], ev[1]);
  const int b = other_endpoint(ev, a);
  const int c = third_vertex(cpx.face(face), a, b);

  ElementaryPinchMap3D m;
  m.kind = PinchKind3D::edge_band;
  m.face = face;
  m.edge = edge;
  m.frame = corner_frame(cpx.vertex3(a), cpx.vertex3(b), cpx.vertex3(c));
  m.delta = delta;
  m.t = std::tan(k.theta_edge[edge] / 3.0);
  m.alpha = k.omega_edge[edge] / 3.0;
  m.ell = cpx.edge_length(edge);
  return m;
}

ElementaryPinchMap3D build_edge_tube_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                           int edge, double delta) {
  require(delta > 0.0, "build_edge_tube_pinch: delta must be positive");
  require(delta < k.d_edge[edge],
          "build_edge_tube_pinch: delta >= d_edge at " + entity("edge", edge));
  const auto& ev = cpx.edge(edge);
  const int a = std::min(ev[0], ev[1]);
  const int b = other_endpoint(ev, a);
  const int f0 = cpx.faces_of_edge(edge).front();
  const int c = third_vertex(cpx.face(f0), ev[0], ev[1]);

  ElementaryPinchMap3D m;
  m.kind = PinchKind3D::edge_tube;
  m.edge = edge;
  m.frame = corner_frame(cpx.vertex3(a), cpx.vertex3(b), cpx.vertex3(c));
  m.delta = delta;
  m.t = std::tan(k.theta_edge[edge] / 3.0);
  m.ell = cpx.edge_length(edge);
  return m;
}

ElementaryPinchMap3D build_face_slab_pinch(const SimplicialComplex& cpx, const Constants3& k,
                                           int face, double delta) {
  require(delta > 0.0, "build_face_slab_pinch: delta must be positive");
  ElementaryPinchMap3D m;
  m.kind = PinchKind3D::face_slab;
  m.face = face;
  m.bump = build_face_bump(cpx, k, face, delta);
  m.frame = m.bump.frame;
  m.delta = delta;
  m.t = std::tan(k.omega_face[face] / 3.0);
  m.width = delta * m.t * m.t / 64.0;
  return m;
}

Vec3 sample_support(const ElementaryPinchMap3D& map, Rng& rng) {
  switch (map.kind) {
    case PinchKind3D::corner_wedge: {
      const double y = rng.uniform(0.0, map.delta);
      const double r = 3.0 * map.t * y * std::sqrt(rng.uniform(0.0, 1.0));
      const double phi = rng.uniform(-map.alpha, map.alpha);
      return map.frame.to_world({y, r * std::cos(phi), r * std::sin(phi)});
    }
    case PinchKind3D::corner_cone: {
      const double y = rng.uniform(0.0, map.delta);
      const double r = map.t * y * std::sqrt(rng.uniform(0.0, 1.0));
      const double phi = rng.uniform(-M_PI, M_PI);
      return map.frame.to_world({y, r * std::cos(phi), r * std::sin(phi)});
    }
    case PinchKind3D::vertex_ball: {
      const double r = map.delta * std::cbrt(rng.uniform(0.0, 1.0));
      const double cz = rng.uniform(-1.0, 1.0);
      const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
      const double phi = rng.uniform(-M_PI, M_PI);
      return map.frame.origin + r * Vec3(cz, sz * std::cos(phi), sz * std::sin(phi));
    }
    case PinchKind3D::edge_band: {
      const double y = rng.uniform(map.delta / 4.0, map.ell - map.delta / 4.0);
      const double r = (map.delta * map.t / 4.0) * std::sqrt(rng.uniform(0.0, 1.0));
      const double phi = rng.uniform(-map.alpha, map.alpha);
      return map.frame.to_world({y, r * std::cos(phi), r * std::sin(phi)});
    }
    case PinchKind3D::edge_tube: {
      const double y = rng.uniform(map.delta / 4.0, map.ell - map.delta / 4.0);
      const double r = (map.delta * map.t / 4.0) * std::sqrt(rng.uniform(0.0, 1.0));
      const double phi = rng.uniform(-M_PI, M_PI);
      return map.frame.to_world({y, r * std::cos(phi), r * std::sin(phi)});
    }
    case PinchKind3D::face_slab: {
      Vec3 p = map.bump.corner.rowwise().mean();
      for (int attempt = 0; attempt < 64; ++attempt) {
        Vec3 q;
        if (attempt % 2 == 0) {
          q = map.bump.corner * rng.barycentric<3>();
        } else {
          const int side = rng.uniform_int(0, 2);
          const Vec3 a = map.bump.corner.col((side + 1) % 3);
          const Vec3 b = map.bump.corner.col((side + 2) % 3);
          q = a + rng.uniform(0.1, 0.9) * (b - a) +
              rng.uniform(map.bump.lo, map.bump.hi) * map.bump.side_normal.row(side).transpose();
        }
        if (map.bump.value(map.frame.to_world(q)) > 0.0) {
          p = q;
          break;
        }
      }
      p[2] = rng.uniform(-map.width, map.width);
      return map.frame.to_world(p);
    }
  }
  return map.frame.origin;
}

DisjointnessCertificate certify_disjoint_supports(const std::vector<ElementaryPinchMap3D>& maps,
                                                  int samples_per_support, unsigned long seed) {
  DisjointnessCertificate cert;
  Rng rng(seed);
  const int n = static_cast<int>(maps.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (maps[i].kind != maps[j].kind) continue;
      if (maps[i].group >= 0 && maps[i].group == maps[j].group) continue;
      ++cert.pairs_checked;
      for (int s = 0; s < samples_per_support; ++s) {
        for (const auto& [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
          const Vec3 p = sample_support(maps[a], rng);
          const Vec3 q = maps[b].evaluate(p);
          if (q[0] == p[0] && q[1] == p[1] && q[2] == p[2]) continue;
          cert.ok = false;
          cert.first = i;
          cert.second = j;
          std::ostringstream os;
          os << kind_name(maps[a].kind) << " map " << a << " support point (" << p[0] << ", "
             << p[1] << ", " << p[2] << ") is moved by map " << b;
          cert.detail = os.str();
          return cert;
        }
      }
    }
  }
  return cert;
}

Vec3 SmoothingMap3D::evaluate(Vec3 x) const {
  for (const auto& m : maps) x = m.evaluate(x);
  return x;
}

Mat3 SmoothingMap3D::jacobian(const Vec3& x) const {
  Mat3 j = Mat3::Identity();
  Vec3 p = x;
  for (const auto& m : maps) {
    j = m.jacobian(p) * j;
    p = m.evaluate(p);
  }
  return j;
}

bool SmoothingMap3D::in_support(const Vec3& x) const {
  for (const auto& m : maps)
    if (m.in_support(x)) return true;
  return false;
}

SmoothingMap3D build_xi_3d(const SimplicialComplex& cpx, const Constants3& k,
                           const VecX& cell_deltas) {
  if (cpx.dim() != 3) throw std::invalid_argument("build_xi_3d: spatial complex required");
  if (cell_deltas.size() != cpx.num_cells())
    throw std::invalid_argument("build_xi_3d: one width per cell required");
  for (int i = 0; i < cpx.num_cells(); ++i) {
    require(cell_deltas[i] > 0.0,
            "build_xi_3d: width must be positive for " + entity("cell", i));
    // a cell's width may not exceed the clearance of any face it touches
    for (int f = 0; f < cpx.num_faces(); ++f) {
      bool touches = false;
      for (int v : cpx.face(f))
        for (int w : cpx.cell(i)) touches = touches || v == w;
      if (touches)
        require(cell_deltas[i] < k.d_face[f], "build_xi_3d: width of " + entity("cell", i) +
                                                  " reaches d_face at " + entity("face", f));
    }
  }

  SmoothingMap3D xi;
  xi.complex = cpx;
  xi.constants = k;
  xi.cell_deltas = cell_deltas;

  xi.delta_vertex.assign(cpx.num_vertices(), std::numeric_limits<double>::infinity());
  for (int i = 0; i < cpx.num_cells(); ++i)
    for (int v : cpx.cell(i))
      xi.delta_vertex[v] = std::min(xi.delta_vertex[v], cell_deltas[i]);
  xi.delta_edge.assign(cpx.num_edges(), 0.0);
  for (int e = 0; e < cpx.num_edges(); ++e) {
    const auto& ev = cpx.edge(e);
    xi.delta_edge[e] = std::min(xi.delta_vertex[ev[0]], xi.delta_vertex[ev[1]]);
  }
  xi.delta_face.assign(cpx.num_faces(), 0.0);
  for (int f = 0; f < cpx.num_faces(); ++f) {
    double d = std::numeric_limits<double>::infinity();
    for (int e : cpx.edges_of_face(f)) d = std::min(d, xi.delta_edge[e]);
    xi.delta_face[f] = d;
  }
  xi.alpha_vertex = corner_pinch_angles(cpx, k, xi.delta_vertex);

  for (int f = 0; f < cpx.num_faces(); ++f)
    for (int j = 0; j < 3; ++j) {
      const int v = cpx.face(f)[j];
      for (int e : face_edges_at(cpx, f, v)) {
        auto m = build_corner_wedge_pinch(cpx, k, f, e, v, xi.delta_vertex[v],
                                          xi.alpha_vertex[v]);
        m.group = 3 * f + j;
        xi.maps.push_back(m);
      }
    }
  for (int e = 0; e < cpx.num_edges(); ++e)
    for (int slot = 0; slot < 2; ++slot)
      xi.maps.push_back(
          build_corner_cone_pinch(cpx, k, e, slot, xi.delta_vertex[cpx.edge(e)[slot]]));
  for (int v = 0; v < cpx.num_vertices(); ++v)
    xi.maps.push_back(build_vertex_ball_pinch(cpx, k, v, xi.delta_vertex[v]));
  for (int f = 0; f < cpx.num_faces(); ++f)
    for (int e : cpx.edges_of_face(f))
      xi.maps.push_back(build_edge_band_pinch(cpx, k, f, e, xi.delta_edge[e]));
  for (int e = 0; e < cpx.num_edges(); ++e)
    xi.maps.push_back(build_edge_tube_pinch(cpx, k, e, xi.delta_edge[e]));
  for (int f = 0; f < cpx.num_faces(); ++f)
    xi.maps.push_back(build_face_slab_pinch(
        cpx, k, f, xi.delta_face[f] * std::tan(k.omega_face[f] / 3.0)));

  xi.certificate = certify_disjoint_supports(xi.maps, 256, 0x3d15eedULL);
  if (!xi.certificate.ok)
    throw std::runtime_error("build_xi_3d: support disjointness failed: " + xi.certificate.detail);
  return xi;
}

SmoothingMap3D build_xi_3d(const SimplicialComplex& cpx, const Constants3& k, double delta) {
  if (!(delta > 0.0) || !(delta < k.delta_cap))
    throw std::invalid_argument("build_xi_3d: delta outside (0, delta_cap)");
  return build_xi_3d(cpx, k, VecX::Constant(cpx.num_cells(), delta));
}

SmoothingMap3D build_xi_3d(const SimplicialComplex& cpx, double delta) {
  return build_xi_3d(cpx, compute_constants3(cpx), delta);
}

}  // namespace pinch
