#include "pinch/map2d.hh"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pinch/profiles.hh"
#include "pinch/rng.hh"

namespace pinch {

namespace {

Mat2 conjugate_to_world(const Frame2& f, const Mat2& jl) {
  Mat2 r;
  r.col(0) = f.u;
  r.col(1) = f.n;
  return r * jl * r.transpose();
}

const char* kind_name(PinchKind2D k) {
  switch (k) {
    case PinchKind2D::edge_b:
      return "edge";
    case PinchKind2D::corner_a:
      return "corner";
    case PinchKind2D::vertex_e:
      return "vertex";
  }
  return "?";
}

}  // namespace

bool ElementaryPinchMap2D::in_support(const Vec2& x) const {
  const Vec2 p = frame.to_local(x);
  switch (kind) {
    case PinchKind2D::edge_b: {
      const double wt = std::min(p[0], ell - p[0]);
      const double az = std::abs(p[1]);
      return wt > d && az > 0.0 && az < d * t;
    }
    case PinchKind2D::corner_a: {
      const double r = p.norm();
      if (r <= 0.0 || r >= 3.0 * d) return false;
      const double phi = std::atan2(p[1], p[0]);
      return phi != 0.0 && std::abs(phi) < alpha / 3.0;
    }
    case PinchKind2D::vertex_e: {
      const double r = (x - frame.origin).norm();
      return r > 0.0 && r < eta * delta;
    }
  }
  return false;
}

Vec2 ElementaryPinchMap2D::evaluate(const Vec2& x) const {
  switch (kind) {
    case PinchKind2D::edge_b: {
      const Vec2 p = frame.to_local(x);
      const double wt = std::min(p[0], ell - p[0]);
      const double az = std::abs(p[1]);
      if (wt <= d || az <= 0.0 || az >= d * t) return x;
      const double c = ramp(wt, d, 2.0 * d);
      const double z = c * pinch_profile(p[1], d * t) + (1.0 - c) * p[1];
      return frame.to_world({p[0], z});
    }
    case PinchKind2D::corner_a: {
      const Vec2 p = frame.to_local(x);
      const double r = p.norm();
      if (r <= 0.0 || r >= 3.0 * d) return x;
      const double phi = std::atan2(p[1], p[0]);
      if (phi == 0.0 || std::abs(phi) >= alpha / 3.0) return x;
      const double c = ramp(r, 2.0 * d, 3.0 * d);
      const double out = (1.0 - c) * pinch_profile(phi, alpha / 3.0) + c * phi;
      return frame.to_world({r * std::cos(out), r * std::sin(out)});
    }
    case PinchKind2D::vertex_e: {
      const Vec2 v = x - frame.origin;
      const double r = v.norm();
      if (r <= 0.0 || r >= eta * delta) return x;
      return frame.origin + v * (pinch_profile(r, eta * delta) / r);
    }
  }
  return x;
}

Mat2 ElementaryPinchMap2D::jacobian(const Vec2& x) const {
  // the Jacobian differs from identity on the closure of the support in the
  // cross direction (z = 0, phi = 0 and the vertex included), so the gates
  // below are wider than in_support
  switch (kind) {
    case PinchKind2D::edge_b: {
      const Vec2 p = frame.to_local(x);
      const double wt = std::min(p[0], ell - p[0]);
      if (wt <= d || std::abs(p[1]) >= d * t) return Mat2::Identity();
      const double c = ramp(wt, d, 2.0 * d);
      const double cp = ramp_deriv(wt, d, 2.0 * d) * (p[0] < 0.5 * ell ? 1.0 : -1.0);
      const double g = pinch_profile(p[1], d * t);
      const double gp = pinch_profile_deriv(p[1], d * t);
      Mat2 jl;
      jl << 1.0, 0.0, cp * (g - p[1]), c * gp + (1.0 - c);
      return conjugate_to_world(frame, jl);
    }
    case PinchKind2D::corner_a: {
      const Vec2 p = frame.to_local(x);
      const double r = p.norm();
      if (r <= 0.0 || r >= 3.0 * d) return Mat2::Identity();
      const double phi = std::atan2(p[1], p[0]);
      if (std::abs(phi) >= alpha / 3.0) return Mat2::Identity();
      const double c = ramp(r, 2.0 * d, 3.0 * d);
      const double cp = ramp_deriv(r, 2.0 * d, 3.0 * d);
      const double g = pinch_profile(phi, alpha / 3.0);
      const double gp = pinch_profile_deriv(phi, alpha / 3.0);
      const double out = (1.0 - c) * g + c * phi;
      const double dout_dr = cp * (phi - g);
      const double dout_dphi = (1.0 - c) * gp + c;
      Mat2 to_polar;
      to_polar << std::cos(phi), std::sin(phi), -std::sin(phi) / r, std::cos(phi) / r;
      Mat2 dm;
      dm << 1.0, 0.0, dout_dr, dout_dphi;
      Mat2 from_polar;
      from_polar << std::cos(out), -r * std::sin(out), std::sin(out), r * std::cos(out);
      return conjugate_to_world(frame, from_polar * dm * to_polar);
    }
    case PinchKind2D::vertex_e: {
      const Vec2 v = x - frame.origin;
      const double r = v.norm();
      const double w = eta * delta;
      if (r >= w) return Mat2::Identity();
      if (r <= 0.0) return Mat2::Zero();  // radial profile has zero slope at the center
      const Vec2 dir = v / r;
      const Mat2 pr = dir * dir.transpose();
      const double g = pinch_profile(r, w);
      const double gp = pinch_profile_deriv(r, w);
      return gp * pr + (g / r) * (Mat2::Identity() - pr);
    }
  }
  return Mat2::Identity();
}

ElementaryPinchMap2D build_edge_pinch(const SimplicialComplex& cpx, const Constants2& k,
                                      int edge, double delta) {
  ElementaryPinchMap2D m;
  m.kind = PinchKind2D::edge_b;
  m.edge = edge;
  const auto& ev = cpx.edge(edge);
  m.frame = edge_frame(cpx.vertex2(ev[0]), cpx.vertex2(ev[1]));
  m.ell = k.len[edge];
  m.d = k.d(edge, delta);
  m.t = k.t[edge];
  m.alpha = k.alpha[edge];
  m.delta = delta;
  if (!(4.0 * m.d < m.ell))
    throw std::invalid_argument("build_edge_pinch: band plateau would cross the edge midpoint");
  return m;
}

ElementaryPinchMap2D build_corner_pinch(const SimplicialComplex& cpx, const Constants2& k,
                                        int vertex, int edge, double delta) {
  const auto& ev = cpx.edge(edge);
  if (ev[0] != vertex && ev[1] != vertex)
    throw std::invalid_argument("build_corner_pinch: vertex is not an endpoint of the edge");
  ElementaryPinchMap2D m;
  m.kind = PinchKind2D::corner_a;
  m.edge = edge;
  m.vertex = vertex;
  const int other = ev[0] == vertex ? ev[1] : ev[0];
  m.frame = edge_frame(cpx.vertex2(vertex), cpx.vertex2(other));
  m.ell = k.len[edge];
  m.d = k.d(edge, delta);
  m.t = k.t[edge];
  m.alpha = k.alpha[edge];
  m.delta = delta;
  if (!(6.0 * m.d < m.ell))
    throw std::invalid_argument("build_corner_pinch: pinch balls of the two endpoints collide");
  return m;
}

ElementaryPinchMap2D build_vertex_pinch(const SimplicialComplex& cpx, const Constants2& k,
                                        int vertex, double delta) {
  ElementaryPinchMap2D m;
  m.kind = PinchKind2D::vertex_e;
  m.vertex = vertex;
  m.frame.origin = cpx.vertex2(vertex);
  m.frame.u = Vec2(1.0, 0.0);
  m.frame.n = Vec2(0.0, 1.0);
  m.eta = k.eta[vertex];
  m.delta = delta;
  return m;
}

Vec2 sample_support(const ElementaryPinchMap2D& map, Rng& rng) {
  switch (map.kind) {
    case PinchKind2D::edge_b: {
      const double w = rng.uniform(map.d, map.ell - map.d);
      double z = rng.uniform(0.0, map.d * map.t);
      if (rng.uniform_int(0, 1)) z = -z;
      return map.frame.to_world({w, z});
    }
    case PinchKind2D::corner_a: {
      const double r = rng.uniform(0.0, 3.0 * map.d);
      const double phi = rng.uniform(-map.alpha / 3.0, map.alpha / 3.0);
      return map.frame.to_world({r * std::cos(phi), r * std::sin(phi)});
    }
    case PinchKind2D::vertex_e: {
      const double r = rng.uniform(0.0, map.eta * map.delta);
      const double phi = rng.uniform(-M_PI, M_PI);
      return map.frame.origin + r * Vec2(std::cos(phi), std::sin(phi));
    }
  }
  return map.frame.origin;
}

DisjointnessCertificate certify_disjoint_supports(const std::vector<ElementaryPinchMap2D>& maps,
                                                  int samples_per_support, unsigned long seed) {
  DisjointnessCertificate cert;
  Rng rng(seed);
  const int n = static_cast<int>(maps.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (maps[i].kind != maps[j].kind) continue;
      ++cert.pairs_checked;
      for (int s = 0; s < samples_per_support; ++s) {
        for (const auto& [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
          const Vec2 p = sample_support(maps[a], rng);
          const Vec2 q = maps[b].evaluate(p);
          if (q[0] == p[0] && q[1] == p[1]) continue;
          cert.ok = false;
          cert.first = i;
          cert.second = j;
          std::ostringstream os;
          os << kind_name(maps[a].kind) << " map " << a << " support point (" << p[0] << ", "
             << p[1] << ") is moved by map " << b;
          cert.detail = os.str();
          return cert;
        }
      }
    }
  }
  return cert;
}

Vec2 SmoothingMap2D::evaluate(Vec2 x) const {
  for (const auto& m : maps) x = m.evaluate(x);
  return x;
}

Mat2 SmoothingMap2D::jacobian(const Vec2& x) const {
  Mat2 j = Mat2::Identity();
  Vec2 p = x;
  for (const auto& m : maps) {
    j = m.jacobian(p) * j;
    p = m.evaluate(p);
  }
  return j;
}

bool SmoothingMap2D::in_support(const Vec2& x) const {
  for (const auto& m : maps)
    if (m.in_support(x)) return true;
  return false;
}

SmoothingMap2D build_xi_2d(const SimplicialComplex& cpx, const Constants2& k, double delta) {
  if (cpx.dim() != 2) throw std::invalid_argument("build_xi_2d: planar complex required");
  if (!(delta > 0.0) || !(delta < k.delta_cap))
    throw std::invalid_argument("build_xi_2d: delta outside (0, delta_cap)");
  SmoothingMap2D xi;
  xi.complex = cpx;
  xi.constants = k;
  xi.delta = delta;
  for (int e = 0; e < cpx.num_edges(); ++e) xi.maps.push_back(build_edge_pinch(cpx, k, e, delta));
  for (int e = 0; e < cpx.num_edges(); ++e)
    for (int v : cpx.edge(e)) xi.maps.push_back(build_corner_pinch(cpx, k, v, e, delta));
  for (int v = 0; v < cpx.num_vertices(); ++v)
    xi.maps.push_back(build_vertex_pinch(cpx, k, v, delta));
  xi.certificate = certify_disjoint_supports(xi.maps, 1000, 0x51e2dULL);
  if (!xi.certificate.ok)
    throw std::runtime_error("build_xi_2d: support disjointness failed: " + xi.certificate.detail);
  return xi;
}

SmoothingMap2D build_xi_2d(const SimplicialComplex& cpx, double delta) {
  return build_xi_2d(cpx, compute_constants2(cpx), delta);
}

}  // namespace pinch
