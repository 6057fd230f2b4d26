#include "pinch/supports3d.hh"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pinch/corner_clearance.hh"
#include "pinch/profiles.hh"
#include "pinch/rng.hh"

namespace pinch {

namespace {

int other_endpoint(const std::array<int, 2>& e, int v) { return e[0] == v ? e[1] : e[0]; }

int third_vertex(const std::array<int, 3>& f, int a, int b) {
  for (int v : f)
    if (v != a && v != b) return v;
  throw std::logic_error("third_vertex: degenerate face reference");
}

// the two edges of face f incident to vertex v
std::array<int, 2> face_edges_at(const SimplicialComplex& cpx, int f, int v) {
  std::array<int, 2> out{-1, -1};
  int n = 0;
  for (int e : cpx.edges_of_face(f)) {
    const auto& ev = cpx.edge(e);
    if (ev[0] == v || ev[1] == v) out[n++] = e;
  }
  if (n != 2) throw std::logic_error("face_edges_at: vertex not on face");
  return out;
}

int corner_slot(const SimplicialComplex& cpx, int f, int v) {
  const auto& fv = cpx.face(f);
  for (int j = 0; j < 3; ++j)
    if (fv[j] == v) return j;
  throw std::logic_error("corner_slot: vertex not on face");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

std::string entity(const char* kind, int id) {
  std::ostringstream os;
  os << kind << " " << id;
  return os.str();
}

}  // namespace

double FaceBump::value(const Vec3& x) const {
  const Vec3 p = frame.to_local(x);
  double v = 1.0;
  for (int i = 0; i < 3 && v > 0.0; ++i) {
    const double d = side_normal.row(i).head<2>().dot(p.head<2>()) + side_offset[i];
    v *= ramp(d, lo, hi);
  }
  return v;
}

Vec3 FaceBump::gradient(const Vec3& x) const {
  const Vec3 p = frame.to_local(x);
  double r[3], dr[3];
  for (int i = 0; i < 3; ++i) {
    const double d = side_normal.row(i).head<2>().dot(p.head<2>()) + side_offset[i];
    r[i] = ramp(d, lo, hi);
    dr[i] = ramp_deriv(d, lo, hi);
  }
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    double prod = dr[i];
    for (int j = 0; j < 3; ++j)
      if (j != i) prod *= r[j];
    g += prod * side_normal.row(i).transpose();
  }
  g[2] = 0.0;
  return frame.rot.transpose() * g;
}

FaceBump build_face_bump(const SimplicialComplex& cpx, const Constants3& k, int face,
                         double delta) {
  require(face >= 0 && face < cpx.num_faces(), "build_face_bump: face id out of range");
  require(delta > 0.0, "build_face_bump: width must be positive");
  require(2.0 * delta < k.d_face[face],
          "build_face_bump: 2 delta >= d_face at " + entity("face", face));

  const auto& fv = cpx.face(face);
  const int e0 = *std::min_element(cpx.edges_of_face(face).begin(), cpx.edges_of_face(face).end());
  const auto& ev = cpx.edge(e0);
  const int a = std::min(ev[0], ev[1]);
  const int b = other_endpoint(ev, a);
  const int c = third_vertex(fv, a, b);

  FaceBump bump;
  bump.face = face;
  bump.frame = corner_frame(cpx.vertex3(a), cpx.vertex3(b), cpx.vertex3(c));
  const double t = std::tan(k.omega_face[face] / 3.0);
  bump.lo = t * delta / 32.0;
  bump.hi = t * delta / 16.0;

  const std::array<int, 3> corner_ids = {a, b, c};
  for (int i = 0; i < 3; ++i) bump.corner.col(i) = bump.frame.to_local(cpx.vertex3(corner_ids[i]));
  for (int i = 0; i < 3; ++i) {
    const Vec3 p = bump.corner.col((i + 1) % 3);
    const Vec3 q = bump.corner.col((i + 2) % 3);
    const Vec3 opp = bump.corner.col(i);
    Vec2 n(-(q - p).y(), (q - p).x());
    n.normalize();
    if (n.dot((opp - p).head<2>()) < 0.0) n = -n;
    bump.side_normal.row(i) << n.x(), n.y(), 0.0;
    bump.side_offset[i] = -n.dot(p.head<2>());
  }
  return bump;
}

bool support_membership(const SupportSet& set, const Vec3& x) {
  if (set.family == SupportRegion3D::face_slab) {
    const double lam = set.bump.value(x);
    if (lam <= 0.0) return false;
    const double p3 = set.frame.to_local(x).z();
    return std::abs(p3) < set.thickness * lam;
  }
  const Vec3 p = set.frame.to_local(x);
  const double y = p.x();
  const double r = std::hypot(p.y(), p.z());
  if (set.open) {
    if (!(y > set.y_min && y < set.y_max)) return false;
  } else {
    if (!(y >= set.y_min && y <= set.y_max)) return false;
  }
  double rmax = set.radius;
  if (set.family == SupportRegion3D::corner_wedge || set.family == SupportRegion3D::corner_cone)
    rmax = set.slope * y;
  if (set.open) {
    if (!(r > 0.0 && r < rmax)) return false;
  } else {
    if (!(r <= rmax)) return false;
  }
  if (set.half_angle >= 0.0) {
    const double phi = (r > 0.0) ? std::atan2(p.z(), p.y()) : 0.0;
    if (!(std::abs(phi) <= set.half_angle)) return false;
  }
  return true;
}

double support_slack(const SupportSet& set, const Vec3& x) {
  if (set.family == SupportRegion3D::face_slab) {
    const double lam = set.bump.value(x);
    if (lam <= 0.0) return 0.0;
    const double p3 = set.frame.to_local(x).z();
    return std::max(0.0, set.thickness * lam - std::abs(p3));
  }
  const Vec3 p = set.frame.to_local(x);
  const double y = p.x();
  const double r = std::hypot(p.y(), p.z());
  double rmax = set.radius;
  if (set.family == SupportRegion3D::corner_wedge || set.family == SupportRegion3D::corner_cone)
    rmax = set.slope * y;
  double s = std::min(y - set.y_min, set.y_max - y);
  s = std::min(s, rmax - r);
  if (set.open) s = std::min(s, r);
  if (set.half_angle >= 0.0 && r > 0.0) {
    const double phi = std::atan2(p.z(), p.y());
    s = std::min(s, r * std::sin(std::min(set.half_angle - std::abs(phi), M_PI / 2.0)));
  }
  return std::max(0.0, s);
}

Vec3 sample_support_set(const SupportSet& set, Rng& rng) {
  if (set.family == SupportRegion3D::face_slab) {
    // half the draws target the ramp annulus of the nearest side, where the
    // envelope tapers and neighbor overlap would have to show up
    Vec3 p = Vec3::Zero();
    double lam = 0.0;
    for (int attempt = 0; attempt < 64 && lam <= 0.0; ++attempt) {
      if (attempt % 2 == 0) {
        const Vec3 w = rng.barycentric<3>();
        p = set.bump.corner * w;
      } else {
        const int side = rng.uniform_int(0, 2);
        const Vec3 a = set.bump.corner.col((side + 1) % 3);
        const Vec3 b = set.bump.corner.col((side + 2) % 3);
        const double u = rng.uniform(0.1, 0.9);
        const double d = rng.uniform(set.bump.lo, set.bump.hi);
        p = a + u * (b - a) + d * set.bump.side_normal.row(side).transpose();
      }
      double v = 1.0;
      for (int i = 0; i < 3; ++i) {
        const double di = set.bump.side_normal.row(i).head<2>().dot(p.head<2>()) +
                          set.bump.side_offset[i];
        v *= ramp(di, set.bump.lo, set.bump.hi);
      }
      lam = v;
    }
    if (lam <= 0.0) {
      p = set.bump.corner.rowwise().mean();
      lam = set.bump.value(set.frame.to_world(p));
    }
    const double m = set.thickness * lam;
    p.z() = rng.uniform(-m, m);
    return set.frame.to_world(p);
  }

  const double y = rng.uniform(set.y_min, set.y_max);
  double rmax = set.radius;
  if (set.family == SupportRegion3D::corner_wedge || set.family == SupportRegion3D::corner_cone)
    rmax = set.slope * y;
  const double r = rmax * std::sqrt(rng.uniform(0.0, 1.0));
  const double a = (set.half_angle >= 0.0) ? set.half_angle : M_PI;
  const double phi = rng.uniform(-a, a);
  return set.frame.to_world(Vec3(y, r * std::cos(phi), r * std::sin(phi)));
}

namespace {

void finish_bounds(SupportSet& s, const Vec3& apex_or_mid, double reach) {
  s.center = apex_or_mid;
  s.bound = reach;
}

}  // namespace

SupportSet corner_wedge_region(const SimplicialComplex& cpx, const Constants3& k, int face,
                               int edge, int vertex, double delta, double alpha) {
  require(3.0 * delta < k.d_vertex[vertex],
          "corner_wedge_region: 3 delta >= d_vertex at " + entity("vertex", vertex));
  require(alpha > 0.0, "corner_wedge_region: pinch angle must be positive");
  const auto& ev = cpx.edge(edge);
  require(ev[0] == vertex || ev[1] == vertex, "corner_wedge_region: vertex not on edge");
  const int b = other_endpoint(ev, vertex);
  const int c = third_vertex(cpx.face(face), vertex, b);

  SupportSet s;
  s.family = SupportRegion3D::corner_wedge;
  s.face = face;
  s.edge = edge;
  s.vertex = vertex;
  s.frame = corner_frame(cpx.vertex3(vertex), cpx.vertex3(b), cpx.vertex3(c));
  s.delta = delta;
  s.y_min = 0.0;
  s.y_max = delta;
  const double theta = k.corner_angle(face, corner_slot(cpx, face, vertex));
  s.slope = std::tan(15.0 * theta / 16.0);
  s.half_angle = alpha;
  finish_bounds(s, cpx.vertex3(vertex), delta * std::hypot(1.0, s.slope) + 1e-12);
  return s;
}

SupportSet corner_cone_region(const SimplicialComplex& cpx, const Constants3& k, int edge,
                              int slot, double delta) {
  const auto& ev = cpx.edge(edge);
  const int vertex = ev[slot];
  require(4.0 * delta < k.d_vertex[vertex],
          "corner_cone_region: 4 delta >= d_vertex at " + entity("vertex", vertex));
  const int b = other_endpoint(ev, vertex);
  const int f0 = cpx.faces_of_edge(edge).front();
  const int c = third_vertex(cpx.face(f0), ev[0], ev[1]);

  SupportSet s;
  s.family = SupportRegion3D::corner_cone;
  s.edge = edge;
  s.vertex = vertex;
  s.frame = corner_frame(cpx.vertex3(vertex), cpx.vertex3(b), cpx.vertex3(c));
  s.delta = delta;
  s.y_min = 0.0;
  s.y_max = delta;
  s.slope = std::tan(k.theta_vertex[vertex] / 3.0);
  s.half_angle = -1.0;
  s.open = true;
  finish_bounds(s, cpx.vertex3(vertex), delta * std::hypot(1.0, s.slope) + 1e-12);
  return s;
}

SupportSet edge_band_region(const SimplicialComplex& cpx, const Constants3& k, int face,
                            int edge, double delta) {
  require(4.0 * delta < k.d_edge[edge],
          "edge_band_region: 4 delta >= d_edge at " + entity("edge", edge));
  const auto& ev = cpx.edge(edge);
  const int a = std::min(ev[0], ev[1]);
  const int b = other_endpoint(ev, a);
  const int c = third_vertex(cpx.face(face), a, b);
  const double ell = cpx.edge_length(edge);

  SupportSet s;
  s.family = SupportRegion3D::edge_band;
  s.face = face;
  s.edge = edge;
  s.frame = corner_frame(cpx.vertex3(a), cpx.vertex3(b), cpx.vertex3(c));
  s.delta = delta;
  s.y_min = delta / 4.0;
  s.y_max = ell - delta / 4.0;
  s.radius = (delta / 4.0) * std::tan(k.theta_edge[edge] / 3.0);
  s.half_angle = k.omega_edge[edge] / 3.0;
  finish_bounds(s, 0.5 * (cpx.vertex3(a) + cpx.vertex3(b)), ell / 2.0 + delta);
  return s;
}

SupportSet edge_tube_region(const SimplicialComplex& cpx, const Constants3& k, int edge,
                            double delta) {
  require(delta < k.d_edge[edge],
          "edge_tube_region: delta >= d_edge at " + entity("edge", edge));
  const auto& ev = cpx.edge(edge);
  const int a = std::min(ev[0], ev[1]);
  const int b = other_endpoint(ev, a);
  const int f0 = cpx.faces_of_edge(edge).front();
  const int c = third_vertex(cpx.face(f0), ev[0], ev[1]);
  const double ell = cpx.edge_length(edge);

  SupportSet s;
  s.family = SupportRegion3D::edge_tube;
  s.edge = edge;
  s.frame = corner_frame(cpx.vertex3(a), cpx.vertex3(b), cpx.vertex3(c));
  s.delta = delta;
  s.y_min = delta / 4.0;
  s.y_max = ell - delta / 4.0;
  s.radius = (delta / 4.0) * std::tan(k.theta_edge[edge] / 3.0);
  s.half_angle = -1.0;
  finish_bounds(s, 0.5 * (cpx.vertex3(a) + cpx.vertex3(b)), ell / 2.0 + delta);
  return s;
}

SupportSet face_slab_region(const SimplicialComplex& cpx, const Constants3& k, int face,
                            double delta) {
  SupportSet s;
  s.family = SupportRegion3D::face_slab;
  s.face = face;
  s.delta = delta;
  s.bump = build_face_bump(cpx, k, face, delta);
  s.frame = s.bump.frame;
  const double t = std::tan(k.omega_face[face] / 3.0);
  s.thickness = 0.5 * delta * t;
  const auto& fv = cpx.face(face);
  const Vec3 c = (cpx.vertex3(fv[0]) + cpx.vertex3(fv[1]) + cpx.vertex3(fv[2])) / 3.0;
  double reach = 0.0;
  for (int v : fv) reach = std::max(reach, (cpx.vertex3(v) - c).norm());
  finish_bounds(s, c, reach + delta);
  return s;
}

std::vector<double> corner_pinch_angles(const SimplicialComplex& cpx, const Constants3& k,
                                        const std::vector<double>& delta_vertex) {
  std::vector<double> alpha(cpx.num_vertices());
  for (int v = 0; v < cpx.num_vertices(); ++v)
    alpha[v] = compute_corner_angle(cpx, k, v, delta_vertex[v]);
  for (int f = 0; f < cpx.num_faces(); ++f) {
    for (int j = 0; j < 3; ++j) {
      const int v = cpx.face(f)[j];
      const auto ee = face_edges_at(cpx, f, v);
      const double omega = std::min(k.omega_edge[ee[0]], k.omega_edge[ee[1]]);
      const double slope = std::tan(15.0 * k.corner_angle(f, j) / 16.0);
      const double ratio = std::tan(omega) / slope;
      if (ratio < 1.0) alpha[v] = std::min(alpha[v], std::asin(ratio));
    }
  }
  return alpha;
}

std::vector<double> corner_pinch_angles(const SimplicialComplex& cpx, const Constants3& k,
                                        double delta) {
  return corner_pinch_angles(cpx, k, std::vector<double>(cpx.num_vertices(), delta));
}

std::vector<SupportSet> all_support_regions(const SimplicialComplex& cpx, const Constants3& k,
                                            double delta,
                                            const std::vector<double>& alpha_vertex) {
  std::vector<SupportSet> out;
  for (int f = 0; f < cpx.num_faces(); ++f)
    for (int j = 0; j < 3; ++j) {
      const int v = cpx.face(f)[j];
      for (int e : face_edges_at(cpx, f, v))
        out.push_back(corner_wedge_region(cpx, k, f, e, v, delta, alpha_vertex[v]));
    }
  for (int e = 0; e < cpx.num_edges(); ++e)
    for (int slot = 0; slot < 2; ++slot)
      out.push_back(corner_cone_region(cpx, k, e, slot, delta));
  for (int f = 0; f < cpx.num_faces(); ++f)
    for (int e : cpx.edges_of_face(f)) out.push_back(edge_band_region(cpx, k, f, e, delta));
  for (int e = 0; e < cpx.num_edges(); ++e) out.push_back(edge_tube_region(cpx, k, e, delta));
  for (int f = 0; f < cpx.num_faces(); ++f)
    out.push_back(face_slab_region(cpx, k, f, delta * std::tan(k.omega_face[f] / 3.0)));
  return out;
}

namespace {

std::string describe(const SupportSet& s) {
  std::ostringstream os;
  switch (s.family) {
    case SupportRegion3D::corner_wedge:
      os << "corner_wedge(face " << s.face << ", edge " << s.edge << ", vertex " << s.vertex
         << ")";
      break;
    case SupportRegion3D::corner_cone:
      os << "corner_cone(edge " << s.edge << ", vertex " << s.vertex << ")";
      break;
    case SupportRegion3D::edge_band:
      os << "edge_band(face " << s.face << ", edge " << s.edge << ")";
      break;
    case SupportRegion3D::edge_tube:
      os << "edge_tube(edge " << s.edge << ")";
      break;
    case SupportRegion3D::face_slab:
      os << "face_slab(face " << s.face << ")";
      break;
  }
  return os.str();
}

// shared vertices of the two faces, used by the wedge pair rule
std::vector<int> shared_face_vertices(const SimplicialComplex& cpx, int f1, int f2) {
  std::vector<int> out;
  for (int v : cpx.face(f1))
    for (int w : cpx.face(f2))
      if (v == w) out.push_back(v);
  return out;
}

enum class PairRule { skip, empty, within_edge, wedge_shared };

PairRule pair_rule(const SupportSet& a, const SupportSet& b) {
  if (a.family != b.family) return PairRule::skip;
  switch (a.family) {
    case SupportRegion3D::corner_wedge:
      if (a.face == b.face) return PairRule::skip;
      if (a.vertex != b.vertex) return PairRule::skip;
      return PairRule::wedge_shared;
    case SupportRegion3D::corner_cone:
      return (a.edge == b.edge && a.vertex == b.vertex) ? PairRule::skip : PairRule::empty;
    case SupportRegion3D::edge_band:
      if (a.edge == b.edge)
        return (a.face == b.face) ? PairRule::skip : PairRule::within_edge;
      return PairRule::empty;
    case SupportRegion3D::edge_tube:
      return (a.edge == b.edge) ? PairRule::skip : PairRule::empty;
    case SupportRegion3D::face_slab:
      return (a.face == b.face) ? PairRule::skip : PairRule::empty;
  }
  return PairRule::skip;
}

void record(RegionCertificate& cert, double depth, const std::string& what) {
  ++cert.violations;
  if (depth > cert.max_violation) cert.max_violation = depth;
  if (cert.detail.empty()) cert.detail = what;
  cert.ok = false;
}

}  // namespace

RegionCertificate certify_support_disjointness(const SimplicialComplex& cpx,
                                               const std::vector<SupportSet>& sets,
                                               int samples_per_set, std::uint64_t seed,
                                               double tol) {
  RegionCertificate cert;
  const int n = static_cast<int>(sets.size());
  std::vector<std::vector<Vec3>> samples(n);
  {
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
      samples[i].reserve(samples_per_set);
      for (int s = 0; s < samples_per_set; ++s) samples[i].push_back(sample_support_set(sets[i], rng));
      cert.samples += samples_per_set;
    }
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const PairRule rule = pair_rule(sets[i], sets[j]);
      if (rule == PairRule::skip) continue;
      if ((sets[i].center - sets[j].center).norm() > sets[i].bound + sets[j].bound) continue;
      ++cert.pairs_checked;
      for (int dir = 0; dir < 2; ++dir) {
        const SupportSet& holder = dir == 0 ? sets[i] : sets[j];
        const SupportSet& other = dir == 0 ? sets[j] : sets[i];
        for (const Vec3& x : samples[dir == 0 ? i : j]) {
          if (!support_membership(other, x)) continue;
          double depth = 0.0;
          std::ostringstream os;
          if (rule == PairRule::empty) {
            depth = std::min(support_slack(holder, x), support_slack(other, x));
            os << describe(holder) << " meets " << describe(other);
          } else if (rule == PairRule::within_edge) {
            const auto& ev = cpx.edge(holder.edge);
            const double d =
                dist_point_segment(x, cpx.vertex3(ev[0]), cpx.vertex3(ev[1]));
            if (d <= tol) continue;
            depth = d;
            os << describe(holder) << " and " << describe(other)
               << " overlap off their shared edge, distance " << d;
          } else {  // wedge_shared
            const auto shared = shared_face_vertices(cpx, holder.face, other.face);
            double d = 0.0;
            if (shared.size() >= 2)
              d = dist_point_segment(x, cpx.vertex3(shared[0]), cpx.vertex3(shared[1]));
            else
              d = (x - cpx.vertex3(holder.vertex)).norm();
            const double reach = 2.0 * std::max(holder.delta, other.delta);
            const double ball = (x - cpx.vertex3(holder.vertex)).norm();
            if (d <= tol && ball <= reach + tol) continue;
            depth = std::max(d, ball - reach);
            os << describe(holder) << " and " << describe(other)
               << " overlap outside the shared subsimplex collar, distance " << d
               << ", vertex distance " << ball;
          }
          os << " at (" << x.transpose() << ")";
          record(cert, depth, os.str());
          break;  // one witness per direction per pair keeps the report short
        }
      }
    }
  }
  return cert;
}

RegionCertificate certify_support_containment(const SimplicialComplex& cpx,
                                              const std::vector<SupportSet>& sets,
                                              int samples_per_set, std::uint64_t seed,
                                              double tol) {
  RegionCertificate cert;
  Rng rng(seed);
  for (const SupportSet& s : sets) {
    double collar = s.delta;
    if (s.family == SupportRegion3D::edge_band || s.family == SupportRegion3D::edge_tube)
      collar = s.delta / 4.0;
    double worst = 0.0;
    Vec3 worst_x = Vec3::Zero();
    for (int n = 0; n < samples_per_set; ++n) {
      const Vec3 x = sample_support_set(s, rng);
      ++cert.samples;
      double d = 0.0;
      if (s.family == SupportRegion3D::corner_wedge || s.family == SupportRegion3D::face_slab) {
        const auto& fv = cpx.face(s.face);
        d = dist_point_triangle(x, cpx.vertex3(fv[0]), cpx.vertex3(fv[1]), cpx.vertex3(fv[2]));
      } else {
        const auto& ev = cpx.edge(s.edge);
        d = dist_point_segment(x, cpx.vertex3(ev[0]), cpx.vertex3(ev[1]));
      }
      if (d > collar + tol && d - collar > worst) {
        worst = d - collar;
        worst_x = x;
      }
    }
    if (worst > 0.0) {
      std::ostringstream os;
      os << describe(s) << " leaves its collar by " << worst << " at (" << worst_x.transpose()
         << ")";
      record(cert, worst, os.str());
    }
  }
  return cert;
}

}  // namespace pinch
