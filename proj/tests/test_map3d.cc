#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pinch/map3d.hh"
#include "pinch/rng.hh"
#include "pinch/supports3d.hh"

using namespace pinch;

namespace {

SimplicialComplex make3d(const std::vector<Vec3>& pts, const std::vector<std::array<int, 4>>& tets) {
  MatX v(pts.size(), 3);
  for (size_t i = 0; i < pts.size(); ++i) v.row(i) = pts[i].transpose();
  Eigen::MatrixXi c(tets.size(), 4);
  for (size_t i = 0; i < tets.size(); ++i)
    for (int j = 0; j < 4; ++j) c(static_cast<int>(i), j) = tets[i][j];
  return SimplicialComplex(3, std::move(v), std::move(c));
}

// unit cube cut into six tetrahedra along vertex-order chains from 0 to 7
SimplicialComplex kuhn_cube() {
  std::vector<Vec3> pts;
  for (int b = 0; b < 8; ++b) pts.push_back(Vec3(b & 1, (b >> 1) & 1, (b >> 2) & 1));
  const int steps[6][2] = {{1, 2}, {1, 4}, {2, 1}, {2, 4}, {4, 1}, {4, 2}};
  std::vector<std::array<int, 4>> tets;
  for (const auto& s : steps) tets.push_back({0, s[0], s[0] | s[1], 7});
  auto cpx = make3d(pts, tets);
  // make3d keeps the listed order; reorder negatively oriented cells
  Eigen::MatrixXi cells = cpx.cells();
  for (int i = 0; i < cells.rows(); ++i) {
    Eigen::Matrix3d M;
    for (int j = 0; j < 3; ++j)
      M.col(j) = Vec3(cpx.vertex3(cells(i, j + 1)) - cpx.vertex3(cells(i, 0)));
    if (M.determinant() < 0) std::swap(cells(i, 2), cells(i, 3));
  }
  return SimplicialComplex(3, cpx.vertices(), cells);
}

SimplicialComplex regular_tet() {
  return make3d({{0, 0, 0},
                 {1, 0, 0},
                 {0.5, std::sqrt(3.0) / 2.0, 0},
                 {0.5, std::sqrt(3.0) / 6.0, std::sqrt(2.0 / 3.0)}},
                {{0, 1, 2, 3}});
}

double edge_clearance(const SimplicialComplex& cpx, const Vec3& x) {
  double d = 1e30;
  for (int e = 0; e < cpx.num_edges(); ++e)
    d = std::min(d, dist_point_segment(x, cpx.vertex3(cpx.edge(e)[0]), cpx.vertex3(cpx.edge(e)[1])));
  return d;
}

double face_clearance(const SimplicialComplex& cpx, const Vec3& x) {
  double d = 1e30;
  for (int f = 0; f < cpx.num_faces(); ++f) {
    const auto& fv = cpx.face(f);
    d = std::min(d, dist_point_triangle(x, cpx.vertex3(fv[0]), cpx.vertex3(fv[1]),
                                        cpx.vertex3(fv[2])));
  }
  return d;
}

// The elementary maps are C1 but only piecewise C2: the pinch profile's
// curvature jumps on the owning subsimplex (r = 0 axis resp. the face plane)
// and at the ramp seams, so a centered stencil is meaningful only where it
// stays clear of those loci and inside the support.  The clearance margins
// and per-kind steps below keep the truncation error under the tolerance.
bool fd_point_ok(const ElementaryPinchMap3D& m, const Vec3& x, double h) {
  for (int cx = -1; cx <= 1; cx += 2)
    for (int cy = -1; cy <= 1; cy += 2)
      for (int cz = -1; cz <= 1; cz += 2)
        if (!m.in_support(x + 4.0 * h * Vec3(cx, cy, cz))) return false;
  const Vec3 p = m.frame.to_local(x);
  const double r = std::hypot(p[1], p[2]);
  switch (m.kind) {
    case PinchKind3D::corner_wedge: {
      const double phi = std::atan2(p[2], p[1]);
      return r > 0.05 * 3.0 * m.t * m.delta && std::abs(phi) > 0.05 * m.alpha;
    }
    case PinchKind3D::edge_band: {
      const double phi = std::atan2(p[2], p[1]);
      return r > 0.05 * m.delta * m.t / 4.0 && std::abs(phi) > 0.05 * m.alpha;
    }
    case PinchKind3D::corner_cone:
      return r > 0.05 * m.t * m.delta;
    case PinchKind3D::edge_tube:
      return r > 0.05 * m.delta * m.t / 4.0;
    case PinchKind3D::vertex_ball:
      return (x - m.frame.origin).norm() > 0.05 * m.delta;
    case PinchKind3D::face_slab:
      return std::abs(p[2]) > 0.1 * m.width;
  }
  return false;
}

void check_elementary_fd(const SmoothingMap3D& xi) {
  Rng rng(31);
  double worst_slab = 0.0, worst_other = 0.0;
  for (const auto& m : xi.maps) {
    const bool slab = m.kind == PinchKind3D::face_slab;
    const double h = slab ? 1e-9 : 1e-8;
    for (int s = 0; s < 300; ++s) {
      const Vec3 x = sample_support(m, rng);
      if (!fd_point_ok(m, x, h)) continue;
      Mat3 fd;
      for (int c = 0; c < 3; ++c) {
        Vec3 dx = Vec3::Zero();
        dx[c] = h;
        fd.col(c) = (m.evaluate(x + dx) - m.evaluate(x - dx)) / (2.0 * h);
      }
      const double err = (m.jacobian(x) - fd).norm();
      (slab ? worst_slab : worst_other) = std::max(slab ? worst_slab : worst_other, err);
    }
  }
  CHECK(worst_other < 5e-7);
  CHECK(worst_slab < 3e-6);
}

void check_chain_fd(const SmoothingMap3D& xi, double delta) {
  const auto& cpx = xi.complex;
  const Vec3 lo = cpx.vertices().colwise().minCoeff().transpose();
  const Vec3 hi = cpx.vertices().colwise().maxCoeff().transpose();
  const double h = 1e-7;
  Rng rng(53);
  double worst = 0.0;
  int tested = 0;
  for (int s = 0; s < 60000 && tested < 400; ++s) {
    const Vec3 x(rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]), rng.uniform(lo[2], hi[2]));
    if (edge_clearance(cpx, x) < 0.02 * delta || face_clearance(cpx, x) < 0.01 * delta) continue;
    // walk the orbit and drop stencils that straddle a support boundary
    bool shell = false;
    Vec3 p = x;
    for (const auto& m : xi.maps) {
      for (int cx = -1; cx <= 1 && !shell; cx += 2)
        for (int cy = -1; cy <= 1 && !shell; cy += 2)
          for (int cz = -1; cz <= 1 && !shell; cz += 2)
            if (m.in_support(p + 8.0 * h * Vec3(cx, cy, cz)) != m.in_support(p)) shell = true;
      if (shell) break;
      p = m.evaluate(p);
    }
    if (shell) continue;
    ++tested;
    Mat3 fd;
    for (int c = 0; c < 3; ++c) {
      Vec3 dx = Vec3::Zero();
      dx[c] = h;
      fd.col(c) = (xi.evaluate(x + dx) - xi.evaluate(x - dx)) / (2.0 * h);
    }
    worst = std::max(worst, (xi.jacobian(x) - fd).norm());
  }
  CHECK(tested >= 200);
  CHECK(worst < 1e-7);
}

double sampled_sup_jacobian(const SmoothingMap3D& xi) {
  Rng rng(17);
  double sup = 0.0;
  for (const auto& m : xi.maps)
    for (int i = 0; i < 300; ++i)
      sup = std::max(sup, xi.jacobian(sample_support(m, rng)).norm());
  return sup;
}

void check_skeleton_preserved(const SmoothingMap3D& xi) {
  const auto& cpx = xi.complex;
  Rng rng(11);
  for (int v = 0; v < cpx.num_vertices(); ++v) {
    const Vec3 s = cpx.vertex3(v);
    const Vec3 y = xi.evaluate(s);
    CHECK(y[0] == s[0]);
    CHECK(y[1] == s[1]);
    CHECK(y[2] == s[2]);
    CHECK(xi.jacobian(s).norm() == 0.0);
  }
  for (int e = 0; e < cpx.num_edges(); ++e) {
    const auto& ev = cpx.edge(e);
    const Vec3 a = cpx.vertex3(ev[0]), b = cpx.vertex3(ev[1]);
    const Vec3 u = (b - a).normalized();
    for (int i = 0; i < 100; ++i) {
      const Vec3 x = a + rng.uniform(0.0, 1.0) * (b - a);
      const Vec3 y = xi.evaluate(x);
      CHECK((y - a - (y - a).dot(u) * u).norm() < 1e-12);
      const double proj = (y - a).dot(u);
      CHECK(proj > -1e-12);
      CHECK(proj < (b - a).norm() + 1e-12);
    }
  }
  for (int f = 0; f < cpx.num_faces(); ++f) {
    const auto& fv = cpx.face(f);
    const Vec3 a = cpx.vertex3(fv[0]), b = cpx.vertex3(fv[1]), c = cpx.vertex3(fv[2]);
    const Vec3 n = (b - a).cross(c - a).normalized();
    for (int i = 0; i < 100; ++i) {
      const Vec3 w = rng.barycentric<3>();
      const Vec3 x = w[0] * a + w[1] * b + w[2] * c;
      const Vec3 y = xi.evaluate(x);
      CHECK(std::abs((y - a).dot(n)) < 1e-12);
      CHECK(dist_point_triangle(y, a, b, c) < 1e-12);
    }
  }
}

void check_identity_outside_collar(const SmoothingMap3D& xi, double delta) {
  const auto& cpx = xi.complex;
  const Vec3 lo = cpx.vertices().colwise().minCoeff().transpose();
  const Vec3 hi = cpx.vertices().colwise().maxCoeff().transpose();
  Rng rng(7);
  int tested = 0;
  for (int s = 0; s < 200000 && tested < 1000; ++s) {
    const Vec3 x(rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]), rng.uniform(lo[2], hi[2]));
    if (face_clearance(cpx, x) <= 1.25 * delta) continue;
    ++tested;
    const Vec3 y = xi.evaluate(x);
    CHECK(y[0] == x[0]);
    CHECK(y[1] == x[1]);
    CHECK(y[2] == x[2]);
    CHECK_FALSE(xi.in_support(x));
  }
  CHECK(tested >= 100);
}

}  // namespace

TEST_CASE("azimuth pinch half-angles") {
  auto kuhn = kuhn_cube();
  auto kk = compute_constants3(kuhn);
  const auto ak = corner_pinch_angles(kuhn, kk, 0.1);
  REQUIRE(ak.size() == 8);
  for (int v = 0; v < 8; ++v) {
    const double want = (v == 0 || v == 7) ? 0.094231621 : 0.098651339;
    CHECK(ak[v] == doctest::Approx(want).epsilon(1e-8));
  }
  // at the six middle vertices the side-plane cap binds: the right face
  // corners there have in-plane envelope slope tan(15 pi / 32) against the
  // pi/4 clearance of the corner's sides
  CHECK(ak[1] == doctest::Approx(std::asin(1.0 / std::tan(15.0 * M_PI / 32.0))).epsilon(1e-12));
  // scale invariance of the construction in the admissible range
  const auto ak2 = corner_pinch_angles(kuhn, kk, 0.05);
  for (int v = 0; v < 8; ++v) CHECK(ak2[v] == doctest::Approx(ak[v]).epsilon(1e-12));

  auto tet = regular_tet();
  auto kt = compute_constants3(tet);
  const auto at = corner_pinch_angles(tet, kt, 0.1);
  for (double a : at) CHECK(a == doctest::Approx(M_PI / 24.0).epsilon(1e-12));
}

TEST_CASE("elementary map landmarks") {
  auto cpx = regular_tet();
  auto k = compute_constants3(cpx);
  const double delta = 0.1;

  SUBCASE("vertex ball") {
    auto g = build_vertex_ball_pinch(cpx, k, 1, delta);
    const Vec3 s = cpx.vertex3(1);
    const Vec3 fixed = g.evaluate(s);
    CHECK(fixed[0] == s[0]);
    CHECK(fixed[1] == s[1]);
    CHECK(fixed[2] == s[2]);
    CHECK(g.jacobian(s).norm() == 0.0);
    const Vec3 dir = Vec3(2, -1, 2).normalized();
    const Vec3 half = g.evaluate(s + 0.5 * delta * dir);
    CHECK((half - s).norm() == doctest::Approx(3.0 * delta / 8.0).epsilon(1e-13));
    CHECK((half - s).normalized().dot(dir) == doctest::Approx(1.0).epsilon(1e-13));
    const Vec3 out = s + 1.1 * delta * dir;
    const Vec3 id = g.evaluate(out);
    CHECK(id[0] == out[0]);
    CHECK(id[1] == out[1]);
    CHECK(id[2] == out[2]);
  }

  SUBCASE("edge tube") {
    const int e = cpx.find_edge(0, 1);
    auto w = build_edge_tube_pinch(cpx, k, e, delta);
    const double radius = delta * w.t / 4.0;
    // points on the edge are fixed and the cross-section contracts through
    // the cubic profile where the lengthwise weight is 1
    const Vec3 mid = w.frame.to_world({0.5 * w.ell, 0.0, 0.0});
    CHECK((w.evaluate(mid) - mid).norm() <= 1e-15);
    const Vec3 x = w.frame.to_world({0.5 * w.ell, 0.5 * radius, 0.0});
    const Vec3 p = w.frame.to_local(w.evaluate(x));
    CHECK(p[0] == doctest::Approx(0.5 * w.ell).epsilon(1e-13));
    CHECK(p[1] == doctest::Approx(3.0 * radius / 8.0).epsilon(1e-12));
    CHECK(std::abs(p[2]) < 1e-15);
    const Vec3 out = w.frame.to_world({0.5 * w.ell, 1.01 * radius, 0.0});
    const Vec3 id = w.evaluate(out);
    CHECK(id[0] == out[0]);
    CHECK(id[1] == out[1]);
    CHECK(id[2] == out[2]);
  }

  SUBCASE("corner cone") {
    const int e = cpx.find_edge(0, 2);
    const int slot = cpx.edge(e)[0] == 0 ? 0 : 1;
    auto H = build_corner_cone_pinch(cpx, k, e, slot, delta);
    // on the edge: fixed; at a quarter of the width, deep inside the ramp,
    // the radius maps through the profile of width t y
    const Vec3 on = H.frame.to_world({0.3 * delta, 0.0, 0.0});
    CHECK((H.evaluate(on) - on).norm() <= 1e-15);
    const double y = 0.25 * delta;
    const double ty = H.t * y;
    const Vec3 x = H.frame.to_world({y, 0.0, 0.5 * ty});
    const Vec3 p = H.frame.to_local(H.evaluate(x));
    CHECK(p[0] == doctest::Approx(y).epsilon(1e-13));
    CHECK(std::abs(p[1]) < 1e-15);
    CHECK(p[2] == doctest::Approx(3.0 * ty / 8.0).epsilon(1e-12));
  }

  SUBCASE("edge band and corner wedge keep their zero-azimuth ray") {
    const int f = cpx.find_face(0, 1, 2);
    const int e = cpx.find_edge(0, 1);
    auto b = build_edge_band_pinch(cpx, k, f, e, delta);
    auto h = build_corner_wedge_pinch(cpx, k, f, e, 0, delta, M_PI / 24.0);
    for (double r : {0.2 * delta * b.t / 4.0, 0.8 * delta * b.t / 4.0}) {
      const Vec3 x = b.frame.to_world({0.5 * b.ell, r, 0.0});
      CHECK((b.evaluate(x) - x).norm() <= 1e-15);
    }
    for (double y : {0.3 * delta, 0.8 * delta}) {
      const Vec3 x = h.frame.to_world({y, 0.5 * h.t * y, 0.0});
      CHECK((h.evaluate(x) - x).norm() <= 1e-15);
    }
    // band azimuth at full lengthwise weight and small radius follows the
    // angular profile: half the half-angle lands at 3/8 of it
    const double r0 = 0.05 * delta * b.t / 4.0;
    const double phi = 0.5 * b.alpha;
    const Vec3 x = b.frame.to_world({0.5 * b.ell, r0 * std::cos(phi), r0 * std::sin(phi)});
    const Vec3 p = b.frame.to_local(b.evaluate(x));
    CHECK(std::atan2(p[2], p[1]) == doctest::Approx(3.0 * b.alpha / 8.0).epsilon(1e-12));
    CHECK(std::hypot(p[1], p[2]) == doctest::Approx(r0).epsilon(1e-12));
  }

  SUBCASE("face slab") {
    const int f = cpx.find_face(0, 1, 2);
    const double stage = delta * std::tan(k.omega_face[f] / 3.0);
    auto s = build_face_slab_pinch(cpx, k, f, stage);
    const Vec3 centroid =
        (cpx.vertex3(0) + cpx.vertex3(1) + cpx.vertex3(2)) / 3.0;
    CHECK(s.bump.value(centroid) == doctest::Approx(1.0).epsilon(1e-12));
    const Vec3 n = s.frame.rot.row(2).transpose();
    const Vec3 x = centroid + 0.5 * s.width * n;
    const Vec3 y = s.evaluate(x);
    CHECK((y - centroid - (y - centroid).dot(n) * n).norm() < 1e-13);
    CHECK(std::abs((y - centroid).dot(n)) == doctest::Approx(3.0 * s.width / 8.0).epsilon(1e-12));
    const Vec3 out = centroid + 1.01 * s.width * n;
    const Vec3 id = s.evaluate(out);
    CHECK(id[0] == out[0]);
    CHECK(id[1] == out[1]);
    CHECK(id[2] == out[2]);
  }
}

TEST_CASE("face plateau weight") {
  auto cpx = regular_tet();
  auto k = compute_constants3(cpx);
  const int f = cpx.find_face(0, 1, 2);
  const double stage = 0.1 * std::tan(k.omega_face[f] / 3.0);
  auto bump = build_face_bump(cpx, k, f, stage);
  CHECK(bump.hi == doctest::Approx(2.0 * bump.lo).epsilon(1e-14));

  const Vec3 centroid = (cpx.vertex3(0) + cpx.vertex3(1) + cpx.vertex3(2)) / 3.0;
  CHECK(bump.value(centroid) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bump.gradient(centroid).norm() == 0.0);
  // zero on the sides and outside the in-plane footprint; the weight reads
  // only the in-plane coordinates, so the apex, which projects onto the
  // centroid, sees the plateau
  CHECK(bump.value(0.5 * (cpx.vertex3(0) + cpx.vertex3(1))) == 0.0);
  CHECK(bump.value(Vec3(0.5, -std::sqrt(3.0) / 2.0, 0.0)) == 0.0);
  CHECK(bump.value(cpx.vertex3(3)) == doctest::Approx(1.0).epsilon(1e-12));

  // in the ramp ring of one side the gradient matches finite differences
  const Vec3 inward = (centroid - 0.5 * (cpx.vertex3(0) + cpx.vertex3(1))).normalized();
  const Vec3 x = 0.5 * (cpx.vertex3(0) + cpx.vertex3(1)) + 1.5 * bump.lo * inward;
  const Vec3 g = bump.gradient(x);
  REQUIRE(g.norm() > 1.0);
  const double h = 1e-8;
  for (int c = 0; c < 3; ++c) {
    Vec3 dx = Vec3::Zero();
    dx[c] = h;
    const double fd = (bump.value(x + dx) - bump.value(x - dx)) / (2.0 * h);
    CHECK(std::abs(fd - g[c]) <= 1e-4 * g.norm());
  }
}

TEST_CASE("elementary jacobians match finite differences") {
  auto kuhn = kuhn_cube();
  check_elementary_fd(build_xi_3d(kuhn, compute_constants3(kuhn), 0.1));
  auto tet = regular_tet();
  check_elementary_fd(build_xi_3d(tet, compute_constants3(tet), 0.15));
}

TEST_CASE("assembled reparametrization on the Kuhn cube") {
  auto cpx = kuhn_cube();
  auto k = compute_constants3(cpx);
  const double delta = 0.1;
  auto xi = build_xi_3d(cpx, k, delta);

  CHECK(xi.certificate.ok);
  CHECK(xi.certificate.pairs_checked == 8210);
  REQUIRE(xi.maps.size() == 245);
  int count[6] = {0, 0, 0, 0, 0, 0};
  for (const auto& m : xi.maps) ++count[static_cast<int>(m.kind)];
  CHECK(count[0] == 108);  // corner wedges, six per face
  CHECK(count[1] == 38);   // corner cones, two per edge
  CHECK(count[2] == 8);    // vertex balls
  CHECK(count[3] == 54);   // edge bands, three per face
  CHECK(count[4] == 19);   // edge tubes
  CHECK(count[5] == 18);   // face slabs
  // stage order is non-decreasing and wedges carry their corner group
  for (size_t i = 1; i < xi.maps.size(); ++i)
    CHECK(static_cast<int>(xi.maps[i - 1].kind) <= static_cast<int>(xi.maps[i].kind));
  for (const auto& m : xi.maps) {
    if (m.kind == PinchKind3D::corner_wedge) {
      const auto& fv = cpx.face(m.face);
      int slot = -1;
      for (int j = 0; j < 3; ++j)
        if (fv[j] == m.vertex) slot = j;
      CHECK(m.group == 3 * m.face + slot);
    } else {
      CHECK(m.group == -1);
    }
  }

  SUBCASE("skeleton preserved") { check_skeleton_preserved(xi); }
  SUBCASE("identity outside the collar") { check_identity_outside_collar(xi, delta); }
  SUBCASE("chain jacobian matches finite differences") { check_chain_fd(xi, delta); }

  SUBCASE("cells map into themselves") {
    Rng rng(5);
    for (int c = 0; c < cpx.num_cells(); ++c) {
      Eigen::Matrix<double, 3, 4> verts;
      const auto cv = cpx.cell(c);
      for (int j = 0; j < 4; ++j) verts.col(j) = cpx.vertex3(cv[j]);
      for (int i = 0; i < 400; ++i) {
        const Vec3 x = verts * rng.barycentric<4>();
        CHECK(cpx.cell_contains(c, xi.evaluate(x), 1e-9));
      }
    }
  }

  SUBCASE("injectivity and orientation") {
    Rng rng(1234);
    double min_det = 1e30;
    for (int i = 0; i < 20000; ++i) {
      const Vec3 x(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
      min_det = std::min(min_det, xi.jacobian(x).determinant());
    }
    // positive everywhere; it does approach zero toward the vertices, where
    // the radial profile flattens completely
    CHECK(min_det > 0.0);
    int collisions = 0;
    for (int i = 0; i < 100000; ++i) {
      const Vec3 x(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
      const Vec3 y(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
      const double d = (x - y).norm();
      if (d <= 1e-6) continue;
      if ((xi.evaluate(x) - xi.evaluate(y)).norm() < 0.3 * d) ++collisions;
    }
    CHECK(collisions == 0);
  }

  SUBCASE("gradient bound is uniform in the width") {
    const double sup1 = sampled_sup_jacobian(xi);
    CHECK(sup1 == doctest::Approx(2.304900).epsilon(2e-2));
    auto fine = build_xi_3d(cpx, k, 0.05);
    const double sup2 = sampled_sup_jacobian(fine);
    CHECK(std::abs(sup2 - sup1) < 1e-3 * sup1);
  }

  SUBCASE("within-stage order is immaterial, groups kept as units") {
    SmoothingMap3D shuffled = xi;
    std::vector<std::vector<ElementaryPinchMap3D>> units;
    for (const auto& m : shuffled.maps) {
      const bool joins = !units.empty() && m.group >= 0 &&
                         units.back().back().kind == m.kind && units.back().back().group == m.group;
      if (joins)
        units.back().push_back(m);
      else
        units.push_back({m});
    }
    shuffled.maps.clear();
    for (int kind = 0; kind < 6; ++kind) {
      std::vector<const std::vector<ElementaryPinchMap3D>*> stage;
      for (const auto& u : units)
        if (static_cast<int>(u.front().kind) == kind) stage.push_back(&u);
      std::reverse(stage.begin(), stage.end());
      for (const auto* u : stage)
        for (const auto& m : *u) shuffled.maps.push_back(m);
    }
    REQUIRE(shuffled.maps.size() == xi.maps.size());
    Rng rng(3);
    for (int i = 0; i < 5000; ++i) {
      const Vec3 x(rng.uniform(-0.1, 1.1), rng.uniform(-0.1, 1.1), rng.uniform(-0.1, 1.1));
      CHECK((xi.evaluate(x) - shuffled.evaluate(x)).norm() == 0.0);
    }
  }
}

TEST_CASE("assembled reparametrization on the tetrahedron") {
  auto cpx = regular_tet();
  auto k = compute_constants3(cpx);
  const double delta = 0.15;
  auto xi = build_xi_3d(cpx, k, delta);

  CHECK(xi.certificate.ok);
  CHECK(xi.certificate.pairs_checked == 423);
  REQUIRE(xi.maps.size() == 62);
  int count[6] = {0, 0, 0, 0, 0, 0};
  for (const auto& m : xi.maps) ++count[static_cast<int>(m.kind)];
  CHECK(count[0] == 24);
  CHECK(count[1] == 12);
  CHECK(count[2] == 4);
  CHECK(count[3] == 12);
  CHECK(count[4] == 6);
  CHECK(count[5] == 4);

  SUBCASE("skeleton preserved") { check_skeleton_preserved(xi); }
  SUBCASE("identity outside the collar") { check_identity_outside_collar(xi, delta); }
  SUBCASE("chain jacobian matches finite differences") { check_chain_fd(xi, delta); }

  SUBCASE("gradient bound is uniform in the width") {
    const double sup1 = sampled_sup_jacobian(xi);
    CHECK(sup1 == doctest::Approx(2.216960).epsilon(2e-2));
    auto fine = build_xi_3d(cpx, k, 0.1);
    CHECK(std::abs(sampled_sup_jacobian(fine) - sup1) < 1e-3 * sup1);
  }

  SUBCASE("orientation preserved inside the cell") {
    Rng rng(9);
    Eigen::Matrix<double, 3, 4> verts;
    for (int j = 0; j < 4; ++j) verts.col(j) = cpx.vertex3(j);
    double min_det = 1e30;
    for (int i = 0; i < 20000; ++i) {
      const Vec3 x = verts * rng.barycentric<4>();
      min_det = std::min(min_det, xi.jacobian(x).determinant());
    }
    CHECK(min_det > 0.0);
  }
}

TEST_CASE("per-cell widths propagate to the subsimplex tables") {
  auto cpx = kuhn_cube();
  auto k = compute_constants3(cpx);
  VecX widths(6);
  widths << 0.1, 0.05, 0.1, 0.05, 0.1, 0.05;
  auto xi = build_xi_3d(cpx, k, widths);
  CHECK(xi.certificate.ok);
  for (int v = 0; v < cpx.num_vertices(); ++v) {
    double want = 1e30;
    for (int c : cpx.cells_of_vertex(v)) want = std::min(want, widths[c]);
    CHECK(xi.delta_vertex[v] == doctest::Approx(want).epsilon(1e-15));
  }
  // the chain vertices 0 and 7 touch every cell, so their width is the min
  CHECK(xi.delta_vertex[0] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(xi.delta_vertex[7] == doctest::Approx(0.05).epsilon(1e-15));
  for (int e = 0; e < cpx.num_edges(); ++e) {
    const auto& ev = cpx.edge(e);
    CHECK(xi.delta_edge[e] ==
          doctest::Approx(std::min(xi.delta_vertex[ev[0]], xi.delta_vertex[ev[1]])).epsilon(1e-15));
  }
  check_skeleton_preserved(xi);
}

TEST_CASE("support certificate flags genuinely overlapping supports") {
  auto cpx = regular_tet();
  auto k = compute_constants3(cpx);
  auto xi = build_xi_3d(cpx, k, 0.15);

  std::vector<ElementaryPinchMap3D> wedges;
  for (const auto& m : xi.maps)
    if (m.kind == PinchKind3D::corner_wedge) wedges.push_back(m);
  REQUIRE(wedges.size() == 24);
  auto cert = certify_disjoint_supports(wedges, 128, 0x3d15eedULL);
  CHECK(cert.ok);

  // the two wedges of one corner overlap near the bisector; stripping the
  // group marker must make the certificate report them (it stops at the
  // first offending pair)
  for (auto& m : wedges) m.group = -1;
  auto stripped = certify_disjoint_supports(wedges, 128, 0x3d15eedULL);
  CHECK_FALSE(stripped.ok);
  CHECK_FALSE(stripped.detail.empty());
}

TEST_CASE("separation envelopes") {
  auto kuhn = kuhn_cube();
  auto kk = compute_constants3(kuhn);
  auto tet = regular_tet();
  auto kt = compute_constants3(tet);
  const double delta = 0.1;
  const auto alpha_k = corner_pinch_angles(kuhn, kk, delta);
  const auto alpha_t = corner_pinch_angles(tet, kt, delta);
  const auto sets_k = all_support_regions(kuhn, kk, delta, alpha_k);
  const auto sets_t = all_support_regions(tet, kt, delta, alpha_t);
  CHECK(sets_k.size() == 237);
  CHECK(sets_t.size() == 58);

  auto family = [](const std::vector<SupportSet>& sets, SupportRegion3D fam) {
    std::vector<SupportSet> out;
    for (const auto& s : sets)
      if (s.family == fam) out.push_back(s);
    return out;
  };

  SUBCASE("samples stay inside their set") {
    Rng rng(41);
    for (const auto& s : {sets_k[0], sets_k[120], sets_k[200], sets_k[230], sets_t[30]}) {
      for (int i = 0; i < 300; ++i) {
        const Vec3 x = sample_support_set(s, rng);
        CHECK(support_membership(s, x));
        CHECK(support_slack(s, x) >= 0.0);
      }
    }
  }

  SUBCASE("cone, band and tube families separate cleanly") {
    for (const auto* sets : {&sets_k, &sets_t}) {
      const auto& cpx = sets == &sets_k ? kuhn : tet;
      for (auto fam : {SupportRegion3D::corner_cone, SupportRegion3D::edge_band,
                       SupportRegion3D::edge_tube}) {
        auto cert = certify_support_disjointness(cpx, family(*sets, fam), 600, 20250822u);
        CHECK(cert.ok);
        CHECK(cert.violations == 0);
        CHECK(cert.pairs_checked > 0);
      }
    }
  }

  // The wedge and slab envelopes do not satisfy their claimed separation on
  // either fixture.  Wedges of one vertex across two faces that share a third
  // edge through it overlap far outside the shared-subsimplex collar, and
  // slabs of side-sharing faces meet off the side whenever the dihedral stays
  // under atan(8), the envelope's thickness-to-taper aspect.  The assembled
  // maps are certified on their actual supports instead, which the preceding
  // test cases show are pairwise disjoint.
  SUBCASE("wedge envelopes of a shared vertex overlap off the collar") {
    auto cert_k = certify_support_disjointness(kuhn, family(sets_k, SupportRegion3D::corner_wedge),
                                               600, 20250822u);
    CHECK_FALSE(cert_k.ok);
    CHECK(cert_k.violations == 142);
    auto cert_t = certify_support_disjointness(tet, family(sets_t, SupportRegion3D::corner_wedge),
                                               600, 20250822u);
    CHECK_FALSE(cert_t.ok);
    CHECK(cert_t.violations == 24);

    // deterministic witness on the cube: both faces hold the vertical edge
    // at (1,1,0), and the point climbs it while staying inside both wedges
    const Vec3 witness(0.9747, 0.9442, 0.5019);
    auto wa = corner_wedge_region(kuhn, kk, kuhn.find_face(1, 3, 7), kuhn.find_edge(1, 3), 3,
                                  delta, alpha_k[3]);
    auto wb = corner_wedge_region(kuhn, kk, kuhn.find_face(0, 3, 7), kuhn.find_edge(0, 3), 3,
                                  delta, alpha_k[3]);
    CHECK(support_membership(wa, witness));
    CHECK(support_membership(wb, witness));
    CHECK(support_slack(wa, witness) > 0.02);
    CHECK(support_slack(wb, witness) > 0.02);
    CHECK(dist_point_segment(witness, kuhn.vertex3(3), kuhn.vertex3(7)) > 0.04);
    CHECK((witness - kuhn.vertex3(3)).norm() > 2.0 * delta);
  }

  SUBCASE("slab envelopes of side-sharing faces meet off the side") {
    auto cert_k =
        certify_support_disjointness(kuhn, family(sets_k, SupportRegion3D::face_slab), 600,
                                     20250822u);
    CHECK_FALSE(cert_k.ok);
    CHECK(cert_k.violations == 72);
    auto cert_t =
        certify_support_disjointness(tet, family(sets_t, SupportRegion3D::face_slab), 600,
                                     20250822u);
    CHECK_FALSE(cert_t.ok);
    CHECK(cert_t.violations == 11);

    // deterministic witnesses beside the midpoint of a shared side, lifted
    // into the neighbor's plane
    {
      const int f1 = kuhn.find_face(0, 1, 3);  // z = 0 plane
      const int f2 = kuhn.find_face(0, 1, 7);  // dihedral pi/4 along (0,1)
      auto s1 = face_slab_region(kuhn, kk, f1, delta * std::tan(kk.omega_face[f1] / 3.0));
      auto s2 = face_slab_region(kuhn, kk, f2, delta * std::tan(kk.omega_face[f2] / 3.0));
      const double a = 0.9 * s1.bump.hi;
      const Vec3 witness = Vec3(0.5, 0, 0) + a * Vec3(0, 1, 0) + a * std::tan(M_PI / 4.0) * Vec3(0, 0, 1);
      CHECK(support_membership(s1, witness));
      CHECK(support_membership(s2, witness));
    }
    {
      const int f1 = tet.find_face(0, 1, 2);  // z = 0 plane
      const int f2 = tet.find_face(0, 1, 3);  // dihedral acos(1/3) along (0,1)
      auto s1 = face_slab_region(tet, kt, f1, delta * std::tan(kt.omega_face[f1] / 3.0));
      auto s2 = face_slab_region(tet, kt, f2, delta * std::tan(kt.omega_face[f2] / 3.0));
      const double a = 0.9 * s1.bump.hi;
      const Vec3 witness = Vec3(0.5, 0, 0) + a * Vec3(0, 1, 0) + a * 2.0 * std::sqrt(2.0) * Vec3(0, 0, 1);
      CHECK(support_membership(s1, witness));
      CHECK(support_membership(s2, witness));
    }
  }

  SUBCASE("collar containment depends on the width") {
    auto cont_k1 = certify_support_containment(kuhn, sets_k, 600, 20250822u);
    CHECK_FALSE(cont_k1.ok);  // wedge envelopes poke out at this width
    CHECK(cont_k1.violations == 12);
    CHECK(cont_k1.max_violation > 0.01);
    CHECK(cont_k1.detail.find("corner_wedge") != std::string::npos);

    const auto sets_k5 = all_support_regions(kuhn, kk, 0.05, corner_pinch_angles(kuhn, kk, 0.05));
    auto cont_k5 = certify_support_containment(kuhn, sets_k5, 600, 20250822u);
    CHECK(cont_k5.ok);

    auto cont_t = certify_support_containment(tet, sets_t, 600, 20250822u);
    CHECK(cont_t.ok);
    const auto sets_t15 = all_support_regions(tet, kt, 0.15, corner_pinch_angles(tet, kt, 0.15));
    auto cont_t15 = certify_support_containment(tet, sets_t15, 600, 20250822u);
    CHECK(cont_t15.ok);
  }
}

TEST_CASE("inadmissible widths and references are rejected") {
  auto cpx = kuhn_cube();
  auto k = compute_constants3(cpx);
  CHECK(k.delta_cap == doctest::Approx(1.0 / (4.0 * std::sqrt(3.0))).epsilon(1e-12));
  CHECK_THROWS_AS(build_xi_3d(cpx, k, 1.01 * k.delta_cap), std::invalid_argument);
  CHECK_THROWS_AS(build_xi_3d(cpx, k, 0.0), std::invalid_argument);
  VecX widths = VecX::Constant(6, 0.1);
  widths[2] = -0.1;
  CHECK_THROWS_AS(build_xi_3d(cpx, k, widths), std::invalid_argument);

  const int e = cpx.find_edge(0, 1);
  CHECK_THROWS_AS(build_corner_wedge_pinch(cpx, k, 0, e, 7, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_edge_band_pinch(cpx, k, 0, cpx.edges_of_face(0)[0], 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_face_bump(cpx, k, 0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(build_vertex_ball_pinch(cpx, k, 0, 0.4), std::invalid_argument);
}
