#include "pinch/approximation.hh"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pinch/rng.hh"

namespace pinch {

namespace {

Vec2 as2(const VecX& x) { return Vec2(x[0], x[1]); }
Vec3 as3(const VecX& x) { return Vec3(x[0], x[1], x[2]); }

double domain_measure(const SimplicialComplex& cpx) {
  double total = 0.0;
  for (int c = 0; c < cpx.num_cells(); ++c) total += cpx.cell_measure(c);
  return total;
}

}  // namespace

int SmoothedMap::num_pinch_maps() const {
  return dim == 2 ? static_cast<int>(xi2.maps.size()) : static_cast<int>(xi3.maps.size());
}

VecX SmoothedMap::xi(const VecX& x) const {
  if (dim == 2) return xi2.evaluate(as2(x));
  return xi3.evaluate(as3(x));
}

MatX SmoothedMap::xi_jacobian(const VecX& x) const {
  if (dim == 2) return xi2.jacobian(as2(x));
  return xi3.jacobian(as3(x));
}

bool SmoothedMap::xi_in_support(const VecX& x) const {
  if (dim == 2) return xi2.in_support(as2(x));
  return xi3.in_support(as3(x));
}

VecX SmoothedMap::evaluate(const VecX& x) const {
  const int c = f.complex.locate(x);
  if (c < 0) throw std::domain_error("smoothed map: point outside domain");
  // cells map into themselves, so the located cell's piece applies after xi
  return f.evaluate_on(c, xi(x));
}

MatX SmoothedMap::jacobian(const VecX& x) const {
  const int c = f.complex.locate(x);
  if (c < 0) throw std::domain_error("smoothed map: point outside domain");
  return f.matrix[c] * xi_jacobian(x);
}

SmoothedMap make_smoothed_map(const PiecewiseAffineMap& f, double delta) {
  SmoothedMap sm;
  sm.f = f;
  sm.dim = f.complex.dim();
  if (sm.dim == 2) {
    sm.xi2 = build_xi_2d(f.complex, delta);
  } else {
    sm.xi3 = build_xi_3d(f.complex, delta);
  }
  sm.cell_deltas = VecX::Constant(f.complex.num_cells(), delta);
  return sm;
}

SmoothedMap make_smoothed_map(const PiecewiseAffineMap& f, const VecX& cell_deltas) {
  if (cell_deltas.size() != f.complex.num_cells())
    throw std::invalid_argument("one width per cell required");
  SmoothedMap sm;
  sm.f = f;
  sm.dim = f.complex.dim();
  if (sm.dim == 2) {
    // the planar build is scalar; the smallest width serves every cell
    const double delta = cell_deltas.minCoeff();
    sm.xi2 = build_xi_2d(f.complex, delta);
    sm.cell_deltas = VecX::Constant(f.complex.num_cells(), delta);
  } else {
    sm.xi3 = build_xi_3d(f.complex, compute_constants3(f.complex), cell_deltas);
    sm.cell_deltas = cell_deltas;
  }
  return sm;
}

double phi_x(double measure, double p) {
  if (p < 1.0) throw std::invalid_argument("phi_x: exponent below one");
  if (measure < 0.0) throw std::invalid_argument("phi_x: negative measure");
  return std::pow(measure, 1.0 / p);
}

SupportAtlas build_support_atlas(const SmoothedMap& sm) {
  SupportAtlas atlas;
  const double pi = std::acos(-1.0);
  if (sm.dim == 2) {
    for (int i = 0; i < static_cast<int>(sm.xi2.maps.size()); ++i) {
      const auto& m = sm.xi2.maps[i];
      double measure = 0.0;
      switch (m.kind) {
        case PinchKind2D::edge_b:
          measure = 2.0 * (m.ell - 2.0 * m.d) * (m.d * m.t);
          break;
        case PinchKind2D::corner_a:
          // sector of radius 3d and full opening 2 alpha / 3
          measure = 3.0 * m.alpha * m.d * m.d;
          break;
        case PinchKind2D::vertex_e:
          measure = pi * (m.eta * m.delta) * (m.eta * m.delta);
          break;
      }
      atlas.regions.push_back({i, measure});
      atlas.total += measure;
    }
    return atlas;
  }
  for (int i = 0; i < static_cast<int>(sm.xi3.maps.size()); ++i) {
    const auto& m = sm.xi3.maps[i];
    double measure = 0.0;
    switch (m.kind) {
      case PinchKind3D::corner_wedge:
        // slices are sectors of radius 3 t y and opening 2 alpha
        measure = 3.0 * m.alpha * m.t * m.t * m.delta * m.delta * m.delta;
        break;
      case PinchKind3D::corner_cone:
        measure = pi * m.t * m.t * m.delta * m.delta * m.delta / 3.0;
        break;
      case PinchKind3D::vertex_ball:
        measure = 4.0 * pi * m.delta * m.delta * m.delta / 3.0;
        break;
      case PinchKind3D::edge_band: {
        const double r = m.delta * m.t / 4.0;
        measure = (m.ell - m.delta / 2.0) * m.alpha * r * r;
        break;
      }
      case PinchKind3D::edge_tube: {
        const double r = m.delta * m.t / 4.0;
        measure = (m.ell - m.delta / 2.0) * pi * r * r;
        break;
      }
      case PinchKind3D::face_slab: {
        // plateau region: the face shrunk toward its incenter by the ramp
        // start, crossed with the normal pinch interval
        const Vec3 c0 = m.bump.corner.col(0), c1 = m.bump.corner.col(1), c2 = m.bump.corner.col(2);
        const double a = (c1 - c2).norm(), b = (c2 - c0).norm(), c = (c0 - c1).norm();
        const double area = 0.5 * ((c1 - c0).cross(c2 - c0)).norm();
        const double inradius = 2.0 * area / (a + b + c);
        const double ratio = (inradius - m.bump.lo) / inradius;
        measure = 2.0 * m.width * area * ratio * ratio;
        break;
      }
    }
    atlas.regions.push_back({i, measure});
    atlas.total += measure;
  }
  return atlas;
}

VecX sample_support_region(const SmoothedMap& sm, int map_index, Rng& rng) {
  const double pi = std::acos(-1.0);
  if (sm.dim == 2) {
    const auto& m = sm.xi2.maps[map_index];
    Vec2 world;
    switch (m.kind) {
      case PinchKind2D::edge_b: {
        const double w = rng.uniform(m.d, m.ell - m.d);
        double z = m.d * m.t * rng.uniform(0.0, 1.0);
        if (rng.uniform_int(0, 1)) z = -z;
        world = m.frame.to_world({w, z});
        break;
      }
      case PinchKind2D::corner_a: {
        const double r = 3.0 * m.d * std::sqrt(rng.uniform(0.0, 1.0));
        double phi = (m.alpha / 3.0) * rng.uniform(0.0, 1.0);
        if (rng.uniform_int(0, 1)) phi = -phi;
        world = m.frame.to_world({r * std::cos(phi), r * std::sin(phi)});
        break;
      }
      case PinchKind2D::vertex_e: {
        const double r = m.eta * m.delta * std::sqrt(rng.uniform(0.0, 1.0));
        const double phi = rng.uniform(0.0, 2.0 * pi);
        world = m.frame.origin + Vec2(r * std::cos(phi), r * std::sin(phi));
        break;
      }
    }
    return world;
  }
  const auto& m = sm.xi3.maps[map_index];
  Vec3 world;
  switch (m.kind) {
    case PinchKind3D::corner_wedge: {
      const double y = m.delta * std::cbrt(rng.uniform(0.0, 1.0));
      const double r = 3.0 * m.t * y * std::sqrt(rng.uniform(0.0, 1.0));
      double phi = m.alpha * rng.uniform(0.0, 1.0);
      if (rng.uniform_int(0, 1)) phi = -phi;
      world = m.frame.to_world({y, r * std::cos(phi), r * std::sin(phi)});
      break;
    }
    case PinchKind3D::corner_cone: {
      const double y = m.delta * std::cbrt(rng.uniform(0.0, 1.0));
      const double r = m.t * y * std::sqrt(rng.uniform(0.0, 1.0));
      const double phi = rng.uniform(0.0, 2.0 * pi);
      world = m.frame.to_world({y, r * std::cos(phi), r * std::sin(phi)});
      break;
    }
    case PinchKind3D::vertex_ball: {
      std::normal_distribution<double> gauss(0.0, 1.0);
      Vec3 dir(gauss(rng.engine()), gauss(rng.engine()), gauss(rng.engine()));
      while (dir.norm() < 1e-12)
        dir = Vec3(gauss(rng.engine()), gauss(rng.engine()), gauss(rng.engine()));
      const double rho = m.delta * std::cbrt(rng.uniform(0.0, 1.0));
      world = m.frame.origin + rho * dir.normalized();
      break;
    }
    case PinchKind3D::edge_band: {
      const double y = rng.uniform(m.delta / 4.0, m.ell - m.delta / 4.0);
      const double r = (m.delta * m.t / 4.0) * std::sqrt(rng.uniform(0.0, 1.0));
      double phi = m.alpha * rng.uniform(0.0, 1.0);
      if (rng.uniform_int(0, 1)) phi = -phi;
      world = m.frame.to_world({y, r * std::cos(phi), r * std::sin(phi)});
      break;
    }
    case PinchKind3D::edge_tube: {
      const double y = rng.uniform(m.delta / 4.0, m.ell - m.delta / 4.0);
      const double r = (m.delta * m.t / 4.0) * std::sqrt(rng.uniform(0.0, 1.0));
      const double phi = rng.uniform(0.0, 2.0 * pi);
      world = m.frame.to_world({y, r * std::cos(phi), r * std::sin(phi)});
      break;
    }
    case PinchKind3D::face_slab: {
      const Vec3 c0 = m.bump.corner.col(0), c1 = m.bump.corner.col(1), c2 = m.bump.corner.col(2);
      const double a = (c1 - c2).norm(), b = (c2 - c0).norm(), c = (c0 - c1).norm();
      const double area = 0.5 * ((c1 - c0).cross(c2 - c0)).norm();
      const double inradius = 2.0 * area / (a + b + c);
      const double ratio = (inradius - m.bump.lo) / inradius;
      const Vec3 incenter = (a * c0 + b * c1 + c * c2) / (a + b + c);
      const Vec3 w = rng.barycentric<3>();
      Vec3 local = Vec3::Zero();
      local += w[0] * (incenter + ratio * (c0 - incenter));
      local += w[1] * (incenter + ratio * (c1 - incenter));
      local += w[2] * (incenter + ratio * (c2 - incenter));
      double z = m.width * rng.uniform(0.0, 1.0);
      if (rng.uniform_int(0, 1)) z = -z;
      local[2] = z;
      world = m.frame.to_world(local);
      break;
    }
  }
  return world;
}

int support_multiplicity(const SmoothedMap& sm, const VecX& x) {
  int count = 0;
  if (sm.dim == 2) {
    const Vec2 p = as2(x);
    for (const auto& m : sm.xi2.maps) count += m.in_support(p) ? 1 : 0;
  } else {
    const Vec3 p = as3(x);
    for (const auto& m : sm.xi3.maps) count += m.in_support(p) ? 1 : 0;
  }
  return count;
}

NormReport compute_norms(const SmoothedMap& sm, const NormQuery& q) {
  for (double p : q.p_values)
    if (p < 1.0) throw std::invalid_argument("compute_norms: exponent below one");

  const SupportAtlas atlas = build_support_atlas(sm);
  const int cells = sm.complex().num_cells();
  const int np = static_cast<int>(q.p_values.size());

  NormReport report;
  report.delta = sm.cell_deltas.minCoeff();
  report.cell_deltas = sm.cell_deltas;
  report.p_values = q.p_values;
  report.w1p.assign(np, 0.0);
  report.w1p_stderr.assign(np, 0.0);
  report.per_cell = MatX::Zero(cells, np);
  report.per_cell_support = VecX::Zero(cells);
  report.linf_point = VecX::Zero(sm.dim);
  report.samples = q.samples;
  report.seed = q.seed;
  report.method = "stratified support mixture, " + std::to_string(q.samples) + " draws";

  if (atlas.total <= 0.0 || q.samples <= 0) return report;

  Rng rng(q.seed);
  std::vector<double> masses(atlas.regions.size());
  for (std::size_t i = 0; i < atlas.regions.size(); ++i) masses[i] = atlas.regions[i].measure;
  std::discrete_distribution<int> pick(masses.begin(), masses.end());

  std::vector<double> sum(np, 0.0), sumsq(np, 0.0);
  double frac_acc = 0.0;

  for (int it = 0; it < q.samples; ++it) {
    const int region = pick(rng.engine());
    const VecX x = sample_support_region(sm, atlas.regions[region].map_index, rng);
    const int cell = sm.complex().locate(x);
    if (cell < 0) continue;  // support mass outside the domain contributes zero
    const int count = std::max(1, support_multiplicity(sm, x));
    const double share = atlas.total / count;

    const VecX xi_x = sm.xi(x);
    const MatX dxi = sm.xi_jacobian(x);
    const double val = (sm.f.evaluate_on(cell, x) - sm.f.evaluate_on(cell, xi_x)).norm();
    const double grad =
        (sm.f.matrix[cell] - sm.f.matrix[cell] * dxi).norm();  // Frobenius difference
    const double dxi_norm = dxi.norm();

    frac_acc += share;
    report.per_cell_support[cell] += share;
    report.sup_jacobian = std::max(report.sup_jacobian, dxi_norm);
    if (val > report.linf) {
      report.linf = val;
      report.linf_point = x;
    }
    for (int pi = 0; pi < np; ++pi) {
      const double p = q.p_values[pi];
      const double y = share * (std::pow(val, p) + std::pow(grad, p));
      sum[pi] += y;
      sumsq[pi] += y * y;
      report.per_cell(cell, pi) += y;
    }
  }

  const double n = q.samples;
  report.support_fraction = frac_acc / n / domain_measure(sm.complex());
  report.per_cell_support /= n;
  for (int pi = 0; pi < np; ++pi) {
    const double p = q.p_values[pi];
    const double mean = sum[pi] / n;
    const double var = std::max(0.0, sumsq[pi] / n - mean * mean) / n;
    report.w1p[pi] = std::pow(mean, 1.0 / p);
    // delta method through the p-th root
    report.w1p_stderr[pi] =
        mean > 0.0 ? std::sqrt(var) * std::pow(mean, 1.0 / p - 1.0) / p : std::sqrt(var);
    for (int c = 0; c < cells; ++c)
      report.per_cell(c, pi) = std::pow(report.per_cell(c, pi) / n, 1.0 / p);
  }
  return report;
}

double norm_linf_diff(const SmoothedMap& sm, int samples, unsigned long seed, VecX* argmax) {
  NormQuery q;
  q.p_values = {1.0};
  q.samples = samples;
  q.seed = seed;
  const NormReport report = compute_norms(sm, q);
  if (argmax) *argmax = report.linf_point;
  return report.linf;
}

double norm_w1p_diff(const SmoothedMap& sm, double p, int samples, unsigned long seed) {
  NormQuery q;
  q.p_values = {p};
  q.samples = samples;
  q.seed = seed;
  return compute_norms(sm, q).w1p[0];
}

std::string norm_csv_header() {
  return "delta,p,linf,w1p_error,support_fraction,sup_jacobian";
}

std::string norm_csv_rows(const NormReport& report) {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < report.p_values.size(); ++i)
    os << report.delta << "," << report.p_values[i] << "," << report.linf << "," << report.w1p[i]
       << "," << report.support_fraction << "," << report.sup_jacobian << "\n";
  return os.str();
}

double CollarSampler::volume(double rho) const {
  if (rho <= 0.0) return 0.0;
  if (rho >= inradius) return cell_measure;
  if (rho < anchor_rho) return std::min(cell_measure, boundary * rho);
  const auto it = std::upper_bound(dist.begin(), dist.end(), rho);
  const std::size_t idx = static_cast<std::size_t>(it - dist.begin());
  return std::min(idx > 0 ? cum[idx - 1] : 0.0, cell_measure);
}

CollarSampler make_collar_sampler(const SimplicialComplex& cpx, int cell, int samples, Rng& rng) {
  const int n = cpx.dim();
  CollarSampler cs;
  cs.cell_measure = cpx.cell_measure(cell);

  // facets, inward unit normals and facet measures
  std::vector<MatX> facet(n + 1);
  std::vector<VecX> normal(n + 1);
  std::vector<double> area(n + 1);
  const auto cv = cpx.cell(cell);
  for (int skip = 0; skip <= n; ++skip) {
    MatX f(n, n);
    int col = 0;
    for (int j = 0; j <= n; ++j)
      if (j != skip) f.col(col++) = cpx.vertex(cv[j]);
    facet[skip] = f;
    // inward normal: orthogonal to the facet span, toward the skipped vertex
    MatX span(n, n - 1);
    for (int j = 1; j < n; ++j) span.col(j - 1) = f.col(j) - f.col(0);
    VecX nor;
    if (n == 2) {
      const VecX d = span.col(0);
      nor = VecX(2);
      nor << -d[1], d[0];
    } else {
      const Vec3 c = Vec3(span.col(0)).cross(Vec3(span.col(1)));
      nor = c;
    }
    nor.normalize();
    const VecX apex = cpx.vertex(cv[skip]);
    if (nor.dot(apex - f.col(0)) < 0.0) nor = -nor;
    normal[skip] = nor;
    if (n == 2)
      area[skip] = (f.col(1) - f.col(0)).norm();
    else
      area[skip] = 0.5 * (Vec3(f.col(1) - f.col(0)).cross(Vec3(f.col(2) - f.col(0)))).norm();
  }
  // inradius from the measure and the boundary content
  for (int skip = 0; skip <= n; ++skip) cs.boundary += area[skip];
  cs.inradius = n * cs.cell_measure / cs.boundary;

  const double rho_max = cs.inradius * (1.0 - 1e-12);
  const double prism_total = cs.boundary * rho_max;

  std::discrete_distribution<int> pick_facet(area.begin(), area.end());
  std::vector<std::pair<double, double>> draws;
  draws.reserve(samples);
  for (int it = 0; it < samples; ++it) {
    const int fidx = pick_facet(rng.engine());
    VecX base;
    if (n == 2) {
      const double u = rng.uniform(0.0, 1.0);
      base = facet[fidx].col(0) + u * (facet[fidx].col(1) - facet[fidx].col(0));
    } else {
      const Vec3 w = rng.barycentric<3>();
      base = w[0] * facet[fidx].col(0) + w[1] * facet[fidx].col(1) + w[2] * facet[fidx].col(2);
    }
    const double s = rng.uniform(0.0, rho_max);
    const VecX x = base + s * normal[fidx];

    // plane distances; inside the simplex each is nonnegative and the
    // smallest one is the boundary distance
    double dmin = 1e300;
    bool inside = true;
    int prisms = 0;
    for (int skip = 0; skip <= n; ++skip) {
      const double d = normal[skip].dot(x - facet[skip].col(0));
      if (d < 0.0) inside = false;
      dmin = std::min(dmin, d);
      if (d < rho_max) {
        // membership in that facet's prism also needs the base projection
        // inside the facet; count it only then
        const VecX proj = x - d * normal[skip];
        bool in_facet = true;
        if (n == 2) {
          const VecX e = facet[skip].col(1) - facet[skip].col(0);
          const double tcoord = e.dot(proj - facet[skip].col(0)) / e.squaredNorm();
          in_facet = tcoord >= 0.0 && tcoord <= 1.0;
        } else {
          const Vec3 a = facet[skip].col(0), b = facet[skip].col(1), c = facet[skip].col(2);
          const Vec3 v0 = Vec3(b - a), v1 = Vec3(c - a), v2 = Vec3(proj) - Vec3(a);
          const double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
          const double d20 = v2.dot(v0), d21 = v2.dot(v1);
          const double den = d00 * d11 - d01 * d01;
          const double bv = (d11 * d20 - d01 * d21) / den;
          const double bw = (d00 * d21 - d01 * d20) / den;
          in_facet = bv >= 0.0 && bw >= 0.0 && bv + bw <= 1.0;
        }
        if (in_facet) ++prisms;
      }
    }
    if (!inside || prisms == 0) continue;
    draws.emplace_back(dmin, prism_total / (samples * prisms));
  }
  std::sort(draws.begin(), draws.end());
  cs.dist.resize(draws.size());
  cs.cum.resize(draws.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    cs.dist[i] = draws[i].first;
    acc += draws[i].second;
    cs.cum[i] = acc;
  }
  if (!draws.empty()) {
    const std::size_t k =
        std::min(draws.size() - 1, std::max<std::size_t>(1000, draws.size() / 100));
    cs.anchor_rho = cs.dist[k];
  }
  return cs;
}

double exact_collar_volume(const SimplicialComplex& cpx, int cell, double rho) {
  const int n = cpx.dim();
  const double measure = cpx.cell_measure(cell);
  // boundary content for the inradius
  double boundary = 0.0;
  const auto cv = cpx.cell(cell);
  for (int skip = 0; skip <= n; ++skip) {
    std::vector<VecX> f;
    for (int j = 0; j <= n; ++j)
      if (j != skip) f.push_back(cpx.vertex(cv[j]));
    if (n == 2)
      boundary += (f[1] - f[0]).norm();
    else
      boundary += 0.5 * (Vec3(f[1] - f[0]).cross(Vec3(f[2] - f[0]))).norm();
  }
  const double inradius = n * measure / boundary;
  if (rho >= inradius) return measure;
  // the complement of the collar is the incenter homothet with ratio
  // (inradius - rho) / inradius
  const double ratio = (inradius - rho) / inradius;
  return measure * (1.0 - std::pow(ratio, n));
}

WidthChoice choose_deltas(const PiecewiseAffineMap& f, double eps, double p, unsigned long seed,
                          int collar_samples, VolumeGauge gauge) {
  if (eps <= 0.0) throw std::invalid_argument("choose_deltas: eps must be positive");
  if (p < 1.0) throw std::invalid_argument("choose_deltas: exponent below one");
  if (!gauge) gauge = [p](double measure) { return phi_x(measure, p); };

  const SimplicialComplex& cpx = f.complex;
  const int cells = cpx.num_cells();
  const double bootstrap = 8.0;  // stand-in gradient bound until the build is measured

  // geometric caps per cell
  VecX cap(cells);
  if (cpx.dim() == 3) {
    const Constants3 k = compute_constants3(cpx);
    for (int c = 0; c < cells; ++c) {
      double m = k.delta_cap;
      for (int face : cpx.faces_of_cell(c)) m = std::min(m, k.d_face[face]);
      cap[c] = 0.999 * m;
    }
  } else {
    const Constants2 k = compute_constants2(cpx);
    for (int c = 0; c < cells; ++c) cap[c] = 0.999 * k.delta_cap;
  }

  WidthChoice choice;
  choice.cell_deltas = VecX(cells);
  choice.cell_budget = VecX(cells);

  Rng rng(seed);
  const int per_cell = std::max(collar_samples / std::max(1, cells), 20000);
  for (int c = 0; c < cells; ++c) {
    const double budget = eps * std::pow(2.0, -(c + 1));
    choice.cell_budget[c] = budget;
    const double target = budget / (2.0 * (1.0 + bootstrap) * f.gradient_norm(c));
    const CollarSampler cs = make_collar_sampler(cpx, c, per_cell, rng);
    double lo = 0.0, hi = cap[c];
    if (gauge(cs.volume(hi)) <= target) {
      lo = hi;
    } else {
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (gauge(cs.volume(mid)) <= target)
          lo = mid;
        else
          hi = mid;
      }
    }
    choice.cell_deltas[c] = std::max(lo, 1e-12 * cap[c]);
  }
  choice.uniform = choice.cell_deltas.minCoeff();

  // a-posteriori check: the bootstrap constant may undershoot, so halve until
  // the measured error clears the request
  for (int round = 0; round < 8; ++round) {
    const SmoothedMap sm = make_smoothed_map(f, choice.cell_deltas);
    NormQuery q;
    q.p_values = {p};
    q.samples = 100000;
    q.seed = seed + 101 + round;
    const NormReport report = compute_norms(sm, q);
    choice.achieved = report.w1p[0];
    if (choice.achieved <= eps) break;
    choice.cell_deltas *= 0.5;
    choice.uniform *= 0.5;
    ++choice.shrink_rounds;
  }
  return choice;
}

}  // namespace pinch
