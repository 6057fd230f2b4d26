#include "pinch/pa_map.hh"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "pinch/rng.hh"

namespace pinch {

namespace {

std::string point_string(const VecX& x) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

VecX PiecewiseAffineMap::evaluate_on(int cell, const VecX& x) const {
  return matrix[cell] * x + offset[cell];
}

VecX PiecewiseAffineMap::evaluate(const VecX& x) const {
  const int c = complex.locate(x);
  if (c < 0) throw std::domain_error("piecewise affine map: point outside domain " + point_string(x));
  return evaluate_on(c, x);
}

const MatX& PiecewiseAffineMap::jacobian(const VecX& x) const {
  const int c = complex.locate(x);
  if (c < 0) throw std::domain_error("piecewise affine map: point outside domain " + point_string(x));
  return matrix[c];
}

double PiecewiseAffineMap::gradient_norm(int cell) const {
  return matrix[cell].jacobiSvd().singularValues()(0);
}

double PiecewiseAffineMap::max_gradient_norm() const {
  double worst = 0.0;
  for (int c = 0; c < static_cast<int>(matrix.size()); ++c)
    worst = std::max(worst, gradient_norm(c));
  return worst;
}

ValidationReport validate_pa_map(const PiecewiseAffineMap& f, double tol, int injectivity_samples,
                                 unsigned long seed) {
  ValidationReport report;
  const int n = f.complex.dim();
  const int cells = f.complex.num_cells();

  if (static_cast<int>(f.matrix.size()) != cells || static_cast<int>(f.offset.size()) != cells) {
    report.violations.push_back({"pa_shape", -1, -1, "piece count does not match cell count"});
    return report;
  }
  for (int c = 0; c < cells; ++c) {
    if (f.matrix[c].rows() != n || f.matrix[c].cols() != n || f.offset[c].size() != n) {
      report.violations.push_back({"pa_shape", c, -1, "piece dimensions do not match the complex"});
      return report;
    }
  }

  // one determinant sign across all pieces
  int sign = 0;
  for (int c = 0; c < cells; ++c) {
    const double det = f.matrix[c].determinant();
    const double scale = std::max(1.0, f.matrix[c].cwiseAbs().maxCoeff());
    if (std::abs(det) <= 1e-14 * std::pow(scale, n)) {
      report.violations.push_back({"pa_degenerate", c, -1, "piece determinant vanishes"});
      continue;
    }
    const int s = det > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign)
      report.violations.push_back({"pa_orientation", c, -1, "determinant sign differs from piece 0"});
  }

  // agreement on shared subsimplices: affine pieces that agree on every shared
  // vertex agree on the spanned subsimplex
  for (int v = 0; v < f.complex.num_vertices(); ++v) {
    const auto& inc = f.complex.cells_of_vertex(v);
    if (inc.size() < 2) continue;
    const VecX x = f.complex.vertex(v);
    const VecX base = f.evaluate_on(inc[0], x);
    for (std::size_t i = 1; i < inc.size(); ++i) {
      const double gap = (f.evaluate_on(inc[i], x) - base).norm();
      if (gap > tol) {
        std::ostringstream os;
        os << "vertex " << v << " images differ by " << gap << " between cells " << inc[0]
           << " and " << inc[i];
        report.violations.push_back({"pa_continuity", inc[0], inc[i], os.str()});
      }
    }
  }

  // sampled injectivity: a point interior to the image simplices of two
  // distinct cells has two distinct preimages, so it suffices to test sampled
  // image points for strict containment in every other image simplex
  if (cells > 1 && injectivity_samples > 0) {
    Rng rng(seed);
    std::vector<MatX> image_span_inv(cells);
    std::vector<VecX> image_base(cells);
    bool spans_ok = true;
    for (int c = 0; c < cells; ++c) {
      const auto cell = f.complex.cell(c);
      image_base[c] = f.evaluate_on(c, f.complex.vertex(cell[0]));
      MatX span(n, n);
      for (int j = 0; j < n; ++j)
        span.col(j) = f.evaluate_on(c, f.complex.vertex(cell[j + 1])) - image_base[c];
      if (std::abs(span.determinant()) <= 1e-300) {
        spans_ok = false;
        break;
      }
      image_span_inv[c] = span.inverse();
    }
    for (int it = 0; spans_ok && it < injectivity_samples; ++it) {
      const int ca = it % cells;
      VecX bary;
      if (n == 2)
        bary = rng.barycentric<3>();
      else
        bary = rng.barycentric<4>();
      VecX x = VecX::Zero(n);
      for (int j = 0; j <= n; ++j) x += bary[j] * f.complex.vertex(f.complex.cells()(ca, j));
      const VecX y = f.evaluate_on(ca, x);
      bool hit = false;
      for (int cb = 0; cb < cells && !hit; ++cb) {
        if (cb == ca) continue;
        const VecX w = image_span_inv[cb] * (y - image_base[cb]);
        if (w.minCoeff() > 1e-9 && w.sum() < 1.0 - 1e-9) {
          VecX other = (1.0 - w.sum()) * f.complex.vertex(f.complex.cells()(cb, 0));
          for (int j = 0; j < n; ++j)
            other += w[j] * f.complex.vertex(f.complex.cells()(cb, j + 1));
          std::ostringstream os;
          os << "image point " << point_string(y) << " is reached from " << point_string(x)
             << " in cell " << ca << " and from " << point_string(other) << " in cell " << cb;
          report.violations.push_back({"pa_injectivity", ca, cb, os.str()});
          hit = true;
        }
      }
      if (hit) break;
    }
  }

  return report;
}

PiecewiseAffineMap make_pa_map(const SimplicialComplex& cpx, std::vector<MatX> matrices,
                               std::vector<VecX> offsets) {
  PiecewiseAffineMap f;
  f.complex = cpx;
  f.matrix = std::move(matrices);
  f.offset = std::move(offsets);
  const ValidationReport report = validate_pa_map(f);
  if (!report.ok())
    throw std::invalid_argument("piecewise affine map rejected:\n" + report.to_string());
  f.orientation = f.matrix.empty() ? 0 : (f.matrix[0].determinant() > 0.0 ? 1 : -1);
  return f;
}

PiecewiseAffineMap identity_pa_map(const SimplicialComplex& cpx) {
  const int n = cpx.dim();
  std::vector<MatX> mats(cpx.num_cells(), MatX::Identity(n, n));
  std::vector<VecX> offs(cpx.num_cells(), VecX::Zero(n));
  return make_pa_map(cpx, std::move(mats), std::move(offs));
}

PiecewiseAffineMap pa_from_vertex_images(const SimplicialComplex& cpx, const MatX& images) {
  const int n = cpx.dim();
  if (images.rows() != cpx.num_vertices() || images.cols() != n)
    throw std::invalid_argument("vertex image table does not match the complex");
  std::vector<MatX> mats(cpx.num_cells());
  std::vector<VecX> offs(cpx.num_cells());
  for (int c = 0; c < cpx.num_cells(); ++c) {
    const auto cell = cpx.cell(c);
    MatX span(n, n), span_img(n, n);
    const VecX x0 = cpx.vertex(cell[0]);
    const VecX w0 = images.row(cell[0]).transpose();
    for (int j = 0; j < n; ++j) {
      span.col(j) = cpx.vertex(cell[j + 1]) - x0;
      span_img.col(j) = images.row(cell[j + 1]).transpose() - w0;
    }
    mats[c] = span_img * span.inverse();
    offs[c] = w0 - mats[c] * x0;
  }
  return make_pa_map(cpx, std::move(mats), std::move(offs));
}

}  // namespace pinch
