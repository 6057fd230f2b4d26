#include "pinch/quadrature.hh"

#include <cmath>
#include <stdexcept>

namespace pinch {

namespace {

void push_node(MatX& nodes, VecX& weights, int& row, std::initializer_list<double> bary,
               double w) {
  int j = 0;
  for (double b : bary) nodes(row, j++) = b;
  weights[row] = w;
  ++row;
}

SimplexRule triangle_deg4() {
  // two symmetric orbits of three nodes each
  const double a1 = 0.108103018168070, b1 = 0.445948490915965, w1 = 0.223381589678011;
  const double a2 = 0.816847572980459, b2 = 0.091576213509771, w2 = 0.109951743655322;
  SimplexRule rule;
  rule.nodes.resize(6, 3);
  rule.weights.resize(6);
  int row = 0;
  push_node(rule.nodes, rule.weights, row, {a1, b1, b1}, w1);
  push_node(rule.nodes, rule.weights, row, {b1, a1, b1}, w1);
  push_node(rule.nodes, rule.weights, row, {b1, b1, a1}, w1);
  push_node(rule.nodes, rule.weights, row, {a2, b2, b2}, w2);
  push_node(rule.nodes, rule.weights, row, {b2, a2, b2}, w2);
  push_node(rule.nodes, rule.weights, row, {b2, b2, a2}, w2);
  return rule;
}

SimplexRule tet_deg4() {
  // two vertex-centred orbits of four nodes and one edge-centred orbit of six
  const double a1 = 0.0673422422100983, b1 = 0.3108859192633005, w1 = 0.1126879257180162;
  const double a2 = 0.7217942490673264, b2 = 0.0927352503108912, w2 = 0.0734930431163619;
  const double a3 = 0.0455037041256497, b3 = 0.4544962958743503, w3 = 0.0425460207770812;
  SimplexRule rule;
  rule.nodes.resize(14, 4);
  rule.weights.resize(14);
  int row = 0;
  push_node(rule.nodes, rule.weights, row, {a1, b1, b1, b1}, w1);
  push_node(rule.nodes, rule.weights, row, {b1, a1, b1, b1}, w1);
  push_node(rule.nodes, rule.weights, row, {b1, b1, a1, b1}, w1);
  push_node(rule.nodes, rule.weights, row, {b1, b1, b1, a1}, w1);
  push_node(rule.nodes, rule.weights, row, {a2, b2, b2, b2}, w2);
  push_node(rule.nodes, rule.weights, row, {b2, a2, b2, b2}, w2);
  push_node(rule.nodes, rule.weights, row, {b2, b2, a2, b2}, w2);
  push_node(rule.nodes, rule.weights, row, {b2, b2, b2, a2}, w2);
  push_node(rule.nodes, rule.weights, row, {a3, a3, b3, b3}, w3);
  push_node(rule.nodes, rule.weights, row, {a3, b3, a3, b3}, w3);
  push_node(rule.nodes, rule.weights, row, {a3, b3, b3, a3}, w3);
  push_node(rule.nodes, rule.weights, row, {b3, a3, a3, b3}, w3);
  push_node(rule.nodes, rule.weights, row, {b3, a3, b3, a3}, w3);
  push_node(rule.nodes, rule.weights, row, {b3, b3, a3, a3}, w3);
  return rule;
}

}  // namespace

SimplexRule simplex_rule_deg4(int dim) {
  if (dim == 2) return triangle_deg4();
  if (dim == 3) return tet_deg4();
  throw std::invalid_argument("quadrature rules cover dimensions 2 and 3");
}

double simplex_measure(const MatX& verts) {
  const int n = static_cast<int>(verts.rows());
  MatX span(n, n);
  for (int j = 0; j < n; ++j) span.col(j) = verts.col(j + 1) - verts.col(0);
  double fac = 1.0;
  for (int k = 2; k <= n; ++k) fac *= k;
  return std::abs(span.determinant()) / fac;
}

double simplex_diameter(const MatX& verts) {
  double d = 0.0;
  for (int i = 0; i < verts.cols(); ++i)
    for (int j = i + 1; j < verts.cols(); ++j)
      d = std::max(d, (verts.col(i) - verts.col(j)).norm());
  return d;
}

double integrate_cell(const MatX& verts, const SimplexRule& rule,
                      const std::function<double(const VecX&)>& fn) {
  const double measure = simplex_measure(verts);
  double acc = 0.0;
  for (int q = 0; q < rule.nodes.rows(); ++q) {
    VecX x = VecX::Zero(verts.rows());
    for (int j = 0; j < verts.cols(); ++j) x += rule.nodes(q, j) * verts.col(j);
    acc += rule.weights[q] * fn(x);
  }
  return acc * measure;
}

std::vector<MatX> refine_simplex(const MatX& verts) {
  const int n = static_cast<int>(verts.rows());
  std::vector<MatX> children;
  if (n == 2) {
    const VecX m01 = 0.5 * (verts.col(0) + verts.col(1));
    const VecX m02 = 0.5 * (verts.col(0) + verts.col(2));
    const VecX m12 = 0.5 * (verts.col(1) + verts.col(2));
    auto tri = [&](const VecX& a, const VecX& b, const VecX& c) {
      MatX t(2, 3);
      t.col(0) = a;
      t.col(1) = b;
      t.col(2) = c;
      children.push_back(t);
    };
    tri(verts.col(0), m01, m02);
    tri(m01, verts.col(1), m12);
    tri(m02, m12, verts.col(2));
    tri(m01, m12, m02);
  } else {
    const VecX m01 = 0.5 * (verts.col(0) + verts.col(1));
    const VecX m02 = 0.5 * (verts.col(0) + verts.col(2));
    const VecX m03 = 0.5 * (verts.col(0) + verts.col(3));
    const VecX m12 = 0.5 * (verts.col(1) + verts.col(2));
    const VecX m13 = 0.5 * (verts.col(1) + verts.col(3));
    const VecX m23 = 0.5 * (verts.col(2) + verts.col(3));
    auto tet = [&](const VecX& a, const VecX& b, const VecX& c, const VecX& d) {
      MatX t(3, 4);
      t.col(0) = a;
      t.col(1) = b;
      t.col(2) = c;
      t.col(3) = d;
      children.push_back(t);
    };
    // corner cells plus the interior octahedron split along the m02-m13 axis
    tet(verts.col(0), m01, m02, m03);
    tet(m01, verts.col(1), m12, m13);
    tet(m02, m12, verts.col(2), m23);
    tet(m03, m13, m23, verts.col(3));
    tet(m01, m02, m03, m13);
    tet(m01, m02, m12, m13);
    tet(m02, m03, m13, m23);
    tet(m02, m12, m13, m23);
  }
  return children;
}

double integrate_adaptive(const MatX& verts, const SimplexRule& rule,
                          const std::function<double(const VecX&)>& fn,
                          const std::function<bool(const MatX&, double)>& needs_refine,
                          double floor_diam, int max_depth) {
  const double diam = simplex_diameter(verts);
  if (max_depth > 0 && diam > floor_diam && needs_refine(verts, diam)) {
    double acc = 0.0;
    for (const MatX& child : refine_simplex(verts))
      acc += integrate_adaptive(child, rule, fn, needs_refine, floor_diam, max_depth - 1);
    return acc;
  }
  return integrate_cell(verts, rule, fn);
}

}  // namespace pinch
