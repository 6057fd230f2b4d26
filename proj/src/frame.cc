#include "pinch/frame.hh"

#include <stdexcept>

namespace pinch {

Frame2 edge_frame(const Vec2& s, const Vec2& s_prime) {
  const Vec2 d = s_prime - s;
  const double len = d.norm();
  if (len <= 0.0) throw std::invalid_argument("edge_frame: zero-length edge");
  Frame2 f;
  f.origin = s;
  f.u = d / len;
  f.n = Vec2(-f.u[1], f.u[0]);
  return f;
}

Frame3 corner_frame(const Vec3& a, const Vec3& a_prime, const Vec3& c) {
  const Vec3 d = a_prime - a;
  const double len = d.norm();
  if (len <= 0.0) throw std::invalid_argument("corner_frame: zero-length edge");
  const Vec3 u1 = d / len;
  Vec3 w = c - a;
  w -= w.dot(u1) * u1;
  const double wn = w.norm();
  if (wn <= 1e-14 * len) throw std::invalid_argument("corner_frame: collinear face vertex");
  const Vec3 u2 = w / wn;
  const Vec3 u3 = u1.cross(u2);
  Frame3 f;
  f.origin = a;
  f.rot.row(0) = u1.transpose();
  f.rot.row(1) = u2.transpose();
  f.rot.row(2) = u3.transpose();
  return f;
}

}  // namespace pinch
