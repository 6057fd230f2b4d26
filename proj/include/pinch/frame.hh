#pragma once

#include "pinch/types.hh"

namespace pinch {

// Oriented orthonormal coordinates along an edge in the plane: local
// coordinates are (w, z) with w along the edge and z across it.
struct Frame2 {
  Vec2 origin;
  Vec2 u;  // along the edge
  Vec2 n;  // left normal, so (u, n) is positively oriented

  Vec2 to_local(const Vec2& x) const {
    const Vec2 d = x - origin;
    return {d.dot(u), d.dot(n)};
  }
  Vec2 to_world(const Vec2& p) const { return origin + p[0] * u + p[1] * n; }
  Mat2 rot() const {
    Mat2 r;
    r.row(0) = u.transpose();
    r.row(1) = n.transpose();
    return r;
  }
};

Frame2 edge_frame(const Vec2& s, const Vec2& s_prime);

// Rigid frame that sends a corner to the origin, its edge to the nonnegative
// x-axis and the chosen face into the closed upper xy half-plane.  rot has
// determinant +1; rows are the frame directions.
struct Frame3 {
  Vec3 origin;
  Mat3 rot;

  Vec3 to_local(const Vec3& x) const { return rot * (x - origin); }
  Vec3 to_world(const Vec3& p) const { return origin + rot.transpose() * p; }
};

Frame3 corner_frame(const Vec3& a, const Vec3& a_prime, const Vec3& c);

}  // namespace pinch
