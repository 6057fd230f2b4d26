#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>

#include "pinch/types.hh"

namespace pinch {

// Deterministic random stream; every sampling-based check owns one seeded
// instance so results are byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(eng_);
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(eng_);
  }
  std::uint64_t raw() { return eng_(); }

  // uniform barycentric coordinates on the k-simplex (k+1 weights)
  template <int K1>
  Vec<K1> barycentric() {
    std::array<double, K1 + 1> u{};
    u[0] = 0.0;
    u[K1] = 1.0;
    for (int i = 1; i < K1; ++i) u[i] = uniform(0.0, 1.0);
    std::sort(u.begin(), u.end());
    Vec<K1> w;
    for (int i = 0; i < K1; ++i) w[i] = u[i + 1] - u[i];
    return w;
  }

  template <int N>
  Vec<N> point_in_simplex(const Eigen::Matrix<double, N, N + 1>& verts) {
    Vec<N + 1> w = barycentric<N + 1>();
    return verts * w;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace pinch
