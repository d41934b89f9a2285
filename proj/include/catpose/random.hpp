#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "catpose/types.hpp"

namespace catpose {

// Seeded generator with distribution helpers written out explicitly, so a
// given seed yields the same stream with any standard library (the std::
// distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n must be > 0.
  std::size_t index(std::size_t n) {
    const auto bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = -bound % bound;  // 2^64 mod n
    std::uint64_t r = engine_();
    while (r < limit) r = engine_();
    return static_cast<std::size_t>(r % bound);
  }

  // Standard normal via Box-Muller; the second variate is discarded.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vec3 unit_vector() {
    Vec3 v;
    do {
      v = Vec3(normal(), normal(), normal());
    } while (v.squaredNorm() < 1e-12);
    return v.normalized();
  }

  // Haar-uniform rotation from a normalized Gaussian quaternion.
  Mat3 rotation();

 private:
  std::mt19937_64 engine_;
};

inline Mat3 Rng::rotation() {
  Eigen::Vector4d q;
  do {
    q = Eigen::Vector4d(normal(), normal(), normal(), normal());
  } while (q.squaredNorm() < 1e-12);
  q.normalize();
  return Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
}

}  // namespace catpose
