#pragma once

#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include <unistd.h>

#include <Eigen/Geometry>

#include "catpose/random.hpp"
#include "catpose/types.hpp"

namespace catpose::testing {

inline PointCloud random_cloud(Rng& rng, std::size_t n, double half_width = 1.0) {
  PointCloud c;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.points.emplace_back(rng.uniform(-half_width, half_width), rng.uniform(-half_width, half_width),
                          rng.uniform(-half_width, half_width));
  }
  return c;
}

inline SimilarityTransform random_transform(Rng& rng, double scale_lo = 0.1, double scale_hi = 10.0) {
  SimilarityTransform t;
  t.scale = rng.uniform(scale_lo, scale_hi);
  t.rotation = rng.rotation();
  t.translation = Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
  return t;
}

inline double max_abs_diff(const Mat3& a, const Mat3& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Exhaustive double loop, no shared code with the library.
inline double brute_directed(const PointCloud& from, const PointCloud& to) {
  double sum = 0.0;
  for (const Vec3& p : from.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : to.points) {
      const double dx = p.x() - q.x();
      const double dy = p.y() - q.y();
      const double dz = p.z() - q.z();
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    sum += best;
  }
  return sum;
}

// Rodrigues formula written out, independent of Eigen::AngleAxis.
inline Mat3 rodrigues(const Vec3& axis, double angle) {
  const Vec3 k = axis.normalized();
  Mat3 kx;
  kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Mat3::Identity() + std::sin(angle) * kx + (1 - std::cos(angle)) * kx * kx;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("catpose_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace catpose::testing
