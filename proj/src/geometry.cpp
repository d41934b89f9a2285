#include "catpose/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "catpose/error.hpp"
#include "catpose/nearest.hpp"
#include "catpose/random.hpp"

namespace catpose {

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const Mat3 gram = r.transpose() * r;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

void validate(const SimilarityTransform& t) {
  if (!(t.scale > 0.0) || !std::isfinite(t.scale)) {
    throw InvalidInput("similarity transform: scale must be positive and finite");
  }
  if (!is_rotation(t.rotation)) {
    throw InvalidInput("similarity transform: rotation is not orthonormal with det +1");
  }
  if (!t.translation.allFinite()) {
    throw InvalidInput("similarity transform: translation is not finite");
  }
}

Mat3 orthonormalize(const Mat3& r) {
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

PointCloud transform_points(const SimilarityTransform& t, const PointCloud& cloud) {
  validate(t);
  PointCloud out;
  out.frame = cloud.frame;
  out.points.reserve(cloud.size());
  for (const Vec3& p : cloud.points) out.points.push_back(apply(t, p));
  return out;
}

SimilarityTransform compose(const SimilarityTransform& a, const SimilarityTransform& b) {
  SimilarityTransform c;
  c.scale = a.scale * b.scale;
  c.rotation = a.rotation * b.rotation;
  c.translation = a.scale * (a.rotation * b.translation) + a.translation;
  return c;
}

SimilarityTransform invert(const SimilarityTransform& t) {
  SimilarityTransform inv;
  inv.scale = 1.0 / t.scale;
  inv.rotation = t.rotation.transpose();
  inv.translation = -(inv.rotation * t.translation) / t.scale;
  return inv;
}

double rotation_angle(const Mat3& a, const Mat3& b) {
  const double c = ((a.transpose() * b).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

Mat3 axis_angle(const Vec3& axis, double radians) {
  return Eigen::AngleAxisd(radians, axis.normalized()).toRotationMatrix();
}

double chamfer_distance(const PointCloud& x, const PointCloud& y, ChamferMode mode) {
  if (x.empty() || y.empty()) throw InvalidInput("chamfer_distance: empty point cloud");
  const auto dx = nearest_squared_distances(x.points, y.points);
  const auto dy = nearest_squared_distances(y.points, x.points);
  double sx = std::accumulate(dx.begin(), dx.end(), 0.0);
  double sy = std::accumulate(dy.begin(), dy.end(), 0.0);
  if (mode == ChamferMode::kMean) {
    sx /= static_cast<double>(x.size());
    sy /= static_cast<double>(y.size());
  }
  return sx + sy;
}

Aabb compute_aabb(const PointCloud& cloud) {
  if (cloud.empty()) throw InvalidInput("bounding box of an empty point cloud");
  Aabb box{cloud[0], cloud[0]};
  for (const Vec3& p : cloud.points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

double bbox_diameter(const PointCloud& cloud) { return compute_aabb(cloud).diagonal(); }

NormalizedCloud nocs_normalize(const PointCloud& model) {
  const Aabb box = compute_aabb(model);
  const double diag = box.diagonal();
  if (!(diag > 0.0) || !std::isfinite(diag)) {
    throw DegenerateConfiguration("nocs_normalize: model has zero bounding-box diagonal");
  }
  SimilarityTransform t;
  t.scale = 1.0 / diag;
  t.translation = -box.center() / diag;
  NormalizedCloud out{transform_points(t, model), t};
  out.cloud.frame = Frame::kNocs;
  return out;
}

PointCloud resample(const PointCloud& cloud, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidInput("resample: requested zero points");
  if (cloud.empty()) throw InvalidInput("resample: empty point cloud");
  Rng rng(seed);
  PointCloud out;
  out.frame = cloud.frame;
  out.points.reserve(n);
  if (cloud.size() < n) {
    for (std::size_t i = 0; i < n; ++i) out.points.push_back(cloud[rng.index(cloud.size())]);
    return out;
  }
  // Partial Fisher-Yates over indices.
  std::vector<std::size_t> idx(cloud.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.index(idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.points.push_back(cloud[idx[i]]);
  }
  return out;
}

}  // namespace catpose
