#include "catpose/nearest.hpp"

#include <algorithm>
#include <limits>

#include "catpose/error.hpp"

namespace catpose {
namespace {

constexpr std::size_t kLeafSize = 16;

}  // namespace

KdTree::KdTree(std::span<const Vec3> points) : points_(points), order_(points.size()) {
  if (points.empty()) throw InvalidInput("KdTree: empty point set");
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * points.size() / kLeafSize + 1);
  build(0, order_.size());
}

int KdTree::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] - lo[axis] <= 0.0) return id;  // all points coincide

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(int node_id, const Vec3& q, double& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      best = std::min(best, (q - points_[order_[i]]).squaredNorm());
    }
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  const double diff = q[node.axis] - node.split;
  const int near = diff <= 0.0 ? node.left : node.right;
  const int far = diff <= 0.0 ? node.right : node.left;
  search(near, q, best);
  if (diff * diff <= best) search(far, q, best);
}

double KdTree::nearest_squared_distance(const Vec3& query) const {
  double best = std::numeric_limits<double>::infinity();
  search(0, query, best);
  return best;
}

std::vector<double> nearest_squared_distances(std::span<const Vec3> queries,
                                              std::span<const Vec3> refs) {
  if (refs.empty()) throw InvalidInput("nearest_squared_distances: empty reference set");
  std::vector<double> out(queries.size());
  if (refs.size() <= kBruteForceLimit) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& r : refs) best = std::min(best, (queries[i] - r).squaredNorm());
      out[i] = best;
    }
    return out;
  }
  const KdTree tree(refs);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    out[i] = tree.nearest_squared_distance(queries[i]);
  }
  return out;
}

}  // namespace catpose
