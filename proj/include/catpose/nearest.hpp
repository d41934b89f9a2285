#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "catpose/types.hpp"

namespace catpose {

// Static 3-d tree over a borrowed point array. Queries return the exact
// minimum squared distance, identical to an exhaustive scan.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points);

  double nearest_squared_distance(const Vec3& query) const;

 private:
  struct Node {
    std::size_t begin;
    std::size_t end;
    int axis;      // -1 for leaves
    double split;
    int left;
    int right;
  };

  int build(std::size_t begin, std::size_t end);
  void search(int node, const Vec3& q, double& best) const;

  std::span<const Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

// Clouds up to this size are searched exhaustively.
inline constexpr std::size_t kBruteForceLimit = 2048;

// For every query point, the squared distance to its nearest reference point.
std::vector<double> nearest_squared_distances(std::span<const Vec3> queries,
                                              std::span<const Vec3> refs);

}  // namespace catpose
