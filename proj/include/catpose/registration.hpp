#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "catpose/error.hpp"
#include "catpose/types.hpp"

namespace catpose {

// src holds NOCS coordinates, dst the matching observed camera-frame points.
struct CorrespondenceSet {
  PointCloud src;
  PointCloud dst;
};

struct RansacParams {
  int sample_size = 5;
  int max_iterations = 128;
  double inlier_fraction_of_diameter = 0.10;
  std::uint64_t seed = 0;
  // Stop drawing hypotheses once this fraction of pairs are inliers.
  double early_exit_ratio = 0.95;
};

void validate(const RansacParams& params);

struct PoseFitResult {
  SimilarityTransform transform;
  std::vector<bool> inlier_mask;
  int iterations_run = 0;
  double inlier_rms = 0.0;
  double inlier_threshold = 0.0;

  std::size_t inlier_count() const;
};

// No hypothesis reached sample_size inliers. best() is the strongest attempt
// (empty mask if every sample was degenerate).
class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, PoseFitResult best) : Error(what), best_(std::move(best)) {}
  const PoseFitResult& best() const { return best_; }

 private:
  PoseFitResult best_;
};

// Least-squares similarity transform mapping src onto dst (Umeyama, with the
// reflection-correcting sign matrix so det(R) = +1).
// Throws InvalidInput on size mismatch or fewer than 3 pairs, and
// DegenerateConfiguration when src spans fewer than two dimensions or the
// fitted scale is not positive.
SimilarityTransform umeyama(std::span<const Vec3> src, std::span<const Vec3> dst);
SimilarityTransform umeyama(const CorrespondenceSet& corr);

// Sum of squared residuals ‖dst_i − T(src_i)‖².
double sum_squared_residuals(const SimilarityTransform& t, const CorrespondenceSet& corr);

// Seeded RANSAC over umeyama hypotheses, followed by a refit on the winning
// inlier set. The inlier threshold is a fraction of the dst bounding-box
// diagonal. Ties on inlier count go to the lower inlier RMS, then the earlier
// hypothesis. `threads` only changes wall time; the result is the same.
PoseFitResult ransac_fit(const CorrespondenceSet& corr, const RansacParams& params,
                         int threads = 1);

}  // namespace catpose
