#include "catpose/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <Eigen/SVD>

#include "catpose/geometry.hpp"
#include "catpose/parallel.hpp"
#include "catpose/random.hpp"

namespace catpose {
namespace {

// Relative eigenvalue floor below which the centered source spread is
// treated as lower-dimensional.
constexpr double kRankTolerance = 1e-12;

struct Hypothesis {
  bool valid = false;
  SimilarityTransform transform;
  std::size_t inliers = 0;
  double rms = std::numeric_limits<double>::infinity();
};

struct Scored {
  std::vector<bool> mask;
  std::size_t count = 0;
  double rms = 0.0;
};

Scored score(const SimilarityTransform& t, const CorrespondenceSet& corr, double threshold) {
  Scored s;
  s.mask.assign(corr.src.size(), false);
  double sq = 0.0;
  for (std::size_t i = 0; i < corr.src.size(); ++i) {
    const double r2 = (corr.dst[i] - apply(t, corr.src[i])).squaredNorm();
    if (std::sqrt(r2) <= threshold) {
      s.mask[i] = true;
      ++s.count;
      sq += r2;
    }
  }
  s.rms = s.count > 0 ? std::sqrt(sq / static_cast<double>(s.count)) : 0.0;
  return s;
}

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (!a.valid) return false;
  if (!b.valid) return true;
  if (a.inliers != b.inliers) return a.inliers > b.inliers;
  return a.rms < b.rms;  // equal keeps the earlier hypothesis
}

}  // namespace

void validate(const RansacParams& p) {
  if (p.sample_size < 3) throw InvalidInput("ransac: sample_size must be >= 3");
  if (p.max_iterations < 1) throw InvalidInput("ransac: max_iterations must be >= 1");
  if (!(p.inlier_fraction_of_diameter > 0.0 && p.inlier_fraction_of_diameter < 1.0)) {
    throw InvalidInput("ransac: inlier_fraction_of_diameter must be in (0, 1)");
  }
  if (!(p.early_exit_ratio > 0.0 && p.early_exit_ratio <= 1.0)) {
    throw InvalidInput("ransac: early_exit_ratio must be in (0, 1]");
  }
}

std::size_t PoseFitResult::inlier_count() const {
  return static_cast<std::size_t>(std::count(inlier_mask.begin(), inlier_mask.end(), true));
}

SimilarityTransform umeyama(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size()) {
    throw InvalidInput("umeyama: src has " + std::to_string(src.size()) + " points, dst has " +
                       std::to_string(dst.size()));
  }
  if (src.size() < 3) throw InvalidInput("umeyama: at least 3 correspondences are required");

  const double n = static_cast<double>(src.size());
  Vec3 mu_src = Vec3::Zero();
  Vec3 mu_dst = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    mu_src += src[i];
    mu_dst += dst[i];
  }
  mu_src /= n;
  mu_dst /= n;

  Mat3 cov_src = Mat3::Zero();
  Mat3 cross = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec3 a = src[i] - mu_src;
    const Vec3 b = dst[i] - mu_dst;
    cov_src += a * a.transpose();
    cross += b * a.transpose();
  }
  cov_src /= n;
  cross /= n;

  const Eigen::JacobiSVD<Mat3> spread(cov_src);
  const Vec3 ev = spread.singularValues();  // descending
  if (!(ev[0] > 0.0) || ev[1] <= kRankTolerance * ev[0]) {
    throw DegenerateConfiguration("umeyama: source points are coincident or collinear");
  }
  const double var_src = cov_src.trace();

  const Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Vec3 sign = Vec3::Ones();
  if (u.determinant() * v.determinant() < 0.0) sign[2] = -1.0;

  SimilarityTransform t;
  t.rotation = u * sign.asDiagonal() * v.transpose();
  t.scale = svd.singularValues().dot(sign) / var_src;
  if (!(t.scale > 0.0)) {
    throw DegenerateConfiguration("umeyama: fitted scale is not positive");
  }
  t.translation = mu_dst - t.scale * (t.rotation * mu_src);
  return t;
}

SimilarityTransform umeyama(const CorrespondenceSet& corr) {
  return umeyama(corr.src.points, corr.dst.points);
}

double sum_squared_residuals(const SimilarityTransform& t, const CorrespondenceSet& corr) {
  double sum = 0.0;
  for (std::size_t i = 0; i < corr.src.size(); ++i) {
    sum += (corr.dst[i] - apply(t, corr.src[i])).squaredNorm();
  }
  return sum;
}

// Upper bound on refit rounds after hypothesis selection.
constexpr int kMaxRefits = 10;

PoseFitResult ransac_fit(const CorrespondenceSet& corr, const RansacParams& params, int threads) {
  validate(params);
  const std::size_t n = corr.src.size();
  if (corr.dst.size() != n) {
    throw InvalidInput("ransac: src and dst sizes differ (" + std::to_string(n) + " vs " +
                       std::to_string(corr.dst.size()) + ")");
  }
  const auto sample_size = static_cast<std::size_t>(params.sample_size);
  if (n < sample_size) {
    throw InvalidInput("ransac: " + std::to_string(n) + " correspondences, need at least " +
                       std::to_string(sample_size));
  }
  const double threshold = params.inlier_fraction_of_diameter * bbox_diameter(corr.dst);

  // The hypothesis sequence depends only on the seed.
  const auto iterations = static_cast<std::size_t>(params.max_iterations);
  std::vector<std::vector<std::size_t>> samples(iterations);
  {
    Rng rng(params.seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (auto& sample : samples) {
      for (std::size_t k = 0; k < sample_size; ++k) {
        std::swap(idx[k], idx[k + rng.index(n - k)]);
      }
      sample.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(sample_size));
    }
  }

  auto evaluate = [&](std::size_t i) {
    Hypothesis h;
    std::vector<Vec3> s;
    std::vector<Vec3> d;
    s.reserve(sample_size);
    d.reserve(sample_size);
    for (std::size_t j : samples[i]) {
      s.push_back(corr.src[j]);
      d.push_back(corr.dst[j]);
    }
    try {
      h.transform = umeyama(s, d);
    } catch (const DegenerateConfiguration&) {
      return h;  // skipped
    }
    const Scored sc = score(h.transform, corr, threshold);
    h.valid = true;
    h.inliers = sc.count;
    h.rms = sc.rms;
    return h;
  };

  const double exit_count = params.early_exit_ratio * static_cast<double>(n);
  const std::size_t batch = std::max(1, threads) == 1 ? 1 : static_cast<std::size_t>(threads) * 4;
  std::vector<Hypothesis> evaluated(iterations);
  Hypothesis best;
  std::size_t run = 0;
  bool done = false;
  for (std::size_t start = 0; start < iterations && !done; start += batch) {
    const std::size_t end = std::min(iterations, start + batch);
    parallel_for(end - start, threads, [&](std::size_t k) { evaluated[start + k] = evaluate(start + k); });
    for (std::size_t i = start; i < end; ++i) {
      run = i + 1;
      if (better(evaluated[i], best)) best = evaluated[i];
      if (evaluated[i].valid && static_cast<double>(evaluated[i].inliers) >= exit_count) {
        done = true;
        break;
      }
    }
  }

  PoseFitResult result;
  result.iterations_run = static_cast<int>(run);
  result.inlier_threshold = threshold;
  if (!best.valid) {
    throw FitFailure("ransac: every sampled hypothesis was degenerate", result);
  }
  Scored hyp = score(best.transform, corr, threshold);
  result.transform = best.transform;
  result.inlier_mask = hyp.mask;
  result.inlier_rms = hyp.rms;
  if (hyp.count < sample_size) {
    throw FitFailure("ransac: best hypothesis has " + std::to_string(hyp.count) +
                         " inliers, fewer than the sample size " + std::to_string(sample_size),
                     result);
  }

  // Refit on the consensus set, then alternate re-scoring and refitting until
  // the inlier set is stable. The reported mask is always scored under the
  // returned transform, so every inlier satisfies the threshold.
  std::vector<bool> mask = hyp.mask;
  for (int round = 0; round < kMaxRefits; ++round) {
    std::vector<Vec3> s;
    std::vector<Vec3> d;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) {
        s.push_back(corr.src[i]);
        d.push_back(corr.dst[i]);
      }
    }
    SimilarityTransform refit;
    try {
      refit = umeyama(s, d);
    } catch (const DegenerateConfiguration&) {
      break;
    }
    Scored ref = score(refit, corr, threshold);
    if (ref.count < sample_size) break;
    const bool stable = ref.mask == mask;
    result.transform = refit;
    result.inlier_mask = ref.mask;
    result.inlier_rms = ref.rms;
    if (stable) break;
    mask = std::move(ref.mask);
  }
  return result;
}

}  // namespace catpose
