#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "catpose/types.hpp"

namespace catpose {

// Per-point displacement of the prior, NOCS units. Length matches the prior.
using DeformationField = std::vector<Vec3>;

// Dense Nv×Nc soft assignment. Construction enforces nonnegative entries and
// rows summing to 1.
class CorrespondenceMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-6;

  // Throws InvalidInput naming the first offending row.
  static CorrespondenceMatrix from_dense(Eigen::MatrixXd a, double tol = kRowSumTolerance);

  const Eigen::MatrixXd& dense() const { return a_; }
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }

 private:
  explicit CorrespondenceMatrix(Eigen::MatrixXd a) : a_(std::move(a)) {}
  Eigen::MatrixXd a_;
};

struct LossWeights {
  double lambda1 = 5.0;   // reconstruction (Chamfer)
  double lambda2 = 1.0;   // correspondence (smooth L1)
  double lambda3 = 1e-4;  // entropy
  double lambda4 = 0.01;  // deformation magnitude
};

struct LossBreakdown {
  double cd = 0.0;
  double corr = 0.0;
  double entropy = 0.0;
  double def = 0.0;
  double total = 0.0;
};

// M = Mc + D.
PointCloud reconstruct_model(const PointCloud& prior, const DeformationField& deformation);

// P = A · M, one row per observed point.
PointCloud nocs_coordinates(const CorrespondenceMatrix& a, const PointCloud& model);

// 5e² for |e| <= 0.1, |e| − 0.05 beyond; continuous with slope 1 at the knee.
double smooth_l1(double e);

double loss_cd(const PointCloud& model, const PointCloud& model_gt);

// Mean over points of the per-coordinate smooth-L1 sum.
double loss_corr(const PointCloud& nocs, const PointCloud& nocs_gt);

// Mean row entropy (natural log, 0·log 0 = 0).
double loss_entropy(const CorrespondenceMatrix& a);

// Mean displacement norm.
double loss_def(const DeformationField& deformation);

LossBreakdown total_loss(const PointCloud& model, const PointCloud& model_gt, const PointCloud& nocs,
                         const PointCloud& nocs_gt, const CorrespondenceMatrix& a,
                         const DeformationField& deformation, const LossWeights& w = {});

}  // namespace catpose
