#include "catpose/losses.hpp"

#include <cmath>
#include <string>

#include "catpose/error.hpp"
#include "catpose/geometry.hpp"

namespace catpose {

CorrespondenceMatrix CorrespondenceMatrix::from_dense(Eigen::MatrixXd a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) throw InvalidInput("correspondence matrix is empty");
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidInput("correspondence matrix row " + std::to_string(i) +
                           " has a negative or non-finite entry at column " + std::to_string(j));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw InvalidInput("correspondence matrix row " + std::to_string(i) + " sums to " +
                         std::to_string(sum) + ", expected 1");
    }
  }
  return CorrespondenceMatrix(std::move(a));
}

PointCloud reconstruct_model(const PointCloud& prior, const DeformationField& deformation) {
  if (prior.size() != deformation.size()) {
    throw InvalidInput("reconstruct_model: prior has " + std::to_string(prior.size()) +
                       " points, deformation has " + std::to_string(deformation.size()));
  }
  PointCloud m;
  m.frame = prior.frame;
  m.points.reserve(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) m.points.push_back(prior[i] + deformation[i]);
  return m;
}

PointCloud nocs_coordinates(const CorrespondenceMatrix& a, const PointCloud& model) {
  if (static_cast<std::size_t>(a.cols()) != model.size()) {
    throw InvalidInput("nocs_coordinates: matrix has " + std::to_string(a.cols()) +
                       " columns, model has " + std::to_string(model.size()) + " points");
  }
  PointCloud p;
  p.frame = Frame::kNocs;
  p.points.reserve(static_cast<std::size_t>(a.rows()));
  const Eigen::MatrixXd& dense = a.dense();
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    Vec3 acc = Vec3::Zero();
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      acc += dense(i, j) * model[static_cast<std::size_t>(j)];
    }
    p.points.push_back(acc);
  }
  return p;
}

double smooth_l1(double e) {
  const double a = std::abs(e);
  return a <= 0.1 ? 5.0 * e * e : a - 0.05;
}

double loss_cd(const PointCloud& model, const PointCloud& model_gt) {
  return chamfer_distance(model, model_gt, ChamferMode::kSum);
}

double loss_corr(const PointCloud& nocs, const PointCloud& nocs_gt) {
  if (nocs.size() != nocs_gt.size()) {
    throw InvalidInput("loss_corr: " + std::to_string(nocs.size()) + " predicted vs " +
                       std::to_string(nocs_gt.size()) + " ground-truth points");
  }
  if (nocs.empty()) throw InvalidInput("loss_corr: empty point cloud");
  double sum = 0.0;
  for (std::size_t k = 0; k < nocs.size(); ++k) {
    for (int i = 0; i < 3; ++i) sum += smooth_l1(nocs[k][i] - nocs_gt[k][i]);
  }
  return sum / static_cast<double>(nocs.size());
}

double loss_entropy(const CorrespondenceMatrix& a) {
  const Eigen::MatrixXd& dense = a.dense();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      const double v = dense(i, j);
      if (v > 0.0) sum -= v * std::log(v);
    }
  }
  return sum / static_cast<double>(dense.rows());
}

double loss_def(const DeformationField& deformation) {
  if (deformation.empty()) throw InvalidInput("loss_def: empty deformation field");
  double sum = 0.0;
  for (const Vec3& d : deformation) sum += d.norm();
  return sum / static_cast<double>(deformation.size());
}

LossBreakdown total_loss(const PointCloud& model, const PointCloud& model_gt, const PointCloud& nocs,
                         const PointCloud& nocs_gt, const CorrespondenceMatrix& a,
                         const DeformationField& deformation, const LossWeights& w) {
  if (w.lambda1 < 0.0 || w.lambda2 < 0.0 || w.lambda3 < 0.0 || w.lambda4 < 0.0) {
    throw InvalidInput("loss weights must be nonnegative");
  }
  LossBreakdown b;
  b.cd = loss_cd(model, model_gt);
  b.corr = loss_corr(nocs, nocs_gt);
  b.entropy = loss_entropy(a);
  b.def = loss_def(deformation);
  b.total = w.lambda1 * b.cd + w.lambda2 * b.corr + w.lambda3 * b.entropy + w.lambda4 * b.def;
  return b;
}

}  // namespace catpose
