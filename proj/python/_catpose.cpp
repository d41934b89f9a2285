#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "catpose/box_iou.hpp"
#include "catpose/datagen.hpp"
#include "catpose/error.hpp"
#include "catpose/evaluation.hpp"
#include "catpose/geometry.hpp"
#include "catpose/io.hpp"
#include "catpose/losses.hpp"
#include "catpose/registration.hpp"
#include "catpose/report.hpp"
#include "catpose/symmetry.hpp"

namespace py = pybind11;
using namespace catpose;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

PointCloud to_cloud(const Points& m, Frame frame = Frame::kCamera) {
  PointCloud c;
  c.frame = frame;
  c.points.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) c.points.emplace_back(m(i, 0), m(i, 1), m(i, 2));
  return c;
}

Points to_array(const PointCloud& c) {
  Points m(static_cast<Eigen::Index>(c.size()), 3);
  for (std::size_t i = 0; i < c.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = c[i].transpose();
  return m;
}

CorrespondenceSet to_corr(const Points& src, const Points& dst) {
  return {to_cloud(src, Frame::kNocs), to_cloud(dst)};
}

ChamferMode parse_mode(const std::string& mode) {
  if (mode == "sum") return ChamferMode::kSum;
  if (mode == "mean") return ChamferMode::kMean;
  throw InvalidInput("chamfer mode must be 'sum' or 'mean', got '" + mode + "'");
}

std::string evaluate_files(const std::string& gt_path, const std::string& pred_path, int threads) {
  const auto gts = io::ground_truth_from_json(io::read_json(gt_path), gt_path);
  const auto dets = io::detections_from_json(io::read_json(pred_path), pred_path);
  return report_to_json(evaluate_report(dets, gts, threads)).dump();
}

}  // namespace

PYBIND11_MODULE(_catpose, m) {
  m.doc() = "Category-level pose and size estimation toolkit";

  auto base = py::register_exception<Error>(m, "CatposeError", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<DegenerateConfiguration>(m, "DegenerateConfiguration", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<FitFailure>(m, "FitFailure", base.ptr());

  py::class_<SimilarityTransform>(m, "SimilarityTransform")
      .def(py::init<>())
      .def(py::init([](double s, const Mat3& r, const Vec3& t) {
             SimilarityTransform x{s, r, t};
             validate(x);
             return x;
           }),
           py::arg("scale"), py::arg("rotation"), py::arg("translation"))
      .def_readwrite("scale", &SimilarityTransform::scale)
      .def_readwrite("rotation", &SimilarityTransform::rotation)
      .def_readwrite("translation", &SimilarityTransform::translation)
      .def("apply", [](const SimilarityTransform& t, const Points& p) { return to_array(transform_points(t, to_cloud(p))); },
           py::arg("points"))
      .def("inverse", &invert)
      .def("__matmul__", &compose)
      .def("matrix", [](const SimilarityTransform& t) {
        Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
        h.topLeftCorner<3, 3>() = t.scale * t.rotation;
        h.topRightCorner<3, 1>() = t.translation;
        return h;
      })
      .def("__repr__", [](const SimilarityTransform& t) {
        return "SimilarityTransform(scale=" + io::format_double(t.scale) + ")";
      });

  py::class_<PoseFitResult>(m, "PoseFitResult")
      .def_readonly("transform", &PoseFitResult::transform)
      .def_readonly("inlier_mask", &PoseFitResult::inlier_mask)
      .def_readonly("iterations", &PoseFitResult::iterations_run)
      .def_readonly("inlier_rms", &PoseFitResult::inlier_rms)
      .def_readonly("inlier_threshold", &PoseFitResult::inlier_threshold)
      .def_property_readonly("inlier_count", &PoseFitResult::inlier_count);

  m.def("umeyama", [](const Points& src, const Points& dst) { return umeyama(to_corr(src, dst)); },
        py::arg("src"), py::arg("dst"), "Least-squares similarity transform mapping src onto dst.");

  m.def(
      "ransac_fit",
      [](const Points& src, const Points& dst, int sample_size, int max_iterations, double inlier_fraction,
         std::uint64_t seed, int threads) {
        RansacParams p;
        p.sample_size = sample_size;
        p.max_iterations = max_iterations;
        p.inlier_fraction_of_diameter = inlier_fraction;
        p.seed = seed;
        const CorrespondenceSet corr = to_corr(src, dst);
        py::gil_scoped_release release;
        return ransac_fit(corr, p, threads);
      },
      py::arg("src"), py::arg("dst"), py::arg("sample_size") = 5, py::arg("max_iterations") = 128,
      py::arg("inlier_fraction") = 0.1, py::arg("seed") = 0, py::arg("threads") = 1);

  m.def(
      "chamfer_distance",
      [](const Points& x, const Points& y, const std::string& mode) {
        return chamfer_distance(to_cloud(x), to_cloud(y), parse_mode(mode));
      },
      py::arg("x"), py::arg("y"), py::arg("mode") = "sum");

  m.def("nocs_normalize", [](const Points& model) {
    const NormalizedCloud n = nocs_normalize(to_cloud(model));
    return py::make_tuple(to_array(n.cloud), n.transform);
  });

  m.def(
      "oriented_iou",
      [](const Vec3& ca, const Mat3& ra, const Vec3& ea, const Vec3& cb, const Mat3& rb, const Vec3& eb) {
        return oriented_iou({ca, ra, ea}, {cb, rb, eb});
      },
      py::arg("center_a"), py::arg("rotation_a"), py::arg("extents_a"), py::arg("center_b"), py::arg("rotation_b"),
      py::arg("extents_b"));

  m.def("y_rotation", &y_rotation, py::arg("theta"));
  m.def(
      "map_rotation",
      [](const Mat3& r) {
        const MapResult res = map_rotation(r);
        py::dict d;
        d["theta_hat"] = res.theta_hat;
        d["ambiguous"] = res.ambiguous;
        d["s_hat"] = res.s_hat;
        d["mapped_rotation"] = res.mapped_rotation;
        return d;
      },
      py::arg("rotation"));
  m.def(
      "canonicalize_nocs_labels",
      [](const Points& nocs, const Mat3& r, bool symmetric) {
        const SymmetryClass s = symmetric ? SymmetryClass::kYAxisContinuous : SymmetryClass::kAsymmetric;
        return to_array(canonicalize_nocs_labels(to_cloud(nocs, Frame::kNocs), r, s));
      },
      py::arg("nocs"), py::arg("rotation"), py::arg("symmetric") = true);
  m.def("symmetry_table", [] {
    std::vector<std::pair<std::string, std::string>> rows;
    for (const auto& r : category_symmetry_table()) rows.emplace_back(r.category, r.rule);
    return rows;
  });

  m.def("smooth_l1", py::vectorize(&smooth_l1), py::arg("e"));
  m.def(
      "total_loss",
      [](const Points& model, const Points& model_gt, const Points& nocs, const Points& nocs_gt,
         const Eigen::MatrixXd& a, const Points& deformation, std::array<double, 4> lambdas) {
        DeformationField d;
        for (Eigen::Index i = 0; i < deformation.rows(); ++i) d.emplace_back(deformation.row(i).transpose());
        const LossWeights w{lambdas[0], lambdas[1], lambdas[2], lambdas[3]};
        const LossBreakdown b = total_loss(to_cloud(model, Frame::kNocs), to_cloud(model_gt, Frame::kNocs),
                                           to_cloud(nocs, Frame::kNocs), to_cloud(nocs_gt, Frame::kNocs),
                                           CorrespondenceMatrix::from_dense(a), d, w);
        py::dict out;
        out["cd"] = b.cd;
        out["corr"] = b.corr;
        out["entropy"] = b.entropy;
        out["def"] = b.def;
        out["total"] = b.total;
        return out;
      },
      py::arg("model"), py::arg("model_gt"), py::arg("nocs"), py::arg("nocs_gt"), py::arg("assignment"),
      py::arg("deformation"), py::arg("lambdas") = std::array<double, 4>{5.0, 1.0, 1e-4, 0.01});

  m.def("builtin_prior", [](const std::string& category, std::size_t n) { return to_array(builtin_prior(category, n)); },
        py::arg("category"), py::arg("n") = kPriorPoints);

  m.def("_evaluate_files", &evaluate_files, py::arg("gt_path"), py::arg("pred_path"), py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
}
