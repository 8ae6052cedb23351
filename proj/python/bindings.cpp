#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "topoboost/dataset.hpp"
#include "topoboost/error.hpp"
#include "topoboost/gbdt.hpp"
#include "topoboost/image_topo.hpp"
#include "topoboost/ph_core.hpp"
#include "topoboost/pipeline.hpp"

namespace py = pybind11;
using namespace topoboost;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using PairTuple = std::tuple<int, double, double>;

Image to_image(const Array& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw Error(ErrorCode::InvalidArgument, "image must be HxW or HxWxC");
  const auto h = static_cast<std::size_t>(a.shape(0)), w = static_cast<std::size_t>(a.shape(1));
  const std::size_t c = a.ndim() == 3 ? static_cast<std::size_t>(a.shape(2)) : 1;
  return Image(h, w, c, std::vector<double>(a.data(), a.data() + a.size()));
}

Array from_image(const Image& img) {
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(img.height()), static_cast<py::ssize_t>(img.width())};
  if (img.channels() > 1) shape.push_back(static_cast<py::ssize_t>(img.channels()));
  Array out(shape);
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

gbdt::FeatureMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "feature matrix must be 2-D");
  return gbdt::FeatureMatrix(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                             std::vector<double>(a.data(), a.data() + a.size()));
}

ph::PointCloud to_cloud(const Array& a) {
  if (a.size() == 0) return {};
  if (a.ndim() != 2 || a.shape(1) != 2) throw Error(ErrorCode::InvalidArgument, "points must be an Nx2 array");
  std::vector<ph::Point> pts;
  for (py::ssize_t i = 0; i < a.shape(0); ++i) pts.push_back({a.at(i, 0), a.at(i, 1)});
  return ph::PointCloud(std::move(pts));
}

std::vector<std::vector<PairTuple>> to_tuples(const std::vector<ph::PersistenceDiagram>& diags) {
  std::vector<std::vector<PairTuple>> out;
  for (const auto& d : diags) {
    auto& v = out.emplace_back();
    for (const auto& p : d.pairs) v.emplace_back(p.dim, p.birth, p.death);
  }
  return out;
}

std::vector<ph::PersistenceDiagram> from_tuples(const std::vector<std::vector<PairTuple>>& diags) {
  std::vector<ph::PersistenceDiagram> out;
  for (std::size_t k = 0; k < diags.size(); ++k) {
    auto& d = out.emplace_back();
    d.dim = static_cast<int>(k);
    for (const auto& [dim, b, e] : diags[k]) d.pairs.push_back({dim, b, e});
  }
  return out;
}

py::dict report_dict(const pipeline::EvalReport& r) {
  py::dict d;
  d["accuracy"] = r.accuracy;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["confusion"] = r.confusion;
  return d;
}

gbdt::TrainParams train_params(int num_trees, double learning_rate, int max_leaves, int min_data_in_leaf,
                               double l2_lambda, std::size_t max_bins, const std::string& objective, int num_class,
                               unsigned workers) {
  gbdt::TrainParams p;
  p.num_trees = num_trees;
  p.learning_rate = learning_rate;
  p.max_leaves = max_leaves;
  p.min_data_in_leaf = min_data_in_leaf;
  p.l2_lambda = l2_lambda;
  p.max_bins = max_bins;
  p.workers = workers;
  if (objective == "binary") p.objective = gbdt::Objective::binary();
  else if (objective == "multiclass") p.objective = gbdt::Objective::multiclass(num_class);
  else throw Error(ErrorCode::InvalidArgument, "objective must be 'binary' or 'multiclass'");
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Topological features and histogram gradient boosting for image classification";

  static py::exception<Error> error(m, "TopoboostError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error;
      py::object instance = exc(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error.ptr(), instance.ptr());
    }
  });

  m.def(
      "persistence",
      [](const Array& points, std::optional<double> eps_max, int max_dim) {
        const ph::DistanceMatrix d = ph::pairwise_distances(to_cloud(points));
        return to_tuples(ph::compute_persistence(ph::build_rips_filtration(d, eps_max.value_or(ph::diameter(d)), max_dim)));
      },
      py::arg("points"), py::arg("eps_max") = py::none(), py::arg("max_dim") = 2,
      "Rips persistence of an Nx2 point array: one list of (dim, birth, death) per dimension below max_dim.");

  m.def(
      "image_to_point_cloud",
      [](const Array& gray, double tau, std::size_t max_points) {
        const Image img = to_image(gray);
        const ph::PointCloud c = topo::image_to_point_cloud(topo::to_grayscale(img), tau, max_points);
        Array out({static_cast<py::ssize_t>(c.size()), py::ssize_t{2}});
        for (std::size_t i = 0; i < c.size(); ++i) {
          out.mutable_at(static_cast<py::ssize_t>(i), 0) = c[i].x;
          out.mutable_at(static_cast<py::ssize_t>(i), 1) = c[i].y;
        }
        return out;
      },
      py::arg("image"), py::arg("tau") = 0.5, py::arg("max_points") = 100);

  m.def(
      "image_diagrams",
      [](const Array& image, double tau, std::size_t max_points, std::optional<double> eps_max, int max_dim) {
        const topo::ImageDiagrams d =
            topo::image_diagrams(topo::to_grayscale(to_image(image)), {tau, max_points, eps_max, max_dim});
        return py::make_tuple(to_tuples(d.diagrams), d.eps_max);
      },
      py::arg("image"), py::arg("tau") = 0.5, py::arg("max_points") = 100, py::arg("eps_max") = py::none(),
      py::arg("max_dim") = 2, "Diagrams of an image's foreground cloud and the cap used for essential classes.");

  m.def(
      "vectorize",
      [](const std::vector<std::vector<PairTuple>>& diagrams, std::size_t alpha, double eps_max) {
        return topo::vectorize_diagrams(from_tuples(diagrams), alpha, eps_max);
      },
      py::arg("diagrams"), py::arg("alpha"), py::arg("eps_max"));

  m.def(
      "betti_curve",
      [](const std::vector<PairTuple>& pairs, const std::vector<double>& grid) {
        ph::PersistenceDiagram d;
        for (const auto& [dim, b, e] : pairs) d.pairs.push_back({dim, b, e});
        return topo::betti_curve(d, grid).values;
      },
      py::arg("pairs"), py::arg("grid"));

  m.def(
      "add_gaussian_noise",
      [](const Array& image, double sigma, double mean, std::uint64_t seed) {
        return from_image(pipeline::add_gaussian_noise(to_image(image), {mean, sigma, seed}));
      },
      py::arg("image"), py::arg("sigma") = 0.1, py::arg("mean") = 0.0, py::arg("seed") = 0);

  m.def(
      "evaluate",
      [](const std::vector<int>& predicted, const std::vector<int>& truth, std::optional<int> positive_class) {
        return report_dict(pipeline::evaluate(
            predicted, truth,
            positive_class ? pipeline::Averaging::binary(*positive_class) : pipeline::Averaging::micro()));
      },
      py::arg("predicted"), py::arg("truth"), py::arg("positive_class") = py::none(),
      "Binary metrics for a positive class, micro-averaged metrics when positive_class is None.");

  py::class_<gbdt::BoostedEnsemble>(m, "Model")
      .def_property_readonly("num_trees", [](const gbdt::BoostedEnsemble& b) { return b.trees.size(); })
      .def_property_readonly("num_features", [](const gbdt::BoostedEnsemble& b) { return b.num_features; })
      .def_property_readonly("objective", [](const gbdt::BoostedEnsemble& b) { return b.objective.name(); })
      .def("predict_proba",
           [](const gbdt::BoostedEnsemble& b, const Array& x) {
             const gbdt::FeatureMatrix p = gbdt::predict_proba(b, to_matrix(x));
             Array out({static_cast<py::ssize_t>(p.rows()), static_cast<py::ssize_t>(p.cols())});
             std::copy(p.values().begin(), p.values().end(), out.mutable_data());
             return out;
           })
      .def("predict", [](const gbdt::BoostedEnsemble& b, const Array& x) { return gbdt::predict_labels(b, to_matrix(x)); })
      .def("to_json", [](const gbdt::BoostedEnsemble& b) { return gbdt::save_model(b); })
      .def_static("from_json", [](const std::string& text) { return gbdt::load_model(text); });

  m.def(
      "train",
      [](const Array& x, const std::vector<int>& y, int num_trees, double learning_rate, int max_leaves,
         int min_data_in_leaf, double l2_lambda, std::size_t max_bins, std::optional<std::string> objective,
         unsigned workers) {
        const int top = y.empty() ? 1 : *std::max_element(y.begin(), y.end());
        const int k = std::max(top + 1, 2);
        const std::string obj = objective.value_or(k > 2 ? "multiclass" : "binary");
        const gbdt::FeatureMatrix fx = to_matrix(x);
        py::gil_scoped_release release;
        return gbdt::train(fx, y, train_params(num_trees, learning_rate, max_leaves, min_data_in_leaf, l2_lambda,
                                               max_bins, obj, k, workers));
      },
      py::arg("x"), py::arg("y"), py::arg("num_trees") = 100, py::arg("learning_rate") = 0.1,
      py::arg("max_leaves") = 31, py::arg("min_data_in_leaf") = 20, py::arg("l2_lambda") = 1.0,
      py::arg("max_bins") = 256, py::arg("objective") = py::none(), py::arg("workers") = 1);

  m.def(
      "run_experiment",
      [](const std::string& config_json, std::optional<std::string> dataset_root) {
        pipeline::ExperimentConfig cfg = pipeline::config_from_json(config_json);
        if (dataset_root) cfg.dataset = *dataset_root;
        pipeline::ExperimentReport report;
        {
          py::gil_scoped_release release;
          const pipeline::Dataset data = dataset::load_dataset(dataset::ingest_dataset(cfg.dataset));
          report = pipeline::run_experiment(data, cfg);
        }
        py::list rows;
        for (const auto& row : report.rows) {
          py::dict d = report_dict(row.report);
          d["alpha"] = row.alpha;
          d["beta"] = row.beta;
          d["mode"] = row.mode == pipeline::Mode::PixelOnly ? "pixel_only" : "fused";
          rows.append(d);
        }
        py::dict out;
        out["rows"] = rows;
        out["best_fused"] = report.best_fused;
        out["baseline"] = report.baseline;
        out["topo_length"] = report.topo_length;
        out["csv"] = pipeline::report_csv(report);
        return out;
      },
      py::arg("config_json"), py::arg("dataset_root") = py::none(),
      "Runs the alpha/beta sweep described by a JSON config over a class-per-directory image dataset.");
}
