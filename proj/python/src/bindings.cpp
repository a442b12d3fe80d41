#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "hiershap/errors.hpp"
#include "hiershap/hierarchy.hpp"
#include "hiershap/hierarchy_tools.hpp"
#include "hiershap/masked_game.hpp"
#include "hiershap/metrics.hpp"
#include "hiershap/models.hpp"
#include "hiershap/owen.hpp"
#include "hiershap/segmentation.hpp"
#include "hiershap/shapley.hpp"

namespace py = pybind11;
using namespace hiershap;
using nlohmann::json;

namespace {

// Python-backed games must stay on the calling thread (they need the GIL).
struct PyGame {
  ValueFunction vf;
  bool python_callable = false;
  int threads(int requested) const { return python_callable ? 1 : requested; }
};

Image to_image(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw InvalidInput("image must be HxW or HxWxC");
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  std::vector<double> samples(a.data(), a.data() + a.size());
  return Image(w, h, c, std::move(samples));
}

GrayImage to_gray(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw InvalidInput("expected a 2-D array");
  GrayImage g(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), g.data().begin());
  return g;
}

template <typename T>
py::array_t<T> to_array(const Grid<T>& g) {
  py::array_t<T> out({g.height(), g.width()});
  std::copy(g.data().begin(), g.data().end(), out.mutable_data());
  return out;
}

CoalitionMask to_mask(const std::vector<bool>& bits) {
  CoalitionMask m(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) m.set(i);
  return m;
}

py::tuple attribution_result(const Attribution& a) {
  py::dict stats;
  stats["distinct_evals"] = a.eval_stats.distinct_calls;
  stats["total_requests"] = a.eval_stats.total_requests;
  stats["method"] = to_string(a.method);
  return py::make_tuple(py::array_t<double>(a.scores.size(), a.scores.data()), stats);
}

}  // namespace

PYBIND11_MODULE(_hiershap, m) {
  m.doc() = "Shapley and Owen attributions over coalition hierarchies";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_OverflowError);

  py::class_<PyGame>(m, "Game")
      .def(py::init([](std::function<double(py::array_t<bool>)> fn, int n) {
             if (n < 1) throw InvalidInput("a game needs at least one feature");
             PyGame g;
             g.python_callable = true;
             g.vf = ValueFunction(n, [fn, n](const CoalitionMask& s) {
               py::array_t<bool> bits(n);
               auto* p = bits.mutable_data();
               for (int i = 0; i < n; ++i) p[i] = s.test(i);
               return fn(bits);
             });
             return g;
           }),
           py::arg("fn"), py::arg("n_features"))
      .def_static("from_spec", [](const std::string& spec) {
             PyGame g;
             g.vf = models::make_synthetic_game(models::synthetic_game_from_json(json::parse(spec)));
             return g;
           })
      .def_static("masked_image",
                  [](const py::array_t<double, py::array::c_style | py::array::forcecast>& image,
                     const std::string& scorer, const std::string& baseline) {
                    const Image img = to_image(image);
                    PyGame g;
                    g.vf = make_masked_image_game(img, parse_baseline_mode(baseline),
                                                  models::parse_scorer(scorer, img));
                    return g;
                  },
                  py::arg("image"), py::arg("scorer") = "retained-mean",
                  py::arg("baseline") = "mean")
      .def_property_readonly("n_features", [](const PyGame& g) { return g.vf.arity(); })
      .def("__call__", [](const PyGame& g, const std::vector<bool>& mask) {
        return g.vf(to_mask(mask));
      });

  m.def("exact_shapley", [](const PyGame& g, int threads) {
    ShapleyOptions opts;
    opts.threads = g.threads(threads);
    return attribution_result(exact_shapley(g.vf, opts));
  }, py::arg("game"), py::arg("threads") = 1);

  m.def("permutation_shapley", [](const PyGame& g, std::uint64_t samples, std::uint64_t seed) {
    return attribution_result(permutation_shapley(g.vf, samples, seed));
  }, py::arg("game"), py::arg("samples"), py::arg("seed") = 0);

  m.def("owen", [](const PyGame& g, const std::string& hierarchy, int threads) {
    OwenOptions opts;
    opts.threads = g.threads(threads);
    return attribution_result(owen_multilevel(g.vf, hierarchy_from_json(json::parse(hierarchy)), opts));
  }, py::arg("game"), py::arg("hierarchy"), py::arg("threads") = 1);

  m.def("predicted_eval_count", [](const std::string& hierarchy) {
    return predicted_eval_count(hierarchy_from_json(json::parse(hierarchy)));
  });

  m.def("balanced_hierarchy", [](const std::vector<int>& fanouts) {
    return hierarchy_to_json(PartitionHierarchy::balanced(fanouts)).dump();
  });

  m.def("axis_aligned_hierarchy", [](int width, int height, const std::vector<int>& grids) {
    return hierarchy_to_json(axis_aligned_hierarchy(width, height, grids)).dump();
  });

  m.def("segment",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& image,
           const std::string& scorer, const std::string& baseline, int fanout, int max_depth,
           double pct_lower, double pct_upper, int dilate) {
          const Image img = to_image(image);
          const auto game = make_masked_image_game(img, parse_baseline_mode(baseline),
                                                   models::parse_scorer(scorer, img));
          seg::SegmentationConfig cfg;
          cfg.fanout = fanout;
          cfg.max_depth = max_depth;
          cfg.canny.pct_lower = pct_lower;
          cfg.canny.pct_upper = pct_upper;
          cfg.canny.dilate_ksize = dilate;
          const auto result = seg::build_hierarchy(img, game, cfg);
          py::list labels;
          for (const auto& l : result.label_maps) labels.append(to_array(l));
          py::dict out;
          out["hierarchy"] = hierarchy_to_json(result.hierarchy).dump();
          out["metadata"] = result.metadata.dump();
          out["labels"] = labels;
          return out;
        },
        py::arg("image"), py::arg("scorer") = "retained-mean", py::arg("baseline") = "mean",
        py::arg("fanout") = 5, py::arg("max_depth") = 6, py::arg("pct_lower") = 75.0,
        py::arg("pct_upper") = 90.0, py::arg("dilate") = 2);

  m.def("check_t", [](const PyGame& g, const std::string& hierarchy, double tau) {
    return to_json(check_t_property(hierarchy_from_json(json::parse(hierarchy)), g.vf, tau)).dump();
  }, py::arg("game"), py::arg("hierarchy"), py::arg("tau"));

  m.def("evaluate_metrics",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& attr,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& mask,
           std::optional<std::array<int, 4>> bbox, const PyGame* game, double aopc_fraction,
           int aopc_steps) {
          const GrayImage a = to_gray(attr);
          const GrayImage mg = to_gray(mask);
          metrics::Mask mk(mg.width(), mg.height(), 0);
          for (std::size_t p = 0; p < mk.size(); ++p) mk[p] = mg[p] > 0.0 ? 1 : 0;
          std::optional<metrics::BoundingBox> box;
          if (bbox) box = metrics::BoundingBox{(*bbox)[0], (*bbox)[1], (*bbox)[2], (*bbox)[3]};
          const auto report = metrics::evaluate(a, mk, box, game ? &game->vf : nullptr,
                                                {aopc_fraction, aopc_steps});
          return report.to_json().dump();
        },
        py::arg("attr"), py::arg("mask"), py::arg("bbox") = py::none(),
        py::arg("game") = nullptr, py::arg("aopc_fraction") = 0.1, py::arg("aopc_steps") = 10);
}
