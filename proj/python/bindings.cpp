#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <vector>

#include "elasticlane/dataio.hpp"
#include "elasticlane/elm.hpp"
#include "elasticlane/energy.hpp"
#include "elasticlane/evolve.hpp"
#include "elasticlane/field.hpp"
#include "elasticlane/metrics.hpp"

namespace py = pybind11;
using namespace elasticlane;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Fields cross the boundary as (height, width) arrays.
Field2D to_field(const Array& a) {
  if (a.ndim() != 2) throw InvalidArgument("expected a 2-d array");
  const GridShape shape(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  return Field2D(shape, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Field2D& f) {
  Array out({f.height(), f.width()});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

py::array_t<std::complex<double>> to_array(const Spectrum& s) {
  py::array_t<std::complex<double>> out({s.shape().height(), s.shape().width()});
  std::copy(s.coefficients().begin(), s.coefficients().end(), out.mutable_data());
  return out;
}

RangeMask to_mask(const std::vector<bool>& rows, int height) {
  return rows.empty() ? RangeMask::full(height) : RangeMask(rows);
}

EvolutionConfig make_config(EvolutionMode mode, double step_size, double alpha, double sigma, int max_steps,
                            int record_every, const std::string& sampling) {
  EvolutionConfig cfg;
  cfg.mode = mode;
  cfg.step_size = step_size;
  cfg.alpha = alpha;
  cfg.sigma = sigma;
  cfg.max_steps = max_steps;
  cfg.record_every = record_every;
  if (sampling == "bilinear") {
    cfg.sampling = VelocitySampling::Bilinear;
  } else if (sampling == "delta") {
    cfg.sampling = VelocitySampling::DeltaWeighted;
  } else {
    throw InvalidArgument("sampling must be 'bilinear' or 'delta'");
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Elastic lane maps: lane encoding, interaction energy, evolution and metrics.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ShapeMismatch>(m, "ShapeMismatch", base.ptr());
  py::register_exception<NonHermitianSpectrum>(m, "NonHermitianSpectrum", base.ptr());
  py::register_exception<DegenerateLane>(m, "DegenerateLane", base.ptr());
  py::register_exception<CapacityExceeded>(m, "CapacityExceeded", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

  py::class_<LanePolyline>(m, "Lane")
      .def(py::init<std::vector<int>, std::vector<double>>(), py::arg("rows"), py::arg("xs"))
      .def(py::init<std::vector<int>, std::vector<double>, std::vector<bool>>(), py::arg("rows"), py::arg("xs"),
           py::arg("valid"))
      .def_static("vertical", &LanePolyline::vertical, py::arg("x"), py::arg("height"))
      .def_readwrite("rows", &LanePolyline::rows)
      .def_readwrite("xs", &LanePolyline::xs)
      .def_readwrite("valid", &LanePolyline::valid)
      .def("__len__", &LanePolyline::size)
      .def("valid_count", &LanePolyline::valid_count)
      .def("__repr__", [](const LanePolyline& l) {
        return "Lane(rows=" + std::to_string(l.size()) + ", valid=" + std::to_string(l.valid_count()) + ")";
      });

  // Spectral core.
  m.def("dft_forward", [](const Array& f) { return to_array(dft_forward(to_field(f))); }, py::arg("field"));
  m.def(
      "frequency_kernel",
      [](int width, int height) {
        const auto k = frequency_kernel(GridShape(width, height));
        Array out({height, width});
        std::copy(k.magnitudes().begin(), k.magnitudes().end(), out.mutable_data());
        return out;
      },
      py::arg("width"), py::arg("height"));

  // Encoding.
  m.def(
      "encode_lane",
      [](const LanePolyline& lane, int width, int height, double sigma) {
        const auto e = encode_lane(lane, GridShape(width, height), HeavisideParams(sigma));
        return py::make_tuple(to_array(e.psi), e.range.rows);
      },
      py::arg("lane"), py::arg("width"), py::arg("height"), py::arg("sigma") = 3.0,
      "Returns (psi, range) with psi of shape (height, width).");
  m.def(
      "decode_lane",
      [](const Array& psi, const std::vector<bool>& range) {
        const auto f = to_field(psi);
        return decode_lane(f, to_mask(range, f.height()));
      },
      py::arg("psi"), py::arg("range") = std::vector<bool>{});
  m.def("heaviside", &heaviside, py::arg("phi"), py::arg("sigma"));

  // Energy.
  m.def(
      "difference_field",
      [](const Array& gt, const Array& psi, double alpha) {
        return to_array(difference_field(to_field(gt), to_field(psi), EieParams(alpha)));
      },
      py::arg("gt"), py::arg("psi"), py::arg("alpha") = 0.5);
  m.def("eie_energy", [](const Array& d) { return eie_energy(to_field(d)); }, py::arg("d"));
  m.def("eie_gradient", [](const Array& d) { return to_array(eie_gradient(to_field(d))); }, py::arg("d"));
  m.def(
      "energy_breakdown",
      [](const Array& gt, const Array& psi, double alpha) {
        const auto b = energy_breakdown(to_field(gt), to_field(psi), EieParams(alpha));
        py::dict out;
        out["self_gt"] = b.self_gt;
        out["self_pred"] = b.self_pred;
        out["interaction"] = b.interaction;
        out["total"] = b.total();
        return out;
      },
      py::arg("gt"), py::arg("psi"), py::arg("alpha") = 0.5);
  m.def(
      "descent_direction",
      [](const Array& gt, const Array& psi, double alpha) {
        return to_array(descent_direction(to_field(gt), to_field(psi), EieParams(alpha)));
      },
      py::arg("gt"), py::arg("psi"), py::arg("alpha") = 0.5);
  m.def("mse_energy", [](const Array& gt, const Array& psi) { return mse_energy(to_field(gt), to_field(psi)); },
        py::arg("gt"), py::arg("psi"));
  m.def(
      "exact_gradient_scale", [](int width, int height) { return exact_gradient_scale(GridShape(width, height)); },
      py::arg("width"), py::arg("height"));
  m.def(
      "stable_step_size",
      [](int width, int height, double alpha) { return stable_step_size(GridShape(width, height), alpha); },
      py::arg("width"), py::arg("height"), py::arg("alpha") = 0.5);

  // Evolution.
  py::class_<EvolutionTrace>(m, "Trace")
      .def_readonly("steps", &EvolutionTrace::steps)
      .def_readonly("energies", &EvolutionTrace::energies)
      .def_readonly("lane_errors", &EvolutionTrace::lane_errors)
      .def_readonly("steps_taken", &EvolutionTrace::steps_taken)
      .def_readonly("converged", &EvolutionTrace::converged)
      .def_readonly("stalled", &EvolutionTrace::stalled)
      .def_readonly("clamped_samples", &EvolutionTrace::clamped_samples)
      .def_readonly("final_lane", &EvolutionTrace::final_lane)
      .def_property_readonly("final_field",
                             [](const EvolutionTrace& t) -> py::object {
                               if (!t.final_field) return py::none();
                               return to_array(*t.final_field);
                             })
      .def("__len__", &EvolutionTrace::size);

  m.def(
      "evolve_implicit",
      [](const Array& psi, const Array& gt, const std::vector<bool>& range, double step_size, double alpha,
         double sigma, int max_steps, int record_every) {
        const auto g = to_field(gt);
        const auto cfg = make_config(EvolutionMode::Implicit, step_size, alpha, sigma, max_steps, record_every,
                                     "bilinear");
        py::gil_scoped_release release;
        return evolve_implicit(to_field(psi), g, to_mask(range, g.height()), cfg);
      },
      py::arg("psi"), py::arg("gt"), py::arg("range") = std::vector<bool>{}, py::arg("step_size") = 0.1,
      py::arg("alpha") = 0.5, py::arg("sigma") = 3.0, py::arg("max_steps") = 5000, py::arg("record_every") = 1);
  m.def(
      "evolve_explicit",
      [](const LanePolyline& init, const LanePolyline& gt, int width, int height, double step_size, double alpha,
         double sigma, int max_steps, int record_every, const std::string& sampling) {
        const auto cfg = make_config(EvolutionMode::Explicit, step_size, alpha, sigma, max_steps, record_every,
                                     sampling);
        py::gil_scoped_release release;
        return evolve_explicit(init, gt, GridShape(width, height), cfg);
      },
      py::arg("init"), py::arg("gt"), py::arg("width"), py::arg("height"), py::arg("step_size") = 1.0,
      py::arg("alpha") = 0.5, py::arg("sigma") = 3.0, py::arg("max_steps") = 5000, py::arg("record_every") = 1,
      py::arg("sampling") = "bilinear");

  // Metrics.
  py::class_<DetectionMetrics>(m, "DetectionMetrics")
      .def_readonly("tp", &DetectionMetrics::tp)
      .def_readonly("fp", &DetectionMetrics::fp)
      .def_readonly("fn", &DetectionMetrics::fn)
      .def_readonly("precision", &DetectionMetrics::precision)
      .def_readonly("recall", &DetectionMetrics::recall)
      .def_readonly("f1", &DetectionMetrics::f1)
      .def("to_json", [](const DetectionMetrics& d) { return write_report_json(d); });
  py::class_<TuSimpleMetrics>(m, "TuSimpleMetrics")
      .def_readonly("acc", &TuSimpleMetrics::acc)
      .def_readonly("fp_rate", &TuSimpleMetrics::fp_rate)
      .def_readonly("fn_rate", &TuSimpleMetrics::fn_rate)
      .def_readonly("correct_points", &TuSimpleMetrics::correct_points)
      .def_readonly("gt_points", &TuSimpleMetrics::gt_points)
      .def_readonly("lanes", &TuSimpleMetrics::lanes)
      .def("to_json", [](const TuSimpleMetrics& t) { return write_report_json(t); });

  m.def(
      "lane_iou",
      [](const LanePolyline& a, const LanePolyline& b, int width, int height, int width_px) {
        const ImageSize image{width, height};
        return lane_iou(rasterize_lane(a, width_px, image), rasterize_lane(b, width_px, image));
      },
      py::arg("a"), py::arg("b"), py::arg("width"), py::arg("height"), py::arg("width_px") = 30);
  m.def(
      "match_and_score",
      [](const std::vector<LanePolyline>& preds, const std::vector<LanePolyline>& gts, int width, int height,
         double iou_thresh, int width_px) {
        const ImageSize image{width, height};
        return match_and_score(LaneSet{image, preds, {}}, LaneSet{image, gts, {}}, iou_thresh, width_px);
      },
      py::arg("preds"), py::arg("gts"), py::arg("width"), py::arg("height"), py::arg("iou_thresh") = 0.5,
      py::arg("width_px") = 30);
  m.def(
      "tusimple_score",
      [](const std::vector<LanePolyline>& preds, const std::vector<LanePolyline>& gts, int width, int height,
         double x_thresh, double match_frac) {
        const ImageSize image{width, height};
        return tusimple_score(LaneSet{image, preds, {}}, LaneSet{image, gts, {}}, x_thresh, match_frac);
      },
      py::arg("preds"), py::arg("gts"), py::arg("width"), py::arg("height"), py::arg("x_thresh") = 20.0,
      py::arg("match_frac") = 0.85);

  // Annotation text.
  m.def(
      "parse_culane_lines",
      [](const std::string& text) {
        std::vector<std::vector<std::pair<double, double>>> lanes;
        for (const auto& lane : parse_culane_lines(text).lanes) {
          auto& out = lanes.emplace_back();
          for (const auto& p : lane)
            if (p.valid) out.emplace_back(p.x, p.y);
        }
        return lanes;
      },
      py::arg("text"), "Valid (x, y) points per lane.");

#ifdef ELASTICLANE_VERSION
  m.attr("__version__") = ELASTICLANE_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
