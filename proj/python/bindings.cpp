#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "sprank/commands.hpp"

namespace py = pybind11;
using namespace sprank;

namespace {

py::object to_python(const nlohmann::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

nlohmann::json from_python(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return nlohmann::json::parse(obj.cast<std::string>());
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

CurvatureBound parse_bound(const std::string& side) {
  if (side == "upper") return CurvatureBound::Upper;
  if (side == "lower") return CurvatureBound::Lower;
  throw ParameterError("bound must be 'upper' or 'lower', got '" + side + "'");
}

GeodesicSampler make_sampler(std::size_t count, std::uint64_t seed, bool include_special) {
  GeodesicSampler s;
  s.count = count;
  s.seed = seed;
  s.stratification = include_special ? Stratification::IncludeSpecial : Stratification::Uniform;
  return s;
}

GeodesicState state_of(const ManifoldModel& m, const Eigen::VectorXd& point, const Eigen::VectorXd& velocity) {
  const Point p{point};
  return make_state(m, p, Tangent{p, velocity});
}

RankOptions rank_options(double horizon, double step) {
  RankOptions o;
  o.horizon = horizon;
  o.step = step;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Spherical-rank checks on round spheres, Berger spheres and CP^n";

  auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(mod, "DomainError", base.ptr());
  py::register_exception<ParameterError>(mod, "ParameterError", base.ptr());
  py::register_exception<DegeneratePlaneError>(mod, "DegeneratePlaneError", base.ptr());
  py::register_exception<NormalizationError>(mod, "NormalizationError", base.ptr());
  py::register_exception<AmbiguousEndpointError>(mod, "AmbiguousEndpointError", base.ptr());
  py::register_exception<ManifestError>(mod, "ManifestError", base.ptr());

  py::class_<ManifoldModel>(mod, "Model")
      .def_static("round_sphere", &ManifoldModel::round_sphere, py::arg("dim"))
      .def_static("berger_sphere", &ManifoldModel::berger_sphere, py::arg("eta"))
      .def_static("complex_projective", &ManifoldModel::complex_projective, py::arg("complex_dim"))
      .def_static("scaled", &ManifoldModel::scaled, py::arg("base"), py::arg("lam"))
      .def_static("from_dict", [](const py::object& d) { return model_from_json(from_python(d)); })
      .def_static(
          "parse", [](const std::string& text) { return model_from_json(parse_model_shorthand(text)); },
          py::arg("text"))
      .def("to_dict", [](const ManifoldModel& m) { return to_python(model_to_json(m)); })
      .def_property_readonly("dim", &ManifoldModel::dim)
      .def_property_readonly("ambient_dim", &ManifoldModel::ambient_dim)
      .def_property_readonly("component_count", &ManifoldModel::component_count)
      .def_property_readonly("scale", &ManifoldModel::scale)
      .def_property_readonly("eta", &ManifoldModel::eta)
      .def("unscaled", &ManifoldModel::unscaled)
      .def("describe", &ManifoldModel::describe)
      .def("default_point", [](const ManifoldModel& m) { return default_point(m).coords; })
      .def("__eq__", [](const ManifoldModel& a, const ManifoldModel& b) { return a == b; })
      .def("__repr__", [](const ManifoldModel& m) { return "Model(" + m.describe() + ")"; });

  mod.def(
      "project_tangent",
      [](const ManifoldModel& m, const Eigen::VectorXd& point, const Eigen::VectorXd& ambient) {
        return tangent_from_ambient(m, Point{point}, ambient).components;
      },
      py::arg("model"), py::arg("point"), py::arg("ambient"));
  mod.def(
      "metric_inner",
      [](const ManifoldModel& m, const Eigen::VectorXd& point, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
        const Point p{point};
        return metric_inner(m, Tangent{p, u}, Tangent{p, v});
      },
      py::arg("model"), py::arg("point"), py::arg("u"), py::arg("v"));
  mod.def(
      "sectional_curvature",
      [](const ManifoldModel& m, const Eigen::VectorXd& point, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
        const Point p{point};
        return sectional_curvature(m, Tangent{p, u}, Tangent{p, v});
      },
      py::arg("model"), py::arg("point"), py::arg("u"), py::arg("v"));
  mod.def(
      "closed_form_range",
      [](const ManifoldModel& m) {
        const auto r = closed_form_range(m);
        return py::make_tuple(r.min, r.max);
      },
      py::arg("model"));
  mod.def(
      "curvature_scan",
      [](const ManifoldModel& m, std::size_t samples, std::uint64_t seed) {
        const auto s = curvature_scan(m, samples, seed);
        py::dict out;
        out["min"] = s.min;
        out["max"] = s.max;
        out["samples"] = s.samples;
        out["argmin"] = py::make_tuple(s.argmin.u.base.coords, s.argmin.u.components, s.argmin.v.components);
        out["argmax"] = py::make_tuple(s.argmax.u.base.coords, s.argmax.u.components, s.argmax.v.components);
        return out;
      },
      py::arg("model"), py::arg("samples") = 10000, py::arg("seed") = 1);
  mod.def(
      "normalize_to_bound",
      [](const ManifoldModel& m, const std::string& side, std::size_t samples, std::uint64_t seed) {
        return normalize_to_bound(m, parse_bound(side), samples, seed);
      },
      py::arg("model"), py::arg("bound"), py::arg("scan_samples") = 10000, py::arg("seed") = 1);

  mod.def(
      "geodesic",
      [](const ManifoldModel& m, const Eigen::VectorXd& point, const Eigen::VectorXd& velocity, double horizon,
         double step) {
        const Trajectory traj = geodesic_flow(m, state_of(m, point, velocity), horizon, step);
        Eigen::MatrixXd pts(traj.size(), m.ambient_dim());
        Eigen::MatrixXd vel(traj.size(), m.component_count());
        for (std::size_t i = 0; i < traj.size(); ++i) {
          pts.row(i) = traj.state(i).point.coords.transpose();
          vel.row(i) = traj.state(i).velocity.components.transpose();
        }
        const auto t = traj.times();
        return py::make_tuple(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(t.data(), t.size())), pts, vel);
      },
      py::arg("model"), py::arg("point"), py::arg("velocity"), py::arg("horizon"),
      py::arg("step") = kDefaultStep);
  mod.def(
      "exp_map",
      [](const ManifoldModel& m, const Eigen::VectorXd& point, const Eigen::VectorXd& v, double step) {
        const Point p{point};
        return exp_map(m, p, Tangent{p, v}, step).coords;
      },
      py::arg("model"), py::arg("point"), py::arg("v"), py::arg("step") = kDefaultStep);
  mod.def(
      "conjugate_points",
      [](const ManifoldModel& m, const Eigen::VectorXd& point, const Eigen::VectorXd& velocity, double horizon,
         double step, double rank_tol) {
        const auto prop = jacobi_propagate(curvature_profile(geodesic_flow(m, state_of(m, point, velocity), horizon, step)));
        py::list out;
        for (const auto& e : conjugate_points(prop, 0.0, horizon, rank_tol)) out.append(py::make_tuple(e.time, e.multiplicity));
        return out;
      },
      py::arg("model"), py::arg("point"), py::arg("velocity"), py::arg("horizon") = 3.5,
      py::arg("step") = kDefaultStep, py::arg("rank_tol") = kDefaultRankTol);

  mod.def(
      "check_positive_spherical_rank",
      [](const ManifoldModel& m, std::size_t count, std::uint64_t seed, bool include_special, double horizon,
         double step) {
        const RankOptions o = rank_options(horizon, step);
        return to_python(to_json(check_positive_spherical_rank(m, make_sampler(count, seed, include_special), o), o.time_tol));
      },
      py::arg("model"), py::arg("count") = 200, py::arg("seed") = 1, py::arg("include_special") = true,
      py::arg("horizon") = 3.5, py::arg("step") = kDefaultStep);
  mod.def(
      "check_weak_spherical_rank",
      [](const ManifoldModel& m, const std::string& side, std::size_t count, std::uint64_t seed, bool include_special,
         double horizon, double step) {
        const RankOptions o = rank_options(horizon, step);
        return to_python(
            to_json(check_weak_spherical_rank(m, parse_bound(side), make_sampler(count, seed, include_special), o),
                    o.time_tol));
      },
      py::arg("model"), py::arg("bound"), py::arg("count") = 100, py::arg("seed") = 1,
      py::arg("include_special") = true, py::arg("horizon") = 3.5, py::arg("step") = kDefaultStep);
  mod.def(
      "berger_row",
      [](double eta, std::size_t count, std::uint64_t seed, std::size_t scan_samples) {
        return to_python(to_json(berger_row(eta, make_sampler(count, seed, true), {}, scan_samples)));
      },
      py::arg("eta"), py::arg("count") = 200, py::arg("seed") = 1, py::arg("scan_samples") = 10000);

  mod.def(
      "run_command",
      [](const std::string& name, const py::object& manifest) {
        const CommandOutput out = run_command(name, parse_manifest(from_python(manifest)));
        py::dict result;
        result["report"] = to_python(to_json(out.report));
        result["stable_report"] = serialize_stable(out.report);
        result["csv"] = out.csv;
        result["exit_code"] = out.exit_code;
        return result;
      },
      py::arg("command"), py::arg("manifest"),
      "Runs a CLI subcommand on a manifest (dict or JSON text).");
  mod.attr("commands") = py::cast(std::vector<std::string>(kCommandNames.begin(), kCommandNames.end()));
  mod.attr("__version__") = "0.1.0";
}
