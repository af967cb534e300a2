#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "vdcsim/config.hpp"
#include "vdcsim/telemetry.hpp"

namespace py = pybind11;
using namespace vdcsim;

namespace {

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  const nlohmann::json j = nlohmann::json::parse(summary_to_json(s));
  for (auto it = j.begin(); it != j.end(); ++it) {
    const nlohmann::json& v = it.value();
    if (v.is_number_integer()) {
      d[it.key().c_str()] = v.get<long long>();
    } else if (v.is_number()) {
      d[it.key().c_str()] = v.get<double>();
    } else if (v.is_boolean()) {
      d[it.key().c_str()] = v.get<bool>();
    } else if (v.is_string()) {
      d[it.key().c_str()] = v.get<std::string>();
    } else if (v.is_array()) {
      std::vector<double> arr = v.get<std::vector<double>>();
      d[it.key().c_str()] = arr;
    }
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_vdcsim, m) {
  m.doc() = "Chain simulation with adaptive second-order impedance allocation";

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("gamma", &ExperimentConfig::gamma)
      .def_readwrite("adapt_enabled", &ExperimentConfig::adapt_enabled)
      .def_property(
          "duration",
          [](const ExperimentConfig& c) { return c.run.duration; },
          [](ExperimentConfig& c, double v) { c.run.duration = v; })
      .def_property(
          "dt", [](const ExperimentConfig& c) { return c.run.dt; },
          [](ExperimentConfig& c, double v) { c.run.dt = v; })
      .def_property(
          "telemetry_path",
          [](const ExperimentConfig& c) { return c.run.telemetry_path; },
          [](ExperimentConfig& c, const std::string& v) {
            c.run.telemetry_path = v;
          })
      .def_property(
          "summary_path",
          [](const ExperimentConfig& c) { return c.run.summary_path; },
          [](ExperimentConfig& c, const std::string& v) {
            c.run.summary_path = v;
          })
      .def_property(
          "wall_stiffness",
          [](const ExperimentConfig& c) { return c.wall.stiffness; },
          [](ExperimentConfig& c, double v) { c.wall.stiffness = v; })
      .def("set_desired_inertia",
           [](ExperimentConfig& c, int axis, double value) {
             c.impedance.M_d(axis, axis) = value;
           })
      .def("validate", &ExperimentConfig::validate);

  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", &parse_config, py::arg("yaml_text"));
  m.def("default_contact_experiment", &default_contact_experiment);
  m.def("planar_3r_home", []() -> VecX { return planar_3r_home(); });

  m.def(
      "run",
      [](const ExperimentConfig& cfg) {
        RunSummary s;
        {
          py::gil_scoped_release release;
          s = run_experiment(cfg).summary;
        }
        return summary_dict(s);
      },
      py::arg("config"),
      "Execute one experiment and return the summary as a dict");

  m.def(
      "derive_gains",
      [](const Mat6& M_d, const Mat6& D_d, const Mat6& K_d, const Mat6& Lambda,
         const Mat6& theta_psi, const Mat6& theta_e) {
        ImpedanceSpec spec;
        spec.M_d = M_d;
        spec.D_d = D_d;
        spec.K_d = K_d;
        spec.Lambda = Lambda;
        spec.theta_psi = theta_psi;
        spec.theta_e = theta_e;
        const AllocatorGains g = derive_gains(spec);
        return py::make_tuple(g.Gamma_p, g.Gamma_v, g.Gamma_f);
      },
      py::arg("M_d"), py::arg("D_d"), py::arg("K_d"), py::arg("Lambda"),
      py::arg("theta_psi"), py::arg("theta_e"),
      "Allocator gain matrices (position, velocity, force) for the target");

  m.def(
      "pseudo_inertia",
      [](const Vec10& phi) -> Mat4 { return pseudo_inertia(phi); },
      py::arg("phi"));
  m.def("pseudo_inertia_min_eig",
        [](const Vec10& phi) { return min_eigenvalue(pseudo_inertia(phi)); });
  m.def(
      "regressor",
      [](const Vec6& dv_r, const Vec6& v_r, const Vec6& v, const Vec3& g)
          -> Eigen::Matrix<double, 6, 10> {
        return regressor(dv_r, v_r, v, g);
      },
      py::arg("dv_r"), py::arg("v_r"), py::arg("v"), py::arg("gravity"));

  m.def(
      "zwidth_sweep",
      [](const ExperimentConfig& base, const std::vector<double>& m_d_values,
         double ke_min, double ke_max, double ke_tolerance, int max_bounces,
         double stability_budget, bool parallel) {
        ZWidthParams p;
        p.m_d_values = m_d_values;
        p.ke_min = ke_min;
        p.ke_max = ke_max;
        p.ke_tolerance = ke_tolerance;
        p.max_bounces = max_bounces;
        p.stability_budget = stability_budget;
        p.parallel = parallel;
        const ZWidthReport rep = run_zwidth_sweep(base, p);
        py::list out;
        for (const ZWidthPoint& pt : rep.points) {
          py::dict d;
          d["m_d"] = pt.m_d;
          d["ke_max_passive"] = pt.ke_max_passive;
          d["free_motion_rms"] = pt.free_motion_rms;
          d["energy_net"] = pt.energy_net;
          d["energy_absorbed"] = pt.energy_absorbed;
          d["energy_injected"] = pt.energy_injected;
          d["energy_replay_gap"] = pt.energy_replay_gap;
          d["stability_integral"] = pt.stability_integral;
          d["bounces"] = pt.bounce_count;
          d["converged"] = pt.converged;
          out.append(d);
        }
        return out;
      },
      py::arg("config"), py::arg("m_d_values"), py::arg("ke_min") = 10000.0,
      py::arg("ke_max") = 2.0e6, py::arg("ke_tolerance") = 1000.0,
      py::arg("max_bounces") = 2, py::arg("stability_budget") = 0.1,
      py::arg("parallel") = true);
}
