// Copyright 2026 The msqpt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpt/analysis.hpp"
#include "qpt/io.hpp"
#include "qpt/recon.hpp"

namespace py = pybind11;
using namespace qpt;

namespace {

ProcessMatrix to_chi(const ComplexMatrix& m) { return ProcessMatrix(m); }

NoiseModel noise_preset(const std::string& name) {
  if (name == "none" || name == "noiseless") return NoiseModel::noiseless();
  if (name == "laser") return NoiseModel::laser();
  if (name == "full") return NoiseModel::full();
  throw ValidationError("unknown noise preset '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-ion quantum process tomography core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IdentifiabilityError>(m, "IdentifiabilityError", PyExc_RuntimeError);
  py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);
  py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  m.def("pauli_labels", [] {
    const auto& l = pauli_labels();
    return std::vector<std::string>(l.begin(), l.end());
  });
  m.def("ms_unitary", &ms_unitary, py::arg("theta"));
  m.def("unitary_to_chi", [](const ComplexMatrix& u) { return unitary_to_chi(u).matrix(); }, py::arg("u"));
  m.def(
      "process_fidelity",
      [](const ComplexMatrix& a, const ComplexMatrix& b) { return process_fidelity(to_chi(a), to_chi(b)).fidelity; },
      py::arg("chi_exp"), py::arg("chi_ideal"));
  m.def(
      "error_process",
      [](const ComplexMatrix& chi, const ComplexMatrix& u, bool error_first) {
        return extract_error_process(to_chi(chi), u,
                                     error_first ? ErrorOrder::kErrorBeforeGate : ErrorOrder::kErrorAfterGate)
            .matrix();
      },
      py::arg("chi"), py::arg("u_ideal"), py::arg("error_first") = true);
  m.def(
      "cptp_diagnostics",
      [](const ComplexMatrix& chi) {
        const auto d = validate_cptp(to_chi(chi));
        py::dict out;
        out["min_eigenvalue"] = d.min_eigenvalue;
        out["tp_residual"] = d.tp_residual;
        out["is_cptp"] = d.is_cptp();
        return out;
      },
      py::arg("chi"));
  m.def("design_rank", [](int shots) { return design_rank(build_plan(0.0, shots)); }, py::arg("shots") = 1);

  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init([](const std::string& preset) { return noise_preset(preset); }), py::arg("preset") = "none")
      .def_readwrite("drift_hz_per_min", &NoiseModel::drift_hz_per_min)
      .def_readwrite("fast_freq_sigma_hz", &NoiseModel::fast_freq_sigma_hz)
      .def_readwrite("phase_diffusion_rad_per_sqrt_us", &NoiseModel::phase_diffusion_rad_per_sqrt_us)
      .def_readwrite("phi_p_error_mrad", &NoiseModel::phi_p_error_mrad)
      .def_readwrite("scaling_phase_error_mrad_ion2", &NoiseModel::scaling_phase_error_mrad_ion2)
      .def_readwrite("pulse_area_fractional_error", &NoiseModel::pulse_area_fractional_error);

  py::class_<ShotDataset>(m, "ShotDataset")
      .def_property_readonly("process", [](const ShotDataset& d) { return d.process.label(); })
      .def_property_readonly("seed", [](const ShotDataset& d) { return d.seed; })
      .def_property_readonly("shots", [](const ShotDataset& d) { return d.plan.shots; })
      .def("p2_frequencies", &ShotDataset::p2_frequencies)
      .def("counts", [](const ShotDataset& d) {
        std::vector<int> n2(d.records.size());
        for (const auto& r : d.records) n2.at(r.k) = r.n2;
        return n2;
      })
      .def("to_json", [](const ShotDataset& d) { return dataset_to_json(d).dump(); })
      .def_static("from_json", [](const std::string& s) { return dataset_from_json(Json::parse(s)); });

  m.def(
      "simulate",
      [](const std::string& process, const NoiseModel& noise, int shots, std::uint64_t seed) {
        const ProcessSpec spec = ProcessSpec::from_label(process);
        const double duration = spec.kind() == ProcessSpec::Kind::kIdentity ? 0.0 : spec.duration_us();
        py::gil_scoped_release release;
        return generate_dataset(build_plan(duration, shots), spec, noise, seed);
      },
      py::arg("process"), py::arg("noise") = NoiseModel::noiseless(), py::arg("shots") = 500, py::arg("seed") = 0);

  m.def(
      "reconstruct",
      [](const ShotDataset& data, const std::string& method, int max_iterations) {
        py::dict out;
        if (method == "inversion") {
          const auto r = linear_inversion(data);
          out["chi"] = r.chi.matrix();
          out["physical"] = r.physical;
          out["min_eigenvalue"] = r.diagnostics.min_eigenvalue;
          return out;
        }
        if (method != "mle") throw ValidationError("method must be 'mle' or 'inversion'");
        MleConfig config;
        config.max_iterations = max_iterations;
        MleResult r;
        {
          py::gil_scoped_release release;
          r = mle_reconstruct(data, config);
        }
        out["chi"] = r.chi.matrix();
        out["iterations"] = r.convergence.iterations;
        out["converged"] = r.convergence.converged;
        out["log_likelihood"] = r.convergence.log_likelihood_trace;
        return out;
      },
      py::arg("dataset"), py::arg("method") = "mle", py::arg("max_iterations") = 5000);

  m.def(
      "bootstrap_std",
      [](const ShotDataset& data, const ComplexMatrix& u, int replicas, std::uint64_t seed) {
        py::gil_scoped_release release;
        return bootstrap_fidelity(data, {}, u, replicas, seed).std;
      },
      py::arg("dataset"), py::arg("ideal_u"), py::arg("replicas") = 20, py::arg("seed") = 1);

  m.def(
      "fit_over_rotation",
      [](const ComplexMatrix& chi) {
        const auto f = fit_over_rotation(to_chi(chi));
        return py::make_tuple(f.theta, f.residual, f.gate_error);
      },
      py::arg("chi"), "Returns (theta_plus, residual, gate_error).");

  m.def(
      "bell_fidelity",
      [](double theta, const NoiseModel& noise, int shots, int points, std::uint64_t seed) {
        std::vector<double> phases;
        for (int i = 0; i < points; ++i) phases.push_back(i * kPi / points);
        return simulate_bell_experiment(theta, noise, phases, shots, seed).fidelity;
      },
      py::arg("theta"), py::arg("noise") = NoiseModel::noiseless(), py::arg("shots") = 10000, py::arg("points") = 16,
      py::arg("seed") = 1);

  m.def("simulate_ramsey", &simulate_ramsey, py::arg("delays_us"), py::arg("noise"), py::arg("shots"),
        py::arg("seed") = 1);
  m.def(
      "fit_ramsey_model",
      [](const std::vector<double>& d, const std::vector<double>& c) {
        const auto f = fit_ramsey_model(d, c);
        return py::make_tuple(f.phase_diffusion, f.fast_freq_sigma_hz);
      },
      py::arg("delays_us"), py::arg("contrasts"));

  m.def("displaced_thermal_populations", &displaced_thermal_populations, py::arg("n_th"), py::arg("n_coh"),
        py::arg("n_max") = -1, py::arg("tail") = 1e-6);
  m.def(
      "sideband_rabi_signal",
      [](double n_th, double n_coh, double omega, double eta, const std::vector<double>& t) {
        return sideband_rabi_signal({n_th, n_coh, omega, eta}, t);
      },
      py::arg("n_th"), py::arg("n_coh"), py::arg("rabi_omega"), py::arg("eta"), py::arg("times_s"));
  m.def(
      "fit_heating",
      [](const std::vector<double>& t, const std::vector<double>& s, double eta) {
        const auto f = fit_heating(t, s, eta);
        py::dict out;
        out["n_th"] = f.occupation.n_th;
        out["n_coh"] = f.occupation.n_coh;
        out["rabi_omega"] = f.occupation.rabi_omega;
        out["covariance"] = Eigen::MatrixXd(f.covariance);
        return out;
      },
      py::arg("times_s"), py::arg("signals"), py::arg("eta"));
  m.def("thermal_gate_error", &thermal_gate_error, py::arg("eta"), py::arg("n_th"));
  m.def("lamb_dicke_eta", &lamb_dicke_eta, py::arg("mass_amu"), py::arg("omega_rad_s"), py::arg("wavelength_m"),
        py::arg("beam_angle_rad"));
}
