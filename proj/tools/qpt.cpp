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

// qpt: simulate, reconstruct and analyze two-ion process tomography runs.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "qpt/analysis.hpp"
#include "qpt/io.hpp"
#include "qpt/recon.hpp"

namespace fs = std::filesystem;
using namespace qpt;

namespace {

constexpr int kOk = 0;
constexpr int kWarning = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

NoiseModel load_noise(const std::string& spec) {
  if (spec.empty() || spec == "none" || spec == "noiseless") return NoiseModel::noiseless();
  if (spec == "laser") return NoiseModel::laser();
  if (spec == "full") return NoiseModel::full();
  if (!fs::exists(spec)) throw InputError("noise file not found: " + spec);
  return noise_from_json(read_json(spec));
}

ProcessSpec parse_process(const std::string& label, double theta) {
  if (theta > 0) return ProcessSpec::ms_overrotated(theta);
  return ProcessSpec::from_label(label);
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void require_file(const std::string& path) {
  if (!fs::exists(path)) throw InputError("file not found: " + path);
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string process = "ms";
  double theta = 0.0;
  std::string noise;
  int shots = 500;
  std::int64_t seed = -1;
  double delay_us = 120.0;
  double overhead_ms = 10.0;
  std::string order = "prep_outer";
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.seed < 0) throw InputError("simulate: --seed is required");
  ProcessSpec process = parse_process(a.process, a.theta);
  if (process.kind() == ProcessSpec::Kind::kDelay) process = ProcessSpec::delay(a.delay_us);
  const NoiseModel noise = load_noise(a.noise);
  TimingModel timing;
  timing.shot_overhead_ms = a.overhead_ms;
  const auto order = a.order == "meas_outer" ? SequenceOrder::kMeasOuter : SequenceOrder::kPrepOuter;
  const double duration = process.kind() == ProcessSpec::Kind::kIdentity ? 0.0 : process.duration_us();
  const ExperimentPlan plan = build_plan(duration, a.shots, timing, order);
  const ShotDataset data = generate_dataset(plan, process, noise, static_cast<std::uint64_t>(a.seed));
  write_json_atomic(a.out, dataset_to_json(data));

  // P2 for the 16 cells where both ions share the preparation and the analysis rotation.
  const auto f = data.p2_frequencies();
  std::cout << "process " << process.label() << ", " << plan.sequences.size() << " sequences x " << a.shots
            << " shots -> " << a.out << "\n";
  std::cout << "P2, prep (rows) x meas (cols), same rotation on both ions\n      ";
  for (Rotation m : kAllRotations) std::printf("%8s", std::string(rotation_code(m)).c_str());
  std::cout << "\n";
  for (Rotation p : kAllRotations) {
    std::printf("%6s", std::string(rotation_code(p)).c_str());
    for (Rotation m : kAllRotations) {
      const int k = 16 * SettingPair{p, p}.linear() + SettingPair{m, m}.linear();
      int idx = k;
      if (order == SequenceOrder::kMeasOuter) idx = 16 * SettingPair{m, m}.linear() + SettingPair{p, p}.linear();
      std::printf("%8.3f", f[idx]);
    }
    std::cout << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct ReconstructArgs {
  std::string dataset;
  std::string method = "mle";
  std::string out;
  int max_iterations = 5000;
};

int cmd_reconstruct(const ReconstructArgs& a) {
  require_file(a.dataset);
  const ShotDataset data = dataset_from_json(read_json(a.dataset));
  const std::string sidecar = a.out + ".convergence.json";
  if (a.method == "inversion") {
    const auto r = linear_inversion(data);
    write_json_atomic(a.out, chi_to_json(r.chi));
    write_json_atomic(sidecar, Json{{"method", "inversion"},
                                    {"min_eigenvalue", r.diagnostics.min_eigenvalue},
                                    {"tp_residual", r.diagnostics.tp_residual},
                                    {"physical", r.physical}});
    std::cout << "linear inversion: min eigenvalue " << r.diagnostics.min_eigenvalue
              << (r.physical ? " (physical)" : " (unphysical)") << "\n";
    return kOk;
  }
  if (a.method != "mle") throw InputError("reconstruct: --method must be mle or inversion");
  MleConfig config;
  config.max_iterations = a.max_iterations;
  const auto r = mle_reconstruct(data, config);
  write_json_atomic(a.out, chi_to_json(r.chi));
  Json side = convergence_to_json(r.convergence);
  write_json_atomic(sidecar, side);
  std::cout << "MLE: " << r.convergence.iterations << " iterations, log-likelihood "
            << fixed(r.convergence.final_log_likelihood, 4) << "\n";
  if (!r.convergence.converged) {
    std::cerr << "warning: MLE stopped at the iteration cap without converging\n";
    return kWarning;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  std::string chi;
  std::string ideal = "ms";
  std::string dataset;
  int replicas = 50;
  std::int64_t seed = 1;
  std::string out_dir;
};

int cmd_report(const ReportArgs& a) {
  require_file(a.chi);
  ProcessSpec ideal_spec = ProcessSpec::identity();
  try {
    ideal_spec = ProcessSpec::from_label(a.ideal);
  } catch (const ValidationError& e) {
    throw InputError(std::string("report: ") + e.what());
  }
  if (ideal_spec.kind() == ProcessSpec::Kind::kDelay) ideal_spec = ProcessSpec::identity();
  const ProcessMatrix chi = chi_from_json(read_json(a.chi));
  const ComplexMatrix u = ideal_spec.ideal_unitary();
  const auto fid = process_fidelity(chi, unitary_to_chi(u));
  const auto diag = validate_cptp(chi);
  const ProcessMatrix err = extract_error_process(chi, u, ErrorOrder::kErrorBeforeGate);

  Json report = {{"ideal", ideal_spec.label()},
                 {"process_fidelity", fid.fidelity},
                 {"process_error", fid.error},
                 {"min_eigenvalue", diag.min_eigenvalue},
                 {"cptp", diag.is_cptp()},
                 {"error_process_order", "error_before_gate"}};
  std::cout << "F_p = " << fixed(fid.fidelity);
  if (!a.dataset.empty()) {
    require_file(a.dataset);
    const ShotDataset data = dataset_from_json(read_json(a.dataset));
    const auto boot = bootstrap_fidelity(data, {}, u, a.replicas, static_cast<std::uint64_t>(a.seed));
    report["bootstrap_std"] = boot.std;
    report["bootstrap_replicas"] = boot.replicas;
    std::cout << " +/- " << fixed(boot.std);
  }
  std::cout << "  (error " << fixed(100 * fid.error, 3) << "%)\n";
  if (ideal_spec.entangling()) {
    const auto rot = fit_over_rotation(chi);
    report["theta_plus"] = rot.theta;
    report["theta_plus_residual"] = rot.residual;
    report["over_rotation_gate_error"] = rot.gate_error;
    std::cout << "theta+ = " << fixed(rot.theta) << " rad, residual " << fixed(rot.residual)
              << ", over-rotation gate error " << fixed(100 * rot.gate_error, 3) << "%\n";
  }
  std::cout << "error process: chi_meas = chi_ideal o chi_err (error acts before the gate)\n";
  // Largest off-II amplitudes of the error process.
  const auto& labels = pauli_labels();
  std::vector<std::tuple<double, int, int>> amps;
  for (int m = 0; m < 16; ++m)
    for (int n = m; n < 16; ++n)
      if (m + n > 0) amps.emplace_back(std::abs(err(m, n)), m, n);
  std::sort(amps.begin(), amps.end(), [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });
  Json top = Json::array();
  for (int i = 0; i < 3 && i < static_cast<int>(amps.size()); ++i) {
    const auto [v, m, n] = amps[i];
    top.push_back({{"row", labels[m]}, {"col", labels[n]}, {"abs", v}});
    std::cout << "  |chi_err(" << labels[m] << "," << labels[n] << ")| = " << fixed(v) << "\n";
  }
  report["largest_error_elements"] = top;

  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    const fs::path d(a.out_dir);
    write_text_atomic(d / "chi_re.csv", chi_component_csv(chi.matrix(), false));
    write_text_atomic(d / "chi_im.csv", chi_component_csv(chi.matrix(), true));
    write_text_atomic(d / "error_re.csv", chi_component_csv(err.matrix(), false));
    write_text_atomic(d / "error_im.csv", chi_component_csv(err.matrix(), true));
    write_json_atomic(d / "report.json", report);
  }
  return diag.is_cptp() ? kOk : kWarning;
}

// ---------------------------------------------------------------------------

struct BellArgs {
  double theta = kPi / 4;
  std::string noise;
  int shots = 10000;
  int points = 16;
  std::int64_t seed = 1;
  std::string out;
};

int cmd_bell(const BellArgs& a) {
  if (a.points < 3) throw InputError("bell: need at least three phase points");
  std::vector<double> phases;
  for (int i = 0; i < a.points; ++i) phases.push_back(i * kPi / a.points);
  const auto exp = simulate_bell_experiment(a.theta, load_noise(a.noise), phases, a.shots,
                                            static_cast<std::uint64_t>(a.seed));
  std::cout << "P0 = " << fixed(exp.p0, 4) << ", P1 = " << fixed(exp.p1, 4) << ", P2 = " << fixed(exp.p2, 4)
            << ", P_amp = " << fixed(exp.scan.amplitude, 4) << "\nF_BST = " << fixed(exp.fidelity, 4) << "\n";
  if (!a.out.empty()) {
    write_json_atomic(a.out, Json{{"theta", a.theta},
                                  {"p0", exp.p0},
                                  {"p1", exp.p1},
                                  {"p2", exp.p2},
                                  {"phases", exp.scan.phases},
                                  {"parity", exp.scan.parity()},
                                  {"parity_amplitude", exp.scan.amplitude},
                                  {"fidelity", exp.fidelity}});
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct RamseyArgs {
  std::string noise = "laser";
  int shots = 20000;
  std::int64_t seed = 1;
  std::vector<double> delays = {20, 60, 100, 120, 200, 300, 450, 600};
  std::string out;
};

int cmd_ramsey(const RamseyArgs& a) {
  const NoiseModel noise = load_noise(a.noise);
  const auto contrast = simulate_ramsey(a.delays, noise, a.shots, static_cast<std::uint64_t>(a.seed));
  Json j = {{"delays_us", a.delays}, {"contrast", contrast}};
  std::cout << "delay_us  contrast\n";
  for (std::size_t i = 0; i < a.delays.size(); ++i) std::printf("%8.1f  %.5f\n", a.delays[i], contrast[i]);
  int code = kOk;
  try {
    const auto fit = fit_ramsey_model(a.delays, contrast);
    j["fit"] = {{"phase_diffusion_rad_per_sqrt_us", fit.phase_diffusion},
                {"fast_freq_sigma_hz", fit.fast_freq_sigma_hz},
                {"residual_rms", fit.residual_rms}};
    const double loss100 = 1.0 - ramsey_model(fit.phase_diffusion, fit.fast_freq_sigma_hz, 100.0);
    const double loss120 = 1.0 - ramsey_model(fit.phase_diffusion, fit.fast_freq_sigma_hz, 120.0);
    j["fit"]["loss_100us"] = loss100;
    j["fit"]["loss_120us"] = loss120;
    std::cout << "fit: c = " << fixed(fit.phase_diffusion, 5) << " rad/sqrt(us), sigma = "
              << fixed(fit.fast_freq_sigma_hz, 1) << " Hz; loss at 100 us " << fixed(100 * loss100, 2)
              << "%, at 120 us " << fixed(100 * loss120, 2) << "%\n";
  } catch (const FitError& e) {
    std::cerr << "warning: " << e.what() << "\n";
    code = kWarning;
  }
  if (!a.out.empty()) write_json_atomic(a.out, j);
  return code;
}

// ---------------------------------------------------------------------------

struct HeatingArgs {
  std::string csv;
  double eta = 0.0;
  std::string out;
};

int cmd_heating(const HeatingArgs& a) {
  require_file(a.csv);
  const auto [t, s] = read_two_column_csv(a.csv);
  const double eta = a.eta > 0 ? a.eta : lamb_dicke_eta(40.0, 2 * kPi * 1.41e6, 729e-9, kPi / 4);
  HeatingFit fit;
  try {
    fit = fit_heating(t, s, eta);
  } catch (const FitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kWarning;
  }
  const auto& o = fit.occupation;
  const double eps = thermal_gate_error(eta, o.n_th);
  std::cout << "n_th = " << fixed(o.n_th, 3) << " +/- " << fixed(std::sqrt(fit.covariance(1, 1)), 3)
            << ", n_coh = " << fixed(o.n_coh, 3) << " +/- " << fixed(std::sqrt(fit.covariance(2, 2)), 3)
            << ", Omega = " << o.rabi_omega << " rad/s, eta = " << fixed(eta, 4) << "\nthermal gate error "
            << eps << "\n";
  if (!a.out.empty()) {
    Json cov = Json::array();
    for (int r = 0; r < 3; ++r) cov.push_back({fit.covariance(r, 0), fit.covariance(r, 1), fit.covariance(r, 2)});
    write_json_atomic(a.out, Json{{"n_th", o.n_th},
                                  {"n_coh", o.n_coh},
                                  {"rabi_omega", o.rabi_omega},
                                  {"eta", eta},
                                  {"covariance_omega_nth_ncoh", cov},
                                  {"cost", fit.cost},
                                  {"thermal_gate_error", eps}});
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-ion quantum process tomography toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate a shot dataset");
  s->add_option("--process", sim.process, "identity | delay | ms | ms_plus(theta)");
  s->add_option("--theta", sim.theta, "Over-rotated gate angle; implies ms_plus(theta)");
  s->add_option("--noise", sim.noise, "Noise JSON file, or none | laser | full");
  s->add_option("--shots", sim.shots, "Shots per sequence")->check(CLI::PositiveNumber);
  s->add_option("--seed", sim.seed, "Random seed")->required();
  s->add_option("--delay-us", sim.delay_us, "Duration of the delay process");
  s->add_option("--overhead-ms", sim.overhead_ms, "Dead time per shot");
  s->add_option("--order", sim.order, "prep_outer | meas_outer")->check(CLI::IsMember({"prep_outer", "meas_outer"}));
  s->add_option("-o,--output", sim.out, "Dataset JSON path")->required();

  ReconstructArgs rec;
  auto* r = app.add_subcommand("reconstruct", "Reconstruct chi from a dataset");
  r->add_option("dataset", rec.dataset)->required();
  r->add_option("--method", rec.method, "mle | inversion");
  r->add_option("--max-iterations", rec.max_iterations)->check(CLI::PositiveNumber);
  r->add_option("-o,--output", rec.out, "chi JSON path")->required();

  ReportArgs rep;
  auto* p = app.add_subcommand("report", "Fidelity, error process and amplitude tables");
  p->add_option("chi", rep.chi)->required();
  p->add_option("--ideal", rep.ideal, "identity | ms | ms_plus(theta)");
  p->add_option("--dataset", rep.dataset, "Dataset for bootstrap uncertainty");
  p->add_option("--replicas", rep.replicas)->check(CLI::Range(2, 100000));
  p->add_option("--seed", rep.seed);
  p->add_option("-o,--output", rep.out_dir, "Directory for CSV tables and report.json");

  BellArgs bell;
  auto* b = app.add_subcommand("bell", "Simulated Bell-state fidelity from a parity scan");
  b->add_option("--theta", bell.theta);
  b->add_option("--noise", bell.noise);
  b->add_option("--shots", bell.shots)->check(CLI::PositiveNumber);
  b->add_option("--points", bell.points);
  b->add_option("--seed", bell.seed);
  b->add_option("-o,--output", bell.out);

  RamseyArgs ram;
  auto* m = app.add_subcommand("ramsey", "Simulated Ramsey contrast and noise-model fit");
  m->add_option("--noise", ram.noise);
  m->add_option("--shots", ram.shots)->check(CLI::PositiveNumber);
  m->add_option("--seed", ram.seed);
  m->add_option("--delays", ram.delays, "Delays in microseconds");
  m->add_option("-o,--output", ram.out);

  HeatingArgs heat;
  auto* h = app.add_subcommand("heating", "Fit motional occupation to sideband Rabi data (CSV: time_s,signal)");
  h->add_option("csv", heat.csv)->required();
  h->add_option("--eta", heat.eta, "Lamb-Dicke parameter (default: 40Ca+, 1.41 MHz, 729 nm, 45 deg)");
  h->add_option("-o,--output", heat.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*r) return cmd_reconstruct(rec);
    if (*p) return cmd_report(rep);
    if (*b) return cmd_bell(bell);
    if (*m) return cmd_ramsey(ram);
    if (*h) return cmd_heating(heat);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kWarning;
  }
  return kInputError;
}
