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

#include "qpt/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <ceres/ceres.h>

#include "qpt/protocol.hpp"
#include "qpt/random.hpp"

namespace qpt {

// ---------------------------------------------------------------------------
// Bell states

std::vector<double> ParityScan::parity() const {
  std::vector<double> out(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i) out[i] = p0[i] + p2[i] - p1[i];
  return out;
}

ParityScan fit_parity_scan(std::vector<double> phases, std::vector<double> p2, std::vector<double> p1,
                           std::vector<double> p0) {
  const std::size_t n = phases.size();
  if (n < 3) throw ValidationError("fit_parity_scan: need at least three phases");
  if (p2.size() != n || p1.size() != n || p0.size() != n) {
    throw ValidationError("fit_parity_scan: population lists must match the phase list");
  }
  ParityScan scan{std::move(phases), std::move(p2), std::move(p1), std::move(p0)};
  const auto parity = scan.parity();
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, 0) = std::sin(2.0 * scan.phases[i]);
    a(i, 1) = std::cos(2.0 * scan.phases[i]);
    a(i, 2) = 1.0;
    y(i) = parity[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) throw FitError("fit_parity_scan: phases do not determine a sinusoid in 2 phi");
  const Eigen::Vector3d x = qr.solve(y);
  scan.amplitude = std::clamp(std::hypot(x(0), x(1)), 0.0, 1.0);
  scan.phase_offset = std::atan2(x(1), x(0));
  scan.offset = x(2);
  return scan;
}

double bell_state_fidelity(double p0, double p2, const ParityScan& parity) {
  if (p0 < 0 || p0 > 1 || p2 < 0 || p2 > 1) {
    throw ValidationError("bell_state_fidelity: populations must lie in [0, 1]");
  }
  return std::clamp(0.5 * parity.amplitude + 0.5 * (p0 + p2), 0.0, 1.0);
}

namespace {

ComplexMatrix frame(double phase) {
  ComplexMatrix z = ComplexMatrix::Zero(2, 2);
  z(0, 0) = std::exp(-0.5 * kI * phase);
  z(1, 1) = std::exp(0.5 * kI * phase);
  return kron(z, z);
}

}  // namespace

BellExperiment simulate_bell_experiment(double theta, const NoiseModel& noise,
                                        const std::vector<double>& phases, int shots,
                                        std::uint64_t seed, double gate_duration_us) {
  noise.validate();
  if (shots < 1) throw ValidationError("simulate_bell_experiment: shots must be positive");
  const double analysis_mid_us = gate_duration_us + 2.0;
  // Row 0 of the stream key is the population measurement, row i + 1 the i-th phase.
  auto run = [&](std::uint64_t row, const double* phi) {
    std::array<int, 3> counts{};
    for (int shot = 0; shot < shots; ++shot) {
      Rng rng = stream(seed, row, static_cast<std::uint64_t>(shot));
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double omega = 2.0 * kPi * noise.fast_freq_sigma_hz * gauss(rng) * 1e-6;
      const double c = noise.phase_diffusion_rad_per_sqrt_us;
      const double walk_gate = c * std::sqrt(0.5 * gate_duration_us) * gauss(rng);
      const double walk_analysis = walk_gate + c * std::sqrt(analysis_mid_us - 0.5 * gate_duration_us) * gauss(rng);
      const ComplexMatrix z = frame(omega * 0.5 * gate_duration_us + walk_gate);
      ComplexMatrix u = z * ms_unitary(theta) * z.adjoint();
      if (phi) {
        const ComplexMatrix r = rotation_unitary(kPi / 2, *phi + omega * analysis_mid_us + walk_analysis);
        u = kron(r, r) * u;
      }
      const double bright2 = std::norm(u(0, 0));
      const double bright0 = std::norm(u(3, 0));
      const double draw = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      if (draw < bright2) {
        ++counts[2];
      } else if (draw < 1.0 - bright0) {
        ++counts[1];
      } else {
        ++counts[0];
      }
    }
    return std::array<double, 3>{static_cast<double>(counts[0]) / shots, static_cast<double>(counts[1]) / shots,
                                 static_cast<double>(counts[2]) / shots};
  };

  BellExperiment out;
  const auto pops = run(0, nullptr);
  out.p0 = pops[0];
  out.p1 = pops[1];
  out.p2 = pops[2];
  std::vector<double> p0(phases.size()), p1(phases.size()), p2(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto f = run(i + 1, &phases[i]);
    p0[i] = f[0];
    p1[i] = f[1];
    p2[i] = f[2];
  }
  out.scan = fit_parity_scan(phases, std::move(p2), std::move(p1), std::move(p0));
  out.fidelity = bell_state_fidelity(out.p0, out.p2, out.scan);
  return out;
}

// ---------------------------------------------------------------------------
// Over-rotation

OverRotationFit fit_over_rotation(const ProcessMatrix& chi, double tolerance) {
  if (!(tolerance > 0)) throw ValidationError("fit_over_rotation: tolerance must be positive");
  auto fidelity = [&](double theta) {
    return process_fidelity(chi, unitary_to_chi(ms_unitary(theta))).fidelity;
  };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = kPi / 2;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = fidelity(x1), f2 = fidelity(x2);
  while (b - a > tolerance) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = fidelity(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = fidelity(x1);
    }
  }
  OverRotationFit fit;
  fit.theta = 0.5 * (a + b);
  // The bracket ends are candidates too: the optimum may sit on the boundary.
  double best = fidelity(fit.theta);
  for (double edge : {0.0, kPi / 2}) {
    const double f = fidelity(edge);
    if (f > best) {
      best = f;
      fit.theta = edge;
    }
  }
  fit.residual = std::max(0.0, 1.0 - best);
  const double s = std::sin(fit.theta - kPi / 4);
  fit.gate_error = s * s;
  return fit;
}

// ---------------------------------------------------------------------------
// Ramsey

double ramsey_model(double phase_diffusion, double fast_freq_sigma_hz, double tau_us) {
  return diffusion_contrast_factor(phase_diffusion, tau_us) * jitter_contrast_factor(fast_freq_sigma_hz, tau_us);
}

namespace {

// Jitter enters in units of 100 Hz to keep both parameters of order 0.01 to 10.
constexpr double kSigmaUnitHz = 100.0;

struct RamseyResidual {
  double tau, contrast, weight;
  template <typename T>
  bool operator()(const T* c, const T* s, T* residual) const {
    const T w = T(2.0 * kPi * kSigmaUnitHz * 1e-6 * tau) * s[0];
    residual[0] = T(weight) * (exp(T(-0.5 * tau) * c[0] * c[0] - T(0.5) * w * w) - T(contrast));
    return true;
  }
};

}  // namespace

RamseyFit fit_ramsey_model(const std::vector<double>& delays_us, const std::vector<double>& contrasts,
                           const std::vector<double>& uncertainties) {
  const std::size_t n = delays_us.size();
  if (n < 3) throw ValidationError("fit_ramsey_model: need at least three delays");
  if (contrasts.size() != n) throw ValidationError("fit_ramsey_model: one contrast per delay");
  if (!uncertainties.empty() && uncertainties.size() != n) {
    throw ValidationError("fit_ramsey_model: one uncertainty per delay");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(delays_us[i] > 0)) throw ValidationError("fit_ramsey_model: delays must be positive");
    if (!uncertainties.empty() && !(uncertainties[i] > 0)) {
      throw ValidationError("fit_ramsey_model: uncertainties must be positive");
    }
  }
  const auto [lo, hi] = std::minmax_element(contrasts.begin(), contrasts.end());
  if (*hi - *lo < 1e-12) throw FitError("fit_ramsey_model: contrast does not vary with delay");

  // Start from the linear fit of -2 ln C = c^2 tau + (2 pi sigma tau)^2.
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, 0) = delays_us[i];
    a(i, 1) = delays_us[i] * delays_us[i];
    y(i) = -2.0 * std::log(std::clamp(contrasts[i], 1e-6, 1.0));
  }
  const Eigen::Vector2d lin = a.colPivHouseholderQr().solve(y);
  double c = std::sqrt(std::max(lin(0), 1e-8));
  double s = std::sqrt(std::max(lin(1), 1e-14)) / (2.0 * kPi * kSigmaUnitHz * 1e-6);

  ceres::Problem problem;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = uncertainties.empty() ? 1.0 : 1.0 / uncertainties[i];
    problem.AddResidualBlock(new ceres::AutoDiffCostFunction<RamseyResidual, 1, 1, 1>(
                                 new RamseyResidual{delays_us[i], contrasts[i], w}),
                             nullptr, &c, &s);
  }
  problem.SetParameterLowerBound(&c, 0, 0.0);
  problem.SetParameterLowerBound(&s, 0, 0.0);
  ceres::Solver::Options options;
  options.max_num_iterations = 200;
  options.function_tolerance = 1e-14;
  options.parameter_tolerance = 1e-12;
  options.gradient_tolerance = 1e-14;
  options.logging_type = ceres::SILENT;
  ceres::Solver::Summary summary;
  ceres::Solve(options, &problem, &summary);
  if (!summary.IsSolutionUsable()) throw FitError("fit_ramsey_model: " + summary.message);

  RamseyFit fit;
  fit.phase_diffusion = c;
  fit.fast_freq_sigma_hz = s * kSigmaUnitHz;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ramsey_model(fit.phase_diffusion, fit.fast_freq_sigma_hz, delays_us[i]) - contrasts[i];
    const double w = uncertainties.empty() ? 1.0 : 1.0 / uncertainties[i];
    sum_sq += r * r;
    fit.chi2 += w * w * r * r;
  }
  fit.residual_rms = std::sqrt(sum_sq / n);
  return fit;
}

// ---------------------------------------------------------------------------
// Motional thermometry

void MotionalOccupation::validate() const {
  if (!(n_th >= 0) || !(n_coh >= 0) || !(rabi_omega >= 0) || !(eta >= 0)) {
    throw ValidationError("MotionalOccupation: all fields must be nonnegative");
  }
}

std::vector<double> displaced_thermal_populations(double n_th, double n_coh, int n_max, double tail) {
  if (!(n_th >= 0) || !(n_coh >= 0)) throw ValidationError("displaced_thermal_populations: occupations must be nonnegative");
  if (!(tail > 0 && tail < 1)) throw ValidationError("displaced_thermal_populations: tail must lie in (0, 1)");
  // p_n = q^n / (1 + n_th) e^{-beta} L_n(-gamma / q), q = n_th / (1 + n_th),
  // beta = n_coh / (1 + n_th), gamma = n_coh / (1 + n_th)^2. The Laguerre argument is
  // negative, so the three-term recurrence runs along its dominant solution.
  const double q = n_th / (1.0 + n_th);
  const double beta = n_coh / (1.0 + n_th);
  const double gamma = n_coh / ((1.0 + n_th) * (1.0 + n_th));
  if (beta > 600.0) throw ValidationError("displaced_thermal_populations: coherent occupation too large");
  const double mean = n_th + n_coh;
  const int hard_cap = 1 << 22;

  std::vector<double> p;
  p.push_back(std::exp(-beta) / (1.0 + n_th));
  double sum = p[0];
  double prev = 0.0;
  for (int n = 0;; ++n) {
    const bool done = n_max >= 0 ? n >= n_max : (n > mean && 1.0 - sum < tail);
    if (done) break;
    if (n >= hard_cap) throw TruncationError("displaced_thermal_populations: truncation did not converge");
    const double next = (((2.0 * n + 1.0) * q + gamma) * p[n] - n * q * q * prev) / (n + 1.0);
    prev = p[n];
    p.push_back(std::max(0.0, next));
    sum += p.back();
  }
  if (1.0 - sum > tail) {
    throw TruncationError("displaced_thermal_populations: population " + std::to_string(1.0 - sum) +
                          " lies beyond n_max = " + std::to_string(n_max));
  }
  return p;
}

namespace {

double signal_at(const std::vector<double>& pops, double phase) {
  double s = 0.0;
  for (std::size_t n = 0; n < pops.size(); ++n) {
    const double x = std::sin(0.5 * phase * std::sqrt(n + 1.0));
    s += pops[n] * x * x;
  }
  return 2.0 * s;
}

}  // namespace

std::vector<double> sideband_rabi_signal(const MotionalOccupation& occ, const std::vector<double>& times_s) {
  occ.validate();
  const auto pops = displaced_thermal_populations(occ.n_th, occ.n_coh, -1, 1e-12);
  std::vector<double> out;
  out.reserve(times_s.size());
  for (double t : times_s) out.push_back(std::clamp(signal_at(pops, occ.rabi_omega * occ.eta * t), 0.0, 2.0));
  return out;
}

namespace {

// x = (u, n_th, n_coh) with u = Omega eta t_max, so the flop phase at t is u t / t_max.
struct HeatingResiduals {
  const std::vector<double>* scaled_times;
  const std::vector<double>* signals;

  bool operator()(const double* const* x, double* residual) const {
    const double u = x[0][0], n_th = std::max(0.0, x[0][1]), n_coh = std::max(0.0, x[0][2]);
    const auto pops = displaced_thermal_populations(n_th, n_coh, -1, 1e-12);
    for (std::size_t i = 0; i < scaled_times->size(); ++i) {
      residual[i] = signal_at(pops, u * (*scaled_times)[i]) - (*signals)[i];
    }
    return true;
  }
};

double heating_cost(const HeatingResiduals& model, const std::array<double, 3>& x) {
  std::vector<double> r(model.signals->size());
  const double* block = x.data();
  model(&block, r.data());
  double c = 0.0;
  for (double v : r) c += v * v;
  return 0.5 * c;
}

}  // namespace

HeatingFit fit_heating(const std::vector<double>& times_s, const std::vector<double>& signals, double eta) {
  const std::size_t n = times_s.size();
  if (n < 8) throw ValidationError("fit_heating: need at least eight time points");
  if (signals.size() != n) throw ValidationError("fit_heating: one signal per time");
  if (!(eta > 0)) throw ValidationError("fit_heating: eta must be positive");
  for (double t : times_s) {
    if (!(t >= 0)) throw ValidationError("fit_heating: times must be nonnegative");
  }
  const double t_max = *std::max_element(times_s.begin(), times_s.end());
  if (!(t_max > 0)) throw ValidationError("fit_heating: times must span a positive interval");
  const auto [lo, hi] = std::minmax_element(signals.begin(), signals.end());
  if (*hi - *lo < 1e-6) throw FitError("fit_heating: signal is flat");

  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = times_s[i] / t_max;
  const HeatingResiduals model{&scaled, &signals};

  constexpr std::array<std::array<double, 2>, 5> kStarts = {
      {{0.5, 0.1}, {3.0, 0.5}, {8.0, 2.0}, {20.0, 10.0}, {40.0, 30.0}}};
  HeatingFit best;
  best.cost = std::numeric_limits<double>::infinity();
  std::array<double, 3> best_x{};
  bool any = false;
  for (int start = 0; start < static_cast<int>(kStarts.size()); ++start) {
    // Coarse logarithmic scan of the flop count over the window.
    std::array<double, 3> x = {0.0, kStarts[start][0], kStarts[start][1]};
    double scan_cost = std::numeric_limits<double>::infinity();
    constexpr int kScan = 240;
    for (int i = 0; i < kScan; ++i) {
      const double u = 0.3 * std::pow(1000.0, static_cast<double>(i) / (kScan - 1));
      const double c = heating_cost(model, {u, x[1], x[2]});
      if (c < scan_cost) {
        scan_cost = c;
        x[0] = u;
      }
    }

    ceres::Problem problem;
    auto* cost = new ceres::DynamicNumericDiffCostFunction<HeatingResiduals, ceres::CENTRAL>(
        new HeatingResiduals(model), ceres::TAKE_OWNERSHIP);
    cost->AddParameterBlock(3);
    cost->SetNumResiduals(static_cast<int>(n));
    problem.AddResidualBlock(cost, nullptr, x.data());
    problem.SetParameterLowerBound(x.data(), 0, 1e-6);
    problem.SetParameterLowerBound(x.data(), 1, 0.0);
    problem.SetParameterLowerBound(x.data(), 2, 0.0);
    problem.SetParameterUpperBound(x.data(), 0, 1e5);
    problem.SetParameterUpperBound(x.data(), 1, 500.0);
    problem.SetParameterUpperBound(x.data(), 2, 500.0);
    ceres::Solver::Options options;
    options.max_num_iterations = 200;
    options.function_tolerance = 1e-12;
    options.parameter_tolerance = 1e-10;
    options.logging_type = ceres::SILENT;
    ceres::Solver::Summary summary;
    try {
      ceres::Solve(options, &problem, &summary);
    } catch (const std::exception&) {
      continue;
    }
    if (!summary.IsSolutionUsable()) continue;
    const double final_cost = heating_cost(model, x);
    if (final_cost < best.cost) {  // strict: ties keep the earlier start
      any = true;
      best.cost = final_cost;
      best.start_index = start;
      best_x = x;
    }
  }
  if (!any) throw FitError("fit_heating: no starting point converged");

  best.occupation = {best_x[1], best_x[2], best_x[0] / (eta * t_max), eta};

  // Gauss-Newton covariance s^2 (J^T J)^+ from a central-difference Jacobian.
  Eigen::MatrixXd jac(n, 3);
  for (int k = 0; k < 3; ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(best_x[k]));
    auto plus = best_x, minus = best_x;
    plus[k] += h;
    minus[k] = std::max(0.0, minus[k] - h);
    std::vector<double> rp(n), rm(n);
    const double* bp = plus.data();
    const double* bm = minus.data();
    model(&bp, rp.data());
    model(&bm, rm.data());
    for (std::size_t i = 0; i < n; ++i) jac(i, k) = (rp[i] - rm[i]) / (plus[k] - minus[k]);
  }
  const double s2 = n > 3 ? 2.0 * best.cost / static_cast<double>(n - 3) : 0.0;
  Eigen::Matrix3d cov = s2 * (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::Vector3d scale(1.0 / (eta * t_max), 1.0, 1.0);
  best.covariance = scale.asDiagonal() * cov * scale.asDiagonal();
  return best;
}

double thermal_gate_error(double eta, double n_th) {
  if (!(eta >= 0) || !(n_th >= 0)) throw ValidationError("thermal_gate_error: arguments must be nonnegative");
  return 0.25 * kPi * kPi * std::pow(eta, 4) * (n_th + 2.0 * n_th * n_th);
}

double lamb_dicke_eta(double mass_amu, double omega_rad_s, double wavelength_m, double beam_angle_rad) {
  if (!(mass_amu > 0) || !(omega_rad_s > 0) || !(wavelength_m > 0)) {
    throw ValidationError("lamb_dicke_eta: mass, frequency and wavelength must be positive");
  }
  constexpr double kHbar = 1.054571817e-34;
  constexpr double kAmu = 1.66053906660e-27;
  const double x0 = std::sqrt(kHbar / (2.0 * mass_amu * kAmu * omega_rad_s));
  const double k_axial = 2.0 * kPi / wavelength_m * std::cos(beam_angle_rad);
  return std::abs(x0 * k_axial) / std::sqrt(2.0);
}

}  // namespace qpt
