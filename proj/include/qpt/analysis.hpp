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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qpt/ionsim.hpp"
#include "qpt/process.hpp"

namespace qpt {

/// Raised when a least-squares fit has nothing to fit or fails from every start.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a Fock truncation leaves more than the allowed population outside.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Bell states

struct ParityScan {
  std::vector<double> phases;
  std::vector<double> p2;
  std::vector<double> p1;
  std::vector<double> p0;
  /// Parity(phi) = offset + amplitude * sin(2 phi + phase_offset).
  double amplitude = 0.0;
  double phase_offset = 0.0;
  double offset = 0.0;

  std::vector<double> parity() const;
};

/// Least-squares sinusoid in 2 phi through the parity P0 + P2 - P1. The amplitude is
/// clamped to [0, 1].
ParityScan fit_parity_scan(std::vector<double> phases, std::vector<double> p2,
                           std::vector<double> p1, std::vector<double> p0);

/// F = P_amp / 2 + (p0 + p2) / 2, clamped to [0, 1].
double bell_state_fidelity(double p0, double p2, const ParityScan& parity);

struct BellExperiment {
  /// Populations after the gate alone.
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  ParityScan scan;
  double fidelity = 0.0;
};

/// Gate exp(-i theta XX) on |SS>, populations from `shots` shots, then a parity scan with
/// a global R(pi/2, phi) analysis pulse at each phase. Laser noise enters as frame
/// rotations at the gate midpoint and the analysis pulse; each shot draws its outcome.
BellExperiment simulate_bell_experiment(double theta, const NoiseModel& noise,
                                        const std::vector<double>& phases, int shots,
                                        std::uint64_t seed, double gate_duration_us = 120.0);

// ---------------------------------------------------------------------------
// Over-rotation

struct OverRotationFit {
  double theta = 0.0;
  /// 1 - F_p at the best theta.
  double residual = 0.0;
  /// Error of exp(-i theta XX) against the ideal pi/4 gate, sin^2(theta - pi/4).
  double gate_error = 0.0;
};

/// Golden-section maximization of F_p(chi, exp(-i theta XX)) over [0, pi/2].
OverRotationFit fit_over_rotation(const ProcessMatrix& chi, double tolerance = 1e-6);

// ---------------------------------------------------------------------------
// Ramsey

struct RamseyFit {
  double phase_diffusion = 0.0;  // rad / sqrt(us)
  double fast_freq_sigma_hz = 0.0;
  double chi2 = 0.0;
  double residual_rms = 0.0;
};

/// exp(-c^2 tau / 2) times the shot-averaged jitter factor used by the simulator.
double ramsey_model(double phase_diffusion, double fast_freq_sigma_hz, double tau_us);

/// Bounded least squares of ramsey_model to measured contrasts. Empty uncertainties
/// means unit weights.
RamseyFit fit_ramsey_model(const std::vector<double>& delays_us, const std::vector<double>& contrasts,
                           const std::vector<double>& uncertainties = {});

// ---------------------------------------------------------------------------
// Motional thermometry

struct MotionalOccupation {
  double n_th = 0.0;
  double n_coh = 0.0;
  double rabi_omega = 0.0;  // rad/s
  double eta = 0.0;

  void validate() const;
};

/// Fock populations of a thermal state displaced by |alpha|^2 = n_coh. With n_max < 0
/// the truncation grows until the tail falls below `tail`; otherwise p_0..p_{n_max} is
/// returned and a larger tail raises TruncationError.
std::vector<double> displaced_thermal_populations(double n_th, double n_coh, int n_max = -1,
                                                  double tail = 1e-6);

/// Expected bright ions 2 sum_n p_n sin^2(Omega eta sqrt(n+1) t / 2), times in seconds.
/// Both ions are treated as independent two-level systems sharing the mode.
std::vector<double> sideband_rabi_signal(const MotionalOccupation& occ, const std::vector<double>& times_s);

struct HeatingFit {
  MotionalOccupation occupation;
  /// Covariance of (rabi_omega, n_th, n_coh).
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double cost = 0.0;
  int start_index = 0;
};

/// Nonlinear least squares over (Omega, n_th, n_coh) with eta held fixed, from five
/// starting occupations, each seeded with the best Omega of a coarse scan.
HeatingFit fit_heating(const std::vector<double>& times_s, const std::vector<double>& signals, double eta);

/// (pi^2 / 4) eta^4 (n_th + 2 n_th^2).
double thermal_gate_error(double eta, double n_th);

/// (1/sqrt 2) sqrt(hbar / (2 m omega)) (2 pi / lambda) cos(angle); m is one ion's mass.
double lamb_dicke_eta(double mass_amu, double omega_rad_s, double wavelength_m, double beam_angle_rad);

}  // namespace qpt
