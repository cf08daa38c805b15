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

#include "qpt/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qpt {

RotationAngles rotation_angles(Rotation r) {
  switch (r) {
    case Rotation::kId:
      return {0.0, 0.0};
    case Rotation::kXpi:
      return {kPi, 0.0};
    case Rotation::kXhalf:
      return {kPi / 2, 0.0};
    case Rotation::kYhalf:
      return {kPi / 2, kPi / 2};
  }
  throw ValidationError("invalid rotation");
}

std::string_view rotation_code(Rotation r) {
  switch (r) {
    case Rotation::kId:
      return "I";
    case Rotation::kXpi:
      return "Xpi";
    case Rotation::kXhalf:
      return "Xhalf";
    case Rotation::kYhalf:
      return "Yhalf";
  }
  throw ValidationError("invalid rotation");
}

Rotation rotation_from_code(std::string_view code) {
  for (Rotation r : kAllRotations) {
    if (rotation_code(r) == code) return r;
  }
  throw ValidationError("unknown rotation code '" + std::string(code) + "'");
}

ComplexMatrix rotation_unitary(double theta, double phi) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  ComplexMatrix r(2, 2);
  r(0, 0) = c;
  r(1, 1) = c;
  r(0, 1) = -kI * s * std::exp(-kI * phi);
  r(1, 0) = -kI * s * std::exp(kI * phi);
  return r;
}

SettingPair SettingPair::from_linear(int k) {
  if (k < 0 || k > 15) throw ValidationError("setting index out of range: " + std::to_string(k));
  return {kAllRotations[k / 4], kAllRotations[k % 4]};
}

ComplexMatrix SettingPair::unitary() const {
  const auto a = rotation_angles(ion1);
  const auto b = rotation_angles(ion2);
  return kron(rotation_unitary(a.theta, a.phi), rotation_unitary(b.theta, b.phi));
}

void TimingModel::validate() const {
  if (!(composite_block_us > 0) || !(pulse_pi_us > 0) || process_duration_us < 0 ||
      shot_overhead_ms < 0) {
    throw ValidationError("timing model: durations must be positive");
  }
  // The longest half pulse is pi/2, i.e. half a pi-time.
  const double half = 0.5 * pulse_pi_us;
  if (second_pulse_offset_us < half || second_pulse_offset_us + half > composite_block_us) {
    throw ValidationError("timing model: laser pulses do not fit inside the composite block");
  }
}

double ExperimentPlan::total_duration_s() const {
  return static_cast<double>(sequences.size()) * shots * timing.shot_period_s();
}

ExperimentPlan build_plan_from_settings(const std::vector<SettingPair>& preps,
                                        const std::vector<SettingPair>& meas,
                                        double process_duration_us, int shots, TimingModel timing,
                                        SequenceOrder order) {
  if (shots < 1) throw ValidationError("build_plan: shots must be positive");
  if (preps.empty() || meas.empty()) throw ValidationError("build_plan: empty setting list");
  timing.process_duration_us = process_duration_us;
  timing.validate();
  ExperimentPlan plan;
  plan.shots = shots;
  plan.timing = timing;
  plan.order = order;
  const double sequence_time = shots * timing.shot_period_s();
  const auto n_outer = order == SequenceOrder::kPrepOuter ? preps.size() : meas.size();
  const auto n_inner = order == SequenceOrder::kPrepOuter ? meas.size() : preps.size();
  plan.sequences.reserve(n_outer * n_inner);
  for (std::size_t o = 0; o < n_outer; ++o) {
    for (std::size_t i = 0; i < n_inner; ++i) {
      SequenceSpec s;
      s.index = static_cast<int>(plan.sequences.size());
      s.prep = order == SequenceOrder::kPrepOuter ? preps[o] : preps[i];
      s.meas = order == SequenceOrder::kPrepOuter ? meas[i] : meas[o];
      s.start_time_s = s.index * sequence_time;
      plan.sequences.push_back(s);
    }
  }
  return plan;
}

ExperimentPlan build_plan(double process_duration_us, int shots, TimingModel timing,
                          SequenceOrder order) {
  std::vector<SettingPair> all;
  for (int k = 0; k < 16; ++k) all.push_back(SettingPair::from_linear(k));
  return build_plan_from_settings(all, all, process_duration_us, shots, timing, order);
}

ComplexMatrix prep_state(const SettingPair& setting) {
  ComplexVector ss = ComplexVector::Zero(4);
  ss(0) = 1.0;
  const ComplexVector psi = setting.unitary() * ss;
  return psi * psi.adjoint();
}

ComplexMatrix meas_operator(const SettingPair& setting) {
  const ComplexMatrix u = setting.unitary();
  // (R1 (x) R2)^dagger |SS><SS| (R1 (x) R2) = |v><v| with v = row 0 of u, conjugated.
  const ComplexVector v = u.row(0).adjoint();
  return v * v.adjoint();
}

std::vector<double> predict_p2(const ProcessMatrix& chi, const ExperimentPlan& plan) {
  std::vector<double> out;
  out.reserve(plan.sequences.size());
  const auto& paulis = two_qubit_pauli_basis();
  for (const auto& seq : plan.sequences) {
    const ComplexMatrix rho = prep_state(seq.prep);
    const ComplexMatrix m = meas_operator(seq.meas);
    Complex p = 0.0;
    for (int a = 0; a < 16; ++a) {
      const ComplexMatrix left = m * paulis[a] * rho;
      for (int b = 0; b < 16; ++b) {
        const Complex w = chi(a, b);
        if (w == Complex{}) continue;
        p += w * (left * paulis[b]).trace();
      }
    }
    double value = p.real();
    if (value < -1e-10 || value > 1.0 + 1e-10) {
      std::ostringstream msg;
      msg << "predict_p2: probability " << value << " for sequence " << seq.index
          << " lies outside [0, 1]; the process matrix is not physical";
      throw ConsistencyError(msg.str());
    }
    out.push_back(std::clamp(value, 0.0, 1.0));
  }
  return out;
}

ComplexMatrix hermitian_from_parameters(const Eigen::VectorXd& x) {
  if (x.size() != 256) throw ValidationError("hermitian_from_parameters: expected 256 parameters");
  ComplexMatrix h(16, 16);
  for (int m = 0; m < 16; ++m) {
    h(m, m) = x(16 * m + m);
    for (int n = m + 1; n < 16; ++n) {
      h(m, n) = Complex(x(16 * m + n), x(16 * n + m));
      h(n, m) = std::conj(h(m, n));
    }
  }
  return h;
}

Eigen::VectorXd parameters_from_hermitian(const ComplexMatrix& h) {
  Eigen::VectorXd x(256);
  for (int m = 0; m < 16; ++m) {
    x(16 * m + m) = h(m, m).real();
    for (int n = m + 1; n < 16; ++n) {
      x(16 * m + n) = h(m, n).real();
      x(16 * n + m) = h(m, n).imag();
    }
  }
  return x;
}

Eigen::MatrixXd design_matrix(const ExperimentPlan& plan) {
  // p_k = sum_mn chi_mn B_k(n, m) with B_k(n, m) = Tr(P_n M_k P_m rho_k); B_k is Hermitian.
  const auto& paulis = two_qubit_pauli_basis();
  Eigen::MatrixXd a(plan.sequences.size(), 256);
  for (std::size_t row = 0; row < plan.sequences.size(); ++row) {
    const auto& seq = plan.sequences[row];
    const ComplexMatrix rho = prep_state(seq.prep);
    const ComplexMatrix m = meas_operator(seq.meas);
    ComplexMatrix b(16, 16);
    for (int n = 0; n < 16; ++n) {
      const ComplexMatrix left = paulis[n] * m;
      for (int mm = 0; mm < 16; ++mm) b(n, mm) = (left * paulis[mm] * rho).trace();
    }
    for (int p = 0; p < 16; ++p) {
      a(row, 16 * p + p) = b(p, p).real();
      for (int q = p + 1; q < 16; ++q) {
        // chi_pq = x + i y, chi_qp = x - i y; contribution chi_pq B(q, p) + chi_qp B(p, q).
        const Complex bqp = b(q, p);
        a(row, 16 * p + q) = 2.0 * bqp.real();
        a(row, 16 * q + p) = -2.0 * bqp.imag();
      }
    }
  }
  return a;
}

int design_rank(const ExperimentPlan& plan) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design_matrix(plan));
  qr.setThreshold(1e-9);
  return static_cast<int>(qr.rank());
}

}  // namespace qpt
