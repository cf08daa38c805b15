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

#include "qpt/ionsim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qpt/parallel.hpp"

namespace qpt {

NoiseModel NoiseModel::noiseless() { return {0.0, 0.0, 0.0, 0.0, 0.0, 0.0}; }

NoiseModel NoiseModel::laser() { return {7.0, 300.0, 0.015, 0.0, 0.0, 0.0}; }

NoiseModel NoiseModel::full() { return {7.0, 300.0, 0.015, -145.0, 155.0, 0.0}; }

void NoiseModel::validate() const {
  if (fast_freq_sigma_hz < 0 || phase_diffusion_rad_per_sqrt_us < 0) {
    throw ValidationError("noise model: standard deviations must be nonnegative");
  }
  if (!std::isfinite(drift_hz_per_min) || !std::isfinite(phi_p_error_mrad) ||
      !std::isfinite(scaling_phase_error_mrad_ion2) || !std::isfinite(pulse_area_fractional_error)) {
    throw ValidationError("noise model: parameters must be finite");
  }
}

ProcessSpec ProcessSpec::from_label(const std::string& label) {
  if (label == "identity") return identity();
  if (label == "delay") return delay();
  if (label == "ms") return ms();
  for (const std::string prefix : {"ms_overrotated(", "ms_plus("}) {
    if (label.rfind(prefix, 0) == 0 && label.back() == ')') {
      const std::string arg = label.substr(prefix.size(), label.size() - prefix.size() - 1);
      std::size_t used = 0;
      double theta = 0.0;
      try {
        theta = std::stod(arg, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != arg.size()) throw ValidationError("bad rotation angle in '" + label + "'");
      return ms_overrotated(theta);
    }
  }
  throw ValidationError("unknown process label '" + label + "'");
}

std::string ProcessSpec::label() const {
  switch (kind_) {
    case Kind::kIdentity:
      return "identity";
    case Kind::kDelay:
      return "delay";
    case Kind::kMs:
      return "ms";
    case Kind::kMsOverrotated: {
      std::ostringstream out;
      out.precision(17);
      out << "ms_overrotated(" << theta_ << ")";
      return out.str();
    }
  }
  return "unknown";
}

ComplexMatrix ms_unitary(double theta) {
  const ComplexMatrix xx = kron(pauli_matrix(Pauli::X), pauli_matrix(Pauli::X));
  // XX squares to identity, so exp(-i theta XX) = cos(theta) I - i sin(theta) XX.
  return std::cos(theta) * ComplexMatrix::Identity(4, 4) - kI * std::sin(theta) * xx;
}

ComplexMatrix ProcessSpec::ideal_unitary() const {
  return entangling() ? ms_unitary(theta_) : ComplexMatrix::Identity(4, 4);
}

std::vector<ScheduledPulse> pulse_schedule(const SequenceSpec& seq, const TimingModel& timing,
                                           const ProcessSpec& process) {
  std::vector<ScheduledPulse> out;
  double t = 0.0;
  auto add_block = [&](int ion, Rotation r) {
    const auto angles = rotation_angles(r);
    if (angles.theta > 0) {
      const double half_duration = 0.5 * angles.theta / kPi * timing.pulse_pi_us;
      out.push_back({ScheduledPulse::Role::kFirstHalf, ion, angles.theta, angles.phi, t + 0.5 * half_duration});
      out.push_back({ScheduledPulse::Role::kSecondHalf, ion, angles.theta, angles.phi,
                     t + timing.second_pulse_offset_us + 0.5 * half_duration});
    }
    t += timing.composite_block_us;
  };
  add_block(1, seq.prep.ion1);
  add_block(2, seq.prep.ion2);
  if (process.entangling()) {
    out.push_back({ScheduledPulse::Role::kEntangling, 0, process.theta(), 0.0,
                   t + 0.5 * timing.process_duration_us});
  }
  t += timing.process_duration_us;
  add_block(1, seq.meas.ion1);
  add_block(2, seq.meas.ion2);
  return out;
}

Rng shot_stream(std::uint64_t seed, int seq_index, int shot_index) {
  return stream(seed, static_cast<std::uint64_t>(seq_index), static_cast<std::uint64_t>(shot_index));
}

namespace {

// Nominal laser phase of a scheduled pulse before noise and position-phase offsets.
double nominal_laser_phase(const ScheduledPulse& p) {
  if (p.role == ScheduledPulse::Role::kSecondHalf && p.target_ion == 2) return p.block_phi - kPi;
  return p.block_phi;
}

ComplexMatrix z_frame(double phase) {
  ComplexMatrix z = ComplexMatrix::Zero(2, 2);
  z(0, 0) = std::exp(-0.5 * kI * phase);
  z(1, 1) = std::exp(0.5 * kI * phase);
  return z;
}

}  // namespace

NoiseTrajectory sample_trajectory(const TimingModel& timing, const SequenceSpec& seq,
                                  const ProcessSpec& process, const NoiseModel& noise, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  NoiseTrajectory traj;
  traj.frequency_offset_hz =
      noise.drift_hz_per_min * seq.start_time_s / 60.0 + noise.fast_freq_sigma_hz * gauss(rng);
  const auto schedule = pulse_schedule(seq, timing, process);
  const double omega = 2.0 * kPi * traj.frequency_offset_hz * 1e-6;  // rad per us
  const double c = noise.phase_diffusion_rad_per_sqrt_us;
  double walk = 0.0;
  double last_time = 0.0;
  traj.phase_deviation_rad.reserve(schedule.size());
  for (const auto& pulse : schedule) {
    walk += c * std::sqrt(pulse.mid_time_us - last_time) * gauss(rng);
    last_time = pulse.mid_time_us;
    const double dev = omega * pulse.mid_time_us + walk;
    traj.phase_deviation_rad.push_back(dev);
    const double theta = pulse.role == ScheduledPulse::Role::kEntangling
                             ? pulse.block_theta
                             : 0.5 * pulse.block_theta * (1.0 + noise.pulse_area_fractional_error);
    traj.theta_actual.push_back(theta);
    traj.phi_actual.push_back(nominal_laser_phase(pulse) + dev);
  }
  const double end_time = timing.sequence_duration_us();
  walk += c * std::sqrt(std::max(0.0, end_time - last_time)) * gauss(rng);
  traj.cumulative_phase_rad = omega * end_time + walk;
  return traj;
}

ComplexMatrix composite_rotation(int target_ion, double total_theta, double total_phi,
                                 std::span<const double> phase_deviation,
                                 const NoiseModel& miscalibration) {
  if (target_ion != 1 && target_ion != 2) throw ValidationError("composite_rotation: target ion must be 1 or 2");
  if (std::abs(total_theta - kPi) > 1e-12 && std::abs(total_theta - kPi / 2) > 1e-12) {
    throw ValidationError("composite_rotation: only pi and pi/2 rotations are supported");
  }
  if (phase_deviation.size() != 2) throw ValidationError("composite_rotation: expected two phase deviations");
  const double half = 0.5 * total_theta * (1.0 + miscalibration.pulse_area_fractional_error);
  const double position_error = 1e-3 * miscalibration.phi_p_error_mrad;
  const double scaling_error = 1e-3 * miscalibration.scaling_phase_error_mrad_ion2;

  // (1) Global pulse on both ions.
  const ComplexMatrix r1 = rotation_unitary(half, total_phi + phase_deviation[0]);
  const ComplexMatrix first = kron(r1, r1);
  // (2)-(3) In the scaled potential ion 2 sits pi (plus the scaling error) ahead of ion 1,
  // and the position-phase correction error shifts every pulse seen by both ions.
  const double laser = (target_ion == 1 ? total_phi : total_phi - kPi) + phase_deviation[1] + position_error;
  const ComplexMatrix second =
      kron(rotation_unitary(half, laser), rotation_unitary(half, laser + kPi + scaling_error));
  // (4) Restoring the confinement leaves no phase behind.
  return second * first;
}

ComplexMatrix shot_unitary(const SequenceSpec& seq, const TimingModel& timing,
                           const ProcessSpec& process, const NoiseModel& noise,
                           const NoiseTrajectory& trajectory) {
  const auto schedule = pulse_schedule(seq, timing, process);
  if (trajectory.phase_deviation_rad.size() != schedule.size()) {
    throw ValidationError("shot_unitary: trajectory does not match the pulse schedule");
  }
  ComplexMatrix u = ComplexMatrix::Identity(4, 4);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& pulse = schedule[i];
    if (pulse.role == ScheduledPulse::Role::kEntangling) {
      const ComplexMatrix z = z_frame(trajectory.phase_deviation_rad[i]);
      const ComplexMatrix zz = kron(z, z);
      u = zz * ms_unitary(pulse.block_theta) * zz.adjoint() * u;
      continue;
    }
    // First and second halves of a composite block are adjacent in the schedule.
    const std::span<const double> devs(trajectory.phase_deviation_rad.data() + i, 2);
    u = composite_rotation(pulse.target_ion, pulse.block_theta, pulse.block_phi, devs, noise) * u;
    ++i;
  }
  return u;
}

ShotResult simulate_shot(const ExperimentPlan& plan, int seq_index, int shot_index,
                         const ProcessSpec& process, const NoiseModel& noise, std::uint64_t seed) {
  if (seq_index < 0 || seq_index >= static_cast<int>(plan.sequences.size())) {
    throw ValidationError("simulate_shot: sequence index out of range");
  }
  const auto& seq = plan.sequences[seq_index];
  Rng rng = shot_stream(seed, seq.index, shot_index);
  const auto traj = sample_trajectory(plan.timing, seq, process, noise, rng);
  const ComplexMatrix u = shot_unitary(seq, plan.timing, process, noise, traj);
  // |SS> is basis state 0 and |DD> is basis state 3.
  const ComplexVector psi = u.col(0);
  ShotResult result;
  result.populations[2] = std::norm(psi(0));
  result.populations[0] = std::norm(psi(3));
  result.populations[1] = std::max(0.0, 1.0 - result.populations[2] - result.populations[0]);
  const double draw = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (draw < result.populations[2]) {
    result.outcome = ShotOutcome::kBothBright;
  } else if (draw < result.populations[2] + result.populations[1]) {
    result.outcome = ShotOutcome::kOneBright;
  } else {
    result.outcome = ShotOutcome::kDark;
  }
  return result;
}

std::vector<double> ShotDataset::p2_frequencies() const {
  std::vector<double> f(plan.sequences.size(), 0.0);
  for (const auto& r : records) f.at(r.k) = static_cast<double>(r.n2) / r.shots;
  return f;
}

void ShotDataset::validate() const {
  if (records.size() != plan.sequences.size()) {
    throw ValidationError("dataset: record count does not match the plan");
  }
  std::vector<bool> seen(records.size(), false);
  for (const auto& r : records) {
    if (r.k < 0 || r.k >= static_cast<int>(records.size()) || seen[r.k]) {
      throw ValidationError("dataset: record indices must be a permutation of the plan");
    }
    seen[r.k] = true;
    if (r.shots < 1 || r.n2 < 0 || r.n2 > r.shots) {
      throw ValidationError("dataset: record " + std::to_string(r.k) + " has inconsistent counts");
    }
    if (r.n1 && r.n0 && *r.n1 + *r.n0 + r.n2 != r.shots) {
      throw ValidationError("dataset: record " + std::to_string(r.k) + " outcome counts do not sum to shots");
    }
  }
}

ShotDataset generate_dataset(const ExperimentPlan& plan, const ProcessSpec& process,
                             const NoiseModel& noise, std::uint64_t seed, int threads) {
  noise.validate();
  plan.timing.validate();
  ShotDataset data;
  data.plan = plan;
  data.noise = noise;
  data.process = process;
  data.seed = seed;
  data.records.resize(plan.sequences.size());
  parallel_for(
      static_cast<int>(plan.sequences.size()),
      [&](int k) {
        std::array<int, 3> counts{};
        for (int shot = 0; shot < plan.shots; ++shot) {
          const auto result = simulate_shot(plan, k, shot, process, noise, seed);
          ++counts[static_cast<int>(result.outcome)];
        }
        data.records[k] = {plan.sequences[k].index, plan.shots, counts[2], counts[1], counts[0]};
      },
      threads > 0 ? threads : worker_count());
  return data;
}

double jitter_contrast_factor(double sigma_hz, double tau_us) {
  const double s = 2.0 * kPi * sigma_hz * tau_us * 1e-6;
  return std::exp(-0.5 * s * s);
}

double diffusion_contrast_factor(double rad_per_sqrt_us, double tau_us) {
  return std::exp(-0.5 * rad_per_sqrt_us * rad_per_sqrt_us * tau_us);
}

std::vector<double> simulate_ramsey(const std::vector<double>& delays_us, const NoiseModel& noise,
                                    int shots, std::uint64_t seed) {
  noise.validate();
  if (shots < 4) throw ValidationError("simulate_ramsey: need at least four shots");
  std::vector<double> contrast;
  contrast.reserve(delays_us.size());
  const ComplexMatrix first = rotation_unitary(kPi / 2, 0.0);
  for (std::size_t d = 0; d < delays_us.size(); ++d) {
    const double tau = delays_us[d];
    if (!(tau > 0)) throw ValidationError("simulate_ramsey: delays must be positive");
    std::array<double, 4> bright{};
    std::array<int, 4> count{};
    for (int shot = 0; shot < shots; ++shot) {
      Rng rng = stream(seed, d, static_cast<std::uint64_t>(shot));
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double df = noise.fast_freq_sigma_hz * gauss(rng);
      const double dev = 2.0 * kPi * df * tau * 1e-6 +
                         noise.phase_diffusion_rad_per_sqrt_us * std::sqrt(tau) * gauss(rng);
      const int quadrature = shot % 4;
      const ComplexMatrix u = rotation_unitary(kPi / 2, quadrature * kPi / 2 + dev) * first;
      bright[quadrature] += std::norm(u(0, 0));
      ++count[quadrature];
    }
    for (int q = 0; q < 4; ++q) bright[q] /= count[q];
    // P(phase) = B + a cos(phase) + b sin(phase); the fringe amplitude is half the contrast.
    const double a = 0.5 * (bright[0] - bright[2]);
    const double b = 0.5 * (bright[1] - bright[3]);
    contrast.push_back(std::clamp(2.0 * std::hypot(a, b), 0.0, 1.0));
  }
  return contrast;
}

}  // namespace qpt
