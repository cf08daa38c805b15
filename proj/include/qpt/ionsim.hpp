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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpt/protocol.hpp"
#include "qpt/random.hpp"

namespace qpt {

/// Stochastic laser noise plus systematic addressing miscalibrations.
struct NoiseModel {
  double drift_hz_per_min = 7.0;
  double fast_freq_sigma_hz = 300.0;
  double phase_diffusion_rad_per_sqrt_us = 0.015;
  /// Error of the position-phase correction applied to pulses in the scaled potential.
  double phi_p_error_mrad = 0.0;
  /// Deviation of ion 2's differential phase from pi in the scaled potential.
  double scaling_phase_error_mrad_ion2 = 0.0;
  double pulse_area_fractional_error = 0.0;

  static NoiseModel noiseless();
  /// Laser noise only: drift, per-shot frequency jitter and phase diffusion.
  static NoiseModel laser();
  /// Laser noise plus the phi_p = -145 mrad and +155 mrad scaling miscalibrations.
  static NoiseModel full();

  void validate() const;
  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// The operation sandwiched between preparation and analysis rotations.
class ProcessSpec {
 public:
  enum class Kind { kIdentity, kDelay, kMs, kMsOverrotated };

  static ProcessSpec identity() { return ProcessSpec(Kind::kIdentity, 0.0, 0.0); }
  static ProcessSpec delay(double duration_us = 120.0) { return ProcessSpec(Kind::kDelay, 0.0, duration_us); }
  static ProcessSpec ms() { return ProcessSpec(Kind::kMs, kPi / 4, 120.0); }
  static ProcessSpec ms_overrotated(double theta) { return ProcessSpec(Kind::kMsOverrotated, theta, 120.0); }

  /// Parses "identity", "delay", "ms" or "ms_overrotated(<theta>)".
  static ProcessSpec from_label(const std::string& label);

  Kind kind() const { return kind_; }
  double theta() const { return theta_; }
  double duration_us() const { return duration_us_; }
  std::string label() const;
  bool entangling() const { return kind_ == Kind::kMs || kind_ == Kind::kMsOverrotated; }

  /// Noise-free propagator: identity for identity/delay, exp(-i theta X1 X2) otherwise.
  ComplexMatrix ideal_unitary() const;

  friend bool operator==(const ProcessSpec&, const ProcessSpec&) = default;

 private:
  ProcessSpec(Kind kind, double theta, double duration_us)
      : kind_(kind), theta_(theta), duration_us_(duration_us) {}

  Kind kind_;
  double theta_;
  double duration_us_;
};

/// exp(-i theta X (x) X).
ComplexMatrix ms_unitary(double theta);

/// One laser pulse of a shot, at its midpoint time.
struct ScheduledPulse {
  enum class Role { kFirstHalf, kSecondHalf, kEntangling };
  Role role = Role::kFirstHalf;
  /// Ion addressed by a composite block (1 or 2); 0 for the entangling pulse.
  int target_ion = 0;
  /// Rotation of the whole composite block (or the entangling angle).
  double block_theta = 0.0;
  double block_phi = 0.0;
  double mid_time_us = 0.0;
};

/// Chronological laser pulses of one shot. Id slots contribute no pulses but keep
/// their time slot.
std::vector<ScheduledPulse> pulse_schedule(const SequenceSpec& seq, const TimingModel& timing,
                                           const ProcessSpec& process);

struct NoiseTrajectory {
  double frequency_offset_hz = 0.0;
  /// Deviation of the laser phase seen by the ions at each scheduled pulse midpoint:
  /// 2 pi df t plus the accumulated phase random walk.
  std::vector<double> phase_deviation_rad;
  /// Effective pulse parameters (before position-phase offsets), one per pulse.
  std::vector<double> theta_actual;
  std::vector<double> phi_actual;
  /// Laser phase deviation at the end of the sequence.
  double cumulative_phase_rad = 0.0;
};

/// Draws one shot's noise. Frequency offset = drift * (sequence start in minutes) plus a
/// per-shot Gaussian; phase deviation = random walk with variance c^2 dt between pulses.
NoiseTrajectory sample_trajectory(const TimingModel& timing, const SequenceSpec& seq,
                                  const ProcessSpec& process, const NoiseModel& noise, Rng& rng);

/// Deterministic stream for one (sequence, shot) cell of a dataset.
Rng shot_stream(std::uint64_t seed, int seq_index, int shot_index);

/// Two-qubit unitary of one individually addressed rotation: a global half pulse, a
/// potential scaling that gives ion 2 a differential phase of pi, a second global half
/// pulse that completes the rotation on the target and undoes it on the other ion, and
/// restoration of the confinement. phase_deviation holds the laser phase noise at the
/// two pulses.
ComplexMatrix composite_rotation(int target_ion, double total_theta, double total_phi,
                                 std::span<const double> phase_deviation,
                                 const NoiseModel& miscalibration = NoiseModel::noiseless());

/// Full unitary of one shot for the given noise realization.
ComplexMatrix shot_unitary(const SequenceSpec& seq, const TimingModel& timing,
                           const ProcessSpec& process, const NoiseModel& noise,
                           const NoiseTrajectory& trajectory);

enum class ShotOutcome { kDark = 0, kOneBright = 1, kBothBright = 2 };

struct ShotResult {
  ShotOutcome outcome = ShotOutcome::kDark;
  /// Exact populations (P0, P1, P2) for this shot's unitary.
  std::array<double, 3> populations{};
};

ShotResult simulate_shot(const ExperimentPlan& plan, int seq_index, int shot_index,
                         const ProcessSpec& process, const NoiseModel& noise, std::uint64_t seed);

struct ShotRecord {
  int k = 0;
  int shots = 0;
  int n2 = 0;
  std::optional<int> n1;
  std::optional<int> n0;
};

struct ShotDataset {
  ExperimentPlan plan;
  NoiseModel noise;
  ProcessSpec process = ProcessSpec::identity();
  std::uint64_t seed = 0;
  std::vector<ShotRecord> records;

  /// n2 / shots in plan order (records are matched to sequences by k).
  std::vector<double> p2_frequencies() const;
  void validate() const;
};

ShotDataset generate_dataset(const ExperimentPlan& plan, const ProcessSpec& process,
                             const NoiseModel& noise, std::uint64_t seed,
                             int threads = 0);

/// Contrast factor of Gaussian per-shot frequency jitter after a free evolution of tau.
double jitter_contrast_factor(double sigma_hz, double tau_us);
/// Contrast factor of phase diffusion after tau.
double diffusion_contrast_factor(double rad_per_sqrt_us, double tau_us);

/// Single-ion Ramsey contrast per delay: pi/2, idle tau, pi/2 with the analysis phase
/// stepped through four quadratures. Each shot contributes its exact bright probability.
std::vector<double> simulate_ramsey(const std::vector<double>& delays_us, const NoiseModel& noise,
                                    int shots, std::uint64_t seed);

}  // namespace qpt
