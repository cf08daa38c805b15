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

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qpt/process.hpp"
#include "qpt/qmath.hpp"

namespace qpt {

/// Single-ion preparation/analysis rotations, in their fixed order.
enum class Rotation { kId = 0, kXpi = 1, kXhalf = 2, kYhalf = 3 };

inline constexpr std::array<Rotation, 4> kAllRotations = {Rotation::kId, Rotation::kXpi,
                                                         Rotation::kXhalf, Rotation::kYhalf};

struct RotationAngles {
  double theta = 0.0;
  double phi = 0.0;
};

RotationAngles rotation_angles(Rotation r);
std::string_view rotation_code(Rotation r);
Rotation rotation_from_code(std::string_view code);

/// R(theta, phi) = exp[-i theta/2 (X cos phi + Y sin phi)] on one qubit.
ComplexMatrix rotation_unitary(double theta, double phi);

struct SettingPair {
  Rotation ion1 = Rotation::kId;
  Rotation ion2 = Rotation::kId;

  constexpr int linear() const { return 4 * static_cast<int>(ion1) + static_cast<int>(ion2); }
  static SettingPair from_linear(int k);
  ComplexMatrix unitary() const;
  friend bool operator==(const SettingPair&, const SettingPair&) = default;
};

/// Durations inside one shot. Every rotation slot occupies a full composite block,
/// including Id slots, so sequence timing does not depend on the settings.
struct TimingModel {
  double composite_block_us = 25.0;
  double pulse_pi_us = 8.0;
  /// Start of the second laser pulse, measured from the block start.
  double second_pulse_offset_us = 12.0;
  double process_duration_us = 0.0;
  double shot_overhead_ms = 10.0;

  double prep_block_us() const { return 2.0 * composite_block_us; }
  double meas_block_us() const { return 2.0 * composite_block_us; }
  double sequence_duration_us() const {
    return prep_block_us() + process_duration_us + meas_block_us();
  }
  double shot_period_s() const { return shot_overhead_ms * 1e-3 + sequence_duration_us() * 1e-6; }
  void validate() const;
};

/// Loop order over (prep, meas) settings during a run.
enum class SequenceOrder { kPrepOuter, kMeasOuter };

struct SequenceSpec {
  int index = 0;
  SettingPair prep;
  SettingPair meas;
  double start_time_s = 0.0;
};

struct ExperimentPlan {
  std::vector<SequenceSpec> sequences;
  int shots = 500;
  TimingModel timing;
  SequenceOrder order = SequenceOrder::kPrepOuter;

  double total_duration_s() const;
};

/// Canonical 16 x 16 plan.
ExperimentPlan build_plan(double process_duration_us, int shots, TimingModel timing = {},
                          SequenceOrder order = SequenceOrder::kPrepOuter);

/// Plan over arbitrary setting subsets; used for identifiability studies.
ExperimentPlan build_plan_from_settings(const std::vector<SettingPair>& preps,
                                        const std::vector<SettingPair>& meas,
                                        double process_duration_us, int shots,
                                        TimingModel timing = {},
                                        SequenceOrder order = SequenceOrder::kPrepOuter);

ComplexMatrix prep_state(const SettingPair& setting);

/// POVM element whose expectation is P2, the both-bright probability.
ComplexMatrix meas_operator(const SettingPair& setting);

std::vector<double> predict_p2(const ProcessMatrix& chi, const ExperimentPlan& plan);

/// Raised when predicted probabilities fall outside [0, 1] beyond rounding.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Real linear map from the 256 Hermitian chi parameters to the predicted probabilities,
/// one row per sequence. Column 16 m + n holds the coefficient of:
/// chi_mm for m == n, Re chi_mn for m < n, Im chi_nm for m > n.
Eigen::MatrixXd design_matrix(const ExperimentPlan& plan);
ComplexMatrix hermitian_from_parameters(const Eigen::VectorXd& x);
Eigen::VectorXd parameters_from_hermitian(const ComplexMatrix& h);

int design_rank(const ExperimentPlan& plan);

}  // namespace qpt
