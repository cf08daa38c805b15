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
#include <span>
#include <stdexcept>
#include <vector>

#include "qpt/ionsim.hpp"
#include "qpt/process.hpp"
#include "qpt/protocol.hpp"

namespace qpt {

/// Raised when a plan cannot determine every process-matrix parameter.
class IdentifiabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MleConfig {
  int max_iterations = 5000;
  /// Stop when one iteration changes the log-likelihood by less than this.
  double log_likelihood_tolerance = 1e-10;
  /// Mixing weight of the likelihood operator against the identity, in (0, 1].
  double dilution = 1.0;
  double epsilon_probability_floor = 1e-12;

  void validate() const;
};

struct ConvergenceRecord {
  int iterations = 0;
  double final_log_likelihood = 0.0;
  bool converged = false;
  /// Log-likelihood of the starting point followed by one entry per accepted iteration.
  std::vector<double> log_likelihood_trace;
};

struct MleResult {
  ProcessMatrix chi;
  ConvergenceRecord convergence;
};

struct LinearInversionResult {
  ProcessMatrix chi;
  CptpDiagnostics diagnostics;
  bool physical = false;
};

/// Binary-outcome likelihood of a plan: sequence k contributes
/// shots_k [f_k ln p_k + (1 - f_k) ln(1 - p_k)] with p_k = Tr[J (rho_k^T (x) M_k)].
class LikelihoodModel {
 public:
  explicit LikelihoodModel(const ExperimentPlan& plan);

  std::size_t size() const { return preps_.size(); }
  /// Predicted P2 per sequence for a Choi matrix.
  Eigen::VectorXd probabilities(const ComplexMatrix& choi) const;
  double log_likelihood(const Eigen::VectorXd& probabilities, std::span<const double> frequencies,
                        std::span<const double> shots, double floor) const;
  /// sum_k a_k (rho_k^T (x) M_k) + (sum_k b_k rho_k^T) (x) I.
  ComplexMatrix operator_sum(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

 private:
  ComplexMatrix effects_;  // column k is vec(rho_k^T (x) M_k)
  std::vector<ComplexMatrix> preps_;
};

double log_likelihood(const ProcessMatrix& chi, const ExperimentPlan& plan,
                      std::span<const double> frequencies, std::span<const double> shots,
                      double floor = 1e-12);

LinearInversionResult linear_inversion(const ExperimentPlan& plan, std::span<const double> frequencies);
LinearInversionResult linear_inversion(const ShotDataset& dataset);

/// CPTP-constrained maximum-likelihood estimate from P2 frequencies and per-sequence
/// shot weights (both in plan order).
MleResult mle_reconstruct(const ExperimentPlan& plan, std::span<const double> frequencies,
                          std::span<const double> shots, const MleConfig& config = {});
MleResult mle_reconstruct(const ShotDataset& dataset, const MleConfig& config = {});

struct BootstrapReport {
  int replicas = 0;
  std::vector<double> fidelity_samples;
  double std = 0.0;
  std::vector<ProcessMatrix> chi_samples;
};

/// Parametric resampling: each replica redraws n2_k ~ Binomial(shots, n2_k / shots),
/// re-runs the MLE and scores it against the ideal unitary. Replica r uses the stream
/// keyed by (seed, r), so results do not depend on scheduling.
BootstrapReport bootstrap_fidelity(const ShotDataset& dataset, const MleConfig& config,
                                   const ComplexMatrix& ideal_u, int replicas, std::uint64_t seed,
                                   int threads = 0);

double sample_std(std::span<const double> values);

}  // namespace qpt
