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

#include "qpt/recon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qpt/parallel.hpp"
#include "qpt/random.hpp"

namespace qpt {

namespace {

constexpr int kDim = 4;
constexpr int kChoiDim = 16;
// Halvings of the dilution tried before an iteration is declared stalled.
constexpr int kMaxStepReductions = 40;

ComplexMatrix partial_trace_output(const ComplexMatrix& m) {
  ComplexMatrix out = ComplexMatrix::Zero(kDim, kDim);
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k)
      for (int j = 0; j < kDim; ++j) out(i, k) += m(i * kDim + j, k * kDim + j);
  return out;
}

ComplexMatrix inverse_sqrt(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (h + h.adjoint()));
  Eigen::VectorXd d = eig.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = 1.0 / std::sqrt(std::max(d(i), 1e-300));
  return eig.eigenvectors() * d.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
}

void require_sizes(const ExperimentPlan& plan, std::span<const double> frequencies,
                   std::span<const double> shots) {
  if (frequencies.size() != plan.sequences.size() || shots.size() != plan.sequences.size()) {
    throw ValidationError("reconstruction: data length does not match the plan");
  }
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    if (!(frequencies[k] >= 0.0 && frequencies[k] <= 1.0) || !(shots[k] > 0.0)) {
      throw ValidationError("reconstruction: frequencies must lie in [0, 1] with positive weights");
    }
  }
}

std::vector<double> dataset_shots(const ShotDataset& dataset) {
  std::vector<double> shots(dataset.plan.sequences.size(), 0.0);
  for (const auto& r : dataset.records) shots.at(r.k) = r.shots;
  return shots;
}

}  // namespace

void MleConfig::validate() const {
  if (max_iterations < 1) throw ValidationError("MLE: max_iterations must be positive");
  if (!(log_likelihood_tolerance > 0)) throw ValidationError("MLE: tolerance must be positive");
  if (!(dilution > 0 && dilution <= 1)) throw ValidationError("MLE: dilution must lie in (0, 1]");
  if (!(epsilon_probability_floor > 0 && epsilon_probability_floor < 0.5)) {
    throw ValidationError("MLE: probability floor must lie in (0, 0.5)");
  }
}

LikelihoodModel::LikelihoodModel(const ExperimentPlan& plan)
    : effects_(kChoiDim * kChoiDim, static_cast<Eigen::Index>(plan.sequences.size())) {
  preps_.reserve(plan.sequences.size());
  for (std::size_t k = 0; k < plan.sequences.size(); ++k) {
    const auto& seq = plan.sequences[k];
    const ComplexMatrix rho_t = prep_state(seq.prep).transpose();
    const ComplexMatrix effect = kron(rho_t, meas_operator(seq.meas));
    effects_.col(static_cast<Eigen::Index>(k)) = effect.reshaped();
    preps_.push_back(rho_t);
  }
}

Eigen::VectorXd LikelihoodModel::probabilities(const ComplexMatrix& choi) const {
  // Tr[J A] = vec(A)^dagger vec(J) for Hermitian A.
  const ComplexVector flat = choi.reshaped();
  return (effects_.adjoint() * flat).real();
}

double LikelihoodModel::log_likelihood(const Eigen::VectorXd& p, std::span<const double> frequencies,
                                       std::span<const double> shots, double floor) const {
  double total = 0.0;
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    const double pk = std::clamp(p(static_cast<Eigen::Index>(k)), floor, 1.0 - floor);
    const double f = frequencies[k];
    double term = 0.0;
    if (f > 0) term += f * std::log(pk);
    if (f < 1) term += (1.0 - f) * std::log(1.0 - pk);
    total += shots[k] * term;
  }
  return total;
}

ComplexMatrix LikelihoodModel::operator_sum(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const ComplexVector flat = effects_ * a.cast<Complex>();
  ComplexMatrix k = flat.reshaped(kChoiDim, kChoiDim);
  ComplexMatrix prep_sum = ComplexMatrix::Zero(kDim, kDim);
  for (std::size_t i = 0; i < preps_.size(); ++i) prep_sum += b(static_cast<Eigen::Index>(i)) * preps_[i];
  k += kron(prep_sum, ComplexMatrix::Identity(kDim, kDim));
  return k;
}

double log_likelihood(const ProcessMatrix& chi, const ExperimentPlan& plan,
                      std::span<const double> frequencies, std::span<const double> shots, double floor) {
  require_sizes(plan, frequencies, shots);
  const LikelihoodModel model(plan);
  return model.log_likelihood(model.probabilities(chi_to_choi(chi)), frequencies, shots, floor);
}

LinearInversionResult linear_inversion(const ExperimentPlan& plan, std::span<const double> frequencies) {
  if (frequencies.size() != plan.sequences.size()) {
    throw ValidationError("linear_inversion: data length does not match the plan");
  }
  const Eigen::MatrixXd a = design_matrix(plan);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-9);
  if (qr.rank() < 256) {
    std::ostringstream msg;
    msg << "linear_inversion: plan determines only " << qr.rank() << " of 256 process parameters";
    throw IdentifiabilityError(msg.str());
  }
  const Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(frequencies.data(), frequencies.size());
  const Eigen::VectorXd x = qr.solve(f);
  ComplexMatrix chi = hermitian_from_parameters(x);
  const double trace = chi.trace().real();
  if (std::abs(trace) > 1e-12) chi /= trace;
  LinearInversionResult result{ProcessMatrix(chi), {}, false};
  result.diagnostics = validate_cptp(result.chi);
  result.physical = result.diagnostics.min_eigenvalue >= -1e-8;
  return result;
}

LinearInversionResult linear_inversion(const ShotDataset& dataset) {
  dataset.validate();
  const auto f = dataset.p2_frequencies();
  return linear_inversion(dataset.plan, f);
}

MleResult mle_reconstruct(const ExperimentPlan& plan, std::span<const double> frequencies,
                          std::span<const double> shots, const MleConfig& config) {
  config.validate();
  require_sizes(plan, frequencies, shots);
  const LikelihoodModel model(plan);
  const auto n = static_cast<Eigen::Index>(frequencies.size());
  const double floor = config.epsilon_probability_floor;
  const double total_shots = std::accumulate(shots.begin(), shots.end(), 0.0);
  const ComplexMatrix identity = ComplexMatrix::Identity(kChoiDim, kChoiDim);

  // Maximally depolarizing start: Tr_out J = I.
  ComplexMatrix choi = identity / static_cast<double>(kDim);
  Eigen::VectorXd p = model.probabilities(choi);
  double ll = model.log_likelihood(p, frequencies, shots, floor);

  MleResult result{ProcessMatrix(), {}};
  auto& conv = result.convergence;
  conv.log_likelihood_trace.push_back(ll);

  Eigen::VectorXd a(n);
  Eigen::VectorXd b(n);
  for (int it = 0; it < config.max_iterations; ++it) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double pk = std::clamp(p(k), floor, 1.0 - floor);
      const double f = frequencies[static_cast<std::size_t>(k)];
      const double w = shots[static_cast<std::size_t>(k)];
      b(k) = w * (1.0 - f) / (1.0 - pk);
      a(k) = w * f / pk - b(k);
    }
    // Tr[K J] equals the total shot count for any trace-preserving J, so this scaling
    // makes K and the identity comparable before mixing.
    const ComplexMatrix k_op = model.operator_sum(a, b) * (kDim / total_shots);

    bool accepted = false;
    double step = config.dilution;
    ComplexMatrix next;
    Eigen::VectorXd p_next;
    double ll_next = ll;
    for (int attempt = 0; attempt < kMaxStepReductions; ++attempt, step *= 0.5) {
      const ComplexMatrix mixed = (1.0 - step) * identity + step * k_op;
      const ComplexMatrix grown = mixed * choi * mixed.adjoint();
      const ComplexMatrix norm = kron(inverse_sqrt(partial_trace_output(grown)), ComplexMatrix::Identity(kDim, kDim));
      next = norm * grown * norm;
      next = 0.5 * (next + next.adjoint());
      p_next = model.probabilities(next);
      ll_next = model.log_likelihood(p_next, frequencies, shots, floor);
      if (ll_next >= ll) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent along the diluted direction: a stationary point within rounding.
      conv.converged = true;
      break;
    }
    const double change = ll_next - ll;
    choi = std::move(next);
    p = std::move(p_next);
    ll = ll_next;
    conv.iterations = it + 1;
    conv.log_likelihood_trace.push_back(ll);
    if (change < config.log_likelihood_tolerance) {
      conv.converged = true;
      break;
    }
  }
  conv.final_log_likelihood = ll;
  result.chi = choi_to_chi(choi);
  return result;
}

MleResult mle_reconstruct(const ShotDataset& dataset, const MleConfig& config) {
  dataset.validate();
  const auto f = dataset.p2_frequencies();
  const auto shots = dataset_shots(dataset);
  return mle_reconstruct(dataset.plan, f, shots, config);
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (values.size() - 1));
}

BootstrapReport bootstrap_fidelity(const ShotDataset& dataset, const MleConfig& config,
                                   const ComplexMatrix& ideal_u, int replicas, std::uint64_t seed,
                                   int threads) {
  if (replicas < 2) throw ValidationError("bootstrap_fidelity: need at least two replicas");
  dataset.validate();
  config.validate();
  const ProcessMatrix ideal = unitary_to_chi(ideal_u);
  const auto shots = dataset_shots(dataset);
  std::vector<int> counts(dataset.plan.sequences.size(), 0);
  for (const auto& r : dataset.records) counts.at(r.k) = r.n2;

  BootstrapReport report;
  report.replicas = replicas;
  report.fidelity_samples.assign(replicas, 0.0);
  report.chi_samples.assign(replicas, ProcessMatrix());
  parallel_for(
      replicas,
      [&](int r) {
        Rng rng = stream(seed, static_cast<std::uint64_t>(r));
        std::vector<double> f(counts.size());
        for (std::size_t k = 0; k < counts.size(); ++k) {
          const int n = static_cast<int>(shots[k]);
          std::binomial_distribution<int> draw(n, static_cast<double>(counts[k]) / n);
          f[k] = static_cast<double>(draw(rng)) / n;
        }
        auto fit = mle_reconstruct(dataset.plan, f, shots, config);
        report.fidelity_samples[r] = process_fidelity(fit.chi, ideal).fidelity;
        report.chi_samples[r] = std::move(fit.chi);
      },
      threads > 0 ? threads : worker_count());
  report.std = sample_std(report.fidelity_samples);
  return report;
}

}  // namespace qpt
