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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "qpt/recon.hpp"
#include "support.hpp"

namespace qpt {
namespace {

ProcessMatrix ideal_ms() { return unitary_to_chi(ms_unitary(kPi / 4)); }

std::vector<double> exact_frequencies(const ProcessMatrix& chi, const ExperimentPlan& plan) {
  auto p = predict_p2(chi, plan);
  for (double& v : p) v = std::clamp(v, 0.0, 1.0);
  return p;
}

TEST(LinearInversion, ExactProbabilitiesRecoverMs) {
  const ExperimentPlan plan = build_plan(120.0, 1);
  const auto f = exact_frequencies(ideal_ms(), plan);
  const auto r = linear_inversion(plan, f);
  EXPECT_LT(max_abs(r.chi.matrix() - ideal_ms().matrix()), 1e-10);
  EXPECT_TRUE(r.physical);
}

TEST(LinearInversion, RecoversRandomChannel) {
  std::mt19937_64 rng(59);
  const ProcessMatrix chi = testing::chi_from_kraus(testing::random_kraus(5, rng));
  const ExperimentPlan plan = build_plan(0.0, 1);
  EXPECT_LT(max_abs(linear_inversion(plan, exact_frequencies(chi, plan)).chi.matrix() - chi.matrix()), 1e-10);
}

TEST(LinearInversion, SampledIdentity) {
  const ExperimentPlan plan = build_plan(0.0, 500);
  const auto data = generate_dataset(plan, ProcessSpec::identity(), NoiseModel::noiseless(), 3);
  const auto r = linear_inversion(data);
  EXPECT_GE(r.chi(0, 0).real(), 0.99);
  EXPECT_NEAR(r.chi.trace().real(), 1.0, 1e-12);
}

TEST(LinearInversion, NoisyDataIsFlaggedUnphysical) {
  const ExperimentPlan plan = build_plan(120.0, 100);
  const auto data = generate_dataset(plan, ProcessSpec::ms(), NoiseModel::full(), 8);
  const auto r = linear_inversion(data);
  EXPECT_LT(r.diagnostics.min_eigenvalue, 0.0);
  EXPECT_FALSE(r.physical);
}

TEST(LinearInversion, RankDeficientPlanThrows) {
  std::vector<SettingPair> subset;
  for (int k = 0; k < 12; ++k) subset.push_back(SettingPair::from_linear(k));
  const ExperimentPlan plan = build_plan_from_settings(subset, subset, 0.0, 1);
  const std::vector<double> f(plan.sequences.size(), 0.5);
  EXPECT_THROW(linear_inversion(plan, f), IdentifiabilityError);
}

TEST(Mle, ExactProbabilitiesReachIdealFidelity) {
  const ExperimentPlan plan = build_plan(120.0, 1);
  const auto f = exact_frequencies(ideal_ms(), plan);
  const std::vector<double> shots(256, 500.0);
  const auto r = mle_reconstruct(plan, f, shots);
  EXPECT_GE(process_fidelity(r.chi, ideal_ms()).fidelity, 1.0 - 1e-6);
  EXPECT_TRUE(validate_cptp(r.chi).is_cptp());
}

TEST(Mle, LikelihoodIsMonotoneAndOutputCptp) {
  const ExperimentPlan plan = build_plan(120.0, 200);
  for (const auto& spec : {ProcessSpec::ms(), ProcessSpec::delay()}) {
    const auto data = generate_dataset(plan, spec, NoiseModel::full(), 21);
    const auto r = mle_reconstruct(data);
    const auto& trace = r.convergence.log_likelihood_trace;
    ASSERT_GE(trace.size(), 2u);
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GE(trace[i], trace[i - 1] - 1e-9) << i;
    EXPECT_TRUE(validate_cptp(r.chi).is_cptp());
    EXPECT_DOUBLE_EQ(r.convergence.final_log_likelihood, trace.back());
    EXPECT_EQ(r.convergence.iterations + 1, static_cast<int>(trace.size()));
  }
}

TEST(Mle, NeverLosesToClippedInversion) {
  const ExperimentPlan plan = build_plan(120.0, 100);
  const auto data = generate_dataset(plan, ProcessSpec::ms(), NoiseModel::full(), 4);
  const auto f = data.p2_frequencies();
  const std::vector<double> shots(256, 100.0);
  const auto li = linear_inversion(data);
  ComplexMatrix clipped = nearest_psd(li.chi.matrix());
  clipped /= clipped.trace().real();
  const auto mle = mle_reconstruct(data);
  EXPECT_GE(log_likelihood(mle.chi, plan, f, shots), log_likelihood(ProcessMatrix(clipped), plan, f, shots));
}

TEST(Mle, RecordOrderDoesNotMatter) {
  const ExperimentPlan plan = build_plan(0.0, 100);
  auto data = generate_dataset(plan, ProcessSpec::identity(), NoiseModel::laser(), 6);
  const auto a = mle_reconstruct(data);
  std::mt19937_64 rng(1);
  std::shuffle(data.records.begin(), data.records.end(), rng);
  const auto b = mle_reconstruct(data);
  EXPECT_EQ(a.chi.matrix(), b.chi.matrix());
  EXPECT_EQ(a.convergence.iterations, b.convergence.iterations);
}

TEST(Mle, IterationCapIsReported) {
  const ExperimentPlan plan = build_plan(120.0, 100);
  const auto data = generate_dataset(plan, ProcessSpec::ms(), NoiseModel::full(), 2);
  MleConfig config;
  config.max_iterations = 3;
  const auto r = mle_reconstruct(data, config);
  EXPECT_FALSE(r.convergence.converged);
  EXPECT_EQ(r.convergence.iterations, 3);
  EXPECT_TRUE(validate_cptp(r.chi).is_cptp());
}

TEST(Mle, ConfigValidation) {
  MleConfig c;
  c.dilution = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.log_likelihood_tolerance = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Bootstrap, SampleStdAndDeterminism) {
  const ExperimentPlan plan = build_plan(120.0, 200);
  const auto data = generate_dataset(plan, ProcessSpec::ms(), NoiseModel::noiseless(), 12);
  const auto a = bootstrap_fidelity(data, {}, ms_unitary(kPi / 4), 4, 77, 1);
  const auto b = bootstrap_fidelity(data, {}, ms_unitary(kPi / 4), 4, 77, 2);
  ASSERT_EQ(a.fidelity_samples.size(), 4u);
  EXPECT_EQ(a.fidelity_samples, b.fidelity_samples);
  EXPECT_DOUBLE_EQ(a.std, sample_std(a.fidelity_samples));
  EXPECT_GT(a.std, 0.0);
  EXPECT_THROW(bootstrap_fidelity(data, {}, ms_unitary(kPi / 4), 1, 77), ValidationError);
}

TEST(SampleStd, KnownValue) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  EXPECT_NEAR(sample_std(v), std::sqrt(5.0 / 3.0), 1e-15);
}

}  // namespace
}  // namespace qpt
