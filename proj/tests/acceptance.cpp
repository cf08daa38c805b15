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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qpt/analysis.hpp"
#include "qpt/recon.hpp"

using namespace qpt;

namespace {

// Every MLE output and likelihood trace produced by criteria 2-5, checked under 10.
struct InvariantLog {
  int outputs = 0;
  int cptp_failures = 0;
  int monotonicity_failures = 0;

  void record(const MleResult& r) {
    ++outputs;
    if (!validate_cptp(r.chi).is_cptp()) ++cptp_failures;
    const auto& t = r.convergence.log_likelihood_trace;
    for (std::size_t i = 1; i < t.size(); ++i)
      if (t[i] < t[i - 1] - 1e-9) {
        ++monotonicity_failures;
        break;
      }
  }
};

InvariantLog invariants;

struct Outcome {
  bool pass = false;
  std::string detail;
};

__attribute__((format(printf, 1, 2))) std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

ProcessMatrix ideal_ms() { return unitary_to_chi(ms_unitary(kPi / 4)); }

Outcome criterion1() {
  const ProcessMatrix chi = ideal_ms();
  const int ii = 0, xx = PauliIndex::from_label("XX").linear();
  double worst = 0.0;
  for (int m = 0; m < 16; ++m)
    for (int n = 0; n < 16; ++n) {
      Complex e = 0.0;
      if (m == ii && n == ii) e = 0.5;
      if (m == xx && n == xx) e = 0.5;
      if (m == xx && n == ii) e = Complex(0, 0.5);
      if (m == ii && n == xx) e = Complex(0, -0.5);
      worst = std::max(worst, std::abs(chi(m, n) - e));
    }
  return {worst <= 1e-12, fmt("max deviation from {II,II: 1/2, XX,XX: 1/2, XX,II: i/2, II,XX: -i/2} = %.2e", worst)};
}

Outcome criterion2() {
  const ExperimentPlan exact_plan = build_plan(120.0, 1);
  auto p = predict_p2(ideal_ms(), exact_plan);
  for (double& v : p) v = std::clamp(v, 0.0, 1.0);
  const std::vector<double> weights(256, 500.0);
  const auto exact = mle_reconstruct(exact_plan, p, weights);
  invariants.record(exact);
  const double f_exact = process_fidelity(exact.chi, ideal_ms()).fidelity;

  const ExperimentPlan plan = build_plan(120.0, 500);
  int good = 0;
  double worst = 1.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto data = generate_dataset(plan, ProcessSpec::ms(), NoiseModel::noiseless(), seed);
    const auto r = mle_reconstruct(data);
    invariants.record(r);
    const double f = process_fidelity(r.chi, ideal_ms()).fidelity;
    worst = std::min(worst, f);
    good += f >= 0.985;
  }
  return {f_exact >= 1 - 1e-6 && good >= 9,
          fmt("exact-probability F_p = %.9f; sampled F_p >= 0.985 for %d/10 seeds (min %.4f)", f_exact, good, worst)};
}

constexpr std::uint64_t kStudySeed = 1;
double identity_error = -1.0;

double study_process_error(const ProcessSpec& spec) {
  const double duration = spec.kind() == ProcessSpec::Kind::kIdentity ? 0.0 : spec.duration_us();
  const ExperimentPlan plan = build_plan(duration, 500);
  const auto data = generate_dataset(plan, spec, NoiseModel::full(), kStudySeed);
  const auto r = mle_reconstruct(data);
  invariants.record(r);
  return process_fidelity(r.chi, unitary_to_chi(spec.ideal_unitary())).error;
}

Outcome criterion3() {
  identity_error = study_process_error(ProcessSpec::identity());
  const double pct = 100 * identity_error;
  return {std::abs(pct - 3.2) <= 1.5, fmt("identity process error %.2f%% (target 3.2 +/- 1.5)", pct)};
}

Outcome criterion4() {
  const double pct = 100 * study_process_error(ProcessSpec::delay(120.0));
  const bool exceeds = identity_error >= 0 && pct > 100 * identity_error;
  return {std::abs(pct - 7.2) <= 1.5 && exceeds,
          fmt("120 us delay process error %.2f%% (target 7.2 +/- 1.5); identity %.2f%%, delay larger: %s", pct,
              100 * identity_error, exceeds ? "yes" : "no")};
}

Outcome criterion5() {
  NoiseModel drift = NoiseModel::noiseless();
  drift.drift_hz_per_min = 7.0;
  const ExperimentPlan plan = build_plan(0.0, 500);
  const auto data = generate_dataset(plan, ProcessSpec::identity(), drift, 5);
  const auto r = mle_reconstruct(data);
  invariants.record(r);
  const int zi = PauliIndex::from_label("ZI").linear(), iz = PauliIndex::from_label("IZ").linear();
  auto asym = [&](const ProcessMatrix& c) { return std::abs(c(0, zi).imag()) - std::abs(c(0, iz).imag()); };
  const auto boot = bootstrap_fidelity(data, {}, ComplexMatrix::Identity(4, 4), 30, 505);
  std::vector<double> d;
  for (const auto& c : boot.chi_samples) d.push_back(asym(c));
  const double sd = sample_std(d);
  const double diff = asym(r.chi);
  return {std::abs(diff) > 2 * sd,
          fmt("|Im chi(II,ZI)| = %.5f, |Im chi(II,IZ)| = %.5f, difference %.5f vs bootstrap 2 sigma %.5f",
              std::abs(r.chi(0, zi).imag()), std::abs(r.chi(0, iz).imag()), diff, 2 * sd)};
}

Outcome criterion6() {
  const auto fit = fit_over_rotation(unitary_to_chi(ms_unitary(1.04)));
  const double pct = 100 * fit.gate_error;
  return {std::abs(fit.theta - 1.04) <= 1e-4 && std::abs(pct - 6.3) <= 0.2,
          fmt("theta+ = %.6f rad, gate error %.3f%%, residual %.1e", fit.theta, pct, fit.residual)};
}

Outcome criterion7() {
  std::vector<double> phases;
  for (int i = 0; i < 16; ++i) phases.push_back(i * kPi / 16);
  const auto over = simulate_bell_experiment(1.04, NoiseModel::noiseless(), phases, 10000, 71);
  const auto ideal = simulate_bell_experiment(kPi / 4, NoiseModel::noiseless(), phases, 10000, 72);
  const double oracle = 0.5 * (1 + std::sin(2.08));
  return {std::abs(over.fidelity - oracle) <= 0.01 && 1 - ideal.fidelity < 0.01,
          fmt("over-rotated F_BST = %.4f (oracle %.4f), ideal F_BST = %.4f", over.fidelity, oracle, ideal.fidelity)};
}

Outcome criterion8() {
  NoiseModel diffusion = NoiseModel::noiseless();
  diffusion.phase_diffusion_rad_per_sqrt_us = 0.015;
  const double c = simulate_ramsey({120.0}, diffusion, 100000, 81)[0];
  const double expected = std::exp(-0.015 * 0.015 * 120.0 / 2.0);
  return {std::abs(c - expected) <= 0.005, fmt("contrast at 120 us = %.5f (expected %.5f)", c, expected)};
}

Outcome criterion9() {
  const double eta = 0.039, omega = 2 * kPi * 100e3;
  // 400 points over ten ground-state sideband flops, Gaussian noise of 0.02 bright ions.
  const double t_max = 20 * kPi / (omega * eta);
  std::vector<double> t;
  for (int i = 1; i <= 400; ++i) t.push_back(t_max * i / 400);
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 91;
  for (auto [n_th, n_coh] : std::vector<std::pair<double, double>>{{5.5, 0.4}, {3.5, 0.1}, {32.0, 22.0}}) {
    auto s = sideband_rabi_signal({n_th, n_coh, omega, eta}, t);
    std::mt19937_64 rng(seed++);
    std::normal_distribution<double> noise(0.0, 0.02);
    for (double& v : s) v += noise(rng);
    const auto fit = fit_heating(t, s, eta);
    const bool good = std::abs(fit.occupation.n_th - n_th) <= 0.1 * n_th &&
                      std::abs(fit.occupation.n_coh - n_coh) <= 0.1 * n_coh;
    ok = ok && good;
    detail += fmt("(%.1f, %.1f) -> (%.2f, %.2f); ", n_th, n_coh, fit.occupation.n_th, fit.occupation.n_coh);
  }
  const double eps = thermal_gate_error(0.039, 0.4);
  const double lde = lamb_dicke_eta(40.0, 2 * kPi * 1.41e6, 729e-9, kPi / 4);
  ok = ok && std::abs(eps - 4.10e-6) <= 1e-7 && std::abs(lde - 0.039) <= 0.0039;
  return {ok, detail + fmt("eps_th = %.3e, eta = %.4f", eps, lde)};
}

Outcome criterion10() {
  const int rank = design_rank(build_plan(0.0, 1));
  auto boot_std = [](int shots) {
    const ExperimentPlan plan = build_plan(120.0, shots);
    const auto data = generate_dataset(plan, ProcessSpec::ms(), NoiseModel::full(), 1010);
    return bootstrap_fidelity(data, {}, ms_unitary(kPi / 4), 50, 1011).std;
  };
  const double s500 = boot_std(500), s2000 = boot_std(2000);
  const double ratio = s2000 / s500;
  const bool ok = invariants.outputs > 0 && invariants.cptp_failures == 0 && invariants.monotonicity_failures == 0 &&
                  rank == 256 && ratio >= 0.35 && ratio <= 0.65;
  return {ok, fmt("%d MLE outputs, %d not CPTP, %d non-monotone; design rank %d; ", invariants.outputs,
                  invariants.cptp_failures, invariants.monotonicity_failures, rank) +
                  fmt("bootstrap std %.4f (500 shots) / %.4f (2000 shots), ratio %.3f", s500, s2000, ratio)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"ideal MS process matrix", criterion1},      {"noiseless MLE round trip", criterion2},
      {"identity under laser noise", criterion3},   {"120 us delay under laser noise", criterion4},
      {"drift ion asymmetry", criterion5},          {"over-rotation fit", criterion6},
      {"Bell-state fidelity", criterion7},          {"Ramsey phase diffusion", criterion8},
      {"motional heating fits", criterion9},        {"invariants", criterion10}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("[%s] criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
