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

#include <random>

#include "qpt/ionsim.hpp"
#include "qpt/process.hpp"
#include "support.hpp"

namespace qpt {
namespace {

using testing::apply_kraus;
using testing::chi_from_kraus;
using testing::random_density;
using testing::random_kraus;
using testing::random_unitary;

TEST(UnitaryToChi, MsGateHasFourElements) {
  const ProcessMatrix chi = unitary_to_chi(ms_unitary(kPi / 4));
  const int ii = PauliIndex::from_label("II").linear();
  const int xx = PauliIndex::from_label("XX").linear();
  for (int m = 0; m < 16; ++m)
    for (int n = 0; n < 16; ++n) {
      Complex expected = 0.0;
      if (m == ii && n == ii) expected = 0.5;
      if (m == xx && n == xx) expected = 0.5;
      // c_II = 1/sqrt2, c_XX = -i/sqrt2, chi_mn = c_m conj(c_n)
      if (m == xx && n == ii) expected = Complex(0, -0.5);
      if (m == ii && n == xx) expected = Complex(0, 0.5);
      EXPECT_LT(std::abs(chi(m, n) - expected), 1e-12) << m << "," << n;
    }
}

TEST(UnitaryToChi, IdentityIsUnitOnII) {
  const ProcessMatrix chi = unitary_to_chi(ComplexMatrix::Identity(4, 4));
  EXPECT_LT(max_abs(chi.matrix() - ProcessMatrix::identity().matrix()), 1e-15);
  EXPECT_NEAR(chi.trace().real(), 1.0, 1e-15);
}

TEST(UnitaryToChi, RejectsNonUnitary) {
  EXPECT_THROW(unitary_to_chi(2.0 * ComplexMatrix::Identity(4, 4)), ValidationError);
}

TEST(ProcessMatrix, RejectsWrongShape) { EXPECT_THROW(ProcessMatrix(ComplexMatrix::Zero(4, 4)), ValidationError); }

TEST(ProcessMatrix, ElementByLabel) {
  const ProcessMatrix chi = unitary_to_chi(ms_unitary(kPi / 4));
  EXPECT_NEAR(chi.element("XX", "II").imag(), -0.5, 1e-12);
  EXPECT_NEAR(chi.element("II", "XX").imag(), 0.5, 1e-12);
}

TEST(ApplyProcess, MatchesKrausForm) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const auto kraus = random_kraus(1 + trial, rng);
    const ProcessMatrix chi = chi_from_kraus(kraus);
    const ComplexMatrix rho = random_density(rng);
    EXPECT_LT(max_abs(apply_process(chi, rho) - apply_kraus(kraus, rho)), 1e-12);
  }
}

TEST(ApplyProcess, RejectsInvalidState) {
  EXPECT_THROW(apply_process(ProcessMatrix::identity(), 2.0 * ComplexMatrix::Identity(4, 4)), ValidationError);
}

TEST(Fidelity, OverlapOfUnitaries) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix u = random_unitary(4, rng), v = random_unitary(4, rng);
    const double expected = std::norm((u.adjoint() * v).trace() / 4.0);
    const auto report = process_fidelity(unitary_to_chi(u), unitary_to_chi(v));
    EXPECT_NEAR(report.fidelity, expected, 1e-12);
    EXPECT_NEAR(report.error, 1.0 - expected, 1e-12);
    EXPECT_NEAR(process_fidelity(unitary_to_chi(u), unitary_to_chi(u)).fidelity, 1.0, 1e-12);
  }
}

TEST(Fidelity, OverRotatedMs) {
  // F = cos^2(theta - pi/4) for exp(-i theta XX) against the ideal gate.
  const auto r = process_fidelity(unitary_to_chi(ms_unitary(1.04)), unitary_to_chi(ms_unitary(kPi / 4)));
  EXPECT_NEAR(r.fidelity, std::pow(std::cos(1.04 - kPi / 4), 2), 1e-12);
}

TEST(Choi, RoundTripAndNormalization) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const ProcessMatrix chi = chi_from_kraus(random_kraus(3, rng));
    const ComplexMatrix j = chi_to_choi(chi);
    EXPECT_NEAR(j.trace().real(), 4.0, 1e-12);
    // Oracle: J = sum_ij |i><j| (x) E(|i><j|), evaluated block by block.
    for (int i = 0; i < 4; ++i)
      for (int jj = 0; jj < 4; ++jj) {
        ComplexMatrix e = ComplexMatrix::Zero(4, 4);
        e(i, jj) = 1.0;
        ComplexMatrix out = ComplexMatrix::Zero(4, 4);
        const auto& basis = two_qubit_pauli_basis();
        for (int m = 0; m < 16; ++m)
          for (int n = 0; n < 16; ++n) out += chi(m, n) * basis[m] * e * basis[n].adjoint();
        EXPECT_LT(max_abs(j.block(4 * i, 4 * jj, 4, 4) - out), 1e-12);
      }
    EXPECT_LT(max_abs(choi_to_chi(j).matrix() - chi.matrix()), 1e-12);
    EXPECT_LT(max_abs(chi_choi_roundtrip(chi).matrix() - chi.matrix()), 1e-12);
  }
}

TEST(Superoperator, ActsOnColumnStackedStates) {
  std::mt19937_64 rng(29);
  const auto kraus = random_kraus(2, rng);
  const ProcessMatrix chi = chi_from_kraus(kraus);
  const ComplexMatrix s = chi_to_superoperator(chi);
  const ComplexMatrix rho = random_density(rng);
  const ComplexVector out = s * rho.reshaped();
  EXPECT_LT(max_abs(out.reshaped(4, 4) - apply_kraus(kraus, rho)), 1e-12);
  EXPECT_LT(max_abs(superoperator_to_chi(s).matrix() - chi.matrix()), 1e-12);
}

TEST(Compose, MatchesProductOfUnitaries) {
  std::mt19937_64 rng(31);
  const ComplexMatrix u1 = random_unitary(4, rng), u2 = random_unitary(4, rng);
  const ProcessMatrix c = compose(unitary_to_chi(u1), unitary_to_chi(u2));
  EXPECT_LT(max_abs(c.matrix() - unitary_to_chi(u2 * u1).matrix()), 1e-12);
}

TEST(Compose, MatchesSequentialKraus) {
  std::mt19937_64 rng(37);
  const auto k1 = random_kraus(2, rng), k2 = random_kraus(3, rng);
  const ProcessMatrix c = compose(chi_from_kraus(k1), chi_from_kraus(k2));
  const ComplexMatrix rho = random_density(rng);
  EXPECT_LT(max_abs(apply_process(c, rho) - apply_kraus(k2, apply_kraus(k1, rho))), 1e-12);
}

TEST(ErrorProcess, RecoversErrorOnEitherSide) {
  std::mt19937_64 rng(41);
  const ComplexMatrix u = ms_unitary(kPi / 4);
  const ComplexMatrix v = random_unitary(4, rng);
  // Error first: E_meas = U . V.
  const ProcessMatrix before = extract_error_process(unitary_to_chi(u * v), u, ErrorOrder::kErrorBeforeGate);
  EXPECT_LT(max_abs(before.matrix() - unitary_to_chi(v).matrix()), 1e-12);
  const ProcessMatrix after = extract_error_process(unitary_to_chi(v * u), u, ErrorOrder::kErrorAfterGate);
  EXPECT_LT(max_abs(after.matrix() - unitary_to_chi(v).matrix()), 1e-12);
}

TEST(ErrorProcess, OverRotationErrorSitsOnXXAndII) {
  const ComplexMatrix u = ms_unitary(kPi / 4);
  const ProcessMatrix err = extract_error_process(unitary_to_chi(ms_unitary(1.04)), u);
  const double d = 1.04 - kPi / 4;
  EXPECT_NEAR(err.element("II", "II").real(), std::pow(std::cos(d), 2), 1e-12);
  EXPECT_NEAR(err.element("XX", "XX").real(), std::pow(std::sin(d), 2), 1e-12);
  EXPECT_NEAR(std::abs(err.element("XX", "II")), std::abs(std::sin(d) * std::cos(d)), 1e-12);
}

TEST(Cptp, RandomChannelsPassAndCompositionsStayCptp) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const ProcessMatrix a = chi_from_kraus(random_kraus(1 + trial % 4, rng));
    const ProcessMatrix b = chi_from_kraus(random_kraus(1 + (trial + 1) % 4, rng));
    EXPECT_TRUE(validate_cptp(a).is_cptp());
    EXPECT_TRUE(validate_cptp(compose(a, b)).is_cptp());
    EXPECT_NEAR(compose(a, b).trace().real(), 1.0, 1e-12);
  }
}

TEST(Cptp, FlagsUnphysicalMatrices) {
  ComplexMatrix m = ProcessMatrix::identity().matrix();
  m(1, 1) = -0.1;
  m(0, 0) = 1.1;
  const auto d = validate_cptp(ProcessMatrix(m));
  EXPECT_NEAR(d.min_eigenvalue, -0.1, 1e-12);
  EXPECT_FALSE(d.is_cptp());
  ComplexMatrix scaled = 0.5 * ProcessMatrix::identity().matrix();
  EXPECT_FALSE(validate_cptp(ProcessMatrix(scaled)).is_cptp());
}

}  // namespace
}  // namespace qpt
