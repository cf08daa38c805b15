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

#include "qpt/qmath.hpp"
#include "support.hpp"

namespace qpt {
namespace {

TEST(PauliBasis, TraceOrthogonality) {
  const auto& basis = two_qubit_pauli_basis();
  ASSERT_EQ(basis.size(), 16u);
  for (int m = 0; m < 16; ++m)
    for (int n = 0; n < 16; ++n) {
      const Complex t = (basis[m].adjoint() * basis[n]).trace();
      EXPECT_NEAR(std::abs(t - Complex(m == n ? 4.0 : 0.0)), 0.0, 1e-14) << m << "," << n;
    }
}

TEST(PauliBasis, OrderAndLabels) {
  const auto& labels = pauli_labels();
  EXPECT_EQ(labels[0], "II");
  EXPECT_EQ(labels[1], "IX");
  EXPECT_EQ(labels[5], "XX");
  EXPECT_EQ(labels[15], "ZZ");
  for (int k = 0; k < 16; ++k) {
    EXPECT_EQ(PauliIndex::from_label(labels[k]).linear(), k);
    EXPECT_EQ(PauliIndex::from_linear(k).label(), labels[k]);
  }
  EXPECT_THROW(PauliIndex::from_label("XQ"), ValidationError);
  EXPECT_THROW(PauliIndex::from_linear(16), ValidationError);
}

TEST(PauliBasis, ProductStructure) {
  // Entry (r, c) of a (x) b is a(r/2, c/2) b(r%2, c%2).
  const auto& basis = two_qubit_pauli_basis();
  for (int k = 0; k < 16; ++k) {
    const auto idx = PauliIndex::from_linear(k);
    const ComplexMatrix a = pauli_matrix(idx.ion1), b = pauli_matrix(idx.ion2);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) EXPECT_EQ(basis[k](r, c), a(r / 2, c / 2) * b(r % 2, c % 2));
  }
}

TEST(MatrixExponential, MatchesTaylorSeries) {
  std::mt19937_64 rng(3);
  const ComplexMatrix a = testing::random_gaussian(4, 4, rng);
  const ComplexMatrix h = 0.25 * (a + a.adjoint());
  ComplexMatrix series = ComplexMatrix::Identity(4, 4);
  ComplexMatrix term = ComplexMatrix::Identity(4, 4);
  const double scale = 0.7;
  for (int k = 1; k < 40; ++k) {
    term = term * (-kI * scale * h) / static_cast<double>(k);
    series += term;
  }
  EXPECT_LT(max_abs(matrix_exponential(h, scale) - series), 1e-12);
}

TEST(MatrixExponential, RejectsNonHermitianGenerator) {
  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 1) = 1.0;
  EXPECT_THROW(matrix_exponential(g, 1.0), ValidationError);
}

TEST(Validation, DeviationMeasures) {
  std::mt19937_64 rng(5);
  const ComplexMatrix u = testing::random_unitary(4, rng);
  EXPECT_LT(unitarity_deviation(u), 1e-12);
  EXPECT_NO_THROW(require_unitary(u, 1e-10, "u"));
  EXPECT_THROW(require_unitary(2.0 * u, 1e-10, "u"), ValidationError);
  EXPECT_THROW(require_square(ComplexMatrix::Zero(2, 3), "m"), ValidationError);
  ComplexMatrix h = ComplexMatrix::Identity(2, 2);
  h(0, 1) = 1e-6;
  EXPECT_NEAR(hermiticity_deviation(h), 1e-6, 1e-18);
  EXPECT_THROW(require_hermitian(h, 1e-10, "h"), ValidationError);
}

TEST(NearestPsd, ClipsNegativeEigenvalues) {
  std::mt19937_64 rng(11);
  const ComplexMatrix a = testing::random_gaussian(5, 5, rng);
  const ComplexMatrix h = a + a.adjoint();
  ASSERT_LT(min_eigenvalue(h), 0.0);
  const ComplexMatrix p = nearest_psd(h);
  EXPECT_GE(min_eigenvalue(p), -1e-12);
  // Oracle: the positive spectral part, built independently.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  ComplexMatrix expected = ComplexMatrix::Zero(5, 5);
  for (int i = 0; i < 5; ++i) {
    const double l = eig.eigenvalues()(i);
    if (l > 0) expected += l * eig.eigenvectors().col(i) * eig.eigenvectors().col(i).adjoint();
  }
  EXPECT_LT(max_abs(p - expected), 1e-12);
}

TEST(NearestPsd, LeavesPsdInputUnchanged) {
  std::mt19937_64 rng(13);
  const ComplexMatrix rho = testing::random_density(rng);
  EXPECT_LT(max_abs(nearest_psd(rho) - rho), 1e-14);
}

TEST(Kron, Dimensions) {
  const ComplexMatrix a = ComplexMatrix::Identity(2, 3);
  const ComplexMatrix b = ComplexMatrix::Ones(4, 5);
  const ComplexMatrix k = kron(a, b);
  EXPECT_EQ(k.rows(), 8);
  EXPECT_EQ(k.cols(), 15);
  EXPECT_EQ(k(5, 7), Complex(1.0));
  EXPECT_EQ(k(5, 2), Complex(0.0));
}

}  // namespace
}  // namespace qpt
