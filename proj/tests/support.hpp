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

#include <random>
#include <vector>

#include "qpt/process.hpp"
#include "qpt/qmath.hpp"

namespace qpt::testing {

inline ComplexMatrix random_gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = Complex(g(rng), g(rng));
  return m;
}

inline ComplexMatrix random_unitary(int dim, std::mt19937_64& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_gaussian(dim, dim, rng));
  return qr.householderQ() * ComplexMatrix::Identity(dim, dim);
}

/// Kraus operators of a random channel: blocks of a random isometry C^4 -> C^(4n).
inline std::vector<ComplexMatrix> random_kraus(int n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_gaussian(4 * n, 4, rng));
  const ComplexMatrix v = qr.householderQ() * ComplexMatrix::Identity(4 * n, 4);
  std::vector<ComplexMatrix> k;
  for (int i = 0; i < n; ++i) k.push_back(v.block(4 * i, 0, 4, 4));
  return k;
}

/// chi_mn = sum_i c_im conj(c_in), c_im = Tr(P_m^dagger K_i) / 4.
inline ProcessMatrix chi_from_kraus(const std::vector<ComplexMatrix>& kraus) {
  const auto& basis = two_qubit_pauli_basis();
  ComplexMatrix chi = ComplexMatrix::Zero(16, 16);
  for (const auto& k : kraus) {
    ComplexVector c(16);
    for (int m = 0; m < 16; ++m) c(m) = (basis[m].adjoint() * k).trace() / 4.0;
    chi += c * c.adjoint();
  }
  return ProcessMatrix(chi);
}

inline ComplexMatrix apply_kraus(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& rho) {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

inline ComplexMatrix random_density(std::mt19937_64& rng) {
  const ComplexMatrix a = random_gaussian(4, 4, rng);
  const ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

/// |Tr(A^dagger B)| / d: 1 exactly when A and B agree up to a global phase.
inline double phase_insensitive_overlap(const ComplexMatrix& a, const ComplexMatrix& b) {
  return std::abs((a.adjoint() * b).trace()) / static_cast<double>(a.rows());
}

}  // namespace qpt::testing
