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
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qpt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Raised when an argument violates an operation's precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tolerances shared by every module. All are absolute, on max-entry deviation.
struct NumericsConfig {
  double hermitian_tol = 1e-10;
  double unitary_tol = 1e-10;
  double density_tol = 1e-8;
  double psd_tol = 1e-8;
  double trace_tol = 1e-8;
};

const NumericsConfig& default_numerics();

enum class Pauli { I = 0, X = 1, Y = 2, Z = 3 };

/// Position in the two-qubit Pauli-product basis, ordered II, IX, IY, IZ, XI, ... ZZ.
struct PauliIndex {
  Pauli ion1 = Pauli::I;
  Pauli ion2 = Pauli::I;

  constexpr int linear() const { return 4 * static_cast<int>(ion1) + static_cast<int>(ion2); }
  static PauliIndex from_linear(int k);
  static PauliIndex from_label(const std::string& label);
  std::string label() const;
};

/// The 16 two-letter labels in basis order.
const std::array<std::string, 16>& pauli_labels();

ComplexMatrix pauli_matrix(Pauli p);

/// P_k = sigma_ion1 (x) sigma_ion2, unnormalized, indexed by PauliIndex::linear().
const std::vector<ComplexMatrix>& two_qubit_pauli_basis();

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

double max_abs(const ComplexMatrix& m);
double hermiticity_deviation(const ComplexMatrix& m);
double unitarity_deviation(const ComplexMatrix& u);

void require_square(const ComplexMatrix& m, const char* what);
void require_hermitian(const ComplexMatrix& m, double tol, const char* what);
void require_unitary(const ComplexMatrix& u, double tol, const char* what);

/// exp(-i * scale * generator) for a Hermitian generator, via eigendecomposition.
ComplexMatrix matrix_exponential(const ComplexMatrix& hermitian_generator, double scale,
                                 const NumericsConfig& numerics = default_numerics());

/// Closest positive-semidefinite matrix in Frobenius norm (negative eigenvalues clipped).
ComplexMatrix nearest_psd(const ComplexMatrix& hermitian);

/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const ComplexMatrix& hermitian);

}  // namespace qpt
