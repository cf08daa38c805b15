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

#include "qpt/qmath.hpp"

#include <sstream>

namespace qpt {

const NumericsConfig& default_numerics() {
  static const NumericsConfig config{};
  return config;
}

namespace {

constexpr std::array<char, 4> kPauliLetters = {'I', 'X', 'Y', 'Z'};

int pauli_from_letter(char c) {
  for (int i = 0; i < 4; ++i) {
    if (kPauliLetters[i] == c) return i;
  }
  throw ValidationError(std::string("unknown Pauli letter '") + c + "'");
}

}  // namespace

PauliIndex PauliIndex::from_linear(int k) {
  if (k < 0 || k > 15) throw ValidationError("Pauli index out of range: " + std::to_string(k));
  return {static_cast<Pauli>(k / 4), static_cast<Pauli>(k % 4)};
}

PauliIndex PauliIndex::from_label(const std::string& label) {
  if (label.size() != 2) throw ValidationError("Pauli label must have two letters: " + label);
  return {static_cast<Pauli>(pauli_from_letter(label[0])),
          static_cast<Pauli>(pauli_from_letter(label[1]))};
}

std::string PauliIndex::label() const {
  return {kPauliLetters[static_cast<int>(ion1)], kPauliLetters[static_cast<int>(ion2)]};
}

const std::array<std::string, 16>& pauli_labels() {
  static const std::array<std::string, 16> labels = [] {
    std::array<std::string, 16> out;
    for (int k = 0; k < 16; ++k) out[k] = PauliIndex::from_linear(k).label();
    return out;
  }();
  return labels;
}

ComplexMatrix pauli_matrix(Pauli p) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (p) {
    case Pauli::I:
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case Pauli::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Pauli::Y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case Pauli::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

const std::vector<ComplexMatrix>& two_qubit_pauli_basis() {
  static const std::vector<ComplexMatrix> basis = [] {
    std::vector<ComplexMatrix> out;
    out.reserve(16);
    for (int k = 0; k < 16; ++k) {
      const auto idx = PauliIndex::from_linear(k);
      out.push_back(kron(pauli_matrix(idx.ion1), pauli_matrix(idx.ion2)));
    }
    return out;
  }();
  return basis;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_deviation(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

double unitarity_deviation(const ComplexMatrix& u) {
  return max_abs(u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols()));
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream msg;
    msg << what << ": expected a nonempty square matrix, got " << m.rows() << "x" << m.cols();
    throw ValidationError(msg.str());
  }
}

void require_hermitian(const ComplexMatrix& m, double tol, const char* what) {
  require_square(m, what);
  const double dev = hermiticity_deviation(m);
  if (dev > tol) {
    std::ostringstream msg;
    msg << what << ": matrix is not Hermitian (max asymmetry " << dev << " > " << tol << ")";
    throw ValidationError(msg.str());
  }
}

void require_unitary(const ComplexMatrix& u, double tol, const char* what) {
  require_square(u, what);
  const double dev = unitarity_deviation(u);
  if (dev > tol) {
    std::ostringstream msg;
    msg << what << ": matrix is not unitary (max deviation " << dev << " > " << tol << ")";
    throw ValidationError(msg.str());
  }
}

ComplexMatrix matrix_exponential(const ComplexMatrix& hermitian_generator, double scale,
                                 const NumericsConfig& numerics) {
  require_hermitian(hermitian_generator, numerics.hermitian_tol, "matrix_exponential");
  const ComplexMatrix h = 0.5 * (hermitian_generator + hermitian_generator.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  ComplexVector phases(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    phases(i) = std::exp(-kI * scale * lambda(i));
  }
  const ComplexMatrix& v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

ComplexMatrix nearest_psd(const ComplexMatrix& hermitian) {
  require_square(hermitian, "nearest_psd");
  const ComplexMatrix h = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  if (eig.eigenvalues().minCoeff() >= 0.0) return h;
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  const ComplexMatrix& v = eig.eigenvectors();
  ComplexMatrix out = v * clipped.cast<Complex>().asDiagonal() * v.adjoint();
  return 0.5 * (out + out.adjoint());
}

double min_eigenvalue(const ComplexMatrix& hermitian) {
  require_square(hermitian, "min_eigenvalue");
  const ComplexMatrix h = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace qpt
