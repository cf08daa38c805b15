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

#include "qpt/process.hpp"

#include <algorithm>
#include <sstream>

namespace qpt {

namespace {

constexpr int kDim = 4;
constexpr int kChiDim = 16;

// |A>> = sum_i |i> (x) A|i>, component (in, out) stored at in * 4 + out.
ComplexVector vectorize_operator(const ComplexMatrix& a) {
  ComplexVector v(kChiDim);
  for (int in = 0; in < kDim; ++in) {
    for (int out = 0; out < kDim; ++out) v(in * kDim + out) = a(out, in);
  }
  return v;
}

const ComplexMatrix& vectorized_basis() {
  static const ComplexMatrix basis = [] {
    ComplexMatrix b(kChiDim, kChiDim);
    const auto& paulis = two_qubit_pauli_basis();
    for (int m = 0; m < kChiDim; ++m) b.col(m) = vectorize_operator(paulis[m]);
    return b;
  }();
  return basis;
}

}  // namespace

ProcessMatrix::ProcessMatrix() : chi_(ComplexMatrix::Zero(kChiDim, kChiDim)) { chi_(0, 0) = 1.0; }

ProcessMatrix::ProcessMatrix(ComplexMatrix chi) : chi_(std::move(chi)) {
  if (chi_.rows() != kChiDim || chi_.cols() != kChiDim) {
    std::ostringstream msg;
    msg << "process matrix must be 16x16, got " << chi_.rows() << "x" << chi_.cols();
    throw ValidationError(msg.str());
  }
}

Complex ProcessMatrix::element(const std::string& row_label, const std::string& col_label) const {
  return chi_(PauliIndex::from_label(row_label).linear(), PauliIndex::from_label(col_label).linear());
}

bool CptpDiagnostics::is_cptp(double psd_tol, double hermitian_tol, double trace_tol,
                              double tp_tol) const {
  return min_eigenvalue >= -psd_tol && hermiticity_deviation <= hermitian_tol &&
         trace_deviation <= trace_tol && tp_residual <= tp_tol;
}

ProcessMatrix unitary_to_chi(const ComplexMatrix& u, const NumericsConfig& numerics) {
  if (u.rows() != kDim) throw ValidationError("unitary_to_chi: expected a 4x4 unitary");
  require_unitary(u, numerics.unitary_tol, "unitary_to_chi");
  const auto& paulis = two_qubit_pauli_basis();
  ComplexVector c(kChiDim);
  for (int m = 0; m < kChiDim; ++m) c(m) = (paulis[m].adjoint() * u).trace() / 4.0;
  return ProcessMatrix(c * c.adjoint());
}

ComplexMatrix apply_process(const ProcessMatrix& chi, const ComplexMatrix& rho,
                            const NumericsConfig& numerics) {
  if (rho.rows() != kDim) throw ValidationError("apply_process: expected a 4x4 density matrix");
  require_hermitian(rho, numerics.density_tol, "apply_process");
  if (std::abs(rho.trace() - 1.0) > numerics.density_tol) {
    throw ValidationError("apply_process: density matrix trace is not 1");
  }
  if (min_eigenvalue(rho) < -numerics.density_tol) {
    throw ValidationError("apply_process: density matrix is not positive semidefinite");
  }
  const auto& paulis = two_qubit_pauli_basis();
  ComplexMatrix out = ComplexMatrix::Zero(kDim, kDim);
  for (int m = 0; m < kChiDim; ++m) {
    const ComplexMatrix left = paulis[m] * rho;
    for (int n = 0; n < kChiDim; ++n) {
      const Complex w = chi(m, n);
      if (w == Complex{}) continue;
      out += w * left * paulis[n].adjoint();
    }
  }
  return out;
}

ProcessFidelityReport process_fidelity(const ProcessMatrix& chi_exp, const ProcessMatrix& chi_ideal) {
  const Complex raw = (chi_exp.matrix() * chi_ideal.matrix()).trace();
  ProcessFidelityReport report;
  report.fidelity = std::clamp(raw.real(), 0.0, 1.0);
  report.error = 1.0 - report.fidelity;
  report.imaginary_residual = raw.imag();
  return report;
}

ComplexMatrix chi_to_choi(const ProcessMatrix& chi) {
  const ComplexMatrix& b = vectorized_basis();
  return b * chi.matrix() * b.adjoint();
}

ProcessMatrix choi_to_chi(const ComplexMatrix& choi) {
  if (choi.rows() != kChiDim || choi.cols() != kChiDim) {
    throw ValidationError("choi_to_chi: expected a 16x16 Choi matrix");
  }
  // The vectorized Pauli products are orthogonal with squared norm 4.
  const ComplexMatrix& b = vectorized_basis();
  return ProcessMatrix(b.adjoint() * choi * b / 16.0);
}

ComplexMatrix chi_to_superoperator(const ProcessMatrix& chi) {
  const auto& paulis = two_qubit_pauli_basis();
  ComplexMatrix s = ComplexMatrix::Zero(kChiDim, kChiDim);
  for (int m = 0; m < kChiDim; ++m) {
    for (int n = 0; n < kChiDim; ++n) {
      const Complex w = chi(m, n);
      if (w == Complex{}) continue;
      s += w * kron(paulis[n].conjugate(), paulis[m]);
    }
  }
  return s;
}

ProcessMatrix superoperator_to_chi(const ComplexMatrix& superop) {
  if (superop.rows() != kChiDim || superop.cols() != kChiDim) {
    throw ValidationError("superoperator_to_chi: expected a 16x16 superoperator");
  }
  // J[(i, j), (k, l)] = E(|i><k|)(j, l) = S(j + 4l, i + 4k).
  ComplexMatrix choi(kChiDim, kChiDim);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) choi(i * kDim + j, k * kDim + l) = superop(j + kDim * l, i + kDim * k);
  return choi_to_chi(choi);
}

ProcessMatrix compose(const ProcessMatrix& first, const ProcessMatrix& second) {
  return superoperator_to_chi(chi_to_superoperator(second) * chi_to_superoperator(first));
}

ProcessMatrix extract_error_process(const ProcessMatrix& chi_meas, const ComplexMatrix& u_ideal,
                                    ErrorOrder order, const NumericsConfig& numerics) {
  if (u_ideal.rows() != kDim) throw ValidationError("extract_error_process: expected a 4x4 unitary");
  require_unitary(u_ideal, numerics.unitary_tol, "extract_error_process");
  const ProcessMatrix undo = unitary_to_chi(u_ideal.adjoint(), numerics);
  return order == ErrorOrder::kErrorBeforeGate ? compose(chi_meas, undo) : compose(undo, chi_meas);
}

CptpDiagnostics validate_cptp(const ProcessMatrix& chi) {
  const ComplexMatrix& m = chi.matrix();
  CptpDiagnostics d;
  d.hermiticity_deviation = hermiticity_deviation(m);
  d.min_eigenvalue = min_eigenvalue(m);
  d.trace_deviation = std::abs(m.trace() - 1.0);
  const auto& paulis = two_qubit_pauli_basis();
  ComplexMatrix tp = -ComplexMatrix::Identity(kDim, kDim);
  for (int m_idx = 0; m_idx < kChiDim; ++m_idx) {
    for (int n = 0; n < kChiDim; ++n) {
      const Complex w = m(m_idx, n);
      if (w == Complex{}) continue;
      tp += w * paulis[n].adjoint() * paulis[m_idx];
    }
  }
  d.tp_residual = max_abs(tp);
  return d;
}

ProcessMatrix chi_choi_roundtrip(const ProcessMatrix& chi) { return choi_to_chi(chi_to_choi(chi)); }

}  // namespace qpt
