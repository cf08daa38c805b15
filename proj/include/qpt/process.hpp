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

#include <optional>
#include <string>

#include "qpt/qmath.hpp"

namespace qpt {

/// Two-qubit process matrix over the unnormalized Pauli products.
///
/// A map acts as E(rho) = sum_mn chi(m, n) P_m rho P_n^dagger. With unnormalized
/// Pauli products, trace preservation implies Tr chi = 1. The type does not enforce
/// complete positivity: linear inversion can legitimately produce unphysical
/// matrices, so use validate_cptp() to inspect a value.
class ProcessMatrix {
 public:
  /// The identity process.
  ProcessMatrix();
  explicit ProcessMatrix(ComplexMatrix chi);

  static ProcessMatrix identity() { return ProcessMatrix(); }

  const ComplexMatrix& matrix() const { return chi_; }
  Complex operator()(int m, int n) const { return chi_(m, n); }
  Complex element(const std::string& row_label, const std::string& col_label) const;
  Complex trace() const { return chi_.trace(); }

 private:
  ComplexMatrix chi_;
};

struct ProcessFidelityReport {
  double fidelity = 0.0;
  double error = 1.0;
  std::optional<double> uncertainty;
  /// Imaginary part of Tr[chi_exp chi_ideal], discarded from the fidelity itself.
  double imaginary_residual = 0.0;
};

struct CptpDiagnostics {
  double min_eigenvalue = 0.0;
  double hermiticity_deviation = 0.0;
  double trace_deviation = 0.0;
  /// max-entry norm of sum_mn chi_mn P_n^dagger P_m - I.
  double tp_residual = 0.0;

  bool is_cptp(double psd_tol = 1e-8, double hermitian_tol = 1e-10, double trace_tol = 1e-8,
               double tp_tol = 1e-6) const;
};

/// Which side of the ideal gate the error process sits on.
enum class ErrorOrder {
  /// E_meas(rho) = U Etilde(rho) U^dagger: the error acts first.
  kErrorBeforeGate,
  /// E_meas(rho) = Etilde(U rho U^dagger): the ideal gate acts first.
  kErrorAfterGate,
};

ProcessMatrix unitary_to_chi(const ComplexMatrix& u,
                             const NumericsConfig& numerics = default_numerics());

ComplexMatrix apply_process(const ProcessMatrix& chi, const ComplexMatrix& rho,
                            const NumericsConfig& numerics = default_numerics());

/// F_p = Re Tr[chi_exp chi_ideal], clamped to [0, 1].
ProcessFidelityReport process_fidelity(const ProcessMatrix& chi_exp, const ProcessMatrix& chi_ideal);

/// Process of rho -> E_second(E_first(rho)).
ProcessMatrix compose(const ProcessMatrix& first, const ProcessMatrix& second);

ProcessMatrix extract_error_process(const ProcessMatrix& chi_meas, const ComplexMatrix& u_ideal,
                                    ErrorOrder order = ErrorOrder::kErrorBeforeGate,
                                    const NumericsConfig& numerics = default_numerics());

CptpDiagnostics validate_cptp(const ProcessMatrix& chi);

/// Choi matrix J = sum_ij |i><j| (x) E(|i><j|), input factor first. Trace 4 for a
/// trace-preserving map; identity maps to the unnormalized maximally entangled projector.
ComplexMatrix chi_to_choi(const ProcessMatrix& chi);
ProcessMatrix choi_to_chi(const ComplexMatrix& choi);

/// Column-stacking superoperator: vec(E(rho)) = S vec(rho).
ComplexMatrix chi_to_superoperator(const ProcessMatrix& chi);
ProcessMatrix superoperator_to_chi(const ComplexMatrix& superop);

ProcessMatrix chi_choi_roundtrip(const ProcessMatrix& chi);

}  // namespace qpt
