// Copyright 2026 The lindground Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "lindground/filter.hpp"
#include "lindground/linalg.hpp"

namespace lindground {

enum class JumpProvenance { exact_frequency, quadrature, external };

inline std::string to_string(JumpProvenance p) {
  switch (p) {
    case JumpProvenance::exact_frequency: return "exact_frequency";
    case JumpProvenance::quadrature: return "quadrature";
    default: return "external";
  }
}

struct JumpOperator {
  ComplexMatrix matrix;
  JumpProvenance provenance = JumpProvenance::external;
  FilterParams params{};

  Eigen::Index dim() const { return matrix.rows(); }

  static JumpOperator from_matrix(const ComplexMatrix& k) {
    if (k.rows() != k.cols()) throw ContractViolation("JumpOperator: matrix must be square");
    if (!all_finite(k)) throw NumericalFailure("JumpOperator: non-finite entry");
    return JumpOperator{k, JumpProvenance::external, {}};
  }
};

/// Hermitian dilation [[0, K^dagger], [K, 0]] with the ancilla as leading qubit.
struct DilatedJump {
  ComplexMatrix matrix;

  Eigen::Index dim() const { return matrix.rows(); }
  Eigen::Index system_dim() const { return matrix.rows() / 2; }
};

namespace detail {

inline void require_same_dim(const SpectralDecomposition& spec, const HermitianOperator& A,
                             const char* who) {
  if (spec.dim() != A.dim()) {
    throw ContractViolation(std::string(who) + ": Hamiltonian and coupling dimensions differ (" +
                            std::to_string(spec.dim()) + " vs " + std::to_string(A.dim()) + ")");
  }
}

}  // namespace detail

/// Filter weights F_ij = f_hat(lambda_i - lambda_j) on the energy basis.
inline RealMatrix filter_weights(const SpectralDecomposition& spec, const FilterParams& p) {
  const Eigen::Index n = spec.dim();
  RealMatrix f(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      f(i, j) = f_hat(spec.eigenvalues(i) - spec.eigenvalues(j), p);
    }
  }
  return f;
}

/// K = sum_ij f_hat(lambda_i - lambda_j) |psi_i><psi_i|A|psi_j><psi_j|.
inline JumpOperator exact_jump(const SpectralDecomposition& spec, const HermitianOperator& A,
                               const FilterParams& p) {
  detail::require_same_dim(spec, A, "exact_jump");
  const ComplexMatrix a_e = spec.to_energy_basis(A.matrix());
  const ComplexMatrix k_e = filter_weights(spec, p).cast<Complex>().cwiseProduct(a_e);
  return JumpOperator{spec.from_energy_basis(k_e), JumpProvenance::exact_frequency, p};
}

/// Energy-basis weights G_ij = sum_l w_l f(s_l) e^{i(lambda_i - lambda_j) s_l}
/// for an explicit quadrature grid.
inline ComplexMatrix quadrature_weights(const SpectralDecomposition& spec, const FilterParams& p,
                                        const QuadratureGrid& grid) {
  const Eigen::Index n = spec.dim();
  ComplexMatrix g = ComplexMatrix::Zero(n, n);
  ComplexVector phase(n);
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const double s = grid.nodes[l];
    const Complex c = grid.weights[l] * f_time(s, p);
    for (Eigen::Index i = 0; i < n; ++i) phase(i) = std::exp(kI * (spec.eigenvalues(i) * s));
    g.noalias() += c * (phase * phase.adjoint());
  }
  return g;
}

/// K_s on a caller-supplied grid. Exposed so that verification can perturb
/// the grid and confirm the convergence checks notice.
inline JumpOperator quadrature_jump(const SpectralDecomposition& spec, const HermitianOperator& A,
                                    const FilterParams& p, const QuadratureGrid& grid) {
  detail::require_same_dim(spec, A, "quadrature_jump");
  const ComplexMatrix a_e = spec.to_energy_basis(A.matrix());
  const ComplexMatrix k_e = quadrature_weights(spec, p, grid).cwiseProduct(a_e);
  JumpOperator k{spec.from_energy_basis(k_e), JumpProvenance::quadrature, p};
  if (!all_finite(k.matrix)) throw NumericalFailure("quadrature_jump: non-finite result");
  return k;
}

/// K_s = sum_l w_l f(s_l) e^{iHs_l} A e^{-iHs_l} on the trapezoid grid.
inline JumpOperator quadrature_jump(const SpectralDecomposition& spec, const HermitianOperator& A,
                                    const FilterParams& p) {
  return quadrature_jump(spec, A, p, quadrature_grid(p));
}

inline DilatedJump dilate(const JumpOperator& k) {
  const Eigen::Index n = k.dim();
  DilatedJump d{ComplexMatrix::Zero(2 * n, 2 * n)};
  d.matrix.bottomLeftCorner(n, n) = k.matrix;
  d.matrix.topRightCorner(n, n) = k.matrix.adjoint();
  return d;
}

/// |K psi_0|, taken as the Frobenius norm over the ground space if degenerate.
inline double ground_residual(const JumpOperator& k, const SpectralDecomposition& spec) {
  if (k.dim() != spec.dim()) throw ContractViolation("ground_residual: dimension mismatch");
  const Eigen::Index g = spec.ground_multiplicity();
  return (k.matrix * spec.eigenvectors.leftCols(g)).norm();
}

}  // namespace lindground
