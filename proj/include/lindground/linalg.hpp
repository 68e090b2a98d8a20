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

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace lindground {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot deliver a trustworthy result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

/// Dense Hermitian matrix. The stored matrix is exactly Hermitian: it is
/// symmetrized on construction, after rejecting inputs that are far from it.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  explicit HermitianOperator(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
      throw ContractViolation("HermitianOperator: matrix must be square");
    }
    if (!all_finite(m)) {
      throw ContractViolation("HermitianOperator: non-finite entry");
    }
    const double scale = std::max(1.0, max_abs(m));
    const double skew = max_abs(m - m.adjoint());
    if (skew > 1e-8 * scale) {
      throw ContractViolation("HermitianOperator: matrix is not Hermitian (max |M - M^dagger| = " +
                              std::to_string(skew) + ")");
    }
    matrix_ = hermitian_part(m);
  }

  static HermitianOperator zero(Eigen::Index dim) {
    return HermitianOperator(ComplexMatrix::Zero(dim, dim));
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  /// Spectral norm, computed from the eigenvalues.
  double norm() const {
    if (dim() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }

 private:
  ComplexMatrix matrix_;
};

/// Eigenpairs of a Hermitian operator, eigenvalues ascending.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;  // columns
  double gap = 0.0;

  Eigen::Index dim() const { return eigenvalues.size(); }

  double ground_energy() const { return eigenvalues(0); }
  double max_energy() const { return eigenvalues(dim() - 1); }
  double norm() const { return std::max(std::abs(eigenvalues(0)), std::abs(max_energy())); }

  /// Number of eigenvalues equal to the ground energy within a relative tolerance.
  Eigen::Index ground_multiplicity(double rel_tol = 1e-9) const {
    const double tol = rel_tol * std::max(1.0, std::abs(ground_energy()));
    Eigen::Index k = 1;
    while (k < dim() && eigenvalues(k) - eigenvalues(0) <= tol) ++k;
    return k;
  }

  ComplexVector state(Eigen::Index k) const { return eigenvectors.col(k); }

  ComplexMatrix to_energy_basis(const ComplexMatrix& m) const {
    return eigenvectors.adjoint() * m * eigenvectors;
  }
  ComplexMatrix from_energy_basis(const ComplexMatrix& m) const {
    return eigenvectors * m * eigenvectors.adjoint();
  }

  /// Projector onto the (possibly degenerate) ground space.
  ComplexMatrix ground_projector() const {
    const Eigen::Index g = ground_multiplicity();
    const auto v = eigenvectors.leftCols(g);
    return v * v.adjoint();
  }
};

namespace detail {

inline void fix_phases(ComplexMatrix& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    auto col = v.col(c);
    const double peak = col.cwiseAbs().maxCoeff();
    if (peak == 0.0) continue;
    Eigen::Index pivot = 0;
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      if (std::abs(col(r)) >= peak * (1.0 - 1e-10)) {
        pivot = r;
        break;
      }
    }
    const Complex phase = std::conj(col(pivot)) / std::abs(col(pivot));
    col *= phase;
    col(pivot) = Complex(col(pivot).real(), 0.0);
  }
}

}  // namespace detail

/// Hermitian eigendecomposition with a deterministic phase convention: in each
/// eigenvector the first component of largest magnitude is real and positive.
inline SpectralDecomposition hermitian_eig(const HermitianOperator& h) {
  if (h.dim() < 1) throw ContractViolation("hermitian_eig: empty operator");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("hermitian_eig: eigensolver did not converge");
  }
  SpectralDecomposition out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  if (!out.eigenvalues.allFinite() || !all_finite(out.eigenvectors)) {
    throw NumericalFailure("hermitian_eig: non-finite eigenpairs");
  }
  detail::fix_phases(out.eigenvectors);
  out.gap = out.dim() > 1 ? std::max(0.0, out.eigenvalues(1) - out.eigenvalues(0)) : 0.0;
  return out;
}

/// e^{-iHt} assembled from the spectral decomposition.
inline ComplexMatrix evolution_unitary(const SpectralDecomposition& spec, double t) {
  if (!std::isfinite(t)) throw ContractViolation("evolution_unitary: non-finite time");
  ComplexVector phases(spec.dim());
  for (Eigen::Index k = 0; k < spec.dim(); ++k) {
    phases(k) = std::exp(-kI * spec.eigenvalues(k) * t);
  }
  return spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
}

/// Diagonal of e^{-iHt} in the energy basis.
inline ComplexVector evolution_phases(const SpectralDecomposition& spec, double t) {
  ComplexVector phases(spec.dim());
  for (Eigen::Index k = 0; k < spec.dim(); ++k) {
    phases(k) = std::exp(-kI * spec.eigenvalues(k) * t);
  }
  return phases;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Traces out a leading qubit: returns the sum of the two diagonal blocks.
inline ComplexMatrix partial_trace_ancilla(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0) {
    throw ContractViolation("partial_trace_ancilla: dimension must be square and even");
  }
  const Eigen::Index n = m.rows() / 2;
  return m.topLeftCorner(n, n) + m.bottomRightCorner(n, n);
}

/// Schatten-1 norm.
inline double trace_norm(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw ContractViolation("trace_norm: matrix must be square");
  if (m.size() == 0) return 0.0;
  if (!all_finite(m)) throw NumericalFailure("trace_norm: non-finite input");
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  if (svd.info() != Eigen::Success) throw NumericalFailure("trace_norm: SVD did not converge");
  return svd.singularValues().sum();
}

inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return 0.5 * trace_norm(a - b);
}

inline double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  if (svd.info() != Eigen::Success) throw NumericalFailure("operator_norm: SVD did not converge");
  return svd.singularValues()(0);
}

inline double min_hermitian_eigenvalue(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("min_hermitian_eigenvalue: eigensolver did not converge");
  }
  return es.eigenvalues()(0);
}

/// A density matrix: Hermitian with unit trace. Positivity is not checked on
/// construction because it costs an eigensolve; use min_eigenvalue().
class DensityMatrix {
 public:
  DensityMatrix() = default;

  explicit DensityMatrix(const ComplexMatrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
      throw ContractViolation("DensityMatrix: matrix must be square and non-empty");
    }
    if (!all_finite(m)) throw NumericalFailure("DensityMatrix: non-finite entry");
    const double skew = max_abs(m - m.adjoint());
    if (skew > 1e-8) {
      throw ContractViolation("DensityMatrix: matrix is not Hermitian");
    }
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > 1e-9) {
      throw ContractViolation("DensityMatrix: trace " + std::to_string(tr) + " differs from 1");
    }
    matrix_ = hermitian_part(m);
  }

  static DensityMatrix pure(const ComplexVector& psi) {
    const double n = psi.norm();
    if (std::abs(n - 1.0) > 1e-9) throw ContractViolation("DensityMatrix::pure: state not normalized");
    return DensityMatrix(psi * psi.adjoint());
  }

  static DensityMatrix maximally_mixed(Eigen::Index dim) {
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  double trace() const { return matrix_.trace().real(); }
  double min_eigenvalue() const { return min_hermitian_eigenvalue(matrix_); }

 private:
  ComplexMatrix matrix_;
};

/// Re-Hermitizes and rescales to unit trace. Used after numerical steps whose
/// drift has already been bounded by the caller.
inline DensityMatrix normalized_density(const ComplexMatrix& m) {
  ComplexMatrix h = hermitian_part(m);
  const double tr = h.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) throw NumericalFailure("normalized_density: non-positive trace");
  return DensityMatrix(h / tr);
}

}  // namespace lindground
