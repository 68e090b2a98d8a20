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

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "lindground/jump.hpp"
#include "lindground/linalg.hpp"

namespace lindground {

/// Generator L[rho] = -i[H, rho] + K rho K^dagger - {K^dagger K, rho} / 2.
struct LindbladSystem {
  HermitianOperator H;
  JumpOperator K;
  bool include_coherent = true;

  Eigen::Index dim() const { return H.dim(); }

  void validate() const {
    if (H.dim() != K.dim()) {
      throw ContractViolation("LindbladSystem: H and K dimensions differ");
    }
  }

  static LindbladSystem dissipative(const JumpOperator& k) {
    return LindbladSystem{HermitianOperator::zero(k.dim()), k, false};
  }
};

inline constexpr Eigen::Index kMaxSuperoperatorDim = 16;

namespace detail {

struct LindbladTerms {
  ComplexMatrix h;  // zero when the coherent part is excluded
  ComplexMatrix k;
  ComplexMatrix k_adj;
  ComplexMatrix kdk_half;
  bool coherent;
};

inline LindbladTerms make_terms(const LindbladSystem& sys) {
  sys.validate();
  LindbladTerms t;
  t.coherent = sys.include_coherent;
  t.h = sys.H.matrix();
  t.k = sys.K.matrix;
  t.k_adj = t.k.adjoint();
  t.kdk_half = 0.5 * (t.k_adj * t.k);
  return t;
}

inline ComplexMatrix apply_terms(const LindbladTerms& t, const ComplexMatrix& rho) {
  ComplexMatrix out = t.k * rho * t.k_adj;
  out.noalias() -= t.kdk_half * rho;
  out.noalias() -= rho * t.kdk_half;
  if (t.coherent) {
    out.noalias() -= kI * (t.h * rho);
    out.noalias() += kI * (rho * t.h);
  }
  return out;
}

inline ComplexMatrix rk4_step(const LindbladTerms& t, const ComplexMatrix& rho, double h) {
  const ComplexMatrix k1 = apply_terms(t, rho);
  const ComplexMatrix k2 = apply_terms(t, rho + 0.5 * h * k1);
  const ComplexMatrix k3 = apply_terms(t, rho + 0.5 * h * k2);
  const ComplexMatrix k4 = apply_terms(t, rho + h * k3);
  return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

inline ComplexMatrix lindbladian_apply(const LindbladSystem& sys, const ComplexMatrix& rho) {
  if (rho.rows() != sys.dim() || rho.cols() != sys.dim()) {
    throw ContractViolation("lindbladian_apply: state dimension mismatch");
  }
  return detail::apply_terms(detail::make_terms(sys), rho);
}

inline ComplexMatrix lindbladian_apply(const LindbladSystem& sys, const DensityMatrix& rho) {
  return lindbladian_apply(sys, rho.matrix());
}

/// Fixed-step classic RK4. The step count is ceil(T / dt) so the final time
/// is hit exactly; each step is re-Hermitized and renormalized after its
/// trace drift is checked.
inline DensityMatrix evolve_ode(const LindbladSystem& sys, const DensityMatrix& rho0, double T,
                                double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("evolve_ode: dt must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ContractViolation("evolve_ode: T must be non-negative");
  if (rho0.dim() != sys.dim()) throw ContractViolation("evolve_ode: state dimension mismatch");
  if (T == 0.0) return rho0;
  const auto terms = detail::make_terms(sys);
  const long steps = std::max(1L, static_cast<long>(std::ceil(T / dt - 1e-9)));
  const double h = T / static_cast<double>(steps);
  ComplexMatrix rho = rho0.matrix();
  for (long n = 0; n < steps; ++n) {
    rho = detail::rk4_step(terms, rho, h);
    const double tr = rho.trace().real();
    if (!std::isfinite(tr) || std::abs(tr - 1.0) > 1e-6) {
      throw NumericalFailure("evolve_ode: trace drifted to " + std::to_string(tr) +
                             " at step " + std::to_string(n) + "; dt is too large");
    }
    rho = hermitian_part(rho) / tr;
  }
  return DensityMatrix(rho);
}

/// e^{L_K tau} rho, integrated with dt = tau / 1000.
inline DensityMatrix exact_dissipative_step(const JumpOperator& k, const DensityMatrix& rho,
                                            double tau) {
  if (!(tau >= 0.0)) throw ContractViolation("exact_dissipative_step: tau must be non-negative");
  if (tau == 0.0) return rho;
  return evolve_ode(LindbladSystem::dissipative(k), rho, tau, tau / 1000.0);
}

/// Kraus pair of a 2N x 2N unitary restricted to ancilla input |0>: the
/// blocks <0|U|0> and <1|U|0>.
struct KrausPair {
  ComplexMatrix b0;
  ComplexMatrix b1;

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    return b0 * rho * b0.adjoint() + b1 * rho * b1.adjoint();
  }

  static KrausPair from_unitary_first_columns(const ComplexMatrix& u_cols) {
    const Eigen::Index n = u_cols.cols();
    return KrausPair{u_cols.topRows(n), u_cols.bottomRows(n)};
  }
};

/// Tr_a e^{-i sqrt(tau) Kd} (|0><0| x rho) e^{i sqrt(tau) Kd}.
inline DensityMatrix exact_dilated_step(const DilatedJump& kd, const DensityMatrix& rho,
                                        double tau) {
  if (!(tau >= 0.0)) throw ContractViolation("exact_dilated_step: tau must be non-negative");
  if (kd.system_dim() != rho.dim()) throw ContractViolation("exact_dilated_step: dimension mismatch");
  if (tau == 0.0) return rho;
  const auto eig = hermitian_eig(HermitianOperator(kd.matrix));
  const ComplexMatrix u = evolution_unitary(eig, std::sqrt(tau));
  const KrausPair kp = KrausPair::from_unitary_first_columns(u.leftCols(rho.dim()));
  return normalized_density(kp.apply(rho.matrix()));
}

/// One step of the discrete-time map: the exact dilated dissipative step
/// followed by e^{-iH tau} conjugation when the coherent part is included.
inline DensityMatrix discrete_map_exact(const LindbladSystem& sys, const DensityMatrix& rho,
                                        double tau) {
  if (!(tau > 0.0)) throw ContractViolation("discrete_map_exact: tau must be positive");
  sys.validate();
  DensityMatrix out = exact_dilated_step(dilate(sys.K), rho, tau);
  if (!sys.include_coherent) return out;
  const ComplexMatrix u = evolution_unitary(hermitian_eig(sys.H), tau);
  return normalized_density(u * out.matrix() * u.adjoint());
}

/// Row-major vectorization: vec(rho)[i * N + j] = rho(i, j).
inline ComplexVector vec(const ComplexMatrix& m) {
  ComplexVector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  }
  return v;
}

inline ComplexMatrix unvec(const ComplexVector& v, Eigen::Index n) {
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = v(i * n + j);
  }
  return m;
}

/// Matrix of the generator acting on row-major vectorized states, for small
/// systems only.
inline ComplexMatrix superoperator(const LindbladSystem& sys) {
  sys.validate();
  const Eigen::Index n = sys.dim();
  if (n > kMaxSuperoperatorDim) {
    throw ContractViolation("superoperator: dimension " + std::to_string(n) + " exceeds " +
                            std::to_string(kMaxSuperoperatorDim));
  }
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix& k = sys.K.matrix;
  const ComplexMatrix kdk = k.adjoint() * k;
  ComplexMatrix l = kron(k, k.conjugate()) - 0.5 * kron(kdk, id) - 0.5 * kron(id, kdk.transpose());
  if (sys.include_coherent) {
    const ComplexMatrix& h = sys.H.matrix();
    l -= kI * (kron(h, id) - kron(id, h.transpose()));
  }
  return l;
}

inline ComplexMatrix superoperator_propagator(const LindbladSystem& sys, double t) {
  const ComplexMatrix l = superoperator(sys) * Complex(t, 0.0);
  return l.exp();
}

inline DensityMatrix superoperator_evolve(const LindbladSystem& sys, const DensityMatrix& rho,
                                          double t) {
  const ComplexMatrix prop = superoperator_propagator(sys, t);
  return normalized_density(unvec(prop * vec(rho.matrix()), rho.dim()));
}

}  // namespace lindground
