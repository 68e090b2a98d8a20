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

// Error-scaling studies that compare circuit-level approximations against the
// reference evolutions. Each returns raw error series; pass/fail brackets are
// the caller's business.

#pragma once

#include <cmath>
#include <vector>

#include "lindground/circuit.hpp"
#include "lindground/jump.hpp"
#include "lindground/randomcoupling.hpp"
#include "lindground/reference.hpp"

namespace lindground {

struct ErrorSeries {
  std::vector<double> taus;
  std::vector<double> errors;

  double slope() const { return loglog_slope(taus, errors); }
};

inline std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1)));
  }
  return out;
}

/// Trace norm of the dilated one-ancilla step minus the exact dissipative
/// semigroup, for each tau.
inline ErrorSeries dilation_error_series(const JumpOperator& k, const DensityMatrix& rho,
                                         const std::vector<double>& taus) {
  ErrorSeries s{taus, {}};
  const DilatedJump kd = dilate(k);
  for (double tau : taus) {
    const DensityMatrix a = exact_dilated_step(kd, rho, tau);
    const DensityMatrix b = exact_dissipative_step(k, rho, tau);
    s.errors.push_back(trace_norm(a.matrix() - b.matrix()));
  }
  return s;
}

/// Trace norm of the Trotterized circuit channel minus the exact dilated step
/// of the frame-shifted quadrature jump, without the coherent step.
inline ErrorSeries channel_trotter_error_series(const ResolvedProblem& prob, const FilterParams& p,
                                                const DensityMatrix& rho, const std::vector<double>& taus) {
  ErrorSeries s{taus, {}};
  const JumpOperator ks = circuit_frame_jump(quadrature_jump(prob.spec, prob.A, p), prob.spec);
  const DilatedJump kd = dilate(ks);
  for (double tau : taus) {
    const KrausPair kp = circuit_kraus(prob.spec, prob.A, p, tau, 1);
    const ComplexMatrix a = kp.apply(rho.matrix());
    const DensityMatrix b = exact_dilated_step(kd, rho, tau);
    s.errors.push_back(trace_norm(a - b.matrix()));
  }
  return s;
}

/// Trace distance at time T between the composed circuit scheme (continuous
/// mode, coherent step included) mapped back by e^{-iHS}, and the Lindblad ODE
/// with the quadrature jump started from e^{-iHS} rho e^{iHS}.
inline ErrorSeries global_error_series(const ResolvedProblem& prob, const FilterParams& p,
                                       const DensityMatrix& rho0, double T, const std::vector<double>& taus,
                                       double ode_dt = 1e-3) {
  ErrorSeries s{taus, {}};
  const JumpOperator ks = quadrature_jump(prob.spec, prob.A, p);
  const ComplexMatrix frame = evolution_unitary(prob.spec, p.effective_radius());
  const LindbladSystem sys{prob.H, ks, true};
  const DensityMatrix start(frame * rho0.matrix() * frame.adjoint());
  const DensityMatrix ref = evolve_ode(sys, start, T, ode_dt);
  for (double tau : taus) {
    ChannelConfig cfg;
    cfg.tau = tau;
    cfg.total_time = T;
    const long steps = cfg.step_count();
    const KrausPair kp = circuit_kraus(prob.spec, prob.A, p, tau, 1);
    const ComplexMatrix u = evolution_unitary(prob.spec, tau);
    ComplexMatrix rho = rho0.matrix();
    for (long m = 0; m < steps; ++m) rho = u * kp.apply(rho) * u.adjoint();
    const ComplexMatrix mapped = frame * rho * frame.adjoint();
    s.errors.push_back(trace_distance(mapped, ref.matrix()));
  }
  return s;
}

/// Spectral-norm distances used by the quadrature-convergence checks.
struct QuadratureStudy {
  double exact_vs_quadrature = 0.0;  // |K - K_s|
  double doubling_change = 0.0;      // |K_s(2 S_s) - K_s(S_s)|
  double coupling_norm = 0.0;        // |A|
};

inline QuadratureStudy quadrature_study(const ResolvedProblem& prob, const FilterParams& p,
                                        const QuadratureGrid& grid) {
  QuadratureStudy q;
  const FilterParams open = p.with_clamp(false);
  const JumpOperator k = exact_jump(prob.spec, prob.A, open);
  const JumpOperator ks = quadrature_jump(prob.spec, prob.A, open, grid);
  const FilterParams wide = open.with_radius(2.0 * open.S_s);
  const JumpOperator ks2 = quadrature_jump(prob.spec, prob.A, wide);
  q.exact_vs_quadrature = operator_norm(k.matrix - ks.matrix);
  q.doubling_change = operator_norm(ks2.matrix - ks.matrix);
  q.coupling_norm = prob.A.norm();
  return q;
}

inline QuadratureStudy quadrature_study(const ResolvedProblem& prob, const FilterParams& p) {
  return quadrature_study(prob, p, quadrature_grid(p));
}

/// Max-entry distance between W and the uncancelled product brought into the
/// same frame.
inline double cancellation_defect(const ResolvedProblem& prob, const FilterParams& p, double tau_eff) {
  const ComplexMatrix w = build_W(prob.spec, prob.A, p, tau_eff);
  const ComplexMatrix naive = build_W_uncancelled(prob.spec, prob.A, p, tau_eff);
  const ComplexMatrix frame = kron(ComplexMatrix::Identity(2, 2), evolution_unitary(prob.spec, -p.effective_radius()));
  return max_abs(w - frame * naive * frame.adjoint());
}

}  // namespace lindground
