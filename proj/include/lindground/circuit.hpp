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
#include <cstdint>
#include <string>
#include <vector>

#include "lindground/filter.hpp"
#include "lindground/jump.hpp"
#include "lindground/linalg.hpp"
#include "lindground/models.hpp"
#include "lindground/parallel.hpp"
#include "lindground/reference.hpp"

namespace lindground {

enum class ChannelMode { continuous, discrete };
enum class Backend { density, trajectory };

inline std::string to_string(ChannelMode m) { return m == ChannelMode::continuous ? "continuous" : "discrete"; }
inline std::string to_string(Backend b) { return b == Backend::density ? "density" : "trajectory"; }

struct ChannelConfig {
  double tau = 0.1;
  int segments = 1;
  bool include_coherent = true;
  ChannelMode mode = ChannelMode::continuous;
  double total_time = 0.0;
  Backend backend = Backend::density;
  int reps = 1;
  std::uint64_t seed = 0;
  int record_stride = 1;

  /// Number of channel steps M_t = T / tau; T must be an integer multiple of tau.
  long step_count() const {
    const double ratio = total_time / tau;
    const long m = std::lround(ratio);
    if (std::abs(m * tau - total_time) > 1e-9 * std::max(1.0, total_time)) {
      throw ContractViolation("ChannelConfig: total_time " + std::to_string(total_time) +
                              " is not an integer multiple of tau " + std::to_string(tau));
    }
    return m;
  }

  /// Step length handed to each of the r circuit segments. r segments of
  /// W(sqrt(tau) / r) reproduce e^{-i sqrt(tau) Kd} to leading order.
  double tau_eff() const { return tau / (static_cast<double>(segments) * segments); }

  void validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ContractViolation("ChannelConfig: tau must be positive");
    if (!(total_time >= 0.0) || !std::isfinite(total_time)) {
      throw ContractViolation("ChannelConfig: total_time must be non-negative");
    }
    if (segments < 1) throw ContractViolation("ChannelConfig: segments must be at least 1");
    if (reps < 1) throw ContractViolation("ChannelConfig: reps must be at least 1");
    if (record_stride < 1) throw ContractViolation("ChannelConfig: record_stride must be at least 1");
    (void)step_count();
  }
};

struct CostLedger {
  double hamiltonian_time = 0.0;
  long long controlled_A_count = 0;

  CostLedger& operator+=(const CostLedger& o) {
    hamiltonian_time += o.hamiltonian_time;
    controlled_A_count += o.controlled_A_count;
    return *this;
  }
};

/// Cost of one channel step: r circuits of Hamiltonian time 2 S_s + 2 tau_s
/// and 2 (2 M_s + 1) controlled-A gates each, plus tau for the coherent step.
inline CostLedger step_cost(const FilterParams& p, const ChannelConfig& cfg) {
  CostLedger c;
  c.hamiltonian_time = cfg.segments * (2.0 * p.effective_radius() + 2.0 * p.tau_s) +
                       (cfg.include_coherent ? cfg.tau : 0.0);
  c.controlled_A_count = static_cast<long long>(cfg.segments) * 2LL * (2LL * p.M_s + 1LL);
  return c;
}

namespace detail {

/// Precomputed pieces of the circuit expressed in the eigenbasis of A, where
/// every controlled-A factor acts diagonally on the system register.
class CircuitFactors {
 public:
  CircuitFactors(const SpectralDecomposition& spec, const HermitianOperator& A, const FilterParams& p,
                 double tau_eff, const QuadratureGrid& grid)
      : n_(spec.dim()), theta_(0.5 * std::sqrt(tau_eff)) {
    const auto a_eig = hermitian_eig(A);
    q_ = a_eig.eigenvectors;
    alpha_ = a_eig.eigenvalues;
    up_ = q_.adjoint() * evolution_unitary(spec, -p.tau_s) * q_;
    um_ = q_.adjoint() * evolution_unitary(spec, p.tau_s) * q_;
    for (std::size_t l = 0; l < grid.size(); ++l) {
      const Complex f = f_time(grid.nodes[l], p);
      amp_.push_back(grid.weights[l] * std::abs(f));
      phase_.push_back(std::abs(f) > 0.0 ? std::polar(1.0, std::arg(f)) : Complex(1.0, 0.0));
    }
  }

  Eigen::Index dim() const { return n_; }
  std::size_t node_count() const { return amp_.size(); }
  const ComplexMatrix& basis() const { return q_; }

  /// X <- A~_l X for a 2N x k block in the A eigenbasis.
  void apply_controlled(std::size_t l, ComplexMatrix& x) const {
    const Eigen::Index n = n_;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double angle = theta_ * amp_[l] * alpha_(k);
      const double c = std::cos(angle);
      const Complex s_down = -kI * phase_[l] * std::sin(angle);
      const Complex s_up = -kI * std::conj(phase_[l]) * std::sin(angle);
      auto r0 = x.row(k);
      auto r1 = x.row(n + k);
      for (Eigen::Index col = 0; col < x.cols(); ++col) {
        const Complex x0 = r0(col);
        const Complex x1 = r1(col);
        r0(col) = c * x0 + s_up * x1;
        r1(col) = s_down * x0 + c * x1;
      }
    }
  }

  /// X <- (I x U) X for a 2N x k block.
  void apply_system(const ComplexMatrix& u, ComplexMatrix& x) const {
    x.topRows(n_) = (u * x.topRows(n_)).eval();
    x.bottomRows(n_) = (u * x.bottomRows(n_)).eval();
  }

  /// X <- W X, with W = R L, L = prod_{l=-M..M} (I x e^{-iH tau_s}) A~_l
  /// accumulated leftwards and R = prod_{l=-M..M} A~_l (I x e^{iH tau_s})
  /// accumulated rightwards.
  void apply_W(ComplexMatrix& x) const {
    const std::size_t m = node_count();
    for (std::size_t l = 0; l < m; ++l) {
      apply_controlled(l, x);
      apply_system(um_, x);
    }
    for (std::size_t l = m; l-- > 0;) {
      apply_system(up_, x);
      apply_controlled(l, x);
    }
  }

  ComplexMatrix to_local(const ComplexMatrix& x) const {
    ComplexMatrix y(x.rows(), x.cols());
    y.topRows(n_) = q_.adjoint() * x.topRows(n_);
    y.bottomRows(n_) = q_.adjoint() * x.bottomRows(n_);
    return y;
  }

  ComplexMatrix from_local(const ComplexMatrix& x) const {
    ComplexMatrix y(x.rows(), x.cols());
    y.topRows(n_) = q_ * x.topRows(n_);
    y.bottomRows(n_) = q_ * x.bottomRows(n_);
    return y;
  }

 private:
  Eigen::Index n_;
  double theta_;
  ComplexMatrix q_;
  RealVector alpha_;
  ComplexMatrix up_;  // e^{+iH tau_s} in the A basis
  ComplexMatrix um_;  // e^{-iH tau_s} in the A basis
  std::vector<double> amp_;
  std::vector<Complex> phase_;
};

inline void require_circuit_inputs(const SpectralDecomposition& spec, const HermitianOperator& A,
                                   double tau_eff) {
  if (spec.dim() != A.dim()) throw ContractViolation("circuit: Hamiltonian and coupling dimensions differ");
  if (!(tau_eff > 0.0) || !std::isfinite(tau_eff)) throw ContractViolation("circuit: tau_eff must be positive");
}

}  // namespace detail

/// W(sqrt(tau_eff)) as a dense 2N x 2N unitary, ancilla as leading qubit.
inline ComplexMatrix build_W(const SpectralDecomposition& spec, const HermitianOperator& A,
                             const FilterParams& p, double tau_eff) {
  detail::require_circuit_inputs(spec, A, tau_eff);
  const detail::CircuitFactors f(spec, A, p, tau_eff, quadrature_grid(p));
  const Eigen::Index n = spec.dim();
  ComplexMatrix x = f.to_local(ComplexMatrix::Identity(2 * n, 2 * n));
  f.apply_W(x);
  return f.from_local(x);
}

/// Controlled-A factor exp(-i (sqrt(tau_eff)/2) sigma_l x A) as a dense matrix.
inline ComplexMatrix controlled_factor(const HermitianOperator& A, const FilterParams& p, double s,
                                       double w, double tau_eff) {
  const auto a_eig = hermitian_eig(A);
  const Complex f = f_time(s, p);
  const double amp = w * std::abs(f);
  const Complex phase = std::abs(f) > 0.0 ? std::polar(1.0, std::arg(f)) : Complex(1.0, 0.0);
  const double theta = 0.5 * std::sqrt(tau_eff);
  const Eigen::Index n = A.dim();
  ComplexVector c(n), sn(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    c(k) = std::cos(theta * amp * a_eig.eigenvalues(k));
    sn(k) = std::sin(theta * amp * a_eig.eigenvalues(k));
  }
  const ComplexMatrix& q = a_eig.eigenvectors;
  const ComplexMatrix cos_a = q * c.asDiagonal() * q.adjoint();
  const ComplexMatrix sin_a = q * sn.asDiagonal() * q.adjoint();
  ComplexMatrix n_sigma(2, 2);
  n_sigma << 0.0, std::conj(phase), phase, 0.0;
  return kron(ComplexMatrix::Identity(2, 2), cos_a) - kI * kron(n_sigma, sin_a);
}

/// The time-ordered product before cancellation: the right-ordered product of
/// (I x e^{iHs_l}) A~_l (I x e^{-iHs_l}) times the left-ordered one. It equals
/// (I x e^{-iHS}) W (I x e^{iHS}) with S = M_s tau_s.
inline ComplexMatrix build_W_uncancelled(const SpectralDecomposition& spec, const HermitianOperator& A,
                                         const FilterParams& p, double tau_eff) {
  detail::require_circuit_inputs(spec, A, tau_eff);
  const QuadratureGrid grid = quadrature_grid(p);
  const Eigen::Index n = spec.dim();
  const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  std::vector<ComplexMatrix> g;
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const double s = grid.nodes[l];
    const ComplexMatrix fwd = kron(id2, evolution_unitary(spec, -s));
    const ComplexMatrix bwd = kron(id2, evolution_unitary(spec, s));
    g.push_back(fwd * controlled_factor(A, p, s, grid.weights[l], tau_eff) * bwd);
  }
  ComplexMatrix right = ComplexMatrix::Identity(2 * n, 2 * n);
  for (const auto& gl : g) right = right * gl;
  ComplexMatrix left = ComplexMatrix::Identity(2 * n, 2 * n);
  for (const auto& gl : g) left = gl * left;
  return right * left;
}

/// Jump operator in the frame the circuit realizes: e^{iHS} K e^{-iHS} with
/// S the effective truncation radius.
inline JumpOperator circuit_frame_jump(const JumpOperator& k, const SpectralDecomposition& spec) {
  const double S = k.params.effective_radius();
  const ComplexMatrix u = evolution_unitary(spec, -S);
  return JumpOperator{u * k.matrix * u.adjoint(), k.provenance, k.params};
}

/// Kraus pair of W^r on ancilla input |0>, from a dense W.
inline KrausPair channel_kraus(const ComplexMatrix& W, int r) {
  if (W.rows() != W.cols() || W.rows() % 2 != 0) throw ContractViolation("channel_kraus: W must be 2N x 2N");
  if (r < 1) throw ContractViolation("channel_kraus: r must be at least 1");
  const Eigen::Index n = W.rows() / 2;
  ComplexMatrix x = W.leftCols(n);
  for (int k = 1; k < r; ++k) x = (W * x).eval();
  return KrausPair::from_unitary_first_columns(x);
}

/// Kraus pair of W^r computed by sweeping the circuit factors over the N
/// columns that the |0> ancilla input selects, without forming W.
inline KrausPair circuit_kraus(const SpectralDecomposition& spec, const HermitianOperator& A,
                               const FilterParams& p, double tau_eff, int r,
                               const QuadratureGrid& grid) {
  detail::require_circuit_inputs(spec, A, tau_eff);
  if (r < 1) throw ContractViolation("circuit_kraus: r must be at least 1");
  const detail::CircuitFactors f(spec, A, p, tau_eff, grid);
  const Eigen::Index n = spec.dim();
  ComplexMatrix e0 = ComplexMatrix::Zero(2 * n, n);
  e0.topRows(n) = ComplexMatrix::Identity(n, n);
  ComplexMatrix x = f.to_local(e0);
  for (int k = 0; k < r; ++k) f.apply_W(x);
  return KrausPair::from_unitary_first_columns(f.from_local(x));
}

inline KrausPair circuit_kraus(const SpectralDecomposition& spec, const HermitianOperator& A,
                               const FilterParams& p, double tau_eff, int r) {
  return circuit_kraus(spec, A, p, tau_eff, r, quadrature_grid(p));
}

struct DensityStep {
  DensityMatrix rho;
  CostLedger cost;
  double trace_error = 0.0;
  bool flagged = false;
};

/// One channel step rho -> e^{-iH tau} Tr_a(W^r (|0><0| x rho) W^r^dagger) e^{iH tau}.
/// `kraus` must come from W built with tau_eff = cfg.tau_eff().
inline DensityStep channel_step_density(const DensityMatrix& rho, const KrausPair& kraus,
                                        const SpectralDecomposition& spec, const ChannelConfig& cfg,
                                        const FilterParams& p) {
  if (rho.dim() != spec.dim() || kraus.b0.rows() != spec.dim()) {
    throw ContractViolation("channel_step_density: dimension mismatch");
  }
  ComplexMatrix out = kraus.apply(rho.matrix());
  if (cfg.include_coherent) {
    const ComplexMatrix u = evolution_unitary(spec, cfg.tau);
    out = u * out * u.adjoint();
  }
  DensityStep step;
  step.trace_error = std::abs(out.trace().real() - 1.0);
  step.flagged = step.trace_error > 1e-8;
  step.rho = normalized_density(out);
  step.cost = step_cost(p, cfg);
  return step;
}

struct TrajectoryStep {
  ComplexVector psi;
  int outcome = 0;
  CostLedger cost;
};

/// Applies W^r to |0> x psi, samples the ancilla, keeps the collapsed system
/// state and then applies the coherent step. `coherent` is e^{-iH tau} or an
/// empty matrix when the coherent part is excluded.
inline TrajectoryStep trajectory_step(const ComplexVector& psi, const KrausPair& kraus,
                                      const ComplexMatrix& coherent, Rng& rng) {
  const double nrm = psi.norm();
  if (std::abs(nrm - 1.0) > 1e-9) throw ContractViolation("trajectory_step: state not normalized");
  ComplexVector phi0 = kraus.b0 * psi;
  const double p0 = phi0.squaredNorm();
  TrajectoryStep out;
  const double u = uniform01(rng);
  ComplexVector next;
  if (u < p0) {
    out.outcome = 0;
    next = std::move(phi0);
  } else {
    out.outcome = 1;
    next = kraus.b1 * psi;
  }
  const double n2 = next.norm();
  if (!(n2 > 1e-12)) {
    throw NumericalFailure("trajectory_step: branch probability underflow (norm " + std::to_string(n2) + ")");
  }
  next /= n2;
  out.psi = coherent.size() > 0 ? ComplexVector(coherent * next) : next;
  return out;
}

inline TrajectoryStep trajectory_step(const ComplexVector& psi, const KrausPair& kraus,
                                      const SpectralDecomposition& spec, const ChannelConfig& cfg,
                                      const FilterParams& p, Rng& rng) {
  const ComplexMatrix coherent = cfg.include_coherent ? evolution_unitary(spec, cfg.tau) : ComplexMatrix();
  TrajectoryStep s = trajectory_step(psi, kraus, coherent, rng);
  s.cost = step_cost(p, cfg);
  return s;
}

struct RecordRow {
  long step = 0;
  double time = 0.0;
  double h_time = 0.0;
  long long a_gates = 0;
  double energy_mean = 0.0;
  double energy_se = 0.0;
  double overlap_mean = 0.0;
  double overlap_se = 0.0;
};

struct SimulationRecord {
  ModelSpec model;
  ChannelConfig config;
  FilterParams params;
  double norm_H = 0.0;
  double gap = 0.0;
  double ground_energy = 0.0;
  double max_energy = 0.0;
  double initial_overlap = 0.0;
  Eigen::Index ground_multiplicity = 1;
  double max_trace_error = 0.0;
  long flagged_steps = 0;
  std::vector<std::string> warnings;
  std::vector<RecordRow> rows;

  const RecordRow& final_row() const { return rows.back(); }
};

/// Problem data shared by every trajectory of a run.
struct ResolvedProblem {
  HermitianOperator H;
  HermitianOperator A;
  SpectralDecomposition spec;
  FilterParams params;
};

inline ResolvedProblem resolve_problem(const ModelSpec& model) {
  ResolvedProblem r;
  r.H = build_hamiltonian(model);
  r.A = coupling_operator(model);
  r.spec = hermitian_eig(r.H);
  return r;
}

namespace detail {

inline bool is_record_step(long m, long total, int stride) { return m % stride == 0 || m == total; }

inline double sample_se(double sum, double sum_sq, int reps) {
  if (reps < 2) return 0.0;
  const double mean = sum / reps;
  const double var = std::max(0.0, (sum_sq - reps * mean * mean) / (reps - 1));
  return std::sqrt(var / reps);
}

}  // namespace detail

/// Runs the one-ancilla scheme from the highest excited eigenstate and records
/// energy and ground overlap. Trajectory results do not depend on the worker count.
inline SimulationRecord run_simulation(const ModelSpec& model, const ChannelConfig& cfg,
                                       const FilterParams& p, const ResolvedProblem& prob) {
  cfg.validate();
  p.validate();
  SimulationRecord rec;
  rec.model = model;
  rec.config = cfg;
  rec.params = p;
  const auto& spec = prob.spec;
  const Eigen::Index n = spec.dim();
  rec.norm_H = spec.norm();
  rec.gap = spec.gap;
  rec.ground_energy = spec.ground_energy();
  rec.max_energy = spec.max_energy();
  rec.ground_multiplicity = spec.ground_multiplicity();
  if (rec.ground_multiplicity > 1) {
    rec.warnings.push_back("ground space is " + std::to_string(rec.ground_multiplicity) +
                           "-fold degenerate; overlap is measured on the full ground space");
  }

  // Everything below runs in the energy basis of H.
  const KrausPair k = circuit_kraus(spec, prob.A, p, cfg.tau_eff(), cfg.segments);
  const KrausPair ke{spec.to_energy_basis(k.b0), spec.to_energy_basis(k.b1)};
  const ComplexVector phases = evolution_phases(spec, cfg.tau);
  const ComplexMatrix coherent = cfg.include_coherent ? ComplexMatrix(phases.asDiagonal()) : ComplexMatrix();
  const Eigen::Index g = rec.ground_multiplicity;
  const RealVector& lam = spec.eigenvalues;

  const long total = cfg.step_count();
  const CostLedger per_step = step_cost(p, cfg);
  std::vector<long> record_steps;
  for (long m = 0; m <= total; ++m) {
    if (detail::is_record_step(m, total, cfg.record_stride)) record_steps.push_back(m);
  }
  const std::size_t nrec = record_steps.size();
  std::vector<double> e_sum(nrec, 0.0), e_sq(nrec, 0.0), o_sum(nrec, 0.0), o_sq(nrec, 0.0);
  int reps_used = 1;

  if (cfg.backend == Backend::density) {
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    rho(n - 1, n - 1) = 1.0;
    std::size_t r = 0;
    for (long m = 0; m <= total; ++m) {
      if (m > 0) {
        ComplexMatrix next = ke.apply(rho);
        if (cfg.include_coherent) next = phases.asDiagonal() * next * phases.conjugate().asDiagonal();
        const double tr = next.trace().real();
        const double err = std::abs(tr - 1.0);
        rec.max_trace_error = std::max(rec.max_trace_error, err);
        if (err > 1e-8) ++rec.flagged_steps;
        rho = hermitian_part(next) / tr;
      }
      if (r < nrec && record_steps[r] == m) {
        const RealVector d = rho.diagonal().real();
        e_sum[r] = d.dot(lam);
        o_sum[r] = d.head(g).sum();
        ++r;
      }
    }
  } else {
    reps_used = cfg.reps;
    std::vector<std::vector<double>> energies(cfg.reps), overlaps(cfg.reps);
    parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t t) {
      Rng rng = make_stream(cfg.seed, t);
      ComplexVector psi = ComplexVector::Zero(n);
      psi(n - 1) = 1.0;
      auto& es = energies[t];
      auto& os = overlaps[t];
      es.reserve(nrec);
      os.reserve(nrec);
      std::size_t r = 0;
      for (long m = 0; m <= total; ++m) {
        if (m > 0) psi = trajectory_step(psi, ke, coherent, rng).psi;
        if (r < nrec && record_steps[r] == m) {
          const RealVector prob2 = psi.cwiseAbs2();
          es.push_back(prob2.dot(lam));
          os.push_back(prob2.head(g).sum());
          ++r;
        }
      }
    });
    for (int t = 0; t < cfg.reps; ++t) {
      for (std::size_t r = 0; r < nrec; ++r) {
        e_sum[r] += energies[t][r];
        e_sq[r] += energies[t][r] * energies[t][r];
        o_sum[r] += overlaps[t][r];
        o_sq[r] += overlaps[t][r] * overlaps[t][r];
      }
    }
  }

  rec.rows.reserve(nrec);
  for (std::size_t r = 0; r < nrec; ++r) {
    RecordRow row;
    row.step = record_steps[r];
    row.time = row.step * cfg.tau;
    row.h_time = row.step * per_step.hamiltonian_time;
    row.a_gates = row.step * per_step.controlled_A_count;
    row.energy_mean = e_sum[r] / reps_used;
    row.energy_se = detail::sample_se(e_sum[r], e_sq[r], reps_used);
    row.overlap_mean = o_sum[r] / reps_used;
    row.overlap_se = detail::sample_se(o_sum[r], o_sq[r], reps_used);
    rec.rows.push_back(row);
  }
  rec.initial_overlap = rec.rows.front().overlap_mean;
  return rec;
}

inline SimulationRecord run_simulation(const ModelSpec& model, const ChannelConfig& cfg, const FilterParams& p) {
  return run_simulation(model, cfg, p, resolve_problem(model));
}

/// Default filter for a model from its spectral data.
inline FilterParams model_default_params(const ResolvedProblem& prob) {
  return default_params(prob.spec.norm(), prob.spec.gap);
}

/// First recorded row whose mean overlap reaches `threshold`, or nullptr.
inline const RecordRow* first_reaching(const SimulationRecord& rec, double threshold) {
  for (const auto& row : rec.rows) {
    if (row.overlap_mean >= threshold) return &row;
  }
  return nullptr;
}

}  // namespace lindground
