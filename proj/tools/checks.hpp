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

// Named numerical checks shared by `lindground verify` and the acceptance
// runner. Each check builds its own instance, measures one quantity and
// compares it with a fixed bound.

#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lindground/circuit.hpp"
#include "lindground/randomcoupling.hpp"
#include "lindground/studies.hpp"

namespace lindground::checks {

struct Fault {
  bool quadrature_sign = false;  // negate every quadrature weight
};

struct CheckResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::string measured;
  std::string bound;
  double seconds = 0.0;
};

struct Check {
  std::string id;
  std::string title;
  std::function<CheckResult(const Fault&)> run;
};

namespace detail {

inline std::string num(double v) {
  std::ostringstream o;
  o.precision(4);
  o << v;
  return o.str();
}

inline CheckResult result(bool ok, std::string measured, std::string bound) {
  CheckResult r;
  r.passed = ok;
  r.measured = std::move(measured);
  r.bound = std::move(bound);
  return r;
}

inline QuadratureGrid grid_for(const FilterParams& p, const Fault& fault) {
  QuadratureGrid g = quadrature_grid(p);
  if (fault.quadrature_sign) {
    for (double& w : g.weights) w = -w;
  }
  return g;
}

/// Deterministic pseudo-random density matrix.
inline DensityMatrix random_state(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return normalized_density(m * m.adjoint());
}

inline ChannelConfig channel(double tau, double T, int r, Backend backend, int reps, std::uint64_t seed) {
  ChannelConfig c;
  c.tau = tau;
  c.total_time = T;
  c.segments = r;
  c.mode = (r > 1 || tau >= 0.5) ? ChannelMode::discrete : ChannelMode::continuous;
  c.backend = backend;
  c.reps = reps;
  c.seed = seed;
  return c;
}

inline RealVector unit(Eigen::Index n, Eigen::Index k) {
  RealVector e = RealVector::Zero(n);
  e(k) = 1.0;
  return e;
}

}  // namespace detail

// ---- acceptance criteria -------------------------------------------------

inline CheckResult tfim4_continuous(const Fault&) {
  const ModelSpec model = ModelSpec::tfim(4, 1.2);
  const auto prob = resolve_problem(model);
  const auto rec = run_simulation(model, detail::channel(0.1, 80.0, 1, Backend::trajectory, 100, 2026),
                                  model_default_params(prob), prob);
  const auto& last = rec.final_row();
  const double de = std::abs(last.energy_mean - rec.ground_energy);
  return detail::result(last.overlap_mean >= 0.9 && de <= 0.1 * rec.gap,
                        "overlap " + detail::num(last.overlap_mean) + " +- " + detail::num(last.overlap_se) +
                            ", |E - E0| " + detail::num(de),
                        "overlap >= 0.9, |E - E0| <= " + detail::num(0.1 * rec.gap));
}

inline CheckResult discrete_cost(const Fault&) {
  const ModelSpec model = ModelSpec::tfim(4, 1.2);
  const auto prob = resolve_problem(model);
  const auto p = model_default_params(prob);
  const auto cont = run_simulation(model, detail::channel(0.1, 80.0, 1, Backend::density, 1, 0), p, prob);
  const auto disc = run_simulation(model, detail::channel(1.0, 80.0, 1, Backend::density, 1, 0), p, prob);
  const RecordRow* rc = first_reaching(cont, 0.9);
  const RecordRow* rd = first_reaching(disc, 0.9);
  if (!rc || !rd) {
    return detail::result(false, std::string("overlap 0.9 not reached by the ") + (!rc ? "continuous" : "discrete") + " run",
                          "both runs reach 0.9");
  }
  const double ratio = rd->h_time / rc->h_time;
  return detail::result(ratio <= 0.2,
                        "h_time at 0.9: discrete " + detail::num(rd->h_time) + ", continuous " +
                            detail::num(rc->h_time) + ", ratio " + detail::num(ratio),
                        "ratio <= 0.2");
}

inline CheckResult hubbard4_discrete(const Fault&) {
  const ModelSpec model = ModelSpec::hubbard(4, 1.0, 4.0);
  const auto prob = resolve_problem(model);
  auto cfg = detail::channel(0.5, 100.0, 2, Backend::trajectory, 100, 2026);
  cfg.record_stride = 10;
  const auto rec = run_simulation(model, cfg, model_default_params(prob), prob);
  const auto& last = rec.final_row();
  return detail::result(last.overlap_mean >= 0.85,
                        "overlap " + detail::num(last.overlap_mean) + " +- " + detail::num(last.overlap_se),
                        "overlap >= 0.85");
}

inline CheckResult dilation_slope(const Fault&) {
  const auto prob = resolve_problem(ModelSpec::tfim(2, 1.2));
  const auto k = exact_jump(prob.spec, prob.A, model_default_params(prob));
  Rng rng = make_stream(4, 0);
  const auto s = dilation_error_series(k, detail::random_state(4, rng), log_spaced(1e-3, 1e-1, 5));
  const double slope = s.slope();
  return detail::result(std::abs(slope - 2.0) <= 0.2, "slope " + detail::num(slope), "2.0 +- 0.2");
}

inline CheckResult quadrature_error(const Fault& fault) {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const auto p = model_default_params(prob);
  const auto q = quadrature_study(prob, p, detail::grid_for(p, fault));
  return detail::result(q.exact_vs_quadrature <= 1e-3 * q.coupling_norm,
                        "|K - K_s| " + detail::num(q.exact_vs_quadrature),
                        "<= " + detail::num(1e-3 * q.coupling_norm));
}

inline CheckResult quadrature_saturation(const Fault& fault) {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const auto p = model_default_params(prob);
  const auto q = quadrature_study(prob, p, detail::grid_for(p, fault));
  return detail::result(q.doubling_change <= 1e-6, "|K_s(2S) - K_s(S)| " + detail::num(q.doubling_change), "<= 1e-06");
}

inline CheckResult quadrature_convergence(const Fault& fault) {
  const CheckResult a = quadrature_error(fault);
  const CheckResult b = quadrature_saturation(fault);
  return detail::result(a.passed && b.passed, a.measured + "; " + b.measured, a.bound + "; " + b.bound);
}

inline CheckResult cancellation(const Fault&) {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const double d = cancellation_defect(prob, model_default_params(prob), 0.1);
  return detail::result(d <= 1e-10, "max |W - frame * naive * frame^+| " + detail::num(d), "<= 1e-10");
}

inline CheckResult trotter_slope(const Fault&) {
  const auto prob = resolve_problem(ModelSpec::tfim(2, 1.2));
  Rng rng = make_stream(7, 0);
  const auto s = channel_trotter_error_series(prob, model_default_params(prob), detail::random_state(4, rng),
                                              log_spaced(1e-3, 1e-1, 5));
  const double slope = s.slope();
  return detail::result(std::abs(slope - 2.0) <= 0.25, "slope " + detail::num(slope), "2.0 +- 0.25");
}

inline CheckResult global_slope(const Fault&) {
  const auto prob = resolve_problem(ModelSpec::tfim(2, 1.2));
  Rng rng = make_stream(8, 0);
  const auto s = global_error_series(prob, model_default_params(prob), detail::random_state(4, rng), 2.0,
                                     {0.1, 0.05, 0.025, 0.0125});
  const double slope = s.slope();
  return detail::result(std::abs(slope - 1.0) <= 0.25, "slope " + detail::num(slope), "1.0 +- 0.25");
}

inline CheckResult cptp(const Fault&) {
  double worst_trace = 0.0, worst_min = 1.0, worst_excess = -1.0;
  Rng rng = make_stream(9, 0);
  for (const auto& m : {ModelSpec::tfim(2, 1.2), ModelSpec::tfim(4, 1.2)}) {
    const auto prob = resolve_problem(m);
    const auto p = model_default_params(prob);
    const Eigen::Index n = prob.spec.dim();
    for (const auto& cfg : {detail::channel(0.1, 0.1, 1, Backend::density, 1, 0),
                            detail::channel(1.0, 1.0, 2, Backend::density, 1, 0)}) {
      const KrausPair k = circuit_kraus(prob.spec, prob.A, p, cfg.tau_eff(), cfg.segments);
      for (int pair = 0; pair < 50; ++pair) {
        const DensityMatrix a = detail::random_state(n, rng), b = detail::random_state(n, rng);
        const auto sa = channel_step_density(a, k, prob.spec, cfg, p);
        const auto sb = channel_step_density(b, k, prob.spec, cfg, p);
        worst_trace = std::max({worst_trace, sa.trace_error, sb.trace_error});
        worst_min = std::min({worst_min, sa.rho.min_eigenvalue(), sb.rho.min_eigenvalue()});
        worst_excess = std::max(worst_excess, trace_distance(sa.rho.matrix(), sb.rho.matrix()) -
                                                  trace_distance(a.matrix(), b.matrix()));
      }
    }
  }
  return detail::result(worst_trace <= 1e-9 && worst_min >= -1e-8 && worst_excess <= 1e-9,
                        "trace error " + detail::num(worst_trace) + ", min eigenvalue " + detail::num(worst_min) +
                            ", distance change " + detail::num(worst_excess),
                        "<= 1e-9, >= -1e-8, <= 1e-9");
}

inline CheckResult ergodicity(const Fault&) {
  ErgodicityConfig cfg;
  cfg.spectrum = equispaced_spectrum(8);
  cfg.params = default_params(cfg.spectrum.norm(), cfg.spectrum.gap).with_clamp(true);
  cfg.sigma = RealMatrix::Constant(8, 8, 0.01);
  cfg.p0 = RealVector::Constant(8, 1.0 / 8.0);
  cfg.reps = 500;
  cfg.tau = 0.01;
  cfg.total_time = 40.0;
  cfg.checkpoints = 10;
  cfg.seed = 2026;
  const auto rep = ergodicity_experiment(cfg);
  return detail::result(rep.max_z <= 3.0 && rep.stationary_deviation <= 1e-6,
                        "max z " + detail::num(rep.max_z) + " (max |dev| " + detail::num(rep.max_abs_deviation) +
                            "), stationary deviation " + detail::num(rep.stationary_deviation),
                        "z <= 3, stationary <= 1e-6");
}

inline CheckResult concentration(const Fault&) {
  ConcentrationConfig cfg;
  cfg.spectrum = equispaced_spectrum(4);
  cfg.params = default_params(cfg.spectrum.norm(), cfg.spectrum.gap).with_clamp(true);
  cfg.sigma = RealMatrix::Constant(4, 4, 1.0);
  cfg.p0 = detail::unit(4, 3);
  cfg.taus = {0.1, 0.05, 0.025, 0.0125};
  cfg.total_time = 1.0;
  cfg.reps = 200;
  cfg.seed = 2026;
  const auto rep = concentration_experiment(cfg);
  return detail::result(rep.slope >= 0.4 && rep.slope <= 0.7, "slope " + detail::num(rep.slope), "[0.4, 0.7]");
}

inline CheckResult fixed_point(const Fault&) {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const auto p = model_default_params(prob);
  const auto cfg = detail::channel(1.0, 100.0, 1, Backend::density, 1, 0);
  const KrausPair k = circuit_kraus(prob.spec, prob.A, p, cfg.tau_eff(), cfg.segments);
  const DensityMatrix g = DensityMatrix::pure(prob.spec.state(0));
  DensityMatrix rho = g;
  double worst = 0.0;
  for (int m = 0; m < 100; ++m) {
    rho = channel_step_density(rho, k, prob.spec, cfg, p).rho;
    worst = std::max(worst, trace_distance(rho.matrix(), g.matrix()));
  }
  return detail::result(worst <= 2e-2, "max trace distance " + detail::num(worst), "<= 2e-2");
}

inline std::vector<Check> acceptance_criteria() {
  return {
      {"c01", "TFIM-4 continuous run reaches the ground state", tfim4_continuous},
      {"c02", "discrete scheme saves Hamiltonian time", discrete_cost},
      {"c03", "Hubbard-4 discrete run reaches the ground state", hubbard4_discrete},
      {"c04", "dilated step error is second order", dilation_slope},
      {"c05", "quadrature jump converges and saturates", quadrature_convergence},
      {"c06", "cancelled and naive W agree", cancellation},
      {"c07", "channel Trotter error is second order", trotter_slope},
      {"c08", "composed scheme converges at first order", global_slope},
      {"c09", "channel steps are CPTP and contractive", cptp},
      {"c10", "random-coupling populations follow the transition matrix", ergodicity},
      {"c11", "single-trajectory deviation scales as sqrt(tau)", concentration},
      {"c12", "ground state is stable under 100 unit steps", fixed_point},
  };
}

// ---- extra verification checks --------------------------------------------

inline CheckResult eigensolver(const Fault&) {
  Rng rng = make_stream(11, 0);
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(16, 16);
  for (Eigen::Index i = 0; i < 16; ++i)
    for (Eigen::Index j = 0; j < 16; ++j) m(i, j) = Complex(g(rng), g(rng));
  const HermitianOperator h(hermitian_part(m));
  const auto spec = hermitian_eig(h);
  const double res = (h.matrix() * spec.eigenvectors -
                      spec.eigenvectors * spec.eigenvalues.cast<Complex>().asDiagonal())
                         .norm();
  return detail::result(res <= 1e-10, "residual " + detail::num(res), "<= 1e-10");
}

inline CheckResult fourier_pair(const Fault&) {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const auto p = model_default_params(prob);
  const double lo = -p.a - 8.0 * p.delta_a, hi = std::max(-p.b + 8.0 * p.delta_b, -p.a + 8.0 * p.delta_a);
  const int n = 40000;
  const double h = (hi - lo) / n;
  double worst = 0.0;
  for (double s : {-3.0, -0.5, 0.0, 1.0, 2.0, 4.5}) {
    Complex acc = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = lo + k * h;
      const double wt = (k == 0 || k == n) ? 0.5 : 1.0;
      acc += wt * f_hat(w, p) * std::exp(-kI * (w * s));
    }
    acc *= h / (2.0 * std::numbers::pi);
    worst = std::max(worst, std::abs(acc - f_time(s, p)));
  }
  return detail::result(worst <= 1e-6, "max |f - F^-1 f_hat| " + detail::num(worst), "<= 1e-6");
}

inline CheckResult clamped_residual(const Fault&) {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const double r = ground_residual(exact_jump(prob.spec, prob.A, model_default_params(prob).with_clamp(true)),
                                   prob.spec);
  return detail::result(r <= 1e-12, "|K psi_0| " + detail::num(r), "<= 1e-12");
}

inline CheckResult ode_oracle(const Fault&) {
  const auto prob = resolve_problem(ModelSpec::tfim(2, 1.2));
  const auto k = quadrature_jump(prob.spec, prob.A, model_default_params(prob));
  const LindbladSystem sys{prob.H, k, true};
  Rng rng = make_stream(12, 0);
  const DensityMatrix rho0 = detail::random_state(4, rng);
  const double d = max_abs(evolve_ode(sys, rho0, 1.0, 1e-3).matrix() - superoperator_evolve(sys, rho0, 1.0).matrix());
  return detail::result(d <= 1e-8, "max |RK4 - expm| " + detail::num(d), "<= 1e-8");
}

inline CheckResult unitarity(const Fault&) {
  double worst = 0.0;
  for (const auto& m : {ModelSpec::tfim(4, 1.2), ModelSpec::hubbard(2, 1.0, 4.0)}) {
    const auto prob = resolve_problem(m);
    const ComplexMatrix w = build_W(prob.spec, prob.A, model_default_params(prob), 0.25);
    worst = std::max(worst, max_abs(w.adjoint() * w - ComplexMatrix::Identity(w.rows(), w.cols())));
  }
  return detail::result(worst <= 1e-10, "max |W^+ W - I| " + detail::num(worst), "<= 1e-10");
}

inline CheckResult generator_property(const Fault&) {
  const auto spec = random_spectrum(8, 4.0, 13);
  const auto t = transition_matrix(spec, default_params(spec.norm(), spec.gap).with_clamp(true),
                                   RealMatrix::Constant(8, 8, 0.5));
  double worst = 0.0;
  bool triangular = true;
  for (Eigen::Index i = 0; i < 8; ++i) {
    worst = std::max(worst, std::abs(t.rates.col(i).sum()));
    for (Eigen::Index j = i + 1; j < 8; ++j) triangular = triangular && t.rates(j, i) == 0.0;
  }
  return detail::result(worst <= 1e-12 && triangular,
                        "max |column sum| " + detail::num(worst) + (triangular ? ", triangular" : ", not triangular"),
                        "<= 1e-12, triangular");
}

inline CheckResult density_vs_trajectory(const Fault&) {
  const ModelSpec model = ModelSpec::tfim(2, 1.2);
  const auto prob = resolve_problem(model);
  const auto p = model_default_params(prob);
  auto d = detail::channel(0.1, 3.0, 1, Backend::density, 1, 0);
  auto t = detail::channel(0.1, 3.0, 1, Backend::trajectory, 2000, 31);
  d.record_stride = t.record_stride = 10;
  const auto a = run_simulation(model, d, p, prob);
  const auto b = run_simulation(model, t, p, prob);
  double worst = 0.0;
  for (std::size_t r = 1; r < a.rows.size(); ++r) {
    worst = std::max(worst, std::abs(a.rows[r].overlap_mean - b.rows[r].overlap_mean) / b.rows[r].overlap_se);
    worst = std::max(worst, std::abs(a.rows[r].energy_mean - b.rows[r].energy_mean) / b.rows[r].energy_se);
  }
  return detail::result(worst <= 3.0, "max z " + detail::num(worst), "<= 3");
}

inline std::vector<Check> fast_checks() {
  return {
      {"linalg.eigensolver", "eigendecomposition residual", eigensolver},
      {"filter.fourier_pair", "time-domain filter is the inverse transform", fourier_pair},
      {"jump.quadrature_error", "quadrature jump approximates the exact jump", quadrature_error},
      {"jump.quadrature_saturation", "doubling the quadrature radius leaves K_s unchanged", quadrature_saturation},
      {"jump.clamped_residual", "clamped jump annihilates the ground state", clamped_residual},
      {"reference.ode_oracle", "RK4 agrees with the superoperator exponential", ode_oracle},
      {"reference.dilation_slope", "dilated step error is second order", dilation_slope},
      {"circuit.unitarity", "W is unitary", unitarity},
      {"circuit.cancellation", "cancelled and naive W agree", cancellation},
      {"circuit.trotter_slope", "channel Trotter error is second order", trotter_slope},
      {"circuit.cptp", "channel steps are CPTP and contractive", cptp},
      {"circuit.fixed_point", "ground state is stable under 100 unit steps", fixed_point},
      {"circuit.trajectory_unbiased", "trajectory means match the density backend", density_vs_trajectory},
      {"randomcoupling.generator", "transition matrix is a triangular generator", generator_property},
  };
}

inline std::vector<Check> full_checks() {
  std::vector<Check> out = fast_checks();
  out.push_back({"circuit.global_slope", "composed scheme converges at first order", global_slope});
  out.push_back({"circuit.tfim4_continuous", "TFIM-4 continuous run reaches the ground state", tfim4_continuous});
  out.push_back({"circuit.discrete_cost", "discrete scheme saves Hamiltonian time", discrete_cost});
  out.push_back({"circuit.hubbard4_discrete", "Hubbard-4 discrete run reaches the ground state", hubbard4_discrete});
  out.push_back({"randomcoupling.ergodicity", "populations follow the transition matrix", ergodicity});
  out.push_back({"randomcoupling.concentration", "deviation scales as sqrt(tau)", concentration});
  return out;
}

inline CheckResult run_check(const Check& c, const Fault& fault) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = c.run(fault);
  } catch (const std::exception& e) {
    r = detail::result(false, std::string("exception: ") + e.what(), "no exception");
  }
  r.id = c.id;
  r.title = c.title;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace lindground::checks
