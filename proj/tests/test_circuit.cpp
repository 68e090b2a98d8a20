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

#include <cstdlib>
#include <random>

#include <catch_amalgamated.hpp>

#include "lindground/circuit.hpp"
#include "lindground/studies.hpp"
#include "oracles.hpp"

using namespace lindground;

namespace {

ChannelConfig make_config(double tau, double T, int r = 1, Backend backend = Backend::density, int reps = 1) {
  ChannelConfig cfg;
  cfg.tau = tau;
  cfg.total_time = T;
  cfg.segments = r;
  cfg.mode = r > 1 || tau >= 0.5 ? ChannelMode::discrete : ChannelMode::continuous;
  cfg.backend = backend;
  cfg.reps = reps;
  cfg.seed = 1234;
  return cfg;
}

double unitarity_defect(const ComplexMatrix& w) {
  return max_abs(w.adjoint() * w - ComplexMatrix::Identity(w.rows(), w.cols()));
}

/// Repeated channel application in the computational basis.
DensityMatrix repeat_channel(const ResolvedProblem& prob, const FilterParams& p, const ChannelConfig& cfg,
                             DensityMatrix rho, long steps) {
  const KrausPair k = circuit_kraus(prob.spec, prob.A, p, cfg.tau_eff(), cfg.segments);
  for (long m = 0; m < steps; ++m) rho = channel_step_density(rho, k, prob.spec, cfg, p).rho;
  return rho;
}

class ScopedThreads {
 public:
  explicit ScopedThreads(const char* value) {
    if (const char* old = std::getenv(kThreadsEnv)) saved_ = old, had_ = true;
    ::setenv(kThreadsEnv, value, 1);
  }
  ~ScopedThreads() {
    if (had_) {
      ::setenv(kThreadsEnv, saved_.c_str(), 1);
    } else {
      ::unsetenv(kThreadsEnv);
    }
  }

 private:
  std::string saved_;
  bool had_ = false;
};

}  // namespace

TEST_CASE("W with a zero coupling is the identity", "[circuit]") {
  const auto prob = resolve_problem(ModelSpec::tfim(3, 1.2));
  const auto p = model_default_params(prob);
  const auto zero = HermitianOperator::zero(8);
  CHECK(max_abs(build_W(prob.spec, zero, p, 0.1) - ComplexMatrix::Identity(16, 16)) <= 1e-10);
  std::mt19937_64 rng(1);
  const DensityMatrix rho(oracle::random_density(8, rng));
  auto cfg = make_config(0.1, 0.1);
  cfg.include_coherent = false;
  const KrausPair k = circuit_kraus(prob.spec, zero, p, 0.1, 1);
  CHECK(max_abs(channel_step_density(rho, k, prob.spec, cfg, p).rho.matrix() - rho.matrix()) <= 1e-10);
}

TEST_CASE("cancellation identity on a four-qubit instance", "[circuit]") {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const double defect = cancellation_defect(prob, model_default_params(prob), 0.1);
  INFO("defect " << defect);
  CHECK(defect <= 1e-10);
}

TEST_CASE("controlled factors are unitary and match the Pade exponential", "[circuit]") {
  std::mt19937_64 rng(2);
  const HermitianOperator a(oracle::random_hermitian(3, rng));
  const auto p = default_params(2.0, 0.5);
  for (double s : {-1.3, 0.0, 0.7}) {
    const ComplexMatrix g = controlled_factor(a, p, s, 0.2, 0.09);
    CHECK(unitarity_defect(g) <= 1e-12);
    const Complex f = f_time(s, p);
    ComplexMatrix sigma(2, 2);
    sigma << 0.0, 0.2 * std::conj(f), 0.2 * f, 0.0;
    const ComplexMatrix gen = kron(sigma, a.matrix());
    CHECK(max_abs(g - oracle::expm(-kI * (0.5 * std::sqrt(0.09)) * gen)) <= 1e-12);
  }
}

TEST_CASE("W is unitary on the model instances", "[circuit]") {
  for (const auto& m : {ModelSpec::tfim(2, 1.2), ModelSpec::tfim(4, 1.2), ModelSpec::hubbard(2, 1.0, 4.0)}) {
    const auto prob = resolve_problem(m);
    for (double tau_eff : {0.01, 0.25, 1.0}) {
      CHECK(unitarity_defect(build_W(prob.spec, prob.A, model_default_params(prob), tau_eff)) <= 1e-10);
    }
  }
}

TEST_CASE("block Kraus sweep equals powers of the full W", "[circuit]") {
  const auto prob = resolve_problem(ModelSpec::tfim(3, 1.2));
  const auto p = model_default_params(prob);
  for (int r : {1, 2, 3}) {
    const double tau_eff = 1.0 / (r * r);
    const ComplexMatrix w = build_W(prob.spec, prob.A, p, tau_eff);
    const KrausPair a = channel_kraus(w, r);
    const KrausPair b = circuit_kraus(prob.spec, prob.A, p, tau_eff, r);
    CHECK(max_abs(a.b0 - b.b0) <= 1e-10);
    CHECK(max_abs(a.b1 - b.b1) <= 1e-10);
    const ComplexMatrix completeness = b.b0.adjoint() * b.b0 + b.b1.adjoint() * b.b1;
    CHECK(max_abs(completeness - ComplexMatrix::Identity(8, 8)) <= 1e-10);
  }
  CHECK_THROWS_AS(channel_kraus(ComplexMatrix::Identity(3, 3), 1), ContractViolation);
  CHECK_THROWS_AS(circuit_kraus(prob.spec, prob.A, p, 0.0, 1), ContractViolation);
}

TEST_CASE("W implements the frame-shifted dilated jump at leading order", "[circuit]") {
  const auto prob = resolve_problem(ModelSpec::tfim(2, 1.2));
  const auto p = model_default_params(prob);
  const JumpOperator ks = circuit_frame_jump(quadrature_jump(prob.spec, prob.A, p), prob.spec);
  const double tau = 1e-4;
  const ComplexMatrix w = build_W(prob.spec, prob.A, p, tau);
  const ComplexMatrix gen = (ComplexMatrix::Identity(8, 8) - w) / (kI * std::sqrt(tau));
  CHECK(max_abs(gen - dilate(ks).matrix) <= 1e-2 * std::max(1.0, max_abs(ks.matrix)));
}

TEST_CASE("channel-level Trotter error is second order on TFIM-2", "[circuit]") {
  const auto prob = resolve_problem(ModelSpec::tfim(2, 1.2));
  std::mt19937_64 rng(3);
  const DensityMatrix rho(oracle::random_density(4, rng));
  const auto series = channel_trotter_error_series(prob, model_default_params(prob), rho, log_spaced(1e-3, 1e-1, 5));
  INFO("slope " << series.slope());
  CHECK(std::abs(series.slope() - 2.0) <= 0.25);
}

TEST_CASE("composed scheme converges to the modified dynamics at first order", "[circuit]") {
  const auto prob = resolve_problem(ModelSpec::tfim(2, 1.2));
  std::mt19937_64 rng(4);
  const DensityMatrix rho0(oracle::random_density(4, rng));
  const auto series =
      global_error_series(prob, model_default_params(prob), rho0, 2.0, {0.1, 0.05, 0.025, 0.0125});
  INFO("slope " << series.slope());
  CHECK(std::abs(series.slope() - 1.0) <= 0.25);
}

TEST_CASE("channel steps preserve trace and positivity and contract", "[circuit]") {
  std::mt19937_64 rng(5);
  for (const auto& m : {ModelSpec::tfim(2, 1.2), ModelSpec::tfim(3, 0.8)}) {
    const auto prob = resolve_problem(m);
    const auto p = model_default_params(prob);
    const Eigen::Index n = prob.spec.dim();
    for (const auto& cfg : {make_config(0.1, 0.1), make_config(1.0, 1.0, 2)}) {
      const KrausPair k = circuit_kraus(prob.spec, prob.A, p, cfg.tau_eff(), cfg.segments);
      for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix a(oracle::random_density(n, rng)), b(oracle::random_density(n, rng));
        const auto sa = channel_step_density(a, k, prob.spec, cfg, p);
        const auto sb = channel_step_density(b, k, prob.spec, cfg, p);
        CHECK(sa.trace_error <= 1e-9);
        CHECK_FALSE(sa.flagged);
        CHECK(sa.rho.min_eigenvalue() >= -1e-8);
        CHECK(trace_distance(sa.rho.matrix(), sb.rho.matrix()) <= trace_distance(a.matrix(), b.matrix()) + 1e-9);
      }
    }
  }
}

TEST_CASE("ground state is an approximate fixed point of one channel step", "[circuit]") {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const auto p = model_default_params(prob);
  const DensityMatrix g = DensityMatrix::pure(prob.spec.state(0));
  for (const auto& cfg : {make_config(0.1, 0.1), make_config(1.0, 1.0), make_config(1.0, 1.0, 2)}) {
    const DensityMatrix out = repeat_channel(prob, p, cfg, g, 1);
    CHECK(trace_norm(out.matrix() - g.matrix()) <= 1e-2);
  }
}

TEST_CASE("discrete scheme keeps the ground state for 100 unit steps", "[circuit]") {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const auto p = model_default_params(prob);
  const DensityMatrix g = DensityMatrix::pure(prob.spec.state(0));
  const DensityMatrix out = repeat_channel(prob, p, make_config(1.0, 100.0), g, 100);
  const double d = trace_distance(out.matrix(), g.matrix());
  INFO("trace distance " << d);
  CHECK(d <= 2e-2);
}

TEST_CASE("trajectory step with W = I is pure Hamiltonian evolution", "[circuit]") {
  const auto prob = resolve_problem(ModelSpec::tfim(3, 1.2));
  const auto p = model_default_params(prob);
  const KrausPair id{ComplexMatrix::Identity(8, 8), ComplexMatrix::Zero(8, 8)};
  const auto cfg = make_config(0.3, 0.3);
  std::mt19937_64 gen(6);
  ComplexVector psi = oracle::random_matrix(8, gen).col(0);
  psi.normalize();
  Rng rng = make_stream(7, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto step = trajectory_step(psi, id, prob.spec, cfg, p, rng);
    CHECK(step.outcome == 0);
    CHECK((step.psi - evolution_unitary(prob.spec, 0.3) * psi).norm() <= 1e-12);
  }
  CHECK_THROWS_AS(trajectory_step(2.0 * psi, id, prob.spec, cfg, p, rng), ContractViolation);
}

TEST_CASE("ancilla outcome from the ground state is almost always zero", "[circuit]") {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const auto p = model_default_params(prob);
  for (const auto& cfg : {make_config(0.1, 0.1), make_config(1.0, 1.0)}) {
    const KrausPair k = circuit_kraus(prob.spec, prob.A, p, cfg.tau_eff(), cfg.segments);
    const double p0 = (k.b0 * prob.spec.state(0)).squaredNorm();
    INFO("P(0) = " << p0);
    CHECK(p0 >= 1.0 - 1e-2);
  }
}

TEST_CASE("trajectory averages reproduce the density backend", "[circuit]") {
  const ModelSpec model = ModelSpec::tfim(2, 1.2);
  const auto prob = resolve_problem(model);
  const auto p = model_default_params(prob);
  auto dcfg = make_config(0.1, 3.0);
  dcfg.record_stride = 5;
  auto tcfg = make_config(0.1, 3.0, 1, Backend::trajectory, 2000);
  tcfg.record_stride = 5;
  const auto dens = run_simulation(model, dcfg, p, prob);
  const auto traj = run_simulation(model, tcfg, p, prob);
  REQUIRE(dens.rows.size() == traj.rows.size());
  for (std::size_t r = 0; r < dens.rows.size(); ++r) {
    const auto& a = dens.rows[r];
    const auto& b = traj.rows[r];
    INFO("step " << a.step);
    CHECK(std::abs(a.energy_mean - b.energy_mean) <= 3.0 * b.energy_se + 1e-12);
    CHECK(std::abs(a.overlap_mean - b.overlap_mean) <= 3.0 * b.overlap_se + 1e-12);
  }
}

TEST_CASE("trajectory output does not depend on the worker count", "[circuit]") {
  const ModelSpec model = ModelSpec::tfim(3, 1.2);
  const auto prob = resolve_problem(model);
  const auto p = model_default_params(prob);
  const auto cfg = make_config(0.2, 4.0, 1, Backend::trajectory, 24);
  SimulationRecord one, four;
  {
    ScopedThreads t("1");
    one = run_simulation(model, cfg, p, prob);
  }
  {
    ScopedThreads t("4");
    four = run_simulation(model, cfg, p, prob);
  }
  REQUIRE(one.rows.size() == four.rows.size());
  for (std::size_t r = 0; r < one.rows.size(); ++r) {
    CHECK(one.rows[r].energy_mean == four.rows[r].energy_mean);
    CHECK(one.rows[r].energy_se == four.rows[r].energy_se);
    CHECK(one.rows[r].overlap_mean == four.rows[r].overlap_mean);
    CHECK(one.rows[r].overlap_se == four.rows[r].overlap_se);
  }
}

TEST_CASE("density backend runs are bit-reproducible", "[circuit]") {
  const ModelSpec model = ModelSpec::tfim(3, 1.2);
  const auto prob = resolve_problem(model);
  const auto p = model_default_params(prob);
  const auto cfg = make_config(0.5, 10.0);
  const auto a = run_simulation(model, cfg, p, prob);
  const auto b = run_simulation(model, cfg, p, prob);
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    CHECK(a.rows[r].energy_mean == b.rows[r].energy_mean);
    CHECK(a.rows[r].overlap_mean == b.rows[r].overlap_mean);
  }
}

TEST_CASE("cost ledger for the TFIM-4 continuous protocol", "[circuit]") {
  const ModelSpec model = ModelSpec::tfim(4, 1.2);
  const auto prob = resolve_problem(model);
  const auto p = model_default_params(prob);
  auto cfg = make_config(0.1, 80.0);
  cfg.record_stride = 100;
  REQUIRE(cfg.step_count() == 800);
  const auto rec = run_simulation(model, cfg, p, prob);
  const auto& last = rec.final_row();
  CHECK(last.step == 800);
  const double per_step = 2.0 * p.M_s * p.tau_s + 2.0 * p.tau_s + 0.1;
  CHECK(last.h_time == Catch::Approx(800.0 * per_step).epsilon(1e-12));
  CHECK(last.a_gates == 800LL * 2 * (2 * p.M_s + 1));
  for (std::size_t r = 1; r < rec.rows.size(); ++r) {
    CHECK(rec.rows[r].h_time >= rec.rows[r - 1].h_time);
    CHECK(rec.rows[r].a_gates >= rec.rows[r - 1].a_gates);
  }
  auto discrete = make_config(1.0, 10.0, 2);
  discrete.include_coherent = false;
  const CostLedger c = step_cost(p, discrete);
  CHECK(c.hamiltonian_time == Catch::Approx(2.0 * (2.0 * p.effective_radius() + 2.0 * p.tau_s)));
  CHECK(c.controlled_A_count == 4LL * (2 * p.M_s + 1));
}

TEST_CASE("simulation records stay within physical ranges", "[circuit]") {
  const ModelSpec model = ModelSpec::tfim(3, 1.2);
  const auto prob = resolve_problem(model);
  const auto p = model_default_params(prob);
  for (const auto& cfg : {make_config(0.2, 6.0), make_config(1.0, 6.0, 2, Backend::trajectory, 20)}) {
    const auto rec = run_simulation(model, cfg, p, prob);
    CHECK(rec.rows.front().step == 0);
    CHECK(rec.initial_overlap <= 1e-15);
    for (const auto& row : rec.rows) {
      CHECK(row.overlap_mean >= -1e-9);
      CHECK(row.overlap_mean <= 1.0 + 1e-9);
      CHECK(row.energy_mean >= rec.ground_energy - 1e-6);
      CHECK(row.energy_mean <= rec.max_energy + 1e-6);
    }
  }
}

TEST_CASE("recording stride keeps the first and last steps", "[circuit]") {
  const ModelSpec model = ModelSpec::tfim(2, 1.2);
  auto cfg = make_config(0.1, 1.0);
  cfg.record_stride = 3;
  const auto rec = run_simulation(model, cfg, model_default_params(resolve_problem(model)));
  std::vector<long> steps;
  for (const auto& row : rec.rows) steps.push_back(row.step);
  CHECK(steps == std::vector<long>{0, 3, 6, 9, 10});
}

TEST_CASE("channel configuration validation", "[circuit]") {
  CHECK_THROWS_AS(make_config(0.0, 1.0).validate(), ContractViolation);
  CHECK_THROWS_AS(make_config(0.3, 1.0).validate(), ContractViolation);
  CHECK_THROWS_AS(make_config(0.1, 1.0, 0).validate(), ContractViolation);
  CHECK_THROWS_AS(make_config(0.1, 1.0, 1, Backend::trajectory, 0).validate(), ContractViolation);
  auto cfg = make_config(0.1, 1.0);
  cfg.record_stride = 0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  CHECK(make_config(1.0, 4.0, 2).tau_eff() == Catch::Approx(0.25));
  CHECK(make_config(0.5, 100.0).step_count() == 200);
}
