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

#include <random>

#include <catch_amalgamated.hpp>

#include "lindground/circuit.hpp"
#include "lindground/reference.hpp"
#include "lindground/studies.hpp"
#include "oracles.hpp"

using namespace lindground;

namespace {

struct RandomInstance {
  LindbladSystem sys;
  DensityMatrix rho;
};

RandomInstance random_instance(std::uint64_t seed, Eigen::Index n = 4, double k_scale = 0.5) {
  std::mt19937_64 rng(seed);
  const ComplexMatrix h = oracle::random_hermitian(n, rng);
  const ComplexMatrix k = k_scale * oracle::random_matrix(n, rng);
  return {LindbladSystem{HermitianOperator(h), JumpOperator::from_matrix(k), true},
          DensityMatrix(oracle::random_density(n, rng))};
}

ResolvedProblem tfim2() { return resolve_problem(ModelSpec::tfim(2, 1.2)); }

JumpOperator clamped_jump(const ResolvedProblem& prob) {
  return exact_jump(prob.spec, prob.A, model_default_params(prob).with_clamp(true));
}

ComplexMatrix oracle_apply(const LindbladSystem& sys, const ComplexMatrix& rho) {
  const Eigen::Index n = rho.rows();
  const ComplexMatrix l = oracle::superoperator(sys.H.matrix(), sys.K.matrix, sys.include_coherent);
  Eigen::VectorXcd v(n * n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) v(r * n + c) = rho(r, c);
  const Eigen::VectorXcd w = l * v;
  ComplexMatrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = w(r * n + c);
  return out;
}

}  // namespace

TEST_CASE("lindbladian_apply matches the superoperator oracle", "[reference]") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto inst = random_instance(seed);
    const ComplexMatrix got = lindbladian_apply(inst.sys, inst.rho);
    CHECK(max_abs(got - oracle_apply(inst.sys, inst.rho.matrix())) <= 1e-12);
    CHECK(std::abs(got.trace()) <= 1e-12);
    CHECK(max_abs(superoperator(inst.sys) -
                  oracle::superoperator(inst.sys.H.matrix(), inst.sys.K.matrix, true)) <= 1e-12);
  }
}

TEST_CASE("lindbladian_apply annihilates the ground state for a clamped jump", "[reference]") {
  const auto prob = tfim2();
  const LindbladSystem sys{prob.H, clamped_jump(prob), true};
  CHECK(max_abs(lindbladian_apply(sys, DensityMatrix::pure(prob.spec.state(0)))) <= 1e-12);
}

TEST_CASE("lindbladian_apply with K = 0 is the commutator", "[reference]") {
  auto inst = random_instance(4);
  inst.sys.K = JumpOperator::from_matrix(ComplexMatrix::Zero(4, 4));
  const ComplexMatrix& h = inst.sys.H.matrix();
  const ComplexMatrix& r = inst.rho.matrix();
  CHECK(max_abs(lindbladian_apply(inst.sys, inst.rho) - (-kI * (h * r - r * h))) <= 1e-14);
  CHECK_THROWS_AS(lindbladian_apply(inst.sys, ComplexMatrix::Identity(3, 3)), ContractViolation);
}

TEST_CASE("evolve_ode trivial cases", "[reference]") {
  const auto inst = random_instance(5);
  CHECK(max_abs(evolve_ode(inst.sys, inst.rho, 0.0, 0.01).matrix() - inst.rho.matrix()) == 0.0);
  CHECK_THROWS_AS(evolve_ode(inst.sys, inst.rho, 1.0, 0.0), ContractViolation);
  CHECK_THROWS_AS(evolve_ode(inst.sys, inst.rho, -1.0, 0.1), ContractViolation);

  const ComplexMatrix z = ComplexMatrix(pauli::z());
  const LindbladSystem zsys{HermitianOperator(z), JumpOperator::from_matrix(ComplexMatrix::Zero(2, 2)), true};
  std::mt19937_64 rng(6);
  const DensityMatrix rho0(oracle::random_density(2, rng));
  const ComplexMatrix u = oracle::expm(-kI * z);
  const ComplexMatrix expect = u * rho0.matrix() * u.adjoint();
  CHECK(max_abs(evolve_ode(zsys, rho0, 1.0, 1e-3).matrix() - expect) <= 1e-10);
}

TEST_CASE("evolve_ode on TFIM-2 matches the superoperator exponential", "[reference]") {
  const auto prob = tfim2();
  const auto k = quadrature_jump(prob.spec, prob.A, model_default_params(prob));
  const LindbladSystem sys{prob.H, k, true};
  std::mt19937_64 rng(7);
  const DensityMatrix rho0(oracle::random_density(4, rng));
  const ComplexMatrix ref =
      oracle::evolve_superoperator(oracle::superoperator(prob.H.matrix(), k.matrix, true), rho0.matrix(), 1.0);
  CHECK(max_abs(evolve_ode(sys, rho0, 1.0, 1e-3).matrix() - ref) <= 1e-8);
  CHECK(max_abs(superoperator_evolve(sys, rho0, 1.0).matrix() - ref) <= 1e-10);
}

TEST_CASE("evolve_ode shows fourth-order self-convergence", "[reference]") {
  const auto inst = random_instance(8, 4, 1.0);
  const double dt = 0.025;
  const ComplexMatrix r1 = evolve_ode(inst.sys, inst.rho, 1.0, dt).matrix();
  const ComplexMatrix r2 = evolve_ode(inst.sys, inst.rho, 1.0, dt / 2).matrix();
  const ComplexMatrix r3 = evolve_ode(inst.sys, inst.rho, 1.0, dt / 4).matrix();
  const double d1 = (r1 - r2).norm(), d2 = (r2 - r3).norm();
  INFO("successive changes " << d1 << " " << d2 << " ratio " << d1 / d2);
  CHECK(d1 <= 16.0 * d2 * 1.25);
  CHECK(d1 / d2 >= 12.0);
}

TEST_CASE("evolve_ode rejects steps that blow up the trace", "[reference]") {
  const auto inst = random_instance(9, 4, 5.0);
  CHECK_THROWS_AS(evolve_ode(inst.sys, inst.rho, 10.0, 0.5), NumericalFailure);
}

TEST_CASE("exact_dissipative_step examples", "[reference]") {
  const auto inst = random_instance(10);
  CHECK(max_abs(exact_dissipative_step(inst.sys.K, inst.rho, 0.0).matrix() - inst.rho.matrix()) == 0.0);
  const ComplexMatrix ref = oracle::evolve_superoperator(
      oracle::superoperator(ComplexMatrix::Zero(4, 4), inst.sys.K.matrix, false), inst.rho.matrix(), 0.1);
  CHECK(max_abs(exact_dissipative_step(inst.sys.K, inst.rho, 0.1).matrix() - ref) <= 1e-9);

  const auto prob = tfim2();
  const auto k = clamped_jump(prob);
  const DensityMatrix g = DensityMatrix::pure(prob.spec.state(0));
  for (double tau : {0.01, 0.1, 1.0, 5.0}) {
    CHECK(max_abs(exact_dissipative_step(k, g, tau).matrix() - g.matrix()) <= 1e-12);
  }
}

TEST_CASE("exact_dilated_step trivial cases", "[reference]") {
  const auto inst = random_instance(11);
  const auto kd = dilate(inst.sys.K);
  CHECK(max_abs(exact_dilated_step(kd, inst.rho, 0.0).matrix() - inst.rho.matrix()) == 0.0);
  const auto zero = dilate(JumpOperator::from_matrix(ComplexMatrix::Zero(4, 4)));
  CHECK(max_abs(exact_dilated_step(zero, inst.rho, 0.3).matrix() - inst.rho.matrix()) <= 1e-14);
  CHECK_THROWS_AS(exact_dilated_step(kd, DensityMatrix::maximally_mixed(2), 0.1), ContractViolation);
}

TEST_CASE("exact_dilated_step agrees with the Stinespring oracle", "[reference]") {
  const auto inst = random_instance(12);
  const ComplexMatrix kd = dilate(inst.sys.K).matrix;
  const double tau = 0.2;
  const ComplexMatrix u = oracle::expm(-kI * std::sqrt(tau) * kd);
  ComplexMatrix big = ComplexMatrix::Zero(8, 8);
  big.topLeftCorner(4, 4) = inst.rho.matrix();
  const ComplexMatrix full = u * big * u.adjoint();
  const ComplexMatrix reduced = full.topLeftCorner(4, 4) + full.bottomRightCorner(4, 4);
  CHECK(max_abs(exact_dilated_step(dilate(inst.sys.K), inst.rho, tau).matrix() - reduced) <= 1e-12);
}

TEST_CASE("dilated step approximates the dissipative semigroup at second order", "[reference]") {
  const auto prob = tfim2();
  const auto k = exact_jump(prob.spec, prob.A, model_default_params(prob));
  std::mt19937_64 rng(13);
  const DensityMatrix rho(oracle::random_density(4, rng));
  const auto series = dilation_error_series(k, rho, log_spaced(1e-3, 1e-1, 5));
  INFO("slope " << series.slope());
  CHECK(std::abs(series.slope() - 2.0) <= 0.2);
}

TEST_CASE("discrete_map_exact fixed point and trivial cases", "[reference]") {
  const auto prob = tfim2();
  const LindbladSystem sys{prob.H, clamped_jump(prob), true};
  const DensityMatrix g = DensityMatrix::pure(prob.spec.state(0));
  for (double tau : {0.1, 1.0, 7.5}) {
    CHECK(trace_distance(discrete_map_exact(sys, g, tau).matrix(), g.matrix()) <= 1e-12);
  }
  const LindbladSystem bare{prob.H, JumpOperator::from_matrix(ComplexMatrix::Zero(4, 4)), true};
  std::mt19937_64 rng(14);
  const DensityMatrix rho(oracle::random_density(4, rng));
  const ComplexMatrix u = oracle::expm(-kI * 0.4 * prob.H.matrix());
  CHECK(max_abs(discrete_map_exact(bare, rho, 0.4).matrix() - u * rho.matrix() * u.adjoint()) <= 1e-12);
  CHECK_THROWS_AS(discrete_map_exact(sys, rho, 0.0), ContractViolation);
}

TEST_CASE("composed discrete map converges to the Lindblad flow at first order", "[reference]") {
  const auto prob = tfim2();
  const LindbladSystem sys{prob.H, exact_jump(prob.spec, prob.A, model_default_params(prob)), true};
  std::mt19937_64 rng(15);
  const DensityMatrix rho0(oracle::random_density(4, rng));
  const double T = 1.0;
  const ComplexMatrix ref = superoperator_evolve(sys, rho0, T).matrix();
  std::vector<double> taus = {0.1, 0.05, 0.025, 0.0125}, errs;
  for (double tau : taus) {
    DensityMatrix rho = rho0;
    for (long m = 0; m < std::lround(T / tau); ++m) rho = discrete_map_exact(sys, rho, tau);
    errs.push_back(trace_distance(rho.matrix(), ref));
  }
  const double slope = loglog_slope(taus, errs);
  INFO("slope " << slope);
  CHECK(std::abs(slope - 1.0) <= 0.2);
}

TEST_CASE("exact steps preserve trace, Hermiticity and positivity", "[reference]") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_instance(100 + trial);
    const auto kd = dilate(inst.sys.K);
    for (const DensityMatrix& out : {exact_dissipative_step(inst.sys.K, inst.rho, 0.3),
                                     exact_dilated_step(kd, inst.rho, 0.3), discrete_map_exact(inst.sys, inst.rho, 0.3),
                                     evolve_ode(inst.sys, inst.rho, 0.5, 1e-3)}) {
      CHECK(std::abs(out.matrix().trace().real() - 1.0) <= 1e-10);
      CHECK(max_abs(out.matrix() - out.matrix().adjoint()) <= 1e-10);
      CHECK(out.min_eigenvalue() >= -1e-8);
    }
  }
}

TEST_CASE("exact steps are trace-distance contractive", "[reference]") {
  std::mt19937_64 rng(17);
  const auto inst = random_instance(18);
  const auto kd = dilate(inst.sys.K);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix a(oracle::random_density(4, rng)), b(oracle::random_density(4, rng));
    const double before = trace_norm(a.matrix() - b.matrix());
    CHECK(trace_norm(exact_dissipative_step(inst.sys.K, a, 0.4).matrix() -
                     exact_dissipative_step(inst.sys.K, b, 0.4).matrix()) <= before + 1e-9);
    CHECK(trace_norm(exact_dilated_step(kd, a, 0.4).matrix() - exact_dilated_step(kd, b, 0.4).matrix()) <=
          before + 1e-9);
    CHECK(trace_norm(discrete_map_exact(inst.sys, a, 0.4).matrix() -
                     discrete_map_exact(inst.sys, b, 0.4).matrix()) <= before + 1e-9);
  }
}

TEST_CASE("first-order splitting has a second-order local error", "[reference]") {
  for (std::uint64_t seed : {19u, 20u}) {
    const auto inst = random_instance(seed, 4, 0.8);
    const LindbladSystem diss = LindbladSystem::dissipative(inst.sys.K);
    const LindbladSystem coh{inst.sys.H, JumpOperator::from_matrix(ComplexMatrix::Zero(4, 4)), true};
    const auto ts = log_spaced(1e-3, 1e-1, 5);
    std::vector<double> errs;
    for (double t : ts) {
      const ComplexMatrix joint = superoperator_evolve(inst.sys, inst.rho, t).matrix();
      const ComplexMatrix split = superoperator_evolve(coh, superoperator_evolve(diss, inst.rho, t), t).matrix();
      errs.push_back(trace_norm(joint - split));
    }
    const double slope = loglog_slope(ts, errs);
    INFO("slope " << slope);
    CHECK(std::abs(slope - 2.0) <= 0.2);
  }
}

TEST_CASE("superoperator refuses large dimensions", "[reference]") {
  const auto inst = random_instance(21, 17);
  CHECK_THROWS_AS(superoperator(inst.sys), ContractViolation);
}
