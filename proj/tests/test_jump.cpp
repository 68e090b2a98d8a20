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
#include "lindground/jump.hpp"
#include "lindground/studies.hpp"
#include "oracles.hpp"

using namespace lindground;

namespace {

/// K assembled as an explicit double sum over eigenpairs.
ComplexMatrix jump_by_double_sum(const SpectralDecomposition& spec, const ComplexMatrix& a, const FilterParams& p) {
  const Eigen::Index n = spec.dim();
  ComplexMatrix k = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const ComplexVector vi = spec.eigenvectors.col(i), vj = spec.eigenvectors.col(j);
      const Complex aij = vi.adjoint() * a * vj;
      k += oracle::filter_hat(spec.eigenvalues(i) - spec.eigenvalues(j), p.a, p.delta_a, p.b, p.delta_b) * aij *
           (vi * vj.adjoint());
    }
  }
  return k;
}

/// K_s assembled in operator form with the Pade exponential.
ComplexMatrix quadrature_by_operators(const ComplexMatrix& h, const ComplexMatrix& a, const FilterParams& p) {
  ComplexMatrix k = ComplexMatrix::Zero(h.rows(), h.cols());
  for (int l = -p.M_s; l <= p.M_s; ++l) {
    const double s = l * p.tau_s;
    const double w = (l == -p.M_s || l == p.M_s) ? 0.5 * p.tau_s : p.tau_s;
    const ComplexMatrix u = oracle::expm(h * Complex(0.0, s));
    k += w * f_time(s, p) * (u * a * u.adjoint());
  }
  return k;
}

}  // namespace

TEST_CASE("exact jump of the identity coupling vanishes with clamp", "[jump]") {
  const auto prob = resolve_problem(ModelSpec::tfim(3, 1.2));
  const auto p = model_default_params(prob).with_clamp(true);
  const auto k = exact_jump(prob.spec, HermitianOperator(ComplexMatrix::Identity(8, 8)), p);
  CHECK(max_abs(k.matrix) <= 1e-14);  // zero up to eigenbasis rounding
  CHECK(k.provenance == JumpProvenance::exact_frequency);
}

TEST_CASE("exact jump on a two-level system keeps only the downward transition", "[jump]") {
  const auto spec = hermitian_eig(HermitianOperator(ComplexMatrix(pauli::z())));
  const auto p = default_params(1.0, 2.0).with_clamp(true);
  const auto k = exact_jump(spec, HermitianOperator(ComplexMatrix(pauli::x())), p);
  const double expect = oracle::filter_hat(-2.0, p.a, p.delta_a, p.b, p.delta_b);
  CHECK(std::abs(k.matrix(1, 0) - expect) <= 1e-15);
  CHECK(std::abs(k.matrix(0, 0)) + std::abs(k.matrix(0, 1)) + std::abs(k.matrix(1, 1)) == 0.0);
}

TEST_CASE("exact jump matches the eigenpair double sum", "[jump]") {
  std::mt19937_64 rng(21);
  const ComplexMatrix h = oracle::random_hermitian(6, rng);
  const ComplexMatrix a = oracle::random_hermitian(6, rng);
  const auto spec = hermitian_eig(HermitianOperator(h));
  const auto p = default_params(spec.norm(), spec.gap);
  CHECK(max_abs(exact_jump(spec, HermitianOperator(a), p).matrix - jump_by_double_sum(spec, a, p)) <= 1e-12);
  CHECK_THROWS_AS(exact_jump(spec, HermitianOperator(ComplexMatrix::Identity(4, 4)), p), ContractViolation);
}

TEST_CASE("clamped exact jump annihilates the TFIM-4 ground state", "[jump]") {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const auto p = model_default_params(prob).with_clamp(true);
  const auto k = exact_jump(prob.spec, prob.A, p);
  CHECK(ground_residual(k, prob.spec) <= 1e-12);
  CHECK(ground_residual(k, prob.spec) == Catch::Approx((k.matrix * prob.spec.state(0)).norm()).margin(1e-15));
}

TEST_CASE("clamped exact jump is strictly lowering in the energy basis", "[jump]") {
  for (const auto& m : {ModelSpec::tfim(4, 1.2), ModelSpec::hubbard(2, 1.0, 4.0)}) {
    const auto prob = resolve_problem(m);
    const auto p = model_default_params(prob).with_clamp(true);
    const ComplexMatrix ke = prob.spec.to_energy_basis(exact_jump(prob.spec, prob.A, p).matrix);
    const ComplexMatrix raw = filter_weights(prob.spec, p).cast<Complex>().cwiseProduct(
        prob.spec.to_energy_basis(prob.A.matrix()));
    for (Eigen::Index i = 0; i < prob.spec.dim(); ++i) {
      for (Eigen::Index j = 0; j < prob.spec.dim(); ++j) {
        if (prob.spec.eigenvalues(i) >= prob.spec.eigenvalues(j)) CHECK(raw(i, j) == Complex(0.0, 0.0));
      }
    }
    CHECK(max_abs(ke - raw) <= 1e-12);
  }
}

TEST_CASE("quadrature jump of a zero coupling vanishes", "[jump]") {
  const auto prob = resolve_problem(ModelSpec::tfim(3, 1.2));
  const auto k = quadrature_jump(prob.spec, HermitianOperator::zero(8), model_default_params(prob));
  CHECK(max_abs(k.matrix) == 0.0);
  CHECK(k.provenance == JumpProvenance::quadrature);
}

TEST_CASE("eigenbasis quadrature equals the operator-form sum", "[jump]") {
  const auto prob = resolve_problem(ModelSpec::tfim(3, 0.9));
  const auto p = model_default_params(prob);
  const ComplexMatrix ref = quadrature_by_operators(prob.H.matrix(), prob.A.matrix(), p);
  CHECK(max_abs(quadrature_jump(prob.spec, prob.A, p).matrix - ref) <= 1e-12);
}

TEST_CASE("quadrature jump converges to the exact jump on the benchmarks", "[jump]") {
  for (const auto& m : {ModelSpec::tfim(4, 1.2), ModelSpec::tfim(6, 1.2), ModelSpec::hubbard(4, 1.0, 4.0)}) {
    const auto prob = resolve_problem(m);
    const auto q = quadrature_study(prob, model_default_params(prob));
    INFO(to_string(m.kind) << " L=" << m.sites << " |K-K_s| = " << q.exact_vs_quadrature);
    CHECK(q.exact_vs_quadrature <= 1e-3 * q.coupling_norm);
  }
}

TEST_CASE("quadrature truncation error decays with the radius on TFIM-4", "[jump]") {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const auto p = model_default_params(prob);
  const double gap = prob.spec.gap;
  std::vector<double> changes;
  for (double radius : {5.0 / gap, 7.5 / gap, 10.0 / gap}) {
    changes.push_back(quadrature_study(prob, p.with_radius(radius)).doubling_change);
  }
  CHECK(changes[1] < 0.1 * changes[0]);
  CHECK(changes[2] < 0.1 * changes[1]);
  CHECK(changes[0] <= 1e-4);
  CHECK(changes[2] <= 1e-6);
}

TEST_CASE("quadrature jump respects the L1 bound", "[jump]") {
  for (const auto& m : {ModelSpec::tfim(4, 1.2), ModelSpec::hubbard(2, 1.0, 4.0)}) {
    const auto prob = resolve_problem(m);
    const auto p = model_default_params(prob);
    const auto k = quadrature_jump(prob.spec, prob.A, p);
    CHECK(operator_norm(k.matrix) <= quadrature_l1(p) * prob.A.norm() * 1.1);
  }
}

TEST_CASE("dilation examples", "[jump]") {
  const auto z = dilate(JumpOperator::from_matrix(ComplexMatrix::Zero(3, 3)));
  CHECK(max_abs(z.matrix) == 0.0);
  CHECK(z.dim() == 6);
  const auto x = dilate(JumpOperator::from_matrix(ComplexMatrix::Identity(2, 2)));
  CHECK(max_abs(x.matrix - kron(ComplexMatrix(pauli::x()), ComplexMatrix::Identity(2, 2))) == 0.0);
}

TEST_CASE("dilated spectrum is plus and minus the singular values", "[jump]") {
  std::mt19937_64 rng(33);
  const ComplexMatrix k = oracle::random_matrix(5, rng);
  const auto d = dilate(JumpOperator::from_matrix(k));
  CHECK(max_abs(d.matrix - d.matrix.adjoint()) == 0.0);
  CHECK(max_abs(d.matrix.topLeftCorner(5, 5)) == 0.0);
  CHECK(max_abs(d.matrix.bottomRightCorner(5, 5)) == 0.0);
  CHECK(max_abs(d.matrix.bottomLeftCorner(5, 5) - k) == 0.0);
  Eigen::JacobiSVD<ComplexMatrix> svd(k);
  std::vector<double> expect;
  for (Eigen::Index i = 0; i < 5; ++i) {
    expect.push_back(svd.singularValues()(i));
    expect.push_back(-svd.singularValues()(i));
  }
  std::sort(expect.begin(), expect.end());
  const auto eig = oracle::general_eigenvalues(d.matrix);
  for (Eigen::Index i = 0; i < 10; ++i) CHECK(std::abs(eig(i) - expect[i]) <= 1e-10);
}

TEST_CASE("clamped dilation annihilates ancilla-zero times ground state", "[jump]") {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const auto k = exact_jump(prob.spec, prob.A, model_default_params(prob).with_clamp(true));
  const auto d = dilate(k);
  ComplexVector v = ComplexVector::Zero(32);
  v.head(16) = prob.spec.state(0);
  CHECK((d.matrix * v).norm() <= 1e-12);
}

TEST_CASE("ground residuals on TFIM-4", "[jump]") {
  const auto prob = resolve_problem(ModelSpec::tfim(4, 1.2));
  const auto p = model_default_params(prob);
  const double a_norm = prob.A.norm();
  const double exact_open = ground_residual(exact_jump(prob.spec, prob.A, p), prob.spec);
  const double bound = (f_hat(0.0, p) + f_hat(prob.spec.gap, p)) * a_norm;
  INFO("unclamped residual " << exact_open << ", erf-tail bound " << bound);
  CHECK(exact_open <= 0.1 * a_norm);
  CHECK(exact_open <= bound);
  const double quad = ground_residual(quadrature_jump(prob.spec, prob.A, p), prob.spec);
  CHECK(std::abs(quad - exact_open) <= 2e-3 * a_norm);
  CHECK(ground_residual(exact_jump(prob.spec, prob.A, p.with_clamp(true)), prob.spec) <= 1e-12);
}
