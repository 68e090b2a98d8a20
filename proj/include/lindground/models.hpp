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
#include <vector>

#include <Eigen/Sparse>

#include "lindground/linalg.hpp"

namespace lindground {

using SparseComplex = Eigen::SparseMatrix<Complex>;

inline constexpr int kMaxQubits = 12;

enum class ModelKind { tfim, hubbard1d };

inline std::string to_string(ModelKind k) { return k == ModelKind::tfim ? "tfim" : "hubbard1d"; }

struct ModelSpec {
  ModelKind kind = ModelKind::tfim;
  int sites = 2;
  double tfim_g = 1.0;
  double hubbard_t = 1.0;
  double hubbard_U = 0.0;

  int qubit_count() const { return kind == ModelKind::tfim ? sites : 2 * sites; }

  void validate() const {
    if (sites < 2) throw ContractViolation("ModelSpec: at least two sites are required");
    if (qubit_count() > kMaxQubits) {
      throw ContractViolation("ModelSpec: " + std::to_string(qubit_count()) +
                              " qubits exceeds the dense-storage ceiling of " +
                              std::to_string(kMaxQubits));
    }
  }

  static ModelSpec tfim(int L, double g) {
    ModelSpec m;
    m.kind = ModelKind::tfim;
    m.sites = L;
    m.tfim_g = g;
    return m;
  }

  static ModelSpec hubbard(int L, double t, double U) {
    ModelSpec m;
    m.kind = ModelKind::hubbard1d;
    m.sites = L;
    m.hubbard_t = t;
    m.hubbard_U = U;
    return m;
  }
};

namespace pauli {

inline SparseComplex from_dense2(Complex a, Complex b, Complex c, Complex d) {
  SparseComplex m(2, 2);
  std::vector<Eigen::Triplet<Complex>> t;
  if (a != 0.0) t.emplace_back(0, 0, a);
  if (b != 0.0) t.emplace_back(0, 1, b);
  if (c != 0.0) t.emplace_back(1, 0, c);
  if (d != 0.0) t.emplace_back(1, 1, d);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

inline SparseComplex identity(Eigen::Index n) {
  SparseComplex m(n, n);
  m.setIdentity();
  return m;
}

inline SparseComplex x() { return from_dense2(0, 1, 1, 0); }
inline SparseComplex y() { return from_dense2(0, -kI, kI, 0); }
inline SparseComplex z() { return from_dense2(1, 0, 0, -1); }
/// |0><1|: removes an excitation when |1> is the occupied state.
inline SparseComplex lowering() { return from_dense2(0, 1, 0, 0); }

}  // namespace pauli

inline SparseComplex sparse_kron(const SparseComplex& a, const SparseComplex& b) {
  SparseComplex out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseComplex::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseComplex::InnerIterator ib(b, kb); ib; ++ib) {
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                         ia.value() * ib.value());
        }
      }
    }
  }
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

/// Places a single-qubit operator on qubit `q` (0 = most significant) of `n` qubits.
inline SparseComplex embed(const SparseComplex& op, int q, int n) {
  const Eigen::Index left = Eigen::Index{1} << q;
  const Eigen::Index right = Eigen::Index{1} << (n - q - 1);
  return sparse_kron(sparse_kron(pauli::identity(left), op), pauli::identity(right));
}

/// Jordan-Wigner annihilation operator for mode `q` of `n`: Z strings on the
/// lower-indexed modes.
inline SparseComplex annihilation(int q, int n) {
  SparseComplex op = pauli::lowering();
  for (int k = q - 1; k >= 0; --k) op = sparse_kron(pauli::z(), op);
  return sparse_kron(op, pauli::identity(Eigen::Index{1} << (n - q - 1)));
}

/// Spin-orbital index of site j (0-based) and spin s (0 up, 1 down).
inline int spin_orbital(int j, int s) { return 2 * j + s; }

inline void require_qubits(int n) {
  if (n > kMaxQubits) {
    throw ContractViolation(std::to_string(n) + " qubits exceeds the dense-storage ceiling of " +
                            std::to_string(kMaxQubits));
  }
}

/// Open-boundary transverse-field Ising chain -sum Z_i Z_{i+1} - g sum X_i.
inline HermitianOperator build_tfim(int L, double g) {
  if (L < 2) throw ContractViolation("build_tfim: L must be at least 2");
  require_qubits(L);
  const Eigen::Index dim = Eigen::Index{1} << L;
  SparseComplex h(dim, dim);
  for (int i = 0; i + 1 < L; ++i) {
    h -= embed(pauli::z(), i, L) * embed(pauli::z(), i + 1, L);
  }
  for (int i = 0; i < L; ++i) h -= g * embed(pauli::x(), i, L);
  return HermitianOperator(ComplexMatrix(h));
}

inline SparseComplex number_operator(int q, int n) {
  const SparseComplex c = annihilation(q, n);
  return SparseComplex(c.adjoint()) * c;
}

/// One-dimensional open-chain Hubbard model in the Jordan-Wigner encoding,
/// with the particle-hole symmetric interaction U (n_up - 1/2)(n_down - 1/2).
inline HermitianOperator build_hubbard_1d(int L, double t, double U) {
  if (L < 2) throw ContractViolation("build_hubbard_1d: L must be at least 2");
  const int n = 2 * L;
  require_qubits(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<SparseComplex> c;
  for (int q = 0; q < n; ++q) c.push_back(annihilation(q, n));

  SparseComplex h(dim, dim);
  for (int j = 0; j + 1 < L; ++j) {
    for (int s = 0; s < 2; ++s) {
      const auto& a = c[spin_orbital(j, s)];
      const auto& b = c[spin_orbital(j + 1, s)];
      SparseComplex hop = SparseComplex(a.adjoint()) * b;
      h -= t * (hop + SparseComplex(hop.adjoint()));
    }
  }
  const SparseComplex half = 0.5 * pauli::identity(dim);
  for (int j = 0; j < L; ++j) {
    const auto& cu = c[spin_orbital(j, 0)];
    const auto& cd = c[spin_orbital(j, 1)];
    SparseComplex nu = SparseComplex(cu.adjoint()) * cu - half;
    SparseComplex nd = SparseComplex(cd.adjoint()) * cd - half;
    h += U * (nu * nd);
  }
  return HermitianOperator(ComplexMatrix(h));
}

inline HermitianOperator build_hamiltonian(const ModelSpec& model) {
  model.validate();
  return model.kind == ModelKind::tfim
             ? build_tfim(model.sites, model.tfim_g)
             : build_hubbard_1d(model.sites, model.hubbard_t, model.hubbard_U);
}

/// TFIM: Z on the first site. Hubbard: the Hermitian hopping combination
/// c+_{1s} c_{2s} - c_{1s} c+_{2s} summed over both spins.
inline HermitianOperator coupling_operator(const ModelSpec& model) {
  model.validate();
  const int n = model.qubit_count();
  if (model.kind == ModelKind::tfim) {
    return HermitianOperator(ComplexMatrix(embed(pauli::z(), 0, n)));
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  SparseComplex a(dim, dim);
  for (int s = 0; s < 2; ++s) {
    const SparseComplex c1 = annihilation(spin_orbital(0, s), n);
    const SparseComplex c2 = annihilation(spin_orbital(1, s), n);
    a += SparseComplex(c1.adjoint()) * c2 - c1 * SparseComplex(c2.adjoint());
  }
  return HermitianOperator(ComplexMatrix(a));
}

inline ComplexMatrix total_number_operator(int L) {
  const int n = 2 * L;
  const Eigen::Index dim = Eigen::Index{1} << n;
  SparseComplex total(dim, dim);
  for (int q = 0; q < n; ++q) total += number_operator(q, n);
  return ComplexMatrix(total);
}

inline ComplexMatrix total_sz_operator(int L) {
  const int n = 2 * L;
  const Eigen::Index dim = Eigen::Index{1} << n;
  SparseComplex total(dim, dim);
  for (int j = 0; j < L; ++j) {
    total += 0.5 * (number_operator(spin_orbital(j, 0), n) - number_operator(spin_orbital(j, 1), n));
  }
  return ComplexMatrix(total);
}

}  // namespace lindground
