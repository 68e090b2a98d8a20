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
#include <numbers>
#include <string>
#include <vector>

#include "lindground/linalg.hpp"

namespace lindground {

/// Parameters of the erf band-pass filter and of its time-domain quadrature.
struct FilterParams {
  double a = 0.0;
  double delta_a = 0.0;
  double b = 0.0;
  double delta_b = 0.0;
  double S_s = 0.0;    // requested truncation radius
  double tau_s = 0.0;  // grid spacing
  int M_s = 0;         // grid half-width, ceil(S_s / tau_s)
  bool clamp_nonnegative = false;

  /// M_s computed from S_s and tau_s. The small slack keeps exact multiples
  /// from rounding up.
  static int grid_half_width(double S_s, double tau_s) {
    return static_cast<int>(std::ceil(S_s / tau_s - 1e-9));
  }

  static FilterParams make(double a, double delta_a, double b, double delta_b, double S_s,
                           double tau_s, bool clamp = false) {
    FilterParams p{a, delta_a, b, delta_b, S_s, tau_s, 0, clamp};
    p.M_s = grid_half_width(S_s, tau_s);
    p.validate();
    return p;
  }

  /// The radius actually covered by the grid, M_s * tau_s.
  double effective_radius() const { return M_s * tau_s; }

  FilterParams with_clamp(bool on) const {
    FilterParams p = *this;
    p.clamp_nonnegative = on;
    return p;
  }

  FilterParams with_radius(double S) const {
    return make(a, delta_a, b, delta_b, S, tau_s, clamp_nonnegative);
  }

  void validate() const {
    auto bad = [](double v) { return !std::isfinite(v); };
    if (bad(a) || bad(delta_a) || bad(b) || bad(delta_b) || bad(S_s) || bad(tau_s)) {
      throw ContractViolation("FilterParams: non-finite field");
    }
    if (!(a > b && b > 0.0)) throw ContractViolation("FilterParams: require a > b > 0");
    if (!(delta_a > 0.0 && delta_b > 0.0)) {
      throw ContractViolation("FilterParams: filter widths must be positive");
    }
    if (!(tau_s > 0.0)) throw ContractViolation("FilterParams: tau_s must be positive");
    if (M_s < 1) throw ContractViolation("FilterParams: M_s must be at least 1");
    if (M_s != grid_half_width(S_s, tau_s)) {
      throw ContractViolation("FilterParams: M_s inconsistent with S_s / tau_s");
    }
  }
};

/// The parameter rule a = 2.5|H|, delta_a = 0.5|H|, b = delta_b = gap,
/// S_s = 5 / gap, tau_s = pi / (2a).
inline FilterParams default_params(double norm_H, double gap) {
  if (!(norm_H > 0.0) || !std::isfinite(norm_H)) {
    throw ContractViolation("default_params: norm_H must be positive");
  }
  if (!(gap > 0.0) || !std::isfinite(gap)) {
    throw ContractViolation(
        "default_params: spectral gap must be positive; supply an explicit gap estimate "
        "(filter.gap) or explicit b / delta_b overrides");
  }
  const double a = 2.5 * norm_H;
  return FilterParams::make(a, 0.5 * norm_H, gap, gap, 5.0 / gap, std::numbers::pi / (2.0 * a));
}

/// Frequency-domain filter 0.5 (erf((w+a)/da) - erf((w+b)/db)), optionally
/// zeroed on w >= 0.
inline double f_hat(double omega, const FilterParams& p) {
  if (p.clamp_nonnegative && omega >= 0.0) return 0.0;
  return 0.5 * (std::erf((omega + p.a) / p.delta_a) - std::erf((omega + p.b) / p.delta_b));
}

/// Time-domain filter, the inverse Fourier transform of f_hat without clamping.
inline Complex f_time(double s, const FilterParams& p) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (std::abs(s) <= 1e-8) {
    const double a = p.a, b = p.b, da2 = p.delta_a * p.delta_a, db2 = p.delta_b * p.delta_b;
    const double c0 = a - b;
    const double c1 = 0.5 * (a * a - b * b) + 0.25 * (da2 - db2);
    const double c2 = (a * a * a - b * b * b) / 6.0 + 0.25 * (a * da2 - b * db2);
    return Complex(c0 - c2 * s * s, c1 * s) / two_pi;
  }
  const Complex ea = std::exp(-0.25 * p.delta_a * p.delta_a * s * s) * std::exp(kI * (p.a * s));
  const Complex eb = std::exp(-0.25 * p.delta_b * p.delta_b * s * s) * std::exp(kI * (p.b * s));
  return (ea - eb) / (two_pi * kI * s);
}

/// Trapezoid grid s_l = l tau_s, l = -M_s..M_s.
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

inline QuadratureGrid quadrature_grid(const FilterParams& p) {
  p.validate();
  QuadratureGrid g;
  const int m = p.M_s;
  g.nodes.reserve(2 * m + 1);
  g.weights.reserve(2 * m + 1);
  for (int l = -m; l <= m; ++l) {
    g.nodes.push_back(l * p.tau_s);
    g.weights.push_back((l == -m || l == m) ? 0.5 * p.tau_s : p.tau_s);
  }
  return g;
}

/// Discrete L1 mass of the quadrature, sum_l w_l |f(s_l)|.
inline double quadrature_l1(const FilterParams& p) {
  const QuadratureGrid g = quadrature_grid(p);
  double total = 0.0;
  for (std::size_t l = 0; l < g.size(); ++l) total += g.weights[l] * std::abs(f_time(g.nodes[l], p));
  return total;
}

}  // namespace lindground
