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
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "lindground/filter.hpp"
#include "lindground/jump.hpp"
#include "lindground/linalg.hpp"
#include "lindground/parallel.hpp"
#include "lindground/reference.hpp"

namespace lindground {

/// Variance profile sigma_ij = E|A_ij|^2 of a random coupling in the energy basis.
struct RandomCouplingSpec {
  RealMatrix variance;
  std::uint64_t seed = 0;

  Eigen::Index dim() const { return variance.rows(); }

  void validate() const {
    if (variance.rows() != variance.cols() || variance.rows() == 0) {
      throw ContractViolation("RandomCouplingSpec: variance profile must be square and non-empty");
    }
    if (!(variance.array() > 0.0).all() || !variance.allFinite()) {
      throw ContractViolation("RandomCouplingSpec: variances must be positive and finite");
    }
    if ((variance - variance.transpose()).cwiseAbs().maxCoeff() > 0.0) {
      throw ContractViolation("RandomCouplingSpec: variance profile must be symmetric");
    }
  }

  static RandomCouplingSpec uniform(Eigen::Index n, double s, std::uint64_t seed = 0) {
    return RandomCouplingSpec{RealMatrix::Constant(n, n, s), seed};
  }
};

/// Hermitian coupling with independent zero-mean Gaussian entries: off-diagonal
/// entries circular complex with E|A_ij|^2 = sigma_ij, diagonal entries real
/// with variance sigma_ii. The matrix is expressed in the energy basis.
inline HermitianOperator sample_coupling(const RandomCouplingSpec& spec, Rng& rng) {
  spec.validate();
  const Eigen::Index n = spec.dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = std::sqrt(spec.variance(i, i)) * normal(rng);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = std::sqrt(0.5 * spec.variance(i, j));
      const double re = normal(rng);
      const double im = normal(rng);
      a(i, j) = s * Complex(re, im);
      a(j, i) = std::conj(a(i, j));
    }
  }
  return HermitianOperator(a);
}

/// Population generator: T_ji = f_hat(lambda_j - lambda_i)^2 sigma_ji for
/// j != i and T_ii = -sum_{j != i} T_ji.
struct TransitionMatrix {
  RealMatrix rates;
  RealVector energies;

  Eigen::Index dim() const { return rates.rows(); }

  /// Smallest total out-rate over the excited states.
  double min_decay_rate() const {
    double r = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < dim(); ++i) r = std::min(r, -rates(i, i));
    return r;
  }
};

inline TransitionMatrix transition_matrix(const SpectralDecomposition& spec, const FilterParams& p,
                                          const RealMatrix& sigma) {
  if (!p.clamp_nonnegative) {
    throw ContractViolation("transition_matrix: the filter must be clamped on non-negative frequencies");
  }
  const Eigen::Index n = spec.dim();
  if (sigma.rows() != n || sigma.cols() != n) throw ContractViolation("transition_matrix: sigma dimension mismatch");
  TransitionMatrix t{RealMatrix::Zero(n, n), spec.eigenvalues};
  for (Eigen::Index i = 0; i < n; ++i) {
    double out = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double f = f_hat(spec.eigenvalues(j) - spec.eigenvalues(i), p);
      t.rates(j, i) = f * f * sigma(j, i);
      out += t.rates(j, i);
    }
    t.rates(i, i) = -out;
  }
  return t;
}

inline void require_probability_vector(const RealVector& p0, Eigen::Index n, const char* who) {
  if (p0.size() != n) throw ContractViolation(std::string(who) + ": population vector has wrong length");
  if ((p0.array() < 0.0).any() || std::abs(p0.sum() - 1.0) > 1e-9) {
    throw ContractViolation(std::string(who) + ": populations must be non-negative and sum to 1");
  }
}

/// e^{T t} p0 by dense matrix exponential.
inline RealVector evolve_populations(const TransitionMatrix& t, const RealVector& p0, double time) {
  require_probability_vector(p0, t.dim(), "evolve_populations");
  if (!(time >= 0.0)) throw ContractViolation("evolve_populations: time must be non-negative");
  if (time == 0.0) return p0;
  const RealMatrix prop = (t.rates * time).exp();
  RealVector p = prop * p0;
  if (!p.allFinite() || p.minCoeff() < -1e-9 || std::abs(p.sum() - 1.0) > 1e-9) {
    throw NumericalFailure("evolve_populations: result is not a probability vector");
  }
  return p;
}

/// Pairs i < j whose downward filter weight f_hat(lambda_i - lambda_j) is not
/// strictly positive.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> filter_support_violations(
    const SpectralDecomposition& spec, const FilterParams& p) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  for (Eigen::Index j = 0; j < spec.dim(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (!(f_hat(spec.eigenvalues(i) - spec.eigenvalues(j), p) > 0.0)) out.emplace_back(i, j);
    }
  }
  return out;
}

/// A diagonal Hamiltonian with the given energies, sorted ascending.
inline SpectralDecomposition diagonal_spectrum(RealVector energies) {
  std::sort(energies.data(), energies.data() + energies.size());
  SpectralDecomposition s;
  s.eigenvalues = energies;
  s.eigenvectors = ComplexMatrix::Identity(energies.size(), energies.size());
  s.gap = energies.size() > 1 ? energies(1) - energies(0) : 0.0;
  return s;
}

inline SpectralDecomposition equispaced_spectrum(Eigen::Index n, double spacing = 1.0) {
  RealVector e(n);
  for (Eigen::Index k = 0; k < n; ++k) e(k) = spacing * static_cast<double>(k);
  return diagonal_spectrum(e);
}

/// `clusters` groups of levels; levels inside a group are `intra` apart and
/// consecutive groups start `inter` apart.
inline SpectralDecomposition clustered_spectrum(Eigen::Index n, Eigen::Index clusters, double intra,
                                                double inter) {
  if (clusters < 1) throw ContractViolation("clustered_spectrum: need at least one cluster");
  RealVector e(n);
  const Eigen::Index per = (n + clusters - 1) / clusters;
  for (Eigen::Index k = 0; k < n; ++k) e(k) = inter * static_cast<double>(k / per) + intra * static_cast<double>(k % per);
  return diagonal_spectrum(e);
}

inline SpectralDecomposition random_spectrum(Eigen::Index n, double width, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  RealVector e(n);
  for (Eigen::Index k = 0; k < n; ++k) e(k) = width * uniform01(rng);
  return diagonal_spectrum(e);
}

inline HermitianOperator diagonal_hamiltonian(const SpectralDecomposition& spec) {
  return HermitianOperator(spec.eigenvalues.cast<Complex>().asDiagonal().toDenseMatrix());
}

namespace detail {

/// One step of length tau with a freshly drawn coupling, integrated in the
/// energy basis with `substeps` RK4 steps.
inline ComplexMatrix random_coupling_step(const SpectralDecomposition& spec, const HermitianOperator& h,
                                          const FilterParams& p, const RandomCouplingSpec& rc,
                                          const ComplexMatrix& rho, double tau, int substeps, Rng& rng) {
  const HermitianOperator a = sample_coupling(rc, rng);
  const JumpOperator k = exact_jump(spec, a, p);
  const LindbladSystem sys{h, k, true};
  return evolve_ode(sys, DensityMatrix(rho), tau, tau / substeps).matrix();
}

}  // namespace detail

struct ErgodicityConfig {
  SpectralDecomposition spectrum;
  FilterParams params;  // must be clamped
  RealMatrix sigma;
  RealVector p0;
  int reps = 500;
  double tau = 0.01;
  double total_time = 1.0;
  int checkpoints = 10;
  int substeps = 1;
  std::uint64_t seed = 0;
};

struct ErgodicityReport {
  std::vector<double> times;
  RealMatrix mc_mean;    // checkpoints x N
  RealMatrix mc_se;      // checkpoints x N
  RealMatrix reference;  // checkpoints x N, e^{Tt} p0
  double max_z = 0.0;
  double max_abs_deviation = 0.0;
  double relaxation_time = 0.0;       // 50 / min decay rate
  double stationary_deviation = 0.0;  // |e^{T t_relax} p0 - e_0|_inf
};

/// Monte Carlo average of diag(rho(t)) under per-step resampled couplings,
/// compared with the population dynamics e^{Tt} p0.
inline ErgodicityReport ergodicity_experiment(const ErgodicityConfig& cfg) {
  const auto& spec = cfg.spectrum;
  const Eigen::Index n = spec.dim();
  require_probability_vector(cfg.p0, n, "ergodicity_experiment");
  if (cfg.reps < 2 || cfg.checkpoints < 1 || cfg.substeps < 1) {
    throw ContractViolation("ergodicity_experiment: need reps >= 2, checkpoints >= 1, substeps >= 1");
  }
  const RandomCouplingSpec rc{cfg.sigma, cfg.seed};
  rc.validate();
  const TransitionMatrix tm = transition_matrix(spec, cfg.params, cfg.sigma);
  const HermitianOperator h = diagonal_hamiltonian(spec);

  const long steps = std::lround(cfg.total_time / cfg.tau);
  if (steps < cfg.checkpoints || steps % cfg.checkpoints != 0) {
    throw ContractViolation("ergodicity_experiment: step count must be a multiple of the checkpoint count");
  }
  const long every = steps / cfg.checkpoints;
  const int nc = cfg.checkpoints;

  std::vector<RealMatrix> per_rep(cfg.reps, RealMatrix::Zero(nc, n));
  parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t r) {
    Rng rng = make_stream(cfg.seed, r);
    ComplexMatrix rho = cfg.p0.cast<Complex>().asDiagonal();
    for (long m = 1; m <= steps; ++m) {
      rho = detail::random_coupling_step(spec, h, cfg.params, rc, rho, cfg.tau, cfg.substeps, rng);
      if (m % every == 0) per_rep[r].row(m / every - 1) = rho.diagonal().real().transpose();
    }
  });

  ErgodicityReport rep;
  rep.mc_mean = RealMatrix::Zero(nc, n);
  RealMatrix sq = RealMatrix::Zero(nc, n);
  for (int r = 0; r < cfg.reps; ++r) {
    rep.mc_mean += per_rep[r];
    sq += per_rep[r].cwiseProduct(per_rep[r]);
  }
  rep.mc_mean /= cfg.reps;
  const RealMatrix var = ((sq / cfg.reps - rep.mc_mean.cwiseProduct(rep.mc_mean)) * cfg.reps / (cfg.reps - 1.0))
                             .cwiseMax(0.0);
  rep.mc_se = (var / cfg.reps).cwiseSqrt();
  rep.reference = RealMatrix(nc, n);
  for (int c = 0; c < nc; ++c) {
    const double t = (c + 1) * every * cfg.tau;
    rep.times.push_back(t);
    rep.reference.row(c) = evolve_populations(tm, cfg.p0, t).transpose();
  }
  for (int c = 0; c < nc; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dev = std::abs(rep.mc_mean(c, i) - rep.reference(c, i));
      rep.max_abs_deviation = std::max(rep.max_abs_deviation, dev);
      const double se = rep.mc_se(c, i);
      const double z = se > 0.0 ? dev / se : (dev > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0);
      rep.max_z = std::max(rep.max_z, z);
    }
  }
  rep.relaxation_time = 50.0 / tm.min_decay_rate();
  RealVector e0 = RealVector::Zero(n);
  e0(0) = 1.0;
  rep.stationary_deviation = (evolve_populations(tm, cfg.p0, rep.relaxation_time) - e0).cwiseAbs().maxCoeff();
  return rep;
}

struct MixingLayer {
  int index = 0;             // l, starting at 1
  Eigen::Index upper = 0;    // R_l
  Eigen::Index lower = 0;    // R_{l+1}
  double min_rate = 0.0;     // min_{j in (R_{l+1}, R_l]} sum_{i <= R_{l+1}} T_ij
  bool violates_hypothesis = false;
  double target = 0.0;       // 1/2 - 1/(l+3)
  double crossing_time = -1.0;  // first time the tail mass is below target, -1 if never
  bool monotone = true;
  std::vector<double> tail_mass;
};

struct MixingReport {
  std::vector<double> times;
  std::vector<MixingLayer> layers;
  bool any_violation = false;
};

struct MixingConfig {
  SpectralDecomposition spectrum;
  FilterParams params;  // must be clamped
  RealMatrix sigma;
  std::vector<Eigen::Index> thresholds;  // R_1 = N - 1 > R_2 > ... > R_L
  RealVector p0;
  double horizon = 10.0;
  int time_points = 1001;
  double rate_floor = 1e-8;
};

/// Checks the per-layer out-rate hypothesis on an instance, integrates the
/// populations and reports when each layer's tail mass first drops below
/// 1/2 - 1/(l+3).
inline MixingReport mixing_layers_experiment(const MixingConfig& cfg) {
  const Eigen::Index n = cfg.spectrum.dim();
  require_probability_vector(cfg.p0, n, "mixing_layers_experiment");
  if (cfg.thresholds.size() < 2 || cfg.thresholds.front() != n - 1) {
    throw ContractViolation("mixing_layers_experiment: thresholds must start at N - 1 and have at least two entries");
  }
  for (std::size_t k = 1; k < cfg.thresholds.size(); ++k) {
    if (!(cfg.thresholds[k] < cfg.thresholds[k - 1]) || cfg.thresholds[k] < 0) {
      throw ContractViolation("mixing_layers_experiment: thresholds must be strictly decreasing and non-negative");
    }
  }
  if (cfg.time_points < 2 || !(cfg.horizon > 0.0)) {
    throw ContractViolation("mixing_layers_experiment: need a positive horizon and at least two time points");
  }
  const TransitionMatrix tm = transition_matrix(cfg.spectrum, cfg.params, cfg.sigma);

  MixingReport rep;
  const double dt = cfg.horizon / (cfg.time_points - 1);
  const RealMatrix step = (tm.rates * dt).exp();
  std::vector<RealVector> pops;
  RealVector p = cfg.p0;
  for (int k = 0; k < cfg.time_points; ++k) {
    rep.times.push_back(k * dt);
    pops.push_back(p);
    p = step * p;
  }

  for (std::size_t l = 0; l + 1 < cfg.thresholds.size(); ++l) {
    MixingLayer layer;
    layer.index = static_cast<int>(l) + 1;
    layer.upper = cfg.thresholds[l];
    layer.lower = cfg.thresholds[l + 1];
    layer.target = 0.5 - 1.0 / (layer.index + 3.0);
    layer.min_rate = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = layer.lower + 1; j <= layer.upper; ++j) {
      layer.min_rate = std::min(layer.min_rate, tm.rates.col(j).head(layer.lower + 1).sum());
    }
    layer.violates_hypothesis = !(layer.min_rate >= cfg.rate_floor);
    rep.any_violation = rep.any_violation || layer.violates_hypothesis;
    for (std::size_t k = 0; k < pops.size(); ++k) {
      const double m = pops[k].tail(n - layer.lower - 1).sum();
      if (!layer.tail_mass.empty() && m > layer.tail_mass.back() + 1e-12) layer.monotone = false;
      if (layer.crossing_time < 0.0 && m < layer.target) {
        if (k == 0) {
          layer.crossing_time = 0.0;
        } else {
          const double m_prev = layer.tail_mass.back();
          const double frac = (m_prev - layer.target) / (m_prev - m);
          layer.crossing_time = rep.times[k - 1] + frac * dt;
        }
      }
      layer.tail_mass.push_back(m);
    }
    rep.layers.push_back(std::move(layer));
  }
  return rep;
}

struct ConcentrationConfig {
  SpectralDecomposition spectrum;
  FilterParams params;  // must be clamped
  RealMatrix sigma;
  RealVector p0;
  std::vector<double> taus;
  double total_time = 1.0;
  int reps = 200;
  double max_dt = 0.0125;
  std::uint64_t seed = 0;
};

struct ConcentrationPoint {
  double tau = 0.0;
  double mean_deviation = 0.0;
  double se = 0.0;
};

struct ConcentrationReport {
  std::vector<ConcentrationPoint> points;
  double slope = 0.0;
  bool monotone = true;
};

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractViolation("loglog_slope: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

/// Frobenius deviation of single runs from diag(e^{Tt} p0) at the final time,
/// averaged over reps for each tau, with the log-log slope in tau.
inline ConcentrationReport concentration_experiment(const ConcentrationConfig& cfg) {
  const auto& spec = cfg.spectrum;
  const Eigen::Index n = spec.dim();
  require_probability_vector(cfg.p0, n, "concentration_experiment");
  if (cfg.taus.size() < 2 || cfg.reps < 1) throw ContractViolation("concentration_experiment: need two taus and reps >= 1");
  const RandomCouplingSpec rc{cfg.sigma, cfg.seed};
  rc.validate();
  const TransitionMatrix tm = transition_matrix(spec, cfg.params, cfg.sigma);
  const ComplexMatrix target = evolve_populations(tm, cfg.p0, cfg.total_time).cast<Complex>().asDiagonal();
  const HermitianOperator h = diagonal_hamiltonian(spec);

  ConcentrationReport rep;
  for (std::size_t k = 0; k < cfg.taus.size(); ++k) {
    const double tau = cfg.taus[k];
    const long steps = std::lround(cfg.total_time / tau);
    if (steps < 1 || std::abs(steps * tau - cfg.total_time) > 1e-9 * std::max(1.0, cfg.total_time)) {
      throw ContractViolation("concentration_experiment: total_time must be a multiple of every tau");
    }
    const int sub = std::max(1, static_cast<int>(std::ceil(tau / cfg.max_dt - 1e-9)));
    std::vector<double> dev(cfg.reps);
    parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t r) {
      Rng rng = make_stream(cfg.seed + 7919 * k, r);
      ComplexMatrix rho = cfg.p0.cast<Complex>().asDiagonal();
      for (long m = 0; m < steps; ++m) {
        rho = detail::random_coupling_step(spec, h, cfg.params, rc, rho, tau, sub, rng);
      }
      dev[r] = (rho - target).norm();
    });
    double sum = 0.0, sq = 0.0;
    for (double d : dev) {
      sum += d;
      sq += d * d;
    }
    ConcentrationPoint pt;
    pt.tau = tau;
    pt.mean_deviation = sum / cfg.reps;
    pt.se = cfg.reps > 1 ? std::sqrt(std::max(0.0, (sq - cfg.reps * pt.mean_deviation * pt.mean_deviation) /
                                                       (cfg.reps - 1.0)) / cfg.reps)
                         : 0.0;
    rep.points.push_back(pt);
  }
  std::vector<double> xs, ys;
  for (const auto& pt : rep.points) {
    xs.push_back(pt.tau);
    ys.push_back(pt.mean_deviation);
  }
  rep.slope = loglog_slope(xs, ys);
  for (std::size_t k = 1; k < rep.points.size(); ++k) {
    const bool smaller_tau = rep.points[k].tau < rep.points[k - 1].tau;
    const bool smaller_dev = rep.points[k].mean_deviation < rep.points[k - 1].mean_deviation;
    if (smaller_tau != smaller_dev) rep.monotone = false;
  }
  return rep;
}

}  // namespace lindground
