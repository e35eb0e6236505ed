// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MPLSQR_PICARD_HPP
#define MPLSQR_PICARD_HPP

#include "mplsqr/problems.hpp"

namespace mplsqr {

// Singular value decay classes, fitted over the reliable coefficient range:
//   severe    sigma_i ~ zeta * rho^-i        (rho > 1)
//   moderate  sigma_i ~ zeta * i^-alpha, alpha > 1
//   mild      sigma_i ~ zeta * i^-alpha, 1/2 < alpha <= 1
enum class DecayType { severe, moderate, mild };

std::string decay_name(DecayType type);

// SVD-based measurement of the discrete Picard condition of one instance.
//
// k_star is the last index before the noisy coefficients |u_i^T b| sink into
// the noise floor: the largest k with |u_i^T b| > 2 m^-1/2 ||e|| for all
// i <= k. The model |u_i^T b_ex| = rho0 * sigma_i^(1+beta) and the decay law
// are least-squares fits over i <= k_star in log space. fit_reliable is false
// when k_star < 3 or the fitted beta is not positive.
struct PicardDiagnostics {
  Vector sigma;        // singular values, non-increasing, > 0
  Vector coef_exact;   // |U^T b_ex|
  Vector coef_noisy;   // |U^T b|
  double noise_floor = 0.0;  // m^-1/2 ||e||
  int k_star = 1;
  double beta = 0.0;
  double rho0 = 0.0;
  DecayType decay = DecayType::severe;
  double decay_param = 0.0;  // rho for severe, alpha otherwise
  double zeta = 0.0;
  bool fit_reliable = false;
};

// Dense SVD analysis; requires A->to_dense() to be feasible (n within
// LinearOperator::dense_limit()). threshold_factor scales the noise floor
// used for k_star (default 2).
PicardDiagnostics picard_diagnostics(const ProblemInstance& inst,
                                     double threshold_factor = 2.0);

}  // namespace mplsqr

#endif  // MPLSQR_PICARD_HPP
