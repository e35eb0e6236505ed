// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MPLSQR_ADVISOR_HPP
#define MPLSQR_ADVISOR_HPP

#include <string>
#include <vector>

#include "mplsqr/picard.hpp"

namespace mplsqr {

// Closed-form accuracy model for one problem instance, evaluated from the
// decay-model parameters (fitted or user-supplied). All quantities use the
// normalized noise level eps = ||e|| / ||b_ex||; the classical forms in terms
// of ||e|| follow by scaling with ||b_ex||.

// Effective resolution limit (m^-1/2 eps)^(beta/(1+beta)): solution
// coefficients below it are unrecoverable from the noisy data.
// Requires eps in (0,1), beta > 0, m >= 1.
double resolution_limit(double eps, Index m, double beta);

// Smallest achievable relative error C1 * eps^(beta/(1+beta)). C1 is a
// moderate constant reported as exactly 1 here; treat the floor as an order
// of magnitude.
double accuracy_floor(double eps, double beta);

struct UBound {
  double value = 0.0;   // varrho * (m^-1/2 eps)^((2+beta)/(1+beta))
  double loose = 0.0;   // min{eps, (m^-1/2 eps)^(1/(1+beta))}, sanity bound
  double varrho = 0.0;  // min{1, rho - 1} or min{1, ((k*+1)/k*)^alpha - 1}
};

// Upper bound on the bidiagonalization roundoff unit below which the best
// regularized solution is as accurate as in exact arithmetic. Severe decay
// requires decay_param (= rho) > 1; moderate/mild use decay_param (= alpha)
// > 0 and k_star >= 1.
UBound u_upper_bound(double eps, Index m, double beta, DecayType decay,
                     double decay_param, int k_star);

// Cheapest spec whose unit satisfies unit * safety <= u_bound, scanning the
// candidates from cheapest to most precise. Falls back to the most precise
// candidate with *marginal set when none qualifies. Default candidates are
// {Native32, Native64}; pass an explicit grid for emulated-precision studies.
PrecisionSpec recommend(double u_bound, double safety, bool* marginal);
PrecisionSpec recommend(double u_bound, double safety,
                        const std::vector<PrecisionSpec>& candidates,
                        bool* marginal);

struct AdvisorReport {
  double eps = 0.0;
  Index m = 0;
  // Decay-model inputs.
  double beta = 0.0;
  double rho0 = 0.0;
  DecayType decay = DecayType::severe;
  double decay_param = 0.0;
  int k_star = 0;
  bool fit_reliable = true;

  double eta_res = 0.0;
  double floor = 0.0;  // C1 = 1
  double varrho = 0.0;
  double u_bound = 0.0;
  double u_bound_loose = 0.0;

  double safety = 10.0;
  PrecisionSpec recommended = PrecisionSpec::native64();
  double margin = 0.0;  // u_bound / recommended.unit()
  bool marginal = false;

  std::vector<std::string> warnings;

  std::string to_text() const;
  std::string to_json() const;
};

// Builds the full report from fitted diagnostics. Throws
// std::invalid_argument when the fitted beta is not positive (supply model
// parameters manually in that case).
AdvisorReport advise(const PicardDiagnostics& diag, double eps, Index m,
                     double safety = 10.0);

// Same report from user-supplied model parameters (large problems where the
// dense SVD is infeasible).
AdvisorReport advise_manual(double eps, Index m, double beta, DecayType decay,
                            double decay_param, int k_star,
                            double safety = 10.0);

}  // namespace mplsqr

#endif  // MPLSQR_ADVISOR_HPP
