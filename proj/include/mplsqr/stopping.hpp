// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MPLSQR_STOPPING_HPP
#define MPLSQR_STOPPING_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mplsqr {

enum class StopRule {
  // Discrepancy principle: first k with ||b - A x_k|| <= tau ||e||. The
  // residual norm is the recurrence value phi_bar_{k+1}, so the check is
  // online and costs nothing.
  discrepancy,
  // L-curve corner of (log residual, log solution norm) by maximum discrete
  // Menger curvature.
  lcurve,
  // argmin_k ||x_k - x_ex|| / ||x_ex||; needs the exact solution, used as the
  // reference rule in experiments.
  oracle,
};

std::string stop_rule_name(StopRule rule);
StopRule parse_stop_rule(const std::string& name);

struct StopDecision {
  StopRule rule = StopRule::discrepancy;
  // Selected iteration index (1-based). 0 if the rule could not fire at all.
  int k1 = 0;
  // Iteration at which the decision was available; equals k1 for the online
  // discrepancy principle, the last recorded iteration for curve-based rules.
  int fired_at = 0;
  double tau = 0.0;       // discrepancy only
  bool fallback = false;  // true when lcurve found no corner and fell back
};

// True when phi_bar_next = ||b - A x_k|| crosses tau * norm_e. Requires
// norm_e > 0 and tau > 1.
bool discrepancy_fired(double phi_bar_next, double norm_e, double tau);

// Corner of the discrete L-curve. points[i] = (log ||b - A x_k||,
// log ||x_k||) for k = i+1. Points violating monotonicity (residual must
// strictly decrease, solution norm strictly increase) are dropped first;
// curvature candidates are clockwise turns only. Returns the 1-based k of
// the corner, or nullopt when fewer than 5 points survive or no clockwise
// turn exists (no detectable corner).
std::optional<int> lcurve_corner(
    const std::vector<std::pair<double, double>>& points);

// argmin of the relative error sequence (re[i] belongs to iteration i+1),
// ties resolved to the smaller k. Returns 1-based k, 0 for empty input.
int oracle_optimal(const std::vector<double>& re);

}  // namespace mplsqr

#endif  // MPLSQR_STOPPING_HPP
