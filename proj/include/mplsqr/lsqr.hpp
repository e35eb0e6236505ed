// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MPLSQR_LSQR_HPP
#define MPLSQR_LSQR_HPP

#include <optional>
#include <string>
#include <vector>

#include "mplsqr/problems.hpp"
#include "mplsqr/stopping.hpp"

namespace mplsqr {

// One plane rotation of the QR factorization of the lower bidiagonal matrix.
// These scalars always live in double: there are O(k) of them against O(kn)
// vector operations, so keeping them exact costs nothing and removes the
// rotation as an error source.
struct GivensState {
  double rho_bar = 0.0;
  double phi_bar = 0.0;
};

struct GivensCoeffs {
  double rho = 0.0;
  double c = 0.0;
  double s = 0.0;
  double theta_next = 0.0;
  double phi = 0.0;
  GivensState next;
};

// rho = (rho_bar^2 + beta_next^2)^(1/2), c = rho_bar/rho, s = beta_next/rho,
// theta_next = s alpha_next, next.rho_bar = -c alpha_next, phi = c phi_bar,
// next.phi_bar = s phi_bar. Throws std::domain_error when rho_bar and
// beta_next are both zero.
GivensCoeffs givens_step(const GivensState& g, double beta_next,
                         double alpha_next);

// Solution and search direction update, all arithmetic in `spec`:
//   x += (phi/rho) w;  w = q_next - (theta_next/rho) w
// The two ratios are formed in double and rounded into the spec once. A null
// q_next (terminated bidiagonalization) performs only the x update.
struct UpdateState {
  Vector x;
  Vector w;
  PrecisionSpec spec = PrecisionSpec::native64();
};
void update_step(UpdateState& u, const double* q_next, double rho, double phi,
                 double theta_next);

// Condition number of the k x k unit-diagonal upper bidiagonal matrix with
// the given superdiagonal (theta_{i+1}/rho_i of the QR recurrence). This is
// the growth factor that controls how the update-stage roundoff can be
// amplified across iterations.
double kappa_rhat(const std::vector<double>& superdiag);

struct SolverConfig {
  // Stage precisions: bidiagonalization vectors, and solution/direction
  // updates. The rotation scalars are always double.
  PrecisionSpec bidiag_spec = PrecisionSpec::native64();
  PrecisionSpec update_spec = PrecisionSpec::native64();
  bool reorthogonalize = true;
  int max_iter = 60;

  std::vector<StopRule> rules;
  double tau = 1.001;  // discrepancy principle threshold factor

  // With full_history the solver keeps iterating after an online rule fires
  // so the semi-convergence curve is visible past the stop; overshoot caps
  // that at max(ceil(overshoot_factor * k1), k1 + overshoot_extra).
  bool full_history = true;
  bool overshoot = true;
  double overshoot_factor = 1.5;
  int overshoot_extra = 20;

  bool store_iterates = true;
  std::string label;
};

struct IterRecord {
  int k = 0;
  double phi_bar_next = 0.0;  // recurrence estimate of ||b - A x_k||
  double norm_x = 0.0;
  double re = 0.0;  // ||x_k - x_ex|| / ||x_ex||
  double kappa = 0.0;  // kappa of the k x k unit upper bidiagonal factor
  double mu = 0.0;     // orthogonality level of P_{k+1}
  double nu = 0.0;     // orthogonality level of Q_{k+1}
  double t_bidiag = 0.0, t_givens = 0.0, t_update = 0.0;  // seconds
};

struct SolverHistory {
  std::string label;
  PrecisionSpec bidiag_spec, update_spec;
  bool reorth = true;
  double tau = 0.0;

  // Instance identity, so runs can be compared safely.
  std::string problem;
  Index m = 0, n = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;

  double beta1 = 0.0;
  double norm_e = 0.0;
  double norm_x_ex = 0.0;

  std::vector<IterRecord> iters;
  std::vector<Vector> iterates;  // x_k in double, iterates[k-1]

  std::vector<StopDecision> decisions;
  std::vector<Vector> selected;  // solution per decision, may be empty

  bool terminated_early = false;
  std::string termination;  // why the run ended before max_iter

  int iterations() const { return static_cast<int>(iters.size()); }
  const IterRecord& at(int k) const { return iters.at(k - 1); }
  std::optional<StopDecision> decision(StopRule rule) const;
  // Null when the rule has no stored solution (not fired, or iterate
  // storage was off and the rule was not online).
  const Vector* solution(StopRule rule) const;
};

SolverHistory solve(const ProblemInstance& inst, const SolverConfig& cfg);

}  // namespace mplsqr

#endif  // MPLSQR_LSQR_HPP
