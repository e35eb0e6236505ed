// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MPLSQR_BIDIAG_HPP
#define MPLSQR_BIDIAG_HPP

#include <vector>

#include "mplsqr/operators.hpp"

namespace mplsqr {

// Lower bidiagonalization of (A, b): after k steps
//
//   A  Q_k     = P_{k+1} B_k,          B_k (k+1) x k lower bidiagonal,
//   A^T P_{k+1} = Q_{k+1} B_{k+1,k+1}^T
//
// with beta_1 p_1 = b and alpha_1 q_1 = A^T p_1. All vector arithmetic runs
// under the given precision spec; new basis vectors are reorthogonalized
// against all stored ones with two classical Gram-Schmidt passes (when
// enabled), which keeps the orthogonality level near the spec's unit
// roundoff instead of degrading with the condition of the leading singular
// cluster.
//
// Orthogonality levels mu (for P) and nu (for Q) are the spectral norm of
// the strictly upper triangular part of I - M^T M, updated incrementally in
// double; they are measurements of the run, not part of it.
class BidiagEngine {
 public:
  enum class StepStatus {
    ok,
    // beta_{k+1} fell below 10 u ||A||_est: b is exhausted, the projected
    // problem is solved exactly by the current Krylov space.
    terminated_beta,
    // alpha_{k+1} fell below the same threshold after a valid beta/p pair.
    terminated_alpha,
  };

  struct StepResult {
    StepStatus status = StepStatus::ok;
    // beta_{k+1} and alpha_{k+1}; quantities below the termination threshold
    // are reported as exactly zero.
    double beta_next = 0.0;
    double alpha_next = 0.0;
    // Spec-rounded q_{k+1} (size n), null when the step terminated.
    const double* q_next = nullptr;
  };

  // Rounds b into the spec and computes beta_1 = ||b||, p_1, alpha_1, q_1.
  // Throws std::invalid_argument for b = 0 or size mismatch.
  BidiagEngine(const LinearOperator& A, const Vector& b,
               const PrecisionSpec& spec, bool reorthogonalize,
               int reserve_steps = 32);

  StepResult step();

  int steps() const { return steps_; }
  bool terminated() const { return terminated_; }
  const PrecisionSpec& spec() const { return spec_; }

  double beta1() const { return betas_[0]; }
  double alpha1() const { return alphas_[0]; }
  // alphas()[i] = alpha_{i+1}, betas()[i] = beta_{i+1} (0-based storage).
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<double>& betas() const { return betas_; }

  // Stored Lanczos vectors, one column per vector.
  Eigen::Ref<const Matrix> P() const { return P_.leftCols(pcols_); }
  Eigen::Ref<const Matrix> Q() const { return Q_.leftCols(qcols_); }

  double mu() const { return mu_; }
  double nu() const { return nu_; }
  double norm_estimate() const { return norm_est_; }

 private:
  void reorth_against(Matrix& basis, int ncols, double* v, Index len);
  void grow(Matrix& mat, Matrix& gram, Index len);
  double append_column(Matrix& basis, Matrix& gram, int& ncols,
                       const double* v, Index len);

  const LinearOperator& A_;
  PrecisionSpec spec_;
  bool reorth_;
  Index m_, n_;
  int steps_ = 0;
  bool terminated_ = false;

  std::vector<double> alphas_, betas_;
  Matrix P_, Q_;
  int pcols_ = 0, qcols_ = 0;

  // Cross-Gram matrices of the stored bases plus current orthogonality
  // levels; all in double.
  Matrix gram_p_, gram_q_;
  double mu_ = 0.0, nu_ = 0.0;
  double norm_est_ = 0.0;

  Vector work_m_, work_n_;
};

// Spectral norm of the strictly upper triangular part of I - M^T M, the
// standard loss-of-orthogonality measure. Always evaluated in double.
double orthogonality_level(const Eigen::Ref<const Matrix>& M);

}  // namespace mplsqr

#endif  // MPLSQR_BIDIAG_HPP
