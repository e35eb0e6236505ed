// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mplsqr/bidiag.hpp"

#include <cmath>
#include <stdexcept>

#include "mplsqr/svd.hpp"

namespace mplsqr {

namespace {

Matrix strict_upper_defect(const Matrix& gram, int k) {
  Matrix M = Matrix::Zero(k, k);
  for (int j = 1; j < k; ++j) {
    for (int i = 0; i < j; ++i) M(i, j) = -gram(i, j);
  }
  return M;
}

}  // namespace

double orthogonality_level(const Eigen::Ref<const Matrix>& M) {
  const int k = static_cast<int>(M.cols());
  if (k <= 1) return 0.0;
  const Matrix gram = M.transpose() * M;
  return spectral_norm(strict_upper_defect(gram, k));
}

BidiagEngine::BidiagEngine(const LinearOperator& A, const Vector& b,
                           const PrecisionSpec& spec, bool reorthogonalize,
                           int reserve_steps)
    : A_(A), spec_(spec), reorth_(reorthogonalize), m_(A.rows()), n_(A.cols()) {
  if (b.size() != m_) {
    throw std::invalid_argument("BidiagEngine: b has wrong length");
  }
  const int reserve = std::max(reserve_steps, 4) + 1;
  P_.resize(m_, reserve);
  Q_.resize(n_, reserve);
  gram_p_ = Matrix::Zero(reserve, reserve);
  gram_q_ = Matrix::Zero(reserve, reserve);
  work_m_.resize(m_);
  work_n_.resize(n_);

  work_m_ = b;
  round_vector(work_m_.data(), m_, spec_);
  const double beta1 = vec_norm(work_m_.data(), m_, spec_);
  if (beta1 == 0.0) {
    throw std::invalid_argument("BidiagEngine: b rounds to zero");
  }
  vec_divide(beta1, work_m_.data(), m_, spec_);
  mu_ = append_column(P_, gram_p_, pcols_, work_m_.data(), m_);
  betas_.push_back(beta1);

  A_.apply_transpose(work_m_, work_n_, spec_);
  const double alpha1 = vec_norm(work_n_.data(), n_, spec_);
  norm_est_ = alpha1;
  if (alpha1 == 0.0) {
    // b is orthogonal to range(A); the least squares solution is x = 0.
    terminated_ = true;
    alphas_.push_back(0.0);
    return;
  }
  vec_divide(alpha1, work_n_.data(), n_, spec_);
  nu_ = append_column(Q_, gram_q_, qcols_, work_n_.data(), n_);
  alphas_.push_back(alpha1);
}

void BidiagEngine::grow(Matrix& mat, Matrix& gram, Index len) {
  const Index next = mat.cols() * 2;
  mat.conservativeResize(len, next);
  gram.conservativeResize(next, next);
}

// Two classical Gram-Schmidt passes: all coefficients of a pass are taken
// against the vector as it was at the start of the pass, then subtracted.
void BidiagEngine::reorth_against(Matrix& basis, int ncols, double* v,
                                  Index len) {
  std::vector<double> coef(static_cast<std::size_t>(ncols));
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < ncols; ++i) {
      coef[i] = vec_dot(basis.data() + static_cast<Index>(i) * len, v, len,
                        spec_);
    }
    for (int i = 0; i < ncols; ++i) {
      vec_axpy(-coef[i], basis.data() + static_cast<Index>(i) * len, v, len,
               spec_);
    }
  }
}

double BidiagEngine::append_column(Matrix& basis, Matrix& gram, int& ncols,
                                   const double* v, Index len) {
  if (ncols + 1 > basis.cols()) grow(basis, gram, len);
  basis.col(ncols) = Eigen::Map<const Vector>(v, len);
  if (ncols > 0) {
    gram.block(0, ncols, ncols, 1).noalias() =
        basis.leftCols(ncols).transpose() * basis.col(ncols);
  }
  ++ncols;
  if (ncols == 1) return 0.0;
  return spectral_norm(strict_upper_defect(gram, ncols));
}

BidiagEngine::StepResult BidiagEngine::step() {
  if (terminated_) {
    throw std::logic_error("BidiagEngine::step called after termination");
  }
  const int s = steps_ + 1;  // producing beta_{s+1}, alpha_{s+1}
  const double alpha_s = alphas_[s - 1];

  // beta_{s+1} p_{s+1} = A q_s - alpha_s p_s
  Vector qs = Q_.col(s - 1);
  A_.apply(qs, work_m_, spec_);
  vec_axpy(-alpha_s, P_.data() + static_cast<Index>(s - 1) * m_,
           work_m_.data(), m_, spec_);
  if (reorth_) reorth_against(P_, pcols_, work_m_.data(), m_);
  const double beta = vec_norm(work_m_.data(), m_, spec_);

  norm_est_ = std::max(norm_est_, std::hypot(alpha_s, beta));
  const double threshold = 10.0 * spec_.unit() * norm_est_;
  if (beta <= threshold) {
    terminated_ = true;
    return {StepStatus::terminated_beta, 0.0, 0.0, nullptr};
  }
  vec_divide(beta, work_m_.data(), m_, spec_);
  mu_ = append_column(P_, gram_p_, pcols_, work_m_.data(), m_);
  betas_.push_back(beta);

  // alpha_{s+1} q_{s+1} = A^T p_{s+1} - beta_{s+1} q_s
  A_.apply_transpose(work_m_, work_n_, spec_);
  vec_axpy(-beta, Q_.data() + static_cast<Index>(s - 1) * n_, work_n_.data(),
           n_, spec_);
  if (reorth_) reorth_against(Q_, qcols_, work_n_.data(), n_);
  const double alpha = vec_norm(work_n_.data(), n_, spec_);

  if (alpha <= threshold) {
    terminated_ = true;
    return {StepStatus::terminated_alpha, beta, 0.0, nullptr};
  }
  vec_divide(alpha, work_n_.data(), n_, spec_);
  nu_ = append_column(Q_, gram_q_, qcols_, work_n_.data(), n_);
  alphas_.push_back(alpha);
  steps_ = s;
  return {StepStatus::ok, beta, alpha,
          Q_.data() + static_cast<Index>(qcols_ - 1) * n_};
}

}  // namespace mplsqr
