// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MPLSQR_SVD_HPP
#define MPLSQR_SVD_HPP

#include <Eigen/Core>

namespace mplsqr {

struct SvdResult {
  Eigen::MatrixXd U;   // m x min(m,n)
  Eigen::VectorXd S;   // min(m,n), non-increasing
  Eigen::MatrixXd V;   // n x min(m,n)
};

// Economy-size SVD in double via LAPACK's divide-and-conquer driver. All
// diagnostics are measurements of a run, not part of it, so they always use
// full double precision regardless of the solver's stage specs.
SvdResult dense_svd(const Eigen::MatrixXd& A);

// Singular values only (same backend), non-increasing.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& A);

// Largest singular value only.
double spectral_norm(const Eigen::MatrixXd& A);

}  // namespace mplsqr

#endif  // MPLSQR_SVD_HPP
