// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mplsqr/svd.hpp"

#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace mplsqr {

SvdResult dense_svd(const Eigen::MatrixXd& A) {
  const lapack_int m = static_cast<lapack_int>(A.rows());
  const lapack_int n = static_cast<lapack_int>(A.cols());
  if (m < 1 || n < 1) throw std::invalid_argument("dense_svd: empty matrix");
  const lapack_int k = std::min(m, n);

  Eigen::MatrixXd a = A;  // dgesdd destroys its input
  SvdResult r;
  r.U.resize(m, k);
  r.S.resize(k);
  Eigen::MatrixXd vt(k, n);

  const lapack_int info = LAPACKE_dgesdd(
      LAPACK_COL_MAJOR, 'S', m, n, a.data(), m, r.S.data(), r.U.data(), m,
      vt.data(), k);
  if (info != 0) {
    throw std::runtime_error("dense_svd: dgesdd failed, info = " +
                             std::to_string(info));
  }
  r.V = vt.transpose();
  return r;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& A) {
  const lapack_int m = static_cast<lapack_int>(A.rows());
  const lapack_int n = static_cast<lapack_int>(A.cols());
  if (m < 1 || n < 1) {
    throw std::invalid_argument("singular_values: empty matrix");
  }
  Eigen::MatrixXd a = A;
  Eigen::VectorXd s(std::min(m, n));
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(),
                                         m, s.data(), nullptr, m, nullptr, 1);
  if (info != 0) {
    throw std::runtime_error("singular_values: dgesdd failed, info = " +
                             std::to_string(info));
  }
  return s;
}

double spectral_norm(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  return singular_values(A)[0];
}

}  // namespace mplsqr
