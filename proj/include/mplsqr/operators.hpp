// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MPLSQR_OPERATORS_HPP
#define MPLSQR_OPERATORS_HPP

#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Core>

#include "mplsqr/precision.hpp"

namespace mplsqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixf =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Matrix-free interface used by the bidiagonalization. apply/apply_transpose
// run entirely in the given precision spec: the operator entries are rounded
// to the spec once (cached) and every multiply/accumulate is rounded, with a
// fixed left-to-right accumulation order for reproducibility.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;

  // y = A x, |y| = rows(). Throws std::invalid_argument on size mismatch.
  virtual void apply(const Vector& x, Vector& y,
                     const PrecisionSpec& spec) const = 0;
  // y = A^T x, |y| = cols(). Throws std::invalid_argument on size mismatch.
  virtual void apply_transpose(const Vector& x, Vector& y,
                               const PrecisionSpec& spec) const = 0;

  // Full double-precision matrix, for SVD-based diagnostics and small
  // oracles. Throws std::runtime_error above dense_limit() entries per side.
  virtual Matrix to_dense() const = 0;

  static constexpr Index dense_limit() { return 4096; }
};

// y = A x under the spec; convenience wrapper allocating the result.
Vector mat_vec(const LinearOperator& A, const Vector& x,
               const PrecisionSpec& spec);
Vector mat_vec_transpose(const LinearOperator& A, const Vector& x,
                         const PrecisionSpec& spec);

// Explicitly stored dense operator (row-major so both A x and A^T x stream
// rows). Lower-precision copies of the entries are built lazily per spec and
// shared across calls.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix A);

  Index rows() const override { return a64_.rows(); }
  Index cols() const override { return a64_.cols(); }

  void apply(const Vector& x, Vector& y,
             const PrecisionSpec& spec) const override;
  void apply_transpose(const Vector& x, Vector& y,
                       const PrecisionSpec& spec) const override;

  Matrix to_dense() const override { return a64_; }

 private:
  const RowMatrixf& cache32() const;
  const RowMatrix& cache_emulated(const PrecisionSpec& spec) const;

  RowMatrix a64_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<RowMatrixf> a32_;
  mutable std::map<int, std::shared_ptr<RowMatrix>> aemu_;
};

// Two-dimensional convolution blur on an N x N image with zero boundary
// conditions. Pixels are flattened row-major, so the operator acts on vectors
// of length N^2. The PSF is a (2r+1) x (2r+1) stencil normalized to unit sum;
// apply() convolves, apply_transpose() correlates (the exact adjoint under
// zero padding).
class BlurOperator final : public LinearOperator {
 public:
  BlurOperator(int image_size, Matrix psf);

  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  int image_size() const { return N_; }
  int psf_radius() const { return r_; }
  const Matrix& psf() const { return psf64_; }

  void apply(const Vector& x, Vector& y,
             const PrecisionSpec& spec) const override;
  void apply_transpose(const Vector& x, Vector& y,
                       const PrecisionSpec& spec) const override;

  Matrix to_dense() const override;

  // Truncated at 4 sigma. Sum normalized to 1.
  static Matrix gaussian_psf(double sigma);
  // Indicator of p^2 + q^2 <= radius^2, normalized to 1.
  static Matrix disk_psf(double radius);

 private:
  template <typename Accessor>
  void convolve(const Vector& x, Vector& y, bool adjoint,
                const PrecisionSpec& spec) const;

  const Matrix& psf_emulated(const PrecisionSpec& spec) const;

  int N_ = 0;
  Index n_ = 0;
  int r_ = 0;
  Matrix psf64_;
  Eigen::MatrixXf psf32_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::shared_ptr<Matrix>> psfemu_;
};

}  // namespace mplsqr

#endif  // MPLSQR_OPERATORS_HPP
