// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mplsqr/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace mplsqr {

using detail::round_significand;

Vector mat_vec(const LinearOperator& A, const Vector& x,
               const PrecisionSpec& spec) {
  if (x.size() != A.cols()) {
    throw std::invalid_argument("mat_vec: size mismatch");
  }
  Vector y(A.rows());
  A.apply(x, y, spec);
  return y;
}

Vector mat_vec_transpose(const LinearOperator& A, const Vector& x,
                         const PrecisionSpec& spec) {
  if (x.size() != A.rows()) {
    throw std::invalid_argument("mat_vec_transpose: size mismatch");
  }
  Vector y(A.cols());
  A.apply_transpose(x, y, spec);
  return y;
}

DenseOperator::DenseOperator(Matrix A) : a64_(std::move(A)) {
  if (a64_.rows() < 1 || a64_.cols() < 1) {
    throw std::invalid_argument("DenseOperator: empty matrix");
  }
}

const RowMatrixf& DenseOperator::cache32() const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!a32_) {
    a32_ = std::make_shared<RowMatrixf>(a64_.cast<float>());
  }
  return *a32_;
}

const RowMatrix& DenseOperator::cache_emulated(const PrecisionSpec& spec) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = aemu_.find(spec.significand_bits());
  if (it == aemu_.end()) {
    auto rounded = std::make_shared<RowMatrix>(a64_);
    round_vector(rounded->data(), rounded->size(), spec);
    it = aemu_.emplace(spec.significand_bits(), std::move(rounded)).first;
  }
  return *it->second;
}

void DenseOperator::apply(const Vector& x, Vector& y,
                          const PrecisionSpec& spec) const {
  const Index m = a64_.rows();
  const Index n = a64_.cols();
  if (x.size() != n) {
    throw std::invalid_argument("DenseOperator::apply: size mismatch");
  }
  y.resize(m);
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64: {
      for (Index i = 0; i < m; ++i) {
        const double* row = a64_.data() + i * n;
        double acc = 0.0;
        for (Index j = 0; j < n; ++j) acc += row[j] * x[j];
        y[i] = acc;
      }
      return;
    }
    case PrecisionSpec::Kind::native32: {
      const RowMatrixf& a = cache32();
      Eigen::VectorXf xf = x.cast<float>();
      for (Index i = 0; i < m; ++i) {
        const float* row = a.data() + i * n;
        float acc = 0.0f;
        for (Index j = 0; j < n; ++j) acc += row[j] * xf[j];
        y[i] = static_cast<double>(acc);
      }
      return;
    }
    case PrecisionSpec::Kind::emulated: {
      const RowMatrix& a = cache_emulated(spec);
      const int shift = 53 - spec.significand_bits();
      for (Index i = 0; i < m; ++i) {
        const double* row = a.data() + i * n;
        double acc = 0.0;
        for (Index j = 0; j < n; ++j) {
          acc = round_significand(acc + round_significand(row[j] * x[j], shift), shift);
        }
        y[i] = acc;
      }
      return;
    }
  }
}

// A^T x accumulated row by row: y_j gathers its products in ascending row
// order, the same left-to-right order a column dot product would use.
void DenseOperator::apply_transpose(const Vector& x, Vector& y,
                                    const PrecisionSpec& spec) const {
  const Index m = a64_.rows();
  const Index n = a64_.cols();
  if (x.size() != m) {
    throw std::invalid_argument("DenseOperator::apply_transpose: size mismatch");
  }
  y.resize(n);
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64: {
      y.setZero();
      for (Index i = 0; i < m; ++i) {
        const double* row = a64_.data() + i * n;
        const double xi = x[i];
        for (Index j = 0; j < n; ++j) y[j] += row[j] * xi;
      }
      return;
    }
    case PrecisionSpec::Kind::native32: {
      const RowMatrixf& a = cache32();
      Eigen::VectorXf acc = Eigen::VectorXf::Zero(n);
      for (Index i = 0; i < m; ++i) {
        const float* row = a.data() + i * n;
        const float xi = static_cast<float>(x[i]);
        for (Index j = 0; j < n; ++j) acc[j] += row[j] * xi;
      }
      y = acc.cast<double>();
      return;
    }
    case PrecisionSpec::Kind::emulated: {
      const RowMatrix& a = cache_emulated(spec);
      const int shift = 53 - spec.significand_bits();
      y.setZero();
      for (Index i = 0; i < m; ++i) {
        const double* row = a.data() + i * n;
        const double xi = x[i];
        for (Index j = 0; j < n; ++j) {
          y[j] = round_significand(y[j] + round_significand(row[j] * xi, shift), shift);
        }
      }
      return;
    }
  }
}

BlurOperator::BlurOperator(int image_size, Matrix psf)
    : N_(image_size), n_(static_cast<Index>(image_size) * image_size),
      psf64_(std::move(psf)) {
  if (N_ < 3) throw std::invalid_argument("BlurOperator: image size < 3");
  if (psf64_.rows() != psf64_.cols() || psf64_.rows() % 2 == 0) {
    throw std::invalid_argument("BlurOperator: PSF must be square with odd size");
  }
  r_ = static_cast<int>(psf64_.rows() / 2);
  if (2 * r_ + 1 > N_) {
    throw std::invalid_argument("BlurOperator: PSF larger than image");
  }
  const double sum = psf64_.sum();
  if (!(sum > 0.0)) throw std::invalid_argument("BlurOperator: PSF sum <= 0");
  psf64_ /= sum;
  psf32_ = psf64_.cast<float>();
}

Matrix BlurOperator::gaussian_psf(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_psf: sigma <= 0");
  const int r = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  Matrix psf(2 * r + 1, 2 * r + 1);
  for (int p = -r; p <= r; ++p) {
    for (int q = -r; q <= r; ++q) {
      psf(p + r, q + r) = std::exp(-(p * p + q * q) / (2.0 * sigma * sigma));
    }
  }
  return psf / psf.sum();
}

Matrix BlurOperator::disk_psf(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk_psf: radius <= 0");
  const int r = std::max(1, static_cast<int>(std::ceil(radius)));
  Matrix psf = Matrix::Zero(2 * r + 1, 2 * r + 1);
  for (int p = -r; p <= r; ++p) {
    for (int q = -r; q <= r; ++q) {
      if (p * p + q * q <= radius * radius) psf(p + r, q + r) = 1.0;
    }
  }
  return psf / psf.sum();
}

const Matrix& BlurOperator::psf_emulated(const PrecisionSpec& spec) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = psfemu_.find(spec.significand_bits());
  if (it == psfemu_.end()) {
    auto rounded = std::make_shared<Matrix>(psf64_);
    round_vector(rounded->data(), rounded->size(), spec);
    it = psfemu_.emplace(spec.significand_bits(), std::move(rounded)).first;
  }
  return *it->second;
}

namespace {

// One output pixel of the (adjoint) convolution, in each arithmetic model.
// Out-of-range taps contribute exact zeros under zero boundary conditions,
// so skipping them leaves the rounded accumulation unchanged.

inline double conv_pixel_f64(const Matrix& psf, const double* x, int N, int r,
                             int i, int j, int sgn) {
  double acc = 0.0;
  for (int p = -r; p <= r; ++p) {
    const int ii = i + sgn * p;
    if (ii < 0 || ii >= N) continue;
    for (int q = -r; q <= r; ++q) {
      const int jj = j + sgn * q;
      if (jj < 0 || jj >= N) continue;
      acc += psf(p + r, q + r) * x[ii * N + jj];
    }
  }
  return acc;
}

inline float conv_pixel_f32(const Eigen::MatrixXf& psf, const float* x, int N,
                            int r, int i, int j, int sgn) {
  float acc = 0.0f;
  for (int p = -r; p <= r; ++p) {
    const int ii = i + sgn * p;
    if (ii < 0 || ii >= N) continue;
    for (int q = -r; q <= r; ++q) {
      const int jj = j + sgn * q;
      if (jj < 0 || jj >= N) continue;
      acc += psf(p + r, q + r) * x[ii * N + jj];
    }
  }
  return acc;
}

inline double conv_pixel_emu(const Matrix& psf, const double* x, int N, int r,
                             int i, int j, int sgn, int shift) {
  double acc = 0.0;
  for (int p = -r; p <= r; ++p) {
    const int ii = i + sgn * p;
    if (ii < 0 || ii >= N) continue;
    for (int q = -r; q <= r; ++q) {
      const int jj = j + sgn * q;
      if (jj < 0 || jj >= N) continue;
      acc = round_significand(acc + round_significand(psf(p + r, q + r) * x[ii * N + jj], shift),
                      shift);
    }
  }
  return acc;
}

}  // namespace

// Convolution reads x at (i - p, j - q); the adjoint (correlation) reads at
// (i + p, j + q). sgn selects between them.
void BlurOperator::apply(const Vector& x, Vector& y,
                         const PrecisionSpec& spec) const {
  if (x.size() != n_) {
    throw std::invalid_argument("BlurOperator::apply: size mismatch");
  }
  y.resize(n_);
  const int sgn = -1;
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64: {
      for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j)
          y[i * N_ + j] = conv_pixel_f64(psf64_, x.data(), N_, r_, i, j, sgn);
      return;
    }
    case PrecisionSpec::Kind::native32: {
      Eigen::VectorXf xf = x.cast<float>();
      for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j)
          y[i * N_ + j] = static_cast<double>(
              conv_pixel_f32(psf32_, xf.data(), N_, r_, i, j, sgn));
      return;
    }
    case PrecisionSpec::Kind::emulated: {
      const Matrix& psf = psf_emulated(spec);
      const int shift = 53 - spec.significand_bits();
      for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j)
          y[i * N_ + j] =
              conv_pixel_emu(psf, x.data(), N_, r_, i, j, sgn, shift);
      return;
    }
  }
}

void BlurOperator::apply_transpose(const Vector& x, Vector& y,
                                   const PrecisionSpec& spec) const {
  if (x.size() != n_) {
    throw std::invalid_argument("BlurOperator::apply_transpose: size mismatch");
  }
  y.resize(n_);
  const int sgn = 1;
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64: {
      for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j)
          y[i * N_ + j] = conv_pixel_f64(psf64_, x.data(), N_, r_, i, j, sgn);
      return;
    }
    case PrecisionSpec::Kind::native32: {
      Eigen::VectorXf xf = x.cast<float>();
      for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j)
          y[i * N_ + j] = static_cast<double>(
              conv_pixel_f32(psf32_, xf.data(), N_, r_, i, j, sgn));
      return;
    }
    case PrecisionSpec::Kind::emulated: {
      const Matrix& psf = psf_emulated(spec);
      const int shift = 53 - spec.significand_bits();
      for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j)
          y[i * N_ + j] =
              conv_pixel_emu(psf, x.data(), N_, r_, i, j, sgn, shift);
      return;
    }
  }
}

Matrix BlurOperator::to_dense() const {
  if (n_ > dense_limit()) {
    throw std::runtime_error("BlurOperator::to_dense: image too large");
  }
  Matrix A = Matrix::Zero(n_, n_);
  for (int i = 0; i < N_; ++i) {
    for (int j = 0; j < N_; ++j) {
      const Index row = i * N_ + j;
      for (int p = -r_; p <= r_; ++p) {
        const int ii = i - p;
        if (ii < 0 || ii >= N_) continue;
        for (int q = -r_; q <= r_; ++q) {
          const int jj = j - q;
          if (jj < 0 || jj >= N_) continue;
          A(row, ii * N_ + jj) = psf64_(p + r_, q + r_);
        }
      }
    }
  }
  return A;
}

}  // namespace mplsqr
