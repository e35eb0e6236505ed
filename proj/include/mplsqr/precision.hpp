// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MPLSQR_PRECISION_HPP
#define MPLSQR_PRECISION_HPP

#include <bit>
#include <cstdint>
#include <string>

#include <Eigen/Core>

namespace mplsqr {

using Index = Eigen::Index;

namespace detail {

// Rounds the significand of a finite double to 53 - shift bits,
// round-to-nearest-even, by clearing the low `shift` mantissa bits. A carry
// out of the mantissa increments the exponent field, which is exactly the
// IEEE behaviour when rounding up to the next binade. shift in [1, 51].
inline double round_significand(double x, int shift) {
  std::uint64_t u = std::bit_cast<std::uint64_t>(x);
  const std::uint64_t one = 1;
  const std::uint64_t mask = (one << shift) - 1;
  const std::uint64_t low = u & mask;
  const std::uint64_t half = one << (shift - 1);
  u &= ~mask;
  if (low > half || (low == half && (u & (one << shift)))) {
    u += one << shift;
  }
  return std::bit_cast<double>(u);
}

}  // namespace detail

// A working precision for a solver stage. All storage is IEEE double; a spec
// only controls how each scalar operation result is rounded:
//
//   Native64     hardware double, u = 2^-53
//   Native32     hardware float,  u = 2^-24
//   Emulated(t)  double arithmetic rounded to t significand bits, u = 2^-t,
//                2 <= t <= 52 (the exponent range stays that of double)
//
// Emulated rounding is round-to-nearest-even on the significand. An emulated
// add/mul/div rounds the double result once more to t bits, so results can
// differ from a true t-bit FPU by one ulp in rare double-rounding cases; every
// operation still satisfies fl(a op b) = (a op b)(1 + eps) with |eps| <= 2^-t.
class PrecisionSpec {
 public:
  enum class Kind { native64, native32, emulated };

  PrecisionSpec() = default;

  static PrecisionSpec native64() { return PrecisionSpec(Kind::native64, 53); }
  static PrecisionSpec native32() { return PrecisionSpec(Kind::native32, 24); }
  static PrecisionSpec emulated(int bits);

  Kind kind() const { return kind_; }
  // Total significand bits including the implicit leading bit.
  int significand_bits() const { return bits_; }
  // Unit roundoff u = 2^-significand_bits.
  double unit() const { return unit_; }

  // "f64", "f32", "emu<t>". parse() accepts exactly these forms.
  std::string to_string() const;
  static PrecisionSpec parse(const std::string& text);

  bool operator==(const PrecisionSpec& o) const {
    return kind_ == o.kind_ && bits_ == o.bits_;
  }
  bool operator!=(const PrecisionSpec& o) const { return !(*this == o); }

 private:
  PrecisionSpec(Kind kind, int bits);

  Kind kind_ = Kind::native64;
  int bits_ = 53;
  double unit_ = 1.1102230246251565e-16;  // 2^-53
};

// Rounds one finite double to the spec's significand width (identity for
// Native64). Round-to-nearest-even in all cases.
double round_scalar(double x, const PrecisionSpec& spec);

enum class ScalarOp { add, sub, mul, div };

// fl(a op b) under the spec: the double result rounded once to spec width.
// Operands are expected to already be representable in the spec.
double rounded_op(double a, double b, ScalarOp op, const PrecisionSpec& spec);

// Vector kernels. Fixed evaluation order: reductions accumulate left to
// right, one rounding per scalar operation, so results are reproducible
// bit-for-bit across runs for a given spec. No overflow/underflow scaling:
// vec_norm squares entries directly, so magnitudes below ~1e-154 vanish.

// sum_i x_i * y_i
double vec_dot(const double* x, const double* y, Index n,
               const PrecisionSpec& spec);

// sqrt(sum_i x_i^2), the sqrt rounded to spec width as well
double vec_norm(const double* x, Index n, const PrecisionSpec& spec);

// y_i := fl(y_i + fl(a * x_i))
void vec_axpy(double a, const double* x, double* y, Index n,
              const PrecisionSpec& spec);

// x_i := fl(a * x_i)
void vec_scale(double a, double* x, Index n, const PrecisionSpec& spec);

// x_i := fl(x_i / d)
void vec_divide(double d, double* x, Index n, const PrecisionSpec& spec);

// w_i := fl(q_i - fl(a * w_i))
void vec_sub_scaled(const double* q, double a, double* w, Index n,
                    const PrecisionSpec& spec);

// x_i := round_scalar(x_i)
void round_vector(double* x, Index n, const PrecisionSpec& spec);

// Eigen conveniences over the raw-pointer kernels above.
inline double vec_dot(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      const PrecisionSpec& spec) {
  return vec_dot(x.data(), y.data(), x.size(), spec);
}
inline double vec_norm(const Eigen::VectorXd& x, const PrecisionSpec& spec) {
  return vec_norm(x.data(), x.size(), spec);
}
inline void vec_axpy(double a, const Eigen::VectorXd& x, Eigen::VectorXd& y,
                     const PrecisionSpec& spec) {
  vec_axpy(a, x.data(), y.data(), x.size(), spec);
}
inline Eigen::VectorXd round_vector(Eigen::VectorXd x,
                                    const PrecisionSpec& spec) {
  round_vector(x.data(), x.size(), spec);
  return x;
}

}  // namespace mplsqr

#endif  // MPLSQR_PRECISION_HPP
