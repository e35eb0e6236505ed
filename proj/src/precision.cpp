// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mplsqr/precision.hpp"

#include <cmath>
#include <stdexcept>

namespace mplsqr {

using detail::round_significand;

PrecisionSpec::PrecisionSpec(Kind kind, int bits)
    : kind_(kind), bits_(bits), unit_(std::ldexp(1.0, -bits)) {}

PrecisionSpec PrecisionSpec::emulated(int bits) {
  if (bits < 2 || bits > 52) {
    throw std::invalid_argument("PrecisionSpec: emulated width must be in [2, 52], got " +
                                std::to_string(bits));
  }
  return PrecisionSpec(Kind::emulated, bits);
}

std::string PrecisionSpec::to_string() const {
  switch (kind_) {
    case Kind::native64:
      return "f64";
    case Kind::native32:
      return "f32";
    case Kind::emulated:
      return "emu" + std::to_string(bits_);
  }
  return "f64";
}

PrecisionSpec PrecisionSpec::parse(const std::string& text) {
  if (text == "f64") return native64();
  if (text == "f32") return native32();
  if (text.rfind("emu", 0) == 0 && text.size() > 3) {
    int bits = 0;
    try {
      size_t pos = 0;
      bits = std::stoi(text.substr(3), &pos);
      if (pos != text.size() - 3) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw std::invalid_argument("PrecisionSpec: cannot parse '" + text + "'");
    }
    return emulated(bits);
  }
  throw std::invalid_argument("PrecisionSpec: cannot parse '" + text + "'");
}

double round_scalar(double x, const PrecisionSpec& spec) {
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64:
      return x;
    case PrecisionSpec::Kind::native32:
      return static_cast<double>(static_cast<float>(x));
    case PrecisionSpec::Kind::emulated:
      return round_significand(x, 53 - spec.significand_bits());
  }
  return x;
}

double rounded_op(double a, double b, ScalarOp op, const PrecisionSpec& spec) {
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64: {
      switch (op) {
        case ScalarOp::add: return a + b;
        case ScalarOp::sub: return a - b;
        case ScalarOp::mul: return a * b;
        case ScalarOp::div: return a / b;
      }
      break;
    }
    case PrecisionSpec::Kind::native32: {
      const float af = static_cast<float>(a);
      const float bf = static_cast<float>(b);
      switch (op) {
        case ScalarOp::add: return static_cast<double>(af + bf);
        case ScalarOp::sub: return static_cast<double>(af - bf);
        case ScalarOp::mul: return static_cast<double>(af * bf);
        case ScalarOp::div: return static_cast<double>(af / bf);
      }
      break;
    }
    case PrecisionSpec::Kind::emulated: {
      double r = 0.0;
      switch (op) {
        case ScalarOp::add: r = a + b; break;
        case ScalarOp::sub: r = a - b; break;
        case ScalarOp::mul: r = a * b; break;
        case ScalarOp::div: r = a / b; break;
      }
      return round_scalar(r, spec);
    }
  }
  return 0.0;
}

double vec_dot(const double* x, const double* y, Index n,
               const PrecisionSpec& spec) {
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64: {
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) acc += x[i] * y[i];
      return acc;
    }
    case PrecisionSpec::Kind::native32: {
      float acc = 0.0f;
      for (Index i = 0; i < n; ++i) {
        acc += static_cast<float>(x[i]) * static_cast<float>(y[i]);
      }
      return static_cast<double>(acc);
    }
    case PrecisionSpec::Kind::emulated: {
      const int shift = 53 - spec.significand_bits();
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double p = round_significand(x[i] * y[i], shift);
        acc = round_significand(acc + p, shift);
      }
      return acc;
    }
  }
  return 0.0;
}

double vec_norm(const double* x, Index n, const PrecisionSpec& spec) {
  const double ss = vec_dot(x, x, n, spec);
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64:
      return std::sqrt(ss);
    case PrecisionSpec::Kind::native32:
      return static_cast<double>(std::sqrt(static_cast<float>(ss)));
    case PrecisionSpec::Kind::emulated:
      return round_scalar(std::sqrt(ss), spec);
  }
  return 0.0;
}

void vec_axpy(double a, const double* x, double* y, Index n,
              const PrecisionSpec& spec) {
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64: {
      for (Index i = 0; i < n; ++i) y[i] += a * x[i];
      return;
    }
    case PrecisionSpec::Kind::native32: {
      const float af = static_cast<float>(a);
      for (Index i = 0; i < n; ++i) {
        y[i] = static_cast<double>(static_cast<float>(y[i]) +
                                   af * static_cast<float>(x[i]));
      }
      return;
    }
    case PrecisionSpec::Kind::emulated: {
      const int shift = 53 - spec.significand_bits();
      for (Index i = 0; i < n; ++i) {
        const double p = round_significand(a * x[i], shift);
        y[i] = round_significand(y[i] + p, shift);
      }
      return;
    }
  }
}

void vec_scale(double a, double* x, Index n, const PrecisionSpec& spec) {
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64: {
      for (Index i = 0; i < n; ++i) x[i] *= a;
      return;
    }
    case PrecisionSpec::Kind::native32: {
      const float af = static_cast<float>(a);
      for (Index i = 0; i < n; ++i) {
        x[i] = static_cast<double>(af * static_cast<float>(x[i]));
      }
      return;
    }
    case PrecisionSpec::Kind::emulated: {
      const int shift = 53 - spec.significand_bits();
      for (Index i = 0; i < n; ++i) {
        x[i] = round_significand(a * x[i], shift);
      }
      return;
    }
  }
}

void vec_divide(double d, double* x, Index n, const PrecisionSpec& spec) {
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64: {
      for (Index i = 0; i < n; ++i) x[i] /= d;
      return;
    }
    case PrecisionSpec::Kind::native32: {
      const float df = static_cast<float>(d);
      for (Index i = 0; i < n; ++i) {
        x[i] = static_cast<double>(static_cast<float>(x[i]) / df);
      }
      return;
    }
    case PrecisionSpec::Kind::emulated: {
      const int shift = 53 - spec.significand_bits();
      for (Index i = 0; i < n; ++i) {
        x[i] = round_significand(x[i] / d, shift);
      }
      return;
    }
  }
}

void vec_sub_scaled(const double* q, double a, double* w, Index n,
                    const PrecisionSpec& spec) {
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64: {
      for (Index i = 0; i < n; ++i) w[i] = q[i] - a * w[i];
      return;
    }
    case PrecisionSpec::Kind::native32: {
      const float af = static_cast<float>(a);
      for (Index i = 0; i < n; ++i) {
        w[i] = static_cast<double>(static_cast<float>(q[i]) -
                                   af * static_cast<float>(w[i]));
      }
      return;
    }
    case PrecisionSpec::Kind::emulated: {
      const int shift = 53 - spec.significand_bits();
      for (Index i = 0; i < n; ++i) {
        const double p = round_significand(a * w[i], shift);
        w[i] = round_significand(q[i] - p, shift);
      }
      return;
    }
  }
}

void round_vector(double* x, Index n, const PrecisionSpec& spec) {
  switch (spec.kind()) {
    case PrecisionSpec::Kind::native64:
      return;
    case PrecisionSpec::Kind::native32: {
      for (Index i = 0; i < n; ++i) {
        x[i] = static_cast<double>(static_cast<float>(x[i]));
      }
      return;
    }
    case PrecisionSpec::Kind::emulated: {
      const int shift = 53 - spec.significand_bits();
      for (Index i = 0; i < n; ++i) {
        x[i] = round_significand(x[i], shift);
      }
      return;
    }
  }
}

}  // namespace mplsqr
