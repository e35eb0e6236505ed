// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MPLSQR_PROBLEMS_HPP
#define MPLSQR_PROBLEMS_HPP

#include <cstdint>
#include <memory>
#include <string>

#include "mplsqr/operators.hpp"

namespace mplsqr {

// Built-in ill-posed test problems. The 1-D families are Galerkin or
// quadrature discretizations of first-kind Fredholm integral equations; blur2d
// is 2-D image deblurring with zero boundary conditions.
enum class ProblemKind { shaw, deriv2, gravity, heat, blur2d };

std::string problem_name(ProblemKind kind);
ProblemKind parse_problem(const std::string& name);

enum class PsfKind { gaussian, disk };

struct BlurParams {
  PsfKind psf = PsfKind::gaussian;
  // Gaussian sigma or disk radius in pixels; <= 0 selects the default for the
  // image size (sigma = N/32, radius = N/16).
  double param = 0.0;
};

struct Generated {
  std::shared_ptr<LinearOperator> A;
  Vector x_ex;
};

// Builds the operator and exact solution. n is the number of unknowns; for
// blur2d it must be a perfect square N^2 (the image is N x N). heat requires
// even n. Invalid sizes throw std::invalid_argument.
Generated generate(ProblemKind kind, Index n,
                   const BlurParams& blur = BlurParams{});

// e = eps * ||b_ex|| * g / ||g|| with g standard Gaussian drawn from a
// deterministic generator seeded with `seed`; returns (b_ex + e, e).
// Requires eps in (0, 1) and b_ex != 0.
struct NoisyRhs {
  Vector b;
  Vector e;
};
NoisyRhs add_noise(const Vector& b_ex, double eps, std::uint64_t seed);

// A fully specified instance: operator, exact solution, exact data
// b_ex = A x_ex evaluated in double, and noisy data b = b_ex + e.
struct ProblemInstance {
  std::shared_ptr<LinearOperator> A;
  Index m = 0;
  Index n = 0;
  Vector x_ex;
  Vector b_ex;
  Vector b;
  Vector e;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::string name;

  double norm_e() const { return e.norm(); }
};

ProblemInstance make_instance(ProblemKind kind, Index n, double eps,
                              std::uint64_t seed,
                              const BlurParams& blur = BlurParams{});

// Binary archive of a problem instance so a run can be reproduced or shipped
// without the generator. Stores the operator (dense entries, or image size
// plus PSF for blur), all vectors, eps and the noise seed.
void save_instance(const std::string& path, const ProblemInstance& inst);
ProblemInstance load_instance(const std::string& path);

}  // namespace mplsqr

#endif  // MPLSQR_PROBLEMS_HPP
