// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mplsqr/bidiag.hpp"
#include "mplsqr/problems.hpp"
#include "mplsqr/svd.hpp"

using namespace mplsqr;

namespace {

struct RunResult {
  Matrix P, Q;
  std::vector<double> alphas, betas;
  int steps = 0;
};

RunResult run_engine(const LinearOperator& A, const Vector& b,
                     const PrecisionSpec& spec, bool reorth, int max_steps,
                     int reserve = 32) {
  BidiagEngine engine(A, b, spec, reorth, reserve);
  for (int k = 0; k < max_steps && !engine.terminated(); ++k) {
    engine.step();
  }
  RunResult r;
  r.P = engine.P();
  r.Q = engine.Q();
  r.alphas = engine.alphas();
  r.betas = engine.betas();
  r.steps = engine.steps();
  return r;
}

// B_k, (k+1) x k lower bidiagonal: diag alpha_1..alpha_k, subdiag
// beta_2..beta_{k+1}.
Matrix lower_bidiagonal(const RunResult& r, int k) {
  Matrix B = Matrix::Zero(k + 1, k);
  for (int i = 0; i < k; ++i) {
    B(i, i) = r.alphas[i];
    B(i + 1, i) = r.betas[i + 1];
  }
  return B;
}

}  // namespace

TEST_CASE("factorization identities hold in double") {
  const auto inst = make_instance(ProblemKind::shaw, 64, 1e-3, 1);
  const Matrix A = inst.A->to_dense();
  const auto r = run_engine(*inst.A, inst.b, PrecisionSpec::native64(), true, 15);
  const int k = r.steps;
  REQUIRE(k >= 10);
  REQUIRE(r.P.cols() == k + 1);
  REQUIRE(r.Q.cols() == k + 1);

  const double scale = A.norm();
  const Matrix B = lower_bidiagonal(r, k);
  // A Q_k = P_{k+1} B_k
  CHECK((A * r.Q.leftCols(k) - r.P * B).norm() <= 1e-12 * scale);

  // A^T P_{k+1} = Q_{k+1} T with T(i,i) = alpha_{i+1}, T(i-1,i) = beta_{i+1}.
  Matrix T = Matrix::Zero(k + 1, k + 1);
  for (int i = 0; i <= k; ++i) {
    T(i, i) = r.alphas[i];
    if (i > 0) T(i - 1, i) = r.betas[i];
  }
  CHECK((A.transpose() * r.P - r.Q * T).norm() <= 1e-12 * scale);

  // Orthonormal bases.
  CHECK((r.P.transpose() * r.P - Matrix::Identity(k + 1, k + 1)).norm() <= 1e-13);
  CHECK((r.Q.transpose() * r.Q - Matrix::Identity(k + 1, k + 1)).norm() <= 1e-13);
}

TEST_CASE("beta1 is the rounded norm of b") {
  const auto inst = make_instance(ProblemKind::gravity, 48, 1e-2, 2);
  for (const auto& spec :
       {PrecisionSpec::native64(), PrecisionSpec::native32()}) {
    BidiagEngine engine(*inst.A, inst.b, spec, true);
    const Vector rb = round_vector(inst.b, spec);
    CHECK(engine.beta1() == vec_norm(rb, spec));
    CHECK(engine.alphas().size() >= 1);
    CHECK(engine.alpha1() > 0.0);
  }
}

TEST_CASE("stored columns are unit vectors in the spec") {
  const auto inst = make_instance(ProblemKind::shaw, 32, 1e-3, 3);
  struct Case {
    PrecisionSpec spec;
    int steps;
  };
  for (const auto& c : {Case{PrecisionSpec::native64(), 10},
                        Case{PrecisionSpec::native32(), 8},
                        Case{PrecisionSpec::emulated(14), 5}}) {
    const auto r = run_engine(*inst.A, inst.b, c.spec, true, c.steps);
    for (Index j = 0; j < r.P.cols(); ++j) {
      CHECK(std::abs(r.P.col(j).norm() - 1.0) <= 4.0 * c.spec.unit());
    }
    for (Index j = 0; j < r.Q.cols(); ++j) {
      CHECK(std::abs(r.Q.col(j).norm() - 1.0) <= 4.0 * c.spec.unit());
    }
  }
}

TEST_CASE("alphas and betas stay positive until termination") {
  const auto inst = make_instance(ProblemKind::deriv2, 40, 1e-3, 4);
  BidiagEngine engine(*inst.A, inst.b, PrecisionSpec::native32(), true);
  while (!engine.terminated() && engine.steps() < 20) {
    const auto res = engine.step();
    if (res.status == BidiagEngine::StepStatus::ok) {
      CHECK(res.beta_next > 0.0);
      CHECK(res.alpha_next > 0.0);
      CHECK(res.q_next != nullptr);
    } else {
      CHECK(res.q_next == nullptr);
    }
  }
  for (double a : engine.alphas()) CHECK(a >= 0.0);
  for (double b : engine.betas()) CHECK(b >= 0.0);
}

TEST_CASE("full reorthogonalization keeps the orthogonality level small") {
  const auto inst = make_instance(ProblemKind::shaw, 64, 1e-3, 1);
  struct Case {
    PrecisionSpec spec;
    int steps;
  };
  for (const auto& c : {Case{PrecisionSpec::native64(), 20},
                        Case{PrecisionSpec::native32(), 20},
                        Case{PrecisionSpec::emulated(12), 10}}) {
    BidiagEngine engine(*inst.A, inst.b, c.spec, true);
    while (!engine.terminated() && engine.steps() < c.steps) {
      engine.step();
      const double k = engine.steps();
      CHECK(engine.mu() <= 100.0 * k * c.spec.unit());
      CHECK(engine.nu() <= 100.0 * k * c.spec.unit());
    }
    // Incremental levels agree with a direct recomputation.
    CHECK(engine.mu() ==
          doctest::Approx(orthogonality_level(engine.P())).epsilon(1e-6));
    CHECK(engine.nu() ==
          doctest::Approx(orthogonality_level(engine.Q())).epsilon(1e-6));
  }
}

TEST_CASE("without reorthogonalization orthogonality degrades") {
  const auto inst = make_instance(ProblemKind::shaw, 64, 1e-3, 1);
  const auto with = run_engine(*inst.A, inst.b, PrecisionSpec::native64(),
                               true, 20);
  BidiagEngine engine(*inst.A, inst.b, PrecisionSpec::native64(), false);
  while (!engine.terminated() && engine.steps() < 20) engine.step();
  const double nu_without = engine.nu();
  const double nu_with = orthogonality_level(with.Q);
  CHECK(nu_without > 1e3 * std::max(nu_with, 1e-18));
  CHECK(nu_without > 1e-8);
}

TEST_CASE("exhausted Krylov space terminates cleanly") {
  // A = I: the first step reproduces b exactly, so beta_2 vanishes.
  DenseOperator I(Matrix::Identity(4, 4));
  Vector b(4);
  b << 1.0, 0.0, 0.0, 0.0;
  BidiagEngine engine(I, b, PrecisionSpec::native64(), true);
  const auto res = engine.step();
  CHECK(res.status == BidiagEngine::StepStatus::terminated_beta);
  CHECK(res.beta_next == 0.0);
  CHECK(res.alpha_next == 0.0);
  CHECK(res.q_next == nullptr);
  CHECK(engine.terminated());
  CHECK_THROWS_AS(engine.step(), std::logic_error);
}

TEST_CASE("alpha termination is detected") {
  // Rank-1 action on the Q side: A^T p_2 is parallel to q_1.
  Matrix A = Matrix::Zero(3, 3);
  A(0, 0) = 1.0;
  DenseOperator op(A);
  Vector b(3);
  b << 1.0, 1.0, 0.0;
  BidiagEngine engine(op, b, PrecisionSpec::native64(), true);
  const auto res = engine.step();
  CHECK(res.status == BidiagEngine::StepStatus::terminated_alpha);
  CHECK(res.beta_next > 0.0);
  CHECK(res.alpha_next == 0.0);
  CHECK(res.q_next == nullptr);
}

TEST_CASE("b orthogonal to the range terminates at construction") {
  Matrix A = Matrix::Zero(3, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 1.0;
  Vector b(3);
  b << 0.0, 0.0, 2.0;
  DenseOperator op(A);
  BidiagEngine engine(op, b, PrecisionSpec::native64(), true);
  CHECK(engine.terminated());
  CHECK(engine.steps() == 0);
  CHECK(engine.alpha1() == 0.0);
  CHECK_THROWS_AS(engine.step(), std::logic_error);
}

TEST_CASE("constructor validation") {
  DenseOperator op(Matrix::Identity(4, 4));
  CHECK_THROWS_AS(
      BidiagEngine(op, Vector::Zero(4), PrecisionSpec::native64(), true),
      std::invalid_argument);
  CHECK_THROWS_AS(
      BidiagEngine(op, Vector::Ones(5), PrecisionSpec::native64(), true),
      std::invalid_argument);
  // Small but representable data is fine.
  Vector tiny = Vector::Zero(4);
  tiny[0] = 1e-120;
  CHECK_NOTHROW(BidiagEngine(op, tiny, PrecisionSpec::native64(), true));
  // The norm kernel accumulates plain squares (that is the rounding model),
  // so data whose squares underflow is indistinguishable from zero.
  tiny[0] = 1e-300;
  CHECK_THROWS_AS(BidiagEngine(op, tiny, PrecisionSpec::native64(), true),
                  std::invalid_argument);
}

TEST_CASE("storage growth beyond the initial reservation") {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix A(20, 10);
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < 10; ++j) A(i, j) = dist(gen);
  Vector b(20);
  for (Index i = 0; i < 20; ++i) b[i] = dist(gen);
  DenseOperator op(A);

  // reserve_steps = 2 forces repeated reallocation.
  BidiagEngine engine(op, b, PrecisionSpec::native64(), true, 2);
  while (!engine.terminated() && engine.steps() < 10) engine.step();
  const int k = engine.steps();
  CHECK(k >= 9);

  RunResult r;
  // A late alpha-termination can append one extra p column; slice to k+1.
  r.P = engine.P().leftCols(k + 1);
  r.Q = engine.Q().leftCols(k);
  r.alphas = engine.alphas();
  r.betas = engine.betas();
  const Matrix B = lower_bidiagonal(r, k);
  CHECK((A * r.Q - r.P * B).norm() <= 1e-12 * A.norm());
  CHECK((r.P.transpose() * r.P - Matrix::Identity(k + 1, k + 1)).norm() <=
        1e-13);
}
