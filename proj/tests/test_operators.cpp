// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "mplsqr/problems.hpp"
#include "mplsqr/svd.hpp"

using namespace mplsqr;

namespace {

Matrix random_matrix(Index m, Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix A(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = dist(gen);
  return A;
}

Vector random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = dist(gen);
  return x;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("identity operator maps x to x exactly") {
  DenseOperator I(Matrix::Identity(5, 5));
  const Vector x = random_vector(5, 1);
  CHECK(mat_vec(I, x, PrecisionSpec::native64()) == x);
  CHECK(mat_vec_transpose(I, x, PrecisionSpec::native64()) == x);
}

TEST_CASE("dense apply agrees with Eigen in double") {
  const Matrix A = random_matrix(17, 9, 2);
  DenseOperator op(A);
  const Vector x = random_vector(9, 3);
  const Vector z = random_vector(17, 4);
  const Vector y = mat_vec(op, x, PrecisionSpec::native64());
  const Vector yt = mat_vec_transpose(op, z, PrecisionSpec::native64());
  CHECK(y.size() == 17);
  CHECK(yt.size() == 9);
  CHECK((y - A * x).norm() <= 1e-13 * (A * x).norm());
  CHECK((yt - A.transpose() * z).norm() <= 1e-13 * (A.transpose() * z).norm());
}

TEST_CASE("dense f32 apply matches a hand float loop bit for bit") {
  const Matrix A = random_matrix(11, 7, 5);
  DenseOperator op(A);
  const Vector x = random_vector(7, 6);
  const Vector y = mat_vec(op, x, PrecisionSpec::native32());
  for (Index i = 0; i < 11; ++i) {
    float acc = 0.0f;
    for (Index j = 0; j < 7; ++j) {
      acc += static_cast<float>(A(i, j)) * static_cast<float>(x[j]);
    }
    CHECK(y[i] == static_cast<double>(acc));
  }

  // Transpose: same per-element accumulation order as a column dot.
  const Vector z = random_vector(11, 7);
  const Vector w = mat_vec_transpose(op, z, PrecisionSpec::native32());
  Eigen::VectorXf accs = Eigen::VectorXf::Zero(7);
  for (Index i = 0; i < 11; ++i) {
    for (Index j = 0; j < 7; ++j) {
      accs[j] += static_cast<float>(A(i, j)) * static_cast<float>(z[i]);
    }
  }
  for (Index j = 0; j < 7; ++j) CHECK(w[j] == static_cast<double>(accs[j]));
}

TEST_CASE("dense emu24 apply tracks the f32 apply") {
  Matrix A = random_matrix(13, 8, 8);
  // Pre-round entries and input so both paths see identical operands.
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      A(i, j) = static_cast<double>(static_cast<float>(A(i, j)));
  DenseOperator op(A);
  Vector x = random_vector(8, 9);
  for (Index j = 0; j < 8; ++j)
    x[j] = static_cast<double>(static_cast<float>(x[j]));

  const Vector y32 = mat_vec(op, x, PrecisionSpec::native32());
  const Vector y24 = mat_vec(op, x, PrecisionSpec::emulated(24));
  const double u32 = PrecisionSpec::native32().unit();
  for (Index i = 0; i < 13; ++i) {
    const double scale = A.row(i).cwiseAbs().dot(x.cwiseAbs());
    CHECK(std::abs(y24[i] - y32[i]) <= 4.0 * u32 * scale);
  }
}

TEST_CASE("dense operator validates dimensions") {
  DenseOperator op(random_matrix(4, 3, 10));
  Vector bad(5);
  bad.setZero();
  Vector y;
  CHECK_THROWS_AS(op.apply(bad, y, PrecisionSpec::native64()),
                  std::invalid_argument);
  CHECK_THROWS_AS(op.apply_transpose(bad, y, PrecisionSpec::native64()),
                  std::invalid_argument);
  CHECK_THROWS_AS(DenseOperator{Matrix{}}, std::invalid_argument);
}

TEST_CASE("psf constructors normalize to unit sum") {
  const Matrix g = BlurOperator::gaussian_psf(1.5);
  CHECK(g.rows() == g.cols());
  CHECK(g.rows() % 2 == 1);
  CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-14));
  const Matrix d = BlurOperator::disk_psf(3.0);
  CHECK(d.rows() % 2 == 1);
  CHECK(d.sum() == doctest::Approx(1.0).epsilon(1e-14));
  // Disk indicator: corners outside the radius are zero.
  CHECK(d(0, 0) == 0.0);
}

TEST_CASE("blur operator matches its dense form") {
  BlurOperator blur(12, BlurOperator::gaussian_psf(1.0));
  const Matrix A = blur.to_dense();
  const Vector x = random_vector(144, 11);
  const Vector via_op = mat_vec(blur, x, PrecisionSpec::native64());
  const Vector via_dense = A * x;
  CHECK((via_op - via_dense).norm() <= 1e-12 * via_dense.norm());

  const Vector z = random_vector(144, 12);
  const Vector t_op = mat_vec_transpose(blur, z, PrecisionSpec::native64());
  CHECK((t_op - A.transpose() * z).norm() <= 1e-12 * z.norm());
}

TEST_CASE("blur transpose is the exact adjoint") {
  BlurOperator blur(16, BlurOperator::disk_psf(2.0));
  const Vector x = random_vector(256, 13);
  const Vector y = random_vector(256, 14);
  const double lhs = mat_vec(blur, x, PrecisionSpec::native64()).dot(y);
  const double rhs = x.dot(mat_vec_transpose(blur, y, PrecisionSpec::native64()));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("blur operator validation") {
  CHECK_THROWS_AS(BlurOperator(2, BlurOperator::gaussian_psf(1.0)),
                  std::invalid_argument);
  // Even-sized stencil is rejected.
  CHECK_THROWS_AS(BlurOperator(16, Matrix::Ones(4, 4)), std::invalid_argument);
  // Stencil wider than the image is rejected.
  CHECK_THROWS_AS(BlurOperator(5, Matrix::Ones(9, 9)), std::invalid_argument);
  CHECK_THROWS_AS(BlurOperator(8, Matrix::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("generators produce ill-conditioned operators") {
  // Ill-posedness emerges with resolution: at n = 64 the mildest family
  // (deriv2, sigma_i ~ i^-2) already reaches condition ~5e3.
  for (auto kind : {ProblemKind::shaw, ProblemKind::gravity,
                    ProblemKind::deriv2, ProblemKind::heat}) {
    const auto gen = generate(kind, 64);
    CHECK(gen.A->rows() == 64);
    CHECK(gen.A->cols() == 64);
    CHECK(gen.x_ex.size() == 64);
    const Vector s = singular_values(gen.A->to_dense());
    CHECK(s[0] / s[63] > 1e3);
  }
}

TEST_CASE("shaw matrix is symmetric") {
  const Matrix A = generate(ProblemKind::shaw, 24).A->to_dense();
  CHECK((A - A.transpose()).norm() <= 1e-15 * A.norm());
}

TEST_CASE("generator size validation") {
  CHECK_THROWS_AS(generate(ProblemKind::shaw, 3), std::invalid_argument);
  CHECK_THROWS_AS(generate(ProblemKind::heat, 7), std::invalid_argument);
  CHECK_THROWS_AS(generate(ProblemKind::blur2d, 200), std::invalid_argument);
  CHECK_NOTHROW(generate(ProblemKind::blur2d, 64));  // 8 x 8 image
}

TEST_CASE("problem name round-trip") {
  for (auto kind : {ProblemKind::shaw, ProblemKind::deriv2, ProblemKind::gravity,
                    ProblemKind::heat, ProblemKind::blur2d}) {
    CHECK(parse_problem(problem_name(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_problem("nosuch"), std::invalid_argument);
}

TEST_CASE("noise injection hits the requested level deterministically") {
  const Vector b_ex = random_vector(300, 15);
  const auto na = add_noise(b_ex, 1e-3, 7);
  const auto nb = add_noise(b_ex, 1e-3, 7);
  const auto nc = add_noise(b_ex, 1e-3, 8);
  CHECK(na.b == nb.b);
  CHECK(na.e == nb.e);
  CHECK(na.e != nc.e);
  CHECK(std::abs(na.e.norm() / b_ex.norm() - 1e-3) / 1e-3 <= 1e-12);
  // b = b_ex + e up to the one rounding of the elementwise sum.
  CHECK((na.b - b_ex - na.e).norm() <= 1e-14 * b_ex.norm());

  CHECK_THROWS_AS(add_noise(b_ex, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(add_noise(b_ex, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(add_noise(Vector::Zero(10), 1e-3, 1), std::invalid_argument);
}

TEST_CASE("make_instance wires everything together") {
  const auto inst = make_instance(ProblemKind::gravity, 40, 1e-2, 3);
  CHECK(inst.m == 40);
  CHECK(inst.n == 40);
  CHECK(inst.name == "gravity");
  CHECK(inst.eps == 1e-2);
  CHECK(inst.seed == 3);
  CHECK((inst.b - inst.b_ex - inst.e).norm() <= 1e-14 * inst.b_ex.norm());
  const Vector expect = mat_vec(*inst.A, inst.x_ex, PrecisionSpec::native64());
  CHECK(inst.b_ex == expect);
}

TEST_CASE("instance archive round-trips a dense problem") {
  const auto inst = make_instance(ProblemKind::shaw, 32, 1e-3, 5);
  const std::string path = temp_path("mplsqr_test_dense.bin");
  save_instance(path, inst);
  const auto back = load_instance(path);
  CHECK(back.name == inst.name);
  CHECK(back.m == inst.m);
  CHECK(back.n == inst.n);
  CHECK(back.eps == inst.eps);
  CHECK(back.seed == inst.seed);
  CHECK(back.x_ex == inst.x_ex);
  CHECK(back.b_ex == inst.b_ex);
  CHECK(back.b == inst.b);
  CHECK(back.e == inst.e);
  CHECK(back.A->to_dense() == inst.A->to_dense());
  std::filesystem::remove(path);
}

TEST_CASE("instance archive round-trips a blur problem") {
  BlurParams params;
  params.psf = PsfKind::disk;
  const auto inst = make_instance(ProblemKind::blur2d, 256, 5e-2, 9, params);
  const std::string path = temp_path("mplsqr_test_blur.bin");
  save_instance(path, inst);
  const auto back = load_instance(path);
  CHECK(back.m == 256);
  CHECK(back.b == inst.b);
  CHECK(back.x_ex == inst.x_ex);
  const auto* blur = dynamic_cast<const BlurOperator*>(back.A.get());
  REQUIRE(blur != nullptr);
  CHECK(blur->image_size() == 16);
  CHECK(blur->psf() ==
        dynamic_cast<const BlurOperator*>(inst.A.get())->psf());
  std::filesystem::remove(path);
}

TEST_CASE("archive loader rejects junk") {
  const std::string path = temp_path("mplsqr_test_junk.bin");
  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << "not an archive at all";
  }
  CHECK_THROWS(load_instance(path));
  CHECK_THROWS(load_instance(temp_path("mplsqr_does_not_exist.bin")));
  std::filesystem::remove(path);
}
