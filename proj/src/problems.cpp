// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mplsqr/problems.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace mplsqr {

std::string problem_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::shaw: return "shaw";
    case ProblemKind::deriv2: return "deriv2";
    case ProblemKind::gravity: return "gravity";
    case ProblemKind::heat: return "heat";
    case ProblemKind::blur2d: return "blur2d";
  }
  return "unknown";
}

ProblemKind parse_problem(const std::string& name) {
  if (name == "shaw") return ProblemKind::shaw;
  if (name == "deriv2") return ProblemKind::deriv2;
  if (name == "gravity") return ProblemKind::gravity;
  if (name == "heat") return ProblemKind::heat;
  if (name == "blur2d") return ProblemKind::blur2d;
  throw std::invalid_argument("unknown problem '" + name + "'");
}

namespace {

// 1-D shape reconstruction. Quadrature discretization on n points of a
// kernel with exponentially decaying singular values; the classic severely
// ill-posed test case.
Generated make_shaw(Index n) {
  if (n < 4) throw std::invalid_argument("shaw: n must be >= 4");
  const double h = M_PI / static_cast<double>(n);
  Vector s(n), co(n), psi(n);
  for (Index i = 0; i < n; ++i) {
    s[i] = -M_PI / 2.0 + (static_cast<double>(i) + 0.5) * h;
    co[i] = std::cos(s[i]);
    psi[i] = M_PI * std::sin(s[i]);
  }
  Matrix A(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const double u = psi[i] + psi[j];
      const double sinc = (u == 0.0) ? 1.0 : std::sin(u) / u;
      const double v = (co[i] + co[j]) * sinc;
      A(i, j) = h * v * v;
      A(j, i) = A(i, j);
    }
  }
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    const double t = s[i];
    x[i] = 2.0 * std::exp(-6.0 * (t - 0.8) * (t - 0.8)) +
           std::exp(-2.0 * (t + 0.5) * (t + 0.5));
  }
  return {std::make_shared<DenseOperator>(std::move(A)), std::move(x)};
}

// Second derivative: Galerkin discretization with box functions of the
// Green's function kernel K(s,t) = s(t-1) for s < t, t(s-1) otherwise.
// Entries integrate exactly; mildly ill-posed.
Generated make_deriv2(Index n) {
  if (n < 4) throw std::invalid_argument("deriv2: n must be >= 4");
  const double h = 1.0 / static_cast<double>(n);
  Matrix A(n, n);
  for (Index jj = 0; jj < n; ++jj) {
    const double j = static_cast<double>(jj) + 1.0;
    A(jj, jj) = h * h * ((j * j - j + 0.25) * h - (j - 2.0 / 3.0));
    for (Index ii = jj + 1; ii < n; ++ii) {
      const double i = static_cast<double>(ii) + 1.0;
      A(ii, jj) = h * h * (j - 0.5) * ((i - 0.5) * h - 1.0);
      A(jj, ii) = A(ii, jj);
    }
  }
  // Coefficients of f(t) = t in the box-function basis.
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    x[i] = std::pow(h, 1.5) * (static_cast<double>(i) + 0.5);
  }
  return {std::make_shared<DenseOperator>(std::move(A)), std::move(x)};
}

// 1-D gravity surveying: midpoint quadrature of the depth-d field kernel
// d (d^2 + (s-t)^2)^(-3/2) on [0,1]; severely ill-posed.
Generated make_gravity(Index n) {
  if (n < 4) throw std::invalid_argument("gravity: n must be >= 4");
  const double d = 0.25;
  const double h = 1.0 / static_cast<double>(n);
  Vector t(n);
  for (Index i = 0; i < n; ++i) t[i] = (static_cast<double>(i) + 0.5) * h;
  Matrix A(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double dst = t[i] - t[j];
      A(i, j) = h * d / std::pow(d * d + dst * dst, 1.5);
    }
  }
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    x[i] = std::sin(M_PI * t[i]) + 0.5 * std::sin(2.0 * M_PI * t[i]);
  }
  return {std::make_shared<DenseOperator>(std::move(A)), std::move(x)};
}

// Inverse heat equation: lower triangular Toeplitz from the Volterra kernel
// (quadrature with unit conductivity); the exact solution is a ramp, a
// parabolic arch and an exponential tail on the first half, zero after.
Generated make_heat(Index n) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("heat: n must be even and >= 4");
  }
  const double h = 1.0 / static_cast<double>(n);
  const double c = h / (2.0 * std::sqrt(M_PI));
  Vector k(n);
  for (Index i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * h;
    k[i] = c * std::pow(t, -1.5) * std::exp(-0.25 / t);
  }
  Matrix A = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) A(i, j) = k[i - j];
  }
  Vector x = Vector::Zero(n);
  for (Index i = 1; i <= n / 2; ++i) {
    const double ti = static_cast<double>(i) * 20.0 / static_cast<double>(n);
    double v = 0.0;
    if (ti < 2.0) {
      v = 0.75 * ti * ti / 4.0;
    } else if (ti < 3.0) {
      v = 0.75 + (ti - 2.0) * (3.0 - ti);
    } else {
      v = 0.75 * std::exp(-(ti - 3.0) * 2.0);
    }
    x[i - 1] = v;
  }
  return {std::make_shared<DenseOperator>(std::move(A)), std::move(x)};
}

// Deterministic N x N test scene in [0,1]: two Gaussian bumps and one sharp
// box, so deblurred edges and smooth regions are both exercised.
Vector blur_scene(int N) {
  Vector x(static_cast<Index>(N) * N);
  for (int row = 0; row < N; ++row) {
    const double v = (row + 0.5) / N;
    for (int col = 0; col < N; ++col) {
      const double u = (col + 0.5) / N;
      double f =
          0.8 * std::exp(-((u - 0.35) * (u - 0.35) + (v - 0.40) * (v - 0.40)) /
                         (2.0 * 0.07 * 0.07)) +
          1.0 * std::exp(-((u - 0.70) * (u - 0.70) + (v - 0.62) * (v - 0.62)) /
                         (2.0 * 0.045 * 0.045));
      if (std::abs(u - 0.52) <= 0.13 && std::abs(v - 0.22) <= 0.08) f += 0.6;
      x[static_cast<Index>(row) * N + col] = std::min(1.0, std::max(0.0, f));
    }
  }
  return x;
}

Generated make_blur(Index n, const BlurParams& bp) {
  const int N = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n))));
  if (static_cast<Index>(N) * N != n || N < 8) {
    throw std::invalid_argument(
        "blur2d: n must be a perfect square N^2 with N >= 8");
  }
  Matrix psf;
  if (bp.psf == PsfKind::gaussian) {
    const double sigma = bp.param > 0.0 ? bp.param : N / 32.0;
    psf = BlurOperator::gaussian_psf(sigma);
  } else {
    const double radius = bp.param > 0.0 ? bp.param : N / 16.0;
    psf = BlurOperator::disk_psf(radius);
  }
  return {std::make_shared<BlurOperator>(N, std::move(psf)), blur_scene(N)};
}

}  // namespace

Generated generate(ProblemKind kind, Index n, const BlurParams& blur) {
  switch (kind) {
    case ProblemKind::shaw: return make_shaw(n);
    case ProblemKind::deriv2: return make_deriv2(n);
    case ProblemKind::gravity: return make_gravity(n);
    case ProblemKind::heat: return make_heat(n);
    case ProblemKind::blur2d: return make_blur(n, blur);
  }
  throw std::invalid_argument("generate: unknown problem kind");
}

NoisyRhs add_noise(const Vector& b_ex, double eps, std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("add_noise: eps must be in (0, 1)");
  }
  const double norm_bex = b_ex.norm();
  if (!(norm_bex > 0.0)) {
    throw std::invalid_argument("add_noise: b_ex must be nonzero");
  }
  const Index m = b_ex.size();

  // Hand-rolled Box-Muller on top of mt19937_64 so the noise realization is
  // reproducible regardless of standard library implementation.
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  Vector g(m);
  for (Index i = 0; i < m; i += 2) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    g[i] = rad * std::cos(2.0 * M_PI * u2);
    if (i + 1 < m) g[i + 1] = rad * std::sin(2.0 * M_PI * u2);
  }
  const double norm_g = g.norm();
  NoisyRhs out;
  out.e = g * (eps * norm_bex / norm_g);
  out.b = b_ex + out.e;
  return out;
}

ProblemInstance make_instance(ProblemKind kind, Index n, double eps,
                              std::uint64_t seed, const BlurParams& blur) {
  Generated gen = generate(kind, n, blur);
  ProblemInstance inst;
  inst.A = std::move(gen.A);
  inst.m = inst.A->rows();
  inst.n = inst.A->cols();
  inst.x_ex = std::move(gen.x_ex);
  inst.b_ex = mat_vec(*inst.A, inst.x_ex, PrecisionSpec::native64());
  NoisyRhs rhs = add_noise(inst.b_ex, eps, seed);
  inst.b = std::move(rhs.b);
  inst.e = std::move(rhs.e);
  inst.eps = eps;
  inst.seed = seed;
  inst.name = problem_name(kind);
  return inst;
}

namespace {

constexpr char kMagic[8] = {'M', 'P', 'L', 'S', 'Q', 'R', 'P', '1'};

void write_bytes(std::ofstream& out, const void* p, std::size_t bytes) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(bytes));
}

void read_bytes(std::ifstream& in, void* p, std::size_t bytes) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(bytes));
  if (!in) throw std::runtime_error("problem archive: truncated file");
}

void write_u64(std::ofstream& out, std::uint64_t v) { write_bytes(out, &v, 8); }
void write_f64(std::ofstream& out, double v) { write_bytes(out, &v, 8); }

std::uint64_t read_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  read_bytes(in, &v, 8);
  return v;
}
double read_f64(std::ifstream& in) {
  double v = 0;
  read_bytes(in, &v, 8);
  return v;
}

void write_vector(std::ofstream& out, const Vector& v) {
  write_u64(out, static_cast<std::uint64_t>(v.size()));
  write_bytes(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

Vector read_vector(std::ifstream& in) {
  const auto n = static_cast<Index>(read_u64(in));
  if (n < 0 || n > (Index{1} << 32)) {
    throw std::runtime_error("problem archive: implausible vector length");
  }
  Vector v(n);
  read_bytes(in, v.data(), sizeof(double) * static_cast<std::size_t>(n));
  return v;
}

}  // namespace

void save_instance(const std::string& path, const ProblemInstance& inst) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_bytes(out, kMagic, 8);
  write_u64(out, inst.name.size());
  write_bytes(out, inst.name.data(), inst.name.size());

  if (const auto* blur = dynamic_cast<const BlurOperator*>(inst.A.get())) {
    write_u64(out, 1);  // operator tag: blur
    write_u64(out, static_cast<std::uint64_t>(blur->image_size()));
    const Matrix& psf = blur->psf();
    write_u64(out, static_cast<std::uint64_t>(psf.rows()));
    write_bytes(out, psf.data(),
                sizeof(double) * static_cast<std::size_t>(psf.size()));
  } else {
    write_u64(out, 0);  // operator tag: dense, column-major entries
    const Matrix a = inst.A->to_dense();
    write_u64(out, static_cast<std::uint64_t>(a.rows()));
    write_u64(out, static_cast<std::uint64_t>(a.cols()));
    write_bytes(out, a.data(),
                sizeof(double) * static_cast<std::size_t>(a.size()));
  }

  write_vector(out, inst.x_ex);
  write_vector(out, inst.b_ex);
  write_vector(out, inst.b);
  write_vector(out, inst.e);
  write_f64(out, inst.eps);
  write_u64(out, inst.seed);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  char magic[8];
  read_bytes(in, magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error("'" + path + "' is not a problem archive");
  }
  ProblemInstance inst;
  const auto name_len = read_u64(in);
  if (name_len > 256) throw std::runtime_error("problem archive: bad name");
  inst.name.resize(name_len);
  read_bytes(in, inst.name.data(), name_len);

  const auto tag = read_u64(in);
  if (tag == 1) {
    const int N = static_cast<int>(read_u64(in));
    const auto psz = static_cast<Index>(read_u64(in));
    Matrix psf(psz, psz);
    read_bytes(in, psf.data(), sizeof(double) * static_cast<std::size_t>(psf.size()));
    inst.A = std::make_shared<BlurOperator>(N, std::move(psf));
  } else if (tag == 0) {
    const auto rows = static_cast<Index>(read_u64(in));
    const auto cols = static_cast<Index>(read_u64(in));
    Matrix a(rows, cols);
    read_bytes(in, a.data(), sizeof(double) * static_cast<std::size_t>(a.size()));
    inst.A = std::make_shared<DenseOperator>(std::move(a));
  } else {
    throw std::runtime_error("problem archive: unknown operator tag");
  }
  inst.m = inst.A->rows();
  inst.n = inst.A->cols();

  inst.x_ex = read_vector(in);
  inst.b_ex = read_vector(in);
  inst.b = read_vector(in);
  inst.e = read_vector(in);
  inst.eps = read_f64(in);
  inst.seed = read_u64(in);
  if (inst.x_ex.size() != inst.n || inst.b.size() != inst.m ||
      inst.b_ex.size() != inst.m || inst.e.size() != inst.m) {
    throw std::runtime_error("problem archive: inconsistent dimensions");
  }
  return inst;
}

}  // namespace mplsqr
