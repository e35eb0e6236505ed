// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mplsqr/picard.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mplsqr/svd.hpp"

namespace mplsqr {

std::string decay_name(DecayType type) {
  switch (type) {
    case DecayType::severe: return "severe";
    case DecayType::moderate: return "moderate";
    case DecayType::mild: return "mild";
  }
  return "unknown";
}

namespace {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double ssr = 0.0;
  int n = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  f.n = static_cast<int>(x.size());
  if (f.n < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < f.n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = f.n * sxx - sx * sx;
  if (det == 0.0) return f;
  f.slope = (f.n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / f.n;
  for (int i = 0; i < f.n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.ssr += r * r;
  }
  return f;
}

}  // namespace

PicardDiagnostics picard_diagnostics(const ProblemInstance& inst,
                                     double threshold_factor) {
  if (!(threshold_factor > 0.0)) {
    throw std::invalid_argument("picard_diagnostics: threshold_factor <= 0");
  }
  const SvdResult svd = dense_svd(inst.A->to_dense());

  PicardDiagnostics d;
  d.sigma = svd.S;
  d.coef_exact = (svd.U.transpose() * inst.b_ex).cwiseAbs();
  d.coef_noisy = (svd.U.transpose() * inst.b).cwiseAbs();
  d.noise_floor = inst.norm_e() / std::sqrt(static_cast<double>(inst.m));

  const Index k = d.sigma.size();
  const double threshold = threshold_factor * d.noise_floor;

  // Last index before the noisy coefficients sink into the noise floor.
  Index above = 0;
  while (above < k && d.coef_noisy[above] > threshold) ++above;
  d.k_star = static_cast<int>(above);
  d.fit_reliable = d.k_star >= 3;
  if (d.k_star < 1) d.k_star = 1;

  // Both fits run over the reliable range i <= k_star, in log space. Indices
  // below are 1-based to match the models.
  std::vector<double> logsig, logcoef, idx, logidx;
  for (int i = 1; i <= d.k_star; ++i) {
    const double s = d.sigma[i - 1];
    const double c = d.coef_exact[i - 1];
    if (!(s > 0.0) || !(c > 0.0)) break;
    logsig.push_back(std::log(s));
    logcoef.push_back(std::log(c));
    idx.push_back(static_cast<double>(i));
    logidx.push_back(std::log(static_cast<double>(i)));
  }
  if (logsig.size() < 2) {
    d.fit_reliable = false;
    return d;
  }

  // |u_i^T b_ex| = rho0 * sigma_i^(1+beta)
  const LineFit picard = fit_line(logsig, logcoef);
  d.beta = picard.slope - 1.0;
  d.rho0 = std::exp(picard.intercept);
  if (!(d.beta > 0.0)) d.fit_reliable = false;

  // sigma_i = zeta * rho^-i versus sigma_i = zeta * i^-alpha; whichever
  // explains the decay better in the fit range wins.
  const LineFit exp_fit = fit_line(idx, logsig);
  const LineFit alg_fit = fit_line(logidx, logsig);
  if (exp_fit.ssr <= alg_fit.ssr) {
    d.decay = DecayType::severe;
    d.decay_param = std::exp(-exp_fit.slope);  // rho
    d.zeta = std::exp(exp_fit.intercept);
    if (!(d.decay_param > 1.0)) d.fit_reliable = false;
  } else {
    const double alpha = -alg_fit.slope;
    d.decay = alpha > 1.0 ? DecayType::moderate : DecayType::mild;
    d.decay_param = alpha;
    d.zeta = std::exp(alg_fit.intercept);
    if (!(alpha > 0.5)) d.fit_reliable = false;
  }
  return d;
}

}  // namespace mplsqr
