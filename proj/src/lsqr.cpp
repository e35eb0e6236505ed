// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mplsqr/lsqr.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mplsqr/bidiag.hpp"
#include "mplsqr/svd.hpp"

namespace mplsqr {

GivensCoeffs givens_step(const GivensState& g, double beta_next,
                         double alpha_next) {
  if (g.rho_bar == 0.0 && beta_next == 0.0) {
    throw std::domain_error("givens_step: degenerate rotation");
  }
  GivensCoeffs r;
  r.rho = std::hypot(g.rho_bar, beta_next);
  r.c = g.rho_bar / r.rho;
  r.s = beta_next / r.rho;
  r.theta_next = r.s * alpha_next;
  r.next.rho_bar = -r.c * alpha_next;
  r.phi = r.c * g.phi_bar;
  r.next.phi_bar = r.s * g.phi_bar;
  return r;
}

void update_step(UpdateState& u, const double* q_next, double rho, double phi,
                 double theta_next) {
  if (rho == 0.0) throw std::domain_error("update_step: rho is zero");
  const Index n = u.x.size();
  const double r1 = round_scalar(phi / rho, u.spec);
  vec_axpy(r1, u.w.data(), u.x.data(), n, u.spec);
  if (q_next != nullptr) {
    const double r2 = round_scalar(theta_next / rho, u.spec);
    vec_sub_scaled(q_next, r2, u.w.data(), n, u.spec);
  }
}

double kappa_rhat(const std::vector<double>& superdiag) {
  const int k = static_cast<int>(superdiag.size()) + 1;
  if (k == 1) return 1.0;
  Matrix R = Matrix::Identity(k, k);
  for (int i = 0; i + 1 < k; ++i) R(i, i + 1) = superdiag[i];
  const Vector s = singular_values(R);
  return s[0] / s[k - 1];
}

std::optional<StopDecision> SolverHistory::decision(StopRule rule) const {
  for (const auto& d : decisions) {
    if (d.rule == rule) return d;
  }
  return std::nullopt;
}

const Vector* SolverHistory::solution(StopRule rule) const {
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i].rule == rule && selected[i].size() > 0) {
      return &selected[i];
    }
  }
  return nullptr;
}

namespace {

bool has_rule(const SolverConfig& cfg, StopRule rule) {
  for (auto r : cfg.rules) {
    if (r == rule) return true;
  }
  return false;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

SolverHistory solve(const ProblemInstance& inst, const SolverConfig& cfg) {
  if (cfg.max_iter < 1) throw std::invalid_argument("solve: max_iter < 1");
  if (has_rule(cfg, StopRule::discrepancy) && !(cfg.tau > 1.0)) {
    throw std::invalid_argument("solve: discrepancy principle needs tau > 1");
  }

  SolverHistory h;
  h.label = cfg.label.empty() ? cfg.bidiag_spec.to_string() + "/" +
                                    cfg.update_spec.to_string()
                              : cfg.label;
  h.bidiag_spec = cfg.bidiag_spec;
  h.update_spec = cfg.update_spec;
  h.reorth = cfg.reorthogonalize;
  h.tau = cfg.tau;
  h.problem = inst.name;
  h.m = inst.m;
  h.n = inst.n;
  h.eps = inst.eps;
  h.seed = inst.seed;
  h.norm_e = inst.norm_e();
  h.norm_x_ex = inst.x_ex.size() > 0 ? inst.x_ex.norm() : 0.0;

  BidiagEngine engine(*inst.A, inst.b, cfg.bidiag_spec, cfg.reorthogonalize,
                      cfg.max_iter);
  h.beta1 = engine.beta1();
  if (engine.terminated()) {
    // alpha_1 = 0: b is orthogonal to range(A), x = 0 is the solution.
    h.terminated_early = true;
    h.termination = "alpha1 below threshold";
    return h;
  }

  const bool dp_enabled =
      has_rule(cfg, StopRule::discrepancy) && h.norm_e > 0.0;
  const bool track_re = h.norm_x_ex > 0.0;

  // q vectors from the bidiagonalization stage are re-rounded into the
  // update spec only when that can change bits.
  const bool rerround_q =
      cfg.update_spec != cfg.bidiag_spec &&
      cfg.update_spec.kind() != PrecisionSpec::Kind::native64;

  UpdateState upd;
  upd.spec = cfg.update_spec;
  upd.x = Vector::Zero(inst.n);
  upd.w = engine.Q().col(0);
  if (rerround_q) round_vector(upd.w.data(), inst.n, cfg.update_spec);

  GivensState giv{engine.alpha1(), engine.beta1()};
  std::vector<double> superdiag;  // theta_{i+1}/rho_i in double
  superdiag.reserve(cfg.max_iter);
  Vector q_buf(inst.n);

  bool dp_fired = false;
  StopDecision dp_decision;
  Vector dp_solution;

  int limit = cfg.max_iter;
  int k = 0;
  while (k < limit) {
    ++k;

    auto t0 = std::chrono::steady_clock::now();
    const BidiagEngine::StepResult sr = engine.step();
    const double t_bidiag = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    GivensCoeffs gc;
    try {
      gc = givens_step(giv, sr.beta_next, sr.alpha_next);
    } catch (const std::domain_error&) {
      h.terminated_early = true;
      h.termination = "degenerate rotation";
      break;
    }
    const double t_givens = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const double* q_next = sr.q_next;
    if (q_next != nullptr && rerround_q) {
      q_buf = Eigen::Map<const Vector>(q_next, inst.n);
      round_vector(q_buf.data(), inst.n, cfg.update_spec);
      q_next = q_buf.data();
    }
    update_step(upd, q_next, gc.rho, gc.phi, gc.theta_next);
    const double t_update = seconds_since(t0);

    IterRecord rec;
    rec.k = k;
    rec.phi_bar_next = gc.next.phi_bar;
    rec.norm_x = upd.x.norm();
    rec.re = track_re ? (upd.x - inst.x_ex).norm() / h.norm_x_ex : 0.0;
    rec.kappa = kappa_rhat(superdiag);  // superdiag holds k-1 ratios here
    superdiag.push_back(gc.theta_next / gc.rho);
    rec.mu = engine.mu();
    rec.nu = engine.nu();
    rec.t_bidiag = t_bidiag;
    rec.t_givens = t_givens;
    rec.t_update = t_update;
    h.iters.push_back(rec);
    if (cfg.store_iterates) h.iterates.push_back(upd.x);

    if (dp_enabled && !dp_fired &&
        discrepancy_fired(gc.next.phi_bar, h.norm_e, cfg.tau)) {
      dp_fired = true;
      dp_decision = {StopRule::discrepancy, k, k, cfg.tau, false};
      dp_solution = upd.x;
      if (!cfg.full_history) {
        limit = k;
      } else if (cfg.overshoot) {
        const int cap =
            std::max(static_cast<int>(std::ceil(cfg.overshoot_factor * k)),
                     k + cfg.overshoot_extra);
        limit = std::min(limit, cap);
      }
    }

    giv = gc.next;

    if (sr.status != BidiagEngine::StepStatus::ok) {
      h.terminated_early = true;
      h.termination = sr.status == BidiagEngine::StepStatus::terminated_beta
                          ? "beta below threshold"
                          : "alpha below threshold";
      break;
    }
  }

  // Decisions, in the order the rules were requested.
  for (auto rule : cfg.rules) {
    switch (rule) {
      case StopRule::discrepancy: {
        if (dp_fired) {
          h.decisions.push_back(dp_decision);
          h.selected.push_back(dp_solution);
        } else {
          h.decisions.push_back(
              {StopRule::discrepancy, 0, h.iterations(), cfg.tau, false});
          h.selected.emplace_back();
        }
        break;
      }
      case StopRule::lcurve: {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(h.iters.size());
        for (const auto& r : h.iters) {
          pts.emplace_back(std::log(r.phi_bar_next), std::log(r.norm_x));
        }
        StopDecision d{StopRule::lcurve, 0, h.iterations(), 0.0, false};
        if (auto corner = lcurve_corner(pts)) {
          d.k1 = *corner;
        } else {
          // No detectable corner: fall back to the last iterate.
          d.k1 = h.iterations();
          d.fallback = true;
        }
        h.decisions.push_back(d);
        if (d.k1 >= 1 && cfg.store_iterates) {
          h.selected.push_back(h.iterates[d.k1 - 1]);
        } else {
          h.selected.emplace_back();
        }
        break;
      }
      case StopRule::oracle: {
        StopDecision d{StopRule::oracle, 0, h.iterations(), 0.0, false};
        if (track_re) {
          std::vector<double> re(h.iters.size());
          for (std::size_t i = 0; i < h.iters.size(); ++i) {
            re[i] = h.iters[i].re;
          }
          d.k1 = oracle_optimal(re);
        }
        h.decisions.push_back(d);
        if (d.k1 >= 1 && cfg.store_iterates) {
          h.selected.push_back(h.iterates[d.k1 - 1]);
        } else {
          h.selected.emplace_back();
        }
        break;
      }
    }
  }
  return h;
}

}  // namespace mplsqr
