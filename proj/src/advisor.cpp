// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mplsqr/advisor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace mplsqr {

namespace {

void check_eps_m(double eps, Index m) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("advisor: eps must be in (0, 1)");
  }
  if (m < 1) throw std::invalid_argument("advisor: m must be >= 1");
}

double scaled_noise(double eps, Index m) {
  return eps / std::sqrt(static_cast<double>(m));
}

}  // namespace

double resolution_limit(double eps, Index m, double beta) {
  check_eps_m(eps, m);
  if (!(beta > 0.0)) throw std::invalid_argument("advisor: beta must be > 0");
  return std::pow(scaled_noise(eps, m), beta / (1.0 + beta));
}

double accuracy_floor(double eps, double beta) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("advisor: eps must be in (0, 1)");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("advisor: beta must be > 0");
  return std::pow(eps, beta / (1.0 + beta));
}

UBound u_upper_bound(double eps, Index m, double beta, DecayType decay,
                     double decay_param, int k_star) {
  check_eps_m(eps, m);
  if (!(beta > 0.0)) throw std::invalid_argument("advisor: beta must be > 0");
  UBound u;
  if (decay == DecayType::severe) {
    if (!(decay_param > 1.0)) {
      throw std::invalid_argument(
          "advisor: severe decay requires rho > 1, got " +
          std::to_string(decay_param));
    }
    u.varrho = std::min(1.0, decay_param - 1.0);
  } else {
    if (k_star < 1) {
      throw std::invalid_argument("advisor: k_star must be >= 1");
    }
    if (!(decay_param > 0.0)) {
      throw std::invalid_argument("advisor: alpha must be > 0");
    }
    const double ratio =
        (static_cast<double>(k_star) + 1.0) / static_cast<double>(k_star);
    u.varrho = std::min(1.0, std::pow(ratio, decay_param) - 1.0);
  }
  const double base = scaled_noise(eps, m);
  u.value = u.varrho * std::pow(base, (2.0 + beta) / (1.0 + beta));
  u.loose = std::min(eps, std::pow(base, 1.0 / (1.0 + beta)));
  return u;
}

PrecisionSpec recommend(double u_bound, double safety, bool* marginal) {
  static const std::vector<PrecisionSpec> kDefault = {
      PrecisionSpec::native32(), PrecisionSpec::native64()};
  return recommend(u_bound, safety, kDefault, marginal);
}

PrecisionSpec recommend(double u_bound, double safety,
                        const std::vector<PrecisionSpec>& candidates,
                        bool* marginal) {
  if (!(u_bound > 0.0)) {
    throw std::invalid_argument("recommend: u_bound must be > 0");
  }
  if (!(safety >= 1.0)) {
    throw std::invalid_argument("recommend: safety must be >= 1");
  }
  if (candidates.empty()) {
    throw std::invalid_argument("recommend: no candidate specs");
  }
  // Cheapest = largest unit. Scan in that order.
  std::vector<PrecisionSpec> order = candidates;
  std::sort(order.begin(), order.end(),
            [](const PrecisionSpec& a, const PrecisionSpec& b) {
              return a.unit() > b.unit();
            });
  for (const auto& spec : order) {
    if (spec.unit() * safety <= u_bound) {
      if (marginal) *marginal = false;
      return spec;
    }
  }
  if (marginal) *marginal = true;
  return order.back();
}

namespace {

AdvisorReport build_report(double eps, Index m, double beta, double rho0,
                           DecayType decay, double decay_param, int k_star,
                           bool fit_reliable, double safety) {
  if (!(safety >= 1.0)) {
    throw std::invalid_argument("advisor: safety must be >= 1");
  }
  AdvisorReport r;
  r.eps = eps;
  r.m = m;
  r.beta = beta;
  r.rho0 = rho0;
  r.decay = decay;
  r.decay_param = decay_param;
  r.k_star = k_star;
  r.fit_reliable = fit_reliable;
  r.safety = safety;

  r.eta_res = resolution_limit(eps, m, beta);
  r.floor = accuracy_floor(eps, beta);
  const UBound u = u_upper_bound(eps, m, beta, decay, decay_param, k_star);
  r.varrho = u.varrho;
  r.u_bound = u.value;
  r.u_bound_loose = u.loose;

  r.recommended = recommend(r.u_bound, safety, &r.marginal);
  r.margin = r.u_bound / r.recommended.unit();

  if (!fit_reliable) {
    r.warnings.push_back(
        "decay-model fit is unreliable (k* too small or implausible "
        "parameters); treat the bound as indicative only");
  }
  if (r.marginal) {
    r.warnings.push_back(
        "no candidate satisfies unit * safety <= u_bound; even double "
        "precision may be marginal for this problem");
  }
  if (decay == DecayType::mild) {
    r.warnings.push_back(
        "mild singular value decay: the u bound can be pessimistic (too "
        "small) when eps is tiny");
  }
  r.warnings.push_back(
      "the singular-gap hypothesis sigma_i - sigma_{i+1} >> ||E|| is not "
      "verifiable without the backward error and is not checked");
  return r;
}

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4e", v);
  return buf;
}

}  // namespace

AdvisorReport advise(const PicardDiagnostics& diag, double eps, Index m,
                     double safety) {
  if (!(diag.beta > 0.0)) {
    throw std::invalid_argument(
        "advise: fitted beta is not positive; supply model parameters "
        "manually");
  }
  return build_report(eps, m, diag.beta, diag.rho0, diag.decay,
                      diag.decay_param, diag.k_star, diag.fit_reliable,
                      safety);
}

AdvisorReport advise_manual(double eps, Index m, double beta, DecayType decay,
                            double decay_param, int k_star, double safety) {
  return build_report(eps, m, beta, 0.0, decay, decay_param, k_star, true,
                      safety);
}

std::string AdvisorReport::to_text() const {
  std::ostringstream os;
  os << "precision advisor report\n";
  os << "  noise level eps        " << sci(eps) << "\n";
  os << "  rows m                 " << m << "\n";
  os << "  picard model           |u_i^T b_ex| = rho0 * sigma_i^(1+beta), "
     << "beta = " << sci(beta) << ", rho0 = " << sci(rho0) << "\n";
  os << "  decay                  " << decay_name(decay)
     << (decay == DecayType::severe ? " (rho = " : " (alpha = ")
     << sci(decay_param) << "), k* = " << k_star << "\n";
  os << "  resolution limit       " << sci(eta_res) << "\n";
  os << "  accuracy floor (C1=1)  " << sci(floor) << "\n";
  os << "  varrho                 " << sci(varrho) << "\n";
  os << "  u bound (strict)       " << sci(u_bound) << "\n";
  os << "  u bound (loose)        " << sci(u_bound_loose) << "\n";
  os << "  safety factor          " << sci(safety) << "\n";
  os << "  recommended spec       " << recommended.to_string()
     << " (unit = " << sci(recommended.unit()) << ", margin = " << sci(margin)
     << (marginal ? ", MARGINAL" : "") << ")\n";
  for (const auto& w : warnings) os << "  note: " << w << "\n";
  return os.str();
}

std::string AdvisorReport::to_json() const {
  nlohmann::json j;
  j["eps"] = eps;
  j["m"] = m;
  j["beta"] = beta;
  j["rho0"] = rho0;
  j["decay"] = decay_name(decay);
  j["decay_param"] = decay_param;
  j["k_star"] = k_star;
  j["fit_reliable"] = fit_reliable;
  j["eta_res"] = eta_res;
  j["floor"] = floor;
  j["varrho"] = varrho;
  j["u_bound"] = u_bound;
  j["u_bound_loose"] = u_bound_loose;
  j["safety"] = safety;
  j["recommended"] = recommended.to_string();
  j["margin"] = margin;
  j["marginal"] = marginal;
  j["warnings"] = warnings;
  return j.dump(2);
}

}  // namespace mplsqr
