// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mplsqr/stopping.hpp"

#include <cmath>
#include <stdexcept>

namespace mplsqr {

std::string stop_rule_name(StopRule rule) {
  switch (rule) {
    case StopRule::discrepancy: return "dp";
    case StopRule::lcurve: return "lcurve";
    case StopRule::oracle: return "oracle";
  }
  return "unknown";
}

StopRule parse_stop_rule(const std::string& name) {
  if (name == "dp") return StopRule::discrepancy;
  if (name == "lcurve") return StopRule::lcurve;
  if (name == "oracle") return StopRule::oracle;
  throw std::invalid_argument("unknown stop rule '" + name + "'");
}

bool discrepancy_fired(double phi_bar_next, double norm_e, double tau) {
  if (!(norm_e > 0.0)) {
    throw std::invalid_argument("discrepancy_fired: norm_e must be positive");
  }
  if (!(tau > 1.0)) {
    throw std::invalid_argument("discrepancy_fired: tau must exceed 1");
  }
  return std::abs(phi_bar_next) <= tau * norm_e;
}

std::optional<int> lcurve_corner(
    const std::vector<std::pair<double, double>>& points) {
  // Monotone cleanup: walk in iteration order, keep a point only if the
  // residual strictly decreased and the solution norm strictly increased
  // relative to the last kept point. Stagnating tails (solver iterating on
  // noise) collapse into single points instead of producing spurious corners.
  std::vector<int> kept;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second)) {
      continue;
    }
    if (!kept.empty()) {
      const auto& prev = points[kept.back()];
      if (!(points[i].first < prev.first && points[i].second > prev.second)) {
        continue;
      }
    }
    kept.push_back(i);
  }
  if (kept.size() < 5) return std::nullopt;

  // Discrete Menger curvature at each interior kept point; corners are
  // clockwise turns (residual axis first), the sharpest one wins. Ties go to
  // the smaller iteration index.
  double best = 0.0;
  int best_k = -1;
  for (std::size_t j = 1; j + 1 < kept.size(); ++j) {
    const auto& a = points[kept[j - 1]];
    const auto& b = points[kept[j]];
    const auto& c = points[kept[j + 1]];
    const double ux = b.first - a.first, uy = b.second - a.second;
    const double vx = c.first - b.first, vy = c.second - b.second;
    const double cross = ux * vy - uy * vx;
    const double la = std::hypot(ux, uy);
    const double lb = std::hypot(vx, vy);
    const double lc = std::hypot(c.first - a.first, c.second - a.second);
    if (la == 0.0 || lb == 0.0 || lc == 0.0) continue;
    // Clockwise turn, and by an angle whose sine clears roundoff noise:
    // nearly collinear triples (straight segments of the curve) are not
    // corners even when cancellation flips the sign of the cross product.
    if (cross >= -1e-12 * la * lb) continue;
    const double curvature = 2.0 * std::abs(cross) / (la * lb * lc);
    if (curvature > best) {
      best = curvature;
      best_k = kept[j] + 1;
    }
  }
  if (best_k < 0) return std::nullopt;
  return best_k;
}

int oracle_optimal(const std::vector<double>& re) {
  int best_k = 0;
  double best = 0.0;
  for (int i = 0; i < static_cast<int>(re.size()); ++i) {
    if (best_k == 0 || re[i] < best) {
      best = re[i];
      best_k = i + 1;
    }
  }
  return best_k;
}

}  // namespace mplsqr
