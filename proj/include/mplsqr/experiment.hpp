// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MPLSQR_EXPERIMENT_HPP
#define MPLSQR_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "mplsqr/advisor.hpp"
#include "mplsqr/lsqr.hpp"
#include "mplsqr/picard.hpp"

namespace mplsqr {

// One solver configuration of an experiment. The standard trio is
//   d    f64 / f64
//   s+d  f32 / f64
//   s+s  f32 / f32
// (bidiagonalization spec / update spec; rotation scalars always double).
struct ConfigEntry {
  std::string label;
  PrecisionSpec bidiag = PrecisionSpec::native64();
  PrecisionSpec update = PrecisionSpec::native64();
};

std::vector<ConfigEntry> standard_configs();

struct ExperimentConfig {
  std::string problem = "shaw";
  Index n = 1000;
  double eps = 1e-3;
  std::uint64_t seed = 1;
  BlurParams blur;

  std::vector<ConfigEntry> configs = standard_configs();
  bool reorth = true;
  int max_iter = 60;
  std::vector<StopRule> rules = {StopRule::discrepancy, StopRule::lcurve,
                                 StopRule::oracle};
  double tau = 1.001;
  bool full_history = true;
  bool overshoot = true;
  bool store_iterates = true;

  // Empty out_dir runs in memory only.
  std::string out_dir;
  // Attempt SVD diagnostics + advisor (skipped with a notice when the dense
  // form is infeasible).
  bool diagnostics = true;
  double safety = 10.0;
};

// Throws std::invalid_argument for empty/duplicate labels, no
// configurations, or invalid numeric fields.
void validate(const ExperimentConfig& cfg);

// Named presets reproducing the standard experimental grid. The blur presets
// default to a reduced image size for desk-scale runs; pass size_override
// (the image side N) to change that, e.g. the full-scale sizes 128/256.
ExperimentConfig preset(const std::string& name, int size_override = 0);
std::vector<std::string> preset_names();

struct CompareRow {
  int k = 0;
  double re_base = 0.0;
  std::vector<double> re;       // per non-base config
  std::vector<double> reldiff;  // ||x_k^c - x_k^base|| / ||x_k^base||
  double bound = 0.0;  // sqrt(k) (1 + (2 + 2 sqrt(k) + k) kappa(R_k)) * u
};

enum class Verdict { pass, fail, not_applicable };

struct CompareResult {
  std::string base_label;
  std::vector<std::string> labels;  // non-base, in input order
  std::vector<CompareRow> rows;     // k = 1..common prefix
  int k0_base = 0;                  // oracle-optimal k of the base run
  double slack = 10.0;
  Verdict verdict = Verdict::not_applicable;
};

// Per-k relative differences against the base run ("d" when present) and the
// update-stage error bound; verdict PASS when every configuration stays below
// bound * slack up to the base run's oracle-optimal k. Requires stored
// iterates and histories of the same instance.
CompareResult compare_runs(const std::vector<const SolverHistory*>& histories,
                           double slack = 10.0);

struct ExperimentResult {
  ProblemInstance instance;
  std::vector<SolverHistory> runs;
  std::optional<PicardDiagnostics> diagnostics;
  std::optional<AdvisorReport> advisor;
  std::optional<CompareResult> comparison;
  std::vector<std::string> files;
  std::vector<std::string> notices;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Variant running on an existing instance (e.g. loaded from an archive).
// The generator fields of cfg (problem, n, eps, seed, blur) are ignored.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                ProblemInstance instance);

// Curve CSV: metadata comment lines, a header row, then one row per
// iteration with every recorded field at full precision (17 significant
// digits, so parse(write(h)) reproduces the history bit for bit).
void write_curves_csv(const std::string& path, const SolverHistory& h);
SolverHistory read_curves_csv(const std::string& path);

void write_cross_csv(const std::string& path, const CompareResult& c,
                     const SolverHistory& base);
void write_summary(const std::string& path,
                   const std::vector<SolverHistory>& runs);
std::string summary_text(const std::vector<SolverHistory>& runs);

}  // namespace mplsqr

#endif  // MPLSQR_EXPERIMENT_HPP
