// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end. Three subcommands:
//   run       solve one instance under several precision configurations
//   advise    precision recommendation from fitted or manual model parameters
//   diagnose  singular values and data coefficients as CSV

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mplsqr/experiment.hpp"

namespace {

using namespace mplsqr;

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// A configuration entry is a standard label (d, s+d, s+s) or an explicit
// "bidiag/update" pair of precision specs, e.g. emu20/f64.
ConfigEntry parse_config_entry(const std::string& text) {
  for (const auto& std_entry : standard_configs()) {
    if (text == std_entry.label) return std_entry;
  }
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    throw CLI::ValidationError(
        "--configs", "'" + text +
                         "' is neither a standard label (d, s+d, s+s) nor a "
                         "bidiag/update pair like emu20/f64");
  }
  ConfigEntry entry;
  entry.label = text;
  entry.bidiag = PrecisionSpec::parse(text.substr(0, slash));
  entry.update = PrecisionSpec::parse(text.substr(slash + 1));
  return entry;
}

PsfKind parse_psf(const std::string& name) {
  if (name == "gaussian") return PsfKind::gaussian;
  if (name == "disk") return PsfKind::disk;
  throw CLI::ValidationError("--psf", "expected 'gaussian' or 'disk'");
}

DecayType parse_decay(const std::string& name) {
  if (name == "severe") return DecayType::severe;
  if (name == "moderate") return DecayType::moderate;
  if (name == "mild") return DecayType::mild;
  throw CLI::ValidationError("--decay",
                             "expected 'severe', 'moderate' or 'mild'");
}

struct RunOptions {
  std::string preset;
  int size = 0;
  std::string problem = "shaw";
  long long n = 1000;
  std::string psf = "gaussian";
  double psf_param = 0.0;
  double eps = 1e-3;
  unsigned long long seed = 1;
  std::string configs = "d,s+d,s+s";
  std::string stop = "dp,lcurve,oracle";
  double tau = 1.001;
  int max_iter = 60;
  bool no_reorth = false;
  bool no_full_history = false;
  bool no_overshoot = false;
  bool no_iterates = false;
  bool no_diagnostics = false;
  double safety = 10.0;
  std::string out_dir;
  std::string archive;
  std::string save_archive;
  bool quiet = false;
};

int do_run(const RunOptions& opt) {
  ExperimentConfig cfg;
  if (!opt.preset.empty()) {
    cfg = preset(opt.preset, opt.size);
  } else {
    cfg.problem = opt.problem;
    cfg.n = opt.n;
    if (opt.size > 0) {
      // --size means the image side for blur2d, n otherwise.
      cfg.n = opt.problem == "blur2d"
                  ? static_cast<Index>(opt.size) * opt.size
                  : opt.size;
    }
  }
  cfg.eps = opt.eps;
  cfg.seed = opt.seed;
  cfg.blur.psf = parse_psf(opt.psf);
  if (opt.psf_param > 0.0) cfg.blur.param = opt.psf_param;
  if (!opt.preset.empty()) {
    // Presets own their psf kind; only the width may be overridden.
    cfg.blur.psf = preset(opt.preset, opt.size).blur.psf;
    if (opt.psf_param > 0.0) cfg.blur.param = opt.psf_param;
  }

  cfg.configs.clear();
  for (const auto& text : split_commas(opt.configs)) {
    cfg.configs.push_back(parse_config_entry(text));
  }
  cfg.rules.clear();
  for (const auto& name : split_commas(opt.stop)) {
    cfg.rules.push_back(parse_stop_rule(name));
  }
  cfg.tau = opt.tau;
  cfg.max_iter = opt.max_iter;
  cfg.reorth = !opt.no_reorth;
  cfg.full_history = !opt.no_full_history;
  cfg.overshoot = !opt.no_overshoot;
  cfg.store_iterates = !opt.no_iterates;
  cfg.diagnostics = !opt.no_diagnostics;
  cfg.safety = opt.safety;
  cfg.out_dir = opt.out_dir;

  ExperimentResult result;
  if (!opt.archive.empty()) {
    result = run_experiment(cfg, load_instance(opt.archive));
  } else {
    result = run_experiment(cfg);
  }
  if (!opt.save_archive.empty()) {
    save_instance(opt.save_archive, result.instance);
  }

  if (!opt.quiet) {
    std::cout << summary_text(result.runs);
    if (result.comparison) {
      const auto& c = *result.comparison;
      std::cout << "cross-check vs '" << c.base_label
                << "': k0=" << c.k0_base << " verdict="
                << (c.verdict == Verdict::pass
                        ? "PASS"
                        : c.verdict == Verdict::fail ? "FAIL" : "NA")
                << "\n";
    }
    if (result.advisor) std::cout << "\n" << result.advisor->to_text();
    for (const auto& notice : result.notices) {
      std::cout << "note: " << notice << "\n";
    }
    for (const auto& file : result.files) {
      std::cout << "wrote " << file << "\n";
    }
    if (!opt.save_archive.empty()) {
      std::cout << "wrote " << opt.save_archive << "\n";
    }
  }
  return 0;
}

struct AdviseOptions {
  // Instance route.
  std::string problem;
  long long n = 0;
  unsigned long long seed = 1;
  std::string psf = "gaussian";
  double psf_param = 0.0;
  // Manual route.
  long long m = 0;
  double beta = 0.0;
  std::string decay = "severe";
  double decay_param = 0.0;
  int k_star = 1;

  double eps = 1e-3;
  double safety = 10.0;
  bool json = false;
};

int do_advise(const AdviseOptions& opt) {
  AdvisorReport report;
  if (!opt.problem.empty()) {
    BlurParams blur;
    blur.psf = parse_psf(opt.psf);
    if (opt.psf_param > 0.0) blur.param = opt.psf_param;
    const auto inst = make_instance(parse_problem(opt.problem), opt.n, opt.eps,
                                    opt.seed, blur);
    report = advise(picard_diagnostics(inst), inst.eps, inst.m, opt.safety);
  } else {
    if (opt.m < 1) {
      throw CLI::ValidationError("--m", "manual mode needs the row count");
    }
    report = advise_manual(opt.eps, opt.m, opt.beta, parse_decay(opt.decay),
                           opt.decay_param, opt.k_star, opt.safety);
  }
  std::cout << (opt.json ? report.to_json() + "\n" : report.to_text());
  return 0;
}

struct DiagnoseOptions {
  std::string problem = "shaw";
  long long n = 1000;
  double eps = 1e-3;
  unsigned long long seed = 1;
  std::string psf = "gaussian";
  double psf_param = 0.0;
  std::string out;
};

int do_diagnose(const DiagnoseOptions& opt) {
  BlurParams blur;
  blur.psf = parse_psf(opt.psf);
  if (opt.psf_param > 0.0) blur.param = opt.psf_param;
  const auto inst = make_instance(parse_problem(opt.problem), opt.n, opt.eps,
                                  opt.seed, blur);
  const auto diag = picard_diagnostics(inst);

  std::ostringstream os;
  os << "# problem=" << inst.name << "\n# m=" << inst.m << "\n# n=" << inst.n
     << "\n# eps=" << inst.eps << "\n# seed=" << inst.seed << "\n";
  os << "# noise_floor=" << diag.noise_floor << "\n# k_star=" << diag.k_star
     << "\n# beta=" << diag.beta << "\n# rho0=" << diag.rho0
     << "\n# decay=" << decay_name(diag.decay)
     << "\n# decay_param=" << diag.decay_param
     << "\n# fit_reliable=" << (diag.fit_reliable ? 1 : 0) << "\n";
  os << "i,sigma,coef_exact,coef_noisy\n";
  char buf[96];
  for (Index i = 0; i < diag.sigma.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%lld,%.16e,%.16e,%.16e\n",
                  static_cast<long long>(i + 1), diag.sigma[i],
                  diag.coef_exact[i], diag.coef_noisy[i]);
    os << buf;
  }
  if (opt.out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(opt.out, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + opt.out + "'");
    f << os.str();
    std::cout << "wrote " << opt.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-precision LSQR for discrete ill-posed problems"};
  app.require_subcommand(1);

  RunOptions ro;
  auto* run = app.add_subcommand("run", "Solve one instance and report curves");
  run->set_config("--config", "", "Read options from an INI file");
  run->add_option("--preset", ro.preset, "Named preset")
      ->check(CLI::IsMember(preset_names()));
  run->add_option("--size", ro.size,
                  "Override the preset size (n, or image side for blur2d)");
  run->add_option("--problem", ro.problem,
                  "shaw | deriv2 | gravity | heat | blur2d");
  run->add_option("--n", ro.n, "Problem dimension (pixels for blur2d)");
  run->add_option("--psf", ro.psf, "blur2d kernel: gaussian | disk");
  run->add_option("--psf-param", ro.psf_param,
                  "Gaussian sigma or disk radius in pixels");
  run->add_option("--eps", ro.eps, "Relative noise level ||e||/||b_ex||");
  run->add_option("--seed", ro.seed, "Noise seed");
  run->add_option("--configs", ro.configs,
                  "Comma list: d, s+d, s+s, or bidiag/update pairs");
  run->add_option("--stop", ro.stop, "Comma list of dp, lcurve, oracle");
  run->add_option("--tau", ro.tau, "Discrepancy threshold factor (> 1)");
  run->add_option("--max-iter", ro.max_iter, "Iteration cap");
  run->add_flag("--no-reorth", ro.no_reorth, "Disable reorthogonalization");
  run->add_flag("--no-full-history", ro.no_full_history,
                "Stop as soon as the discrepancy principle fires");
  run->add_flag("--no-overshoot", ro.no_overshoot,
                "Run to max-iter even after the discrepancy principle fires");
  run->add_flag("--no-iterates", ro.no_iterates,
                "Do not store per-iteration solutions (disables cross-check)");
  run->add_flag("--no-diagnostics", ro.no_diagnostics,
                "Skip the dense SVD diagnostics and advisor");
  run->add_option("--safety", ro.safety, "Advisor safety factor (>= 1)");
  run->add_option("--out", ro.out_dir, "Directory for CSV/report files");
  run->add_option("--archive", ro.archive,
                  "Load the problem instance from this archive");
  run->add_option("--save-archive", ro.save_archive,
                  "Save the generated instance for reproduction");
  run->add_flag("--quiet", ro.quiet, "Suppress stdout report");

  AdviseOptions ao;
  auto* advise_cmd =
      app.add_subcommand("advise", "Recommend a bidiagonalization precision");
  advise_cmd->add_option("--problem", ao.problem,
                         "Fit the model from this generated instance");
  advise_cmd->add_option("--n", ao.n, "Problem dimension for --problem");
  advise_cmd->add_option("--seed", ao.seed, "Noise seed for --problem");
  advise_cmd->add_option("--psf", ao.psf, "blur2d kernel: gaussian | disk");
  advise_cmd->add_option("--psf-param", ao.psf_param,
                         "Gaussian sigma or disk radius in pixels");
  advise_cmd->add_option("--m", ao.m, "Row count (manual mode)");
  advise_cmd->add_option("--beta", ao.beta, "Data decay exponent (manual)");
  advise_cmd->add_option("--decay", ao.decay,
                         "severe | moderate | mild (manual)");
  advise_cmd->add_option("--decay-param", ao.decay_param,
                         "rho (severe) or alpha (moderate/mild)");
  advise_cmd->add_option("--k-star", ao.k_star,
                         "Last coefficient index above the noise floor");
  advise_cmd->add_option("--eps", ao.eps, "Relative noise level");
  advise_cmd->add_option("--safety", ao.safety, "Safety factor (>= 1)");
  advise_cmd->add_flag("--json", ao.json, "Emit JSON instead of text");

  DiagnoseOptions dg;
  auto* diagnose =
      app.add_subcommand("diagnose", "Singular values and coefficients (CSV)");
  diagnose->add_option("--problem", dg.problem,
                       "shaw | deriv2 | gravity | heat | blur2d");
  diagnose->add_option("--n", dg.n, "Problem dimension");
  diagnose->add_option("--eps", dg.eps, "Relative noise level");
  diagnose->add_option("--seed", dg.seed, "Noise seed");
  diagnose->add_option("--psf", dg.psf, "blur2d kernel: gaussian | disk");
  diagnose->add_option("--psf-param", dg.psf_param,
                       "Gaussian sigma or disk radius in pixels");
  diagnose->add_option("--out", dg.out, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(ro);
    if (advise_cmd->parsed()) return do_advise(ao);
    if (diagnose->parsed()) return do_diagnose(dg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
