// Copyright (c) 2026 The mplsqr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mplsqr/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mplsqr {

namespace {

// Dense SVD diagnostics get expensive well before to_dense() becomes
// impossible; cap them at the standard 1-D sizes.
constexpr Index kDiagnosticsLimit = 2100;

std::string sci17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

// "s+d" -> "spd": '+' reads as 'p', anything else non-alphanumeric as '_'.
std::string sanitize_label(const std::string& label) {
  std::string out;
  for (char ch : label) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      out += ch;
    } else if (ch == '+') {
      out += 'p';
    } else {
      out += '_';
    }
  }
  return out.empty() ? "run" : out;
}

}  // namespace

std::vector<ConfigEntry> standard_configs() {
  return {
      {"d", PrecisionSpec::native64(), PrecisionSpec::native64()},
      {"s+d", PrecisionSpec::native32(), PrecisionSpec::native64()},
      {"s+s", PrecisionSpec::native32(), PrecisionSpec::native32()},
  };
}

void validate(const ExperimentConfig& cfg) {
  parse_problem(cfg.problem);
  if (cfg.n < 4) throw std::invalid_argument("experiment: n too small");
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) {
    throw std::invalid_argument("experiment: eps must be in (0, 1)");
  }
  if (cfg.configs.empty()) {
    throw std::invalid_argument("experiment: at least one configuration");
  }
  std::set<std::string> labels;
  for (const auto& c : cfg.configs) {
    if (c.label.empty()) {
      throw std::invalid_argument("experiment: empty configuration label");
    }
    if (!labels.insert(c.label).second) {
      throw std::invalid_argument("experiment: duplicate label '" + c.label +
                                  "'");
    }
  }
  if (cfg.max_iter < 1) throw std::invalid_argument("experiment: max_iter < 1");
  if (!(cfg.tau > 1.0)) throw std::invalid_argument("experiment: tau <= 1");
  if (!(cfg.safety >= 1.0)) throw std::invalid_argument("experiment: safety < 1");
}

ExperimentConfig preset(const std::string& name, int size_override) {
  ExperimentConfig cfg;
  if (name == "paper-shaw") {
    cfg.problem = "shaw";
    cfg.n = 1000;
    cfg.eps = 1e-3;
  } else if (name == "paper-deriv2") {
    cfg.problem = "deriv2";
    cfg.n = 1000;
    cfg.eps = 1e-3;
  } else if (name == "paper-gravity") {
    cfg.problem = "gravity";
    cfg.n = 2000;
    cfg.eps = 1e-3;
  } else if (name == "paper-heat") {
    cfg.problem = "heat";
    cfg.n = 2000;
    cfg.eps = 1e-3;
  } else if (name == "paper-blurspeckle") {
    cfg.problem = "blur2d";
    // Full-scale image side is 128; the default stays desk-sized.
    const Index N = size_override > 0 ? size_override : 64;
    cfg.n = N * N;
    cfg.eps = 1e-2;
    cfg.blur.psf = PsfKind::gaussian;
    cfg.max_iter = 120;
  } else if (name == "paper-blurdefocus") {
    cfg.problem = "blur2d";
    // Full-scale image side is 256; the default stays desk-sized.
    const Index N = size_override > 0 ? size_override : 64;
    cfg.n = N * N;
    cfg.eps = 1e-3;
    cfg.blur.psf = PsfKind::disk;
    cfg.max_iter = 120;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  if (size_override > 0 && cfg.problem != "blur2d") {
    cfg.n = size_override;
  }
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"paper-shaw",          "paper-deriv2", "paper-gravity",
          "paper-heat",          "paper-blurspeckle",
          "paper-blurdefocus"};
}

CompareResult compare_runs(const std::vector<const SolverHistory*>& histories,
                           double slack) {
  if (histories.size() < 2) {
    throw std::invalid_argument("compare_runs: need at least two histories");
  }
  const SolverHistory* base = nullptr;
  for (const auto* h : histories) {
    if (h->label == "d") base = h;
  }
  if (base == nullptr) {
    for (const auto* h : histories) {
      if (h->bidiag_spec == PrecisionSpec::native64() &&
          h->update_spec == PrecisionSpec::native64()) {
        base = h;
        break;
      }
    }
  }
  if (base == nullptr) base = histories.front();

  int common = base->iterations();
  for (const auto* h : histories) {
    if (h->problem != base->problem || h->m != base->m || h->n != base->n ||
        h->eps != base->eps || h->seed != base->seed) {
      throw std::invalid_argument("compare_runs: mismatched problem instances");
    }
    if (h->iterates.size() != h->iters.size() || h->iters.empty()) {
      throw std::invalid_argument("compare_runs: histories need stored iterates");
    }
    common = std::min(common, h->iterations());
  }

  CompareResult out;
  out.base_label = base->label;
  out.slack = slack;
  std::vector<const SolverHistory*> others;
  double u_cmp = 0.0;
  for (const auto* h : histories) {
    if (h == base) continue;
    others.push_back(h);
    out.labels.push_back(h->label);
    u_cmp = std::max(u_cmp,
                     std::max(h->bidiag_spec.unit(), h->update_spec.unit()));
  }

  // Oracle-optimal k of the base run over the common prefix.
  for (int k = 1; k <= common; ++k) {
    if (out.k0_base == 0 || base->at(k).re < base->at(out.k0_base).re) {
      out.k0_base = k;
    }
  }

  out.rows.reserve(common);
  for (int k = 1; k <= common; ++k) {
    CompareRow row;
    row.k = k;
    row.re_base = base->at(k).re;
    const double sk = std::sqrt(static_cast<double>(k));
    row.bound = sk * (1.0 + (2.0 + 2.0 * sk + k) * base->at(k).kappa) * u_cmp;
    const Vector& xb = base->iterates[k - 1];
    const double nb = xb.norm();
    for (const auto* h : others) {
      row.re.push_back(h->at(k).re);
      const double d = (h->iterates[k - 1] - xb).norm();
      row.reldiff.push_back(nb > 0.0 ? d / nb
                                     : (d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()));
    }
    out.rows.push_back(row);
  }

  if (!others.empty() && base->norm_x_ex > 0.0 && out.k0_base >= 1) {
    out.verdict = Verdict::pass;
    for (int k = 1; k <= out.k0_base; ++k) {
      for (double rd : out.rows[k - 1].reldiff) {
        if (!(rd <= slack * out.rows[k - 1].bound)) {
          out.verdict = Verdict::fail;
        }
      }
    }
  }
  return out;
}

namespace {

void write_history_meta(std::ofstream& out, const SolverHistory& h) {
  out << "# problem=" << h.problem << "\n";
  out << "# m=" << h.m << "\n";
  out << "# n=" << h.n << "\n";
  out << "# eps=" << sci17(h.eps) << "\n";
  out << "# seed=" << h.seed << "\n";
  out << "# label=" << h.label << "\n";
  out << "# bidiag=" << h.bidiag_spec.to_string() << "\n";
  out << "# update=" << h.update_spec.to_string() << "\n";
  out << "# reorth=" << (h.reorth ? 1 : 0) << "\n";
  out << "# tau=" << sci17(h.tau) << "\n";
  out << "# beta1=" << sci17(h.beta1) << "\n";
  out << "# norm_e=" << sci17(h.norm_e) << "\n";
  out << "# norm_x_ex=" << sci17(h.norm_x_ex) << "\n";
  out << "# terminated_early=" << (h.terminated_early ? 1 : 0) << "\n";
  out << "# termination=" << h.termination << "\n";
}

}  // namespace

void write_curves_csv(const std::string& path, const SolverHistory& h) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_history_meta(out, h);
  out << "k,phi_bar,norm_x,RE,kappa_Rhat,mu,nu,t_bidiag,t_givens,t_update\n";
  for (const auto& r : h.iters) {
    out << r.k << ',' << sci17(r.phi_bar_next) << ',' << sci17(r.norm_x) << ','
        << sci17(r.re) << ',' << sci17(r.kappa) << ',' << sci17(r.mu) << ','
        << sci17(r.nu) << ',' << sci17(r.t_bidiag) << ',' << sci17(r.t_givens)
        << ',' << sci17(r.t_update) << "\n";
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

SolverHistory read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  SolverHistory h;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(2, eq - 2);
      std::string val = line.substr(eq + 1);
      if (key == "problem") h.problem = val;
      else if (key == "m") h.m = std::stoll(val);
      else if (key == "n") h.n = std::stoll(val);
      else if (key == "eps") h.eps = std::strtod(val.c_str(), nullptr);
      else if (key == "seed") h.seed = std::stoull(val);
      else if (key == "label") h.label = val;
      else if (key == "bidiag") h.bidiag_spec = PrecisionSpec::parse(val);
      else if (key == "update") h.update_spec = PrecisionSpec::parse(val);
      else if (key == "reorth") h.reorth = val == "1";
      else if (key == "tau") h.tau = std::strtod(val.c_str(), nullptr);
      else if (key == "beta1") h.beta1 = std::strtod(val.c_str(), nullptr);
      else if (key == "norm_e") h.norm_e = std::strtod(val.c_str(), nullptr);
      else if (key == "norm_x_ex") h.norm_x_ex = std::strtod(val.c_str(), nullptr);
      else if (key == "terminated_early") h.terminated_early = val == "1";
      else if (key == "termination") h.termination = val;
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header row
      continue;
    }
    IterRecord r;
    const char* p = line.c_str();
    char* end = nullptr;
    r.k = static_cast<int>(std::strtol(p, &end, 10));
    double* fields[] = {&r.phi_bar_next, &r.norm_x, &r.re,      &r.kappa,
                        &r.mu,           &r.nu,     &r.t_bidiag, &r.t_givens,
                        &r.t_update};
    for (double* f : fields) {
      if (*end != ',') throw std::runtime_error("malformed CSV row in " + path);
      p = end + 1;
      *f = std::strtod(p, &end);
    }
    h.iters.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("no header row in " + path);
  return h;
}

void write_cross_csv(const std::string& path, const CompareResult& c,
                     const SolverHistory& base) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "# problem=" << base.problem << "\n";
  out << "# m=" << base.m << "\n";
  out << "# n=" << base.n << "\n";
  out << "# eps=" << sci17(base.eps) << "\n";
  out << "# seed=" << base.seed << "\n";
  out << "# base=" << c.base_label << "\n";
  out << "# k0_base=" << c.k0_base << "\n";
  out << "# slack=" << sci17(c.slack) << "\n";
  out << "# verdict="
      << (c.verdict == Verdict::pass
              ? "PASS"
              : c.verdict == Verdict::fail ? "FAIL" : "NA")
      << "\n";
  out << "k,RE_" << sanitize_label(c.base_label);
  for (const auto& l : c.labels) out << ",RE_" << sanitize_label(l);
  for (const auto& l : c.labels) {
    out << ",reldiff_" << sanitize_label(l) << "_vs_"
        << sanitize_label(c.base_label);
  }
  out << ",update_bound\n";
  for (const auto& row : c.rows) {
    out << row.k << ',' << sci17(row.re_base);
    for (double v : row.re) out << ',' << sci17(v);
    for (double v : row.reldiff) out << ',' << sci17(v);
    out << ',' << sci17(row.bound) << "\n";
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string summary_text(const std::vector<SolverHistory>& runs) {
  std::ostringstream os;
  if (!runs.empty()) {
    const auto& h = runs.front();
    os << "problem=" << h.problem << " m=" << h.m << " n=" << h.n
       << " eps=" << sci17(h.eps) << " seed=" << h.seed << "\n";
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-8s %-8s %5s %14s %9s %s\n", "config",
                "rule", "k1", "RE(k1)", "fired_at", "note");
  os << buf;
  for (const auto& h : runs) {
    for (const auto& d : h.decisions) {
      std::string re = "-";
      if (d.k1 >= 1 && d.k1 <= h.iterations()) {
        char tmp[32];
        std::snprintf(tmp, sizeof(tmp), "%.4e", h.at(d.k1).re);
        re = tmp;
      }
      std::string note;
      if (d.rule == StopRule::discrepancy && d.k1 == 0) note = "never fired";
      if (d.fallback) note = "no corner, fell back to last iterate";
      std::snprintf(buf, sizeof(buf), "%-8s %-8s %5d %14s %9d %s\n",
                    h.label.c_str(), stop_rule_name(d.rule).c_str(), d.k1,
                    re.c_str(), d.fired_at, note.c_str());
      os << buf;
    }
  }
  return os.str();
}

void write_summary(const std::string& path,
                   const std::vector<SolverHistory>& runs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << summary_text(runs);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  return run_experiment(cfg, make_instance(parse_problem(cfg.problem), cfg.n,
                                           cfg.eps, cfg.seed, cfg.blur));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                ProblemInstance instance) {
  validate(cfg);
  ExperimentResult result;
  result.instance = std::move(instance);

  for (const auto& entry : cfg.configs) {
    SolverConfig sc;
    sc.label = entry.label;
    sc.bidiag_spec = entry.bidiag;
    sc.update_spec = entry.update;
    sc.reorthogonalize = cfg.reorth;
    sc.max_iter = cfg.max_iter;
    sc.rules = cfg.rules;
    sc.tau = cfg.tau;
    sc.full_history = cfg.full_history;
    sc.overshoot = cfg.overshoot;
    sc.store_iterates = cfg.store_iterates;
    result.runs.push_back(solve(result.instance, sc));
  }

  if (cfg.diagnostics) {
    if (result.instance.n <= kDiagnosticsLimit) {
      try {
        result.diagnostics = picard_diagnostics(result.instance);
      } catch (const std::exception& e) {
        result.notices.push_back(std::string("diagnostics skipped: ") +
                                 e.what());
      }
    } else {
      result.notices.push_back(
          "dense SVD diagnostics skipped: n = " +
          std::to_string(result.instance.n) + " exceeds the dense limit " +
          std::to_string(kDiagnosticsLimit));
    }
    if (result.diagnostics) {
      try {
        result.advisor = advise(*result.diagnostics, result.instance.eps,
                                result.instance.m, cfg.safety);
      } catch (const std::exception& e) {
        result.notices.push_back(std::string("advisor skipped: ") + e.what());
      }
    }
  }

  if (result.runs.size() >= 2 && cfg.store_iterates) {
    std::vector<const SolverHistory*> hs;
    for (const auto& h : result.runs) hs.push_back(&h);
    try {
      result.comparison = compare_runs(hs);
    } catch (const std::exception& e) {
      result.notices.push_back(std::string("comparison skipped: ") + e.what());
    }
  }

  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    for (const auto& h : result.runs) {
      const std::string path =
          (fs::path(cfg.out_dir) /
           ("curves_" + sanitize_label(h.label) + ".csv"))
              .string();
      write_curves_csv(path, h);
      result.files.push_back(path);
    }
    if (result.comparison) {
      const SolverHistory* base = &result.runs.front();
      for (const auto& h : result.runs) {
        if (h.label == result.comparison->base_label) base = &h;
      }
      const std::string path = (fs::path(cfg.out_dir) / "cross.csv").string();
      write_cross_csv(path, *result.comparison, *base);
      result.files.push_back(path);
    }
    {
      const std::string path = (fs::path(cfg.out_dir) / "summary.txt").string();
      write_summary(path, result.runs);
      result.files.push_back(path);
    }
    if (result.advisor) {
      const std::string t = (fs::path(cfg.out_dir) / "advisor.txt").string();
      std::ofstream out(t, std::ios::trunc);
      out << result.advisor->to_text();
      result.files.push_back(t);
      const std::string j = (fs::path(cfg.out_dir) / "advisor.json").string();
      std::ofstream jout(j, std::ios::trunc);
      jout << result.advisor->to_json() << "\n";
      result.files.push_back(j);
    }
    for (const auto& n : result.notices) {
      const std::string path = (fs::path(cfg.out_dir) / "notices.txt").string();
      std::ofstream out(path, std::ios::app);
      out << n << "\n";
      if (result.files.empty() || result.files.back() != path) {
        result.files.push_back(path);
      }
    }
  }
  return result;
}

}  // namespace mplsqr
