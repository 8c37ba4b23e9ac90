#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "liequant/besov.hpp"
#include "liequant/symbol_calculus.hpp"

namespace liequant {

struct ExperimentConfig {
  std::string experiment;
  GroupId group = GroupId::su2();
  double band = 8.0;
  double oversample = 1.0;
  double r = 0.0;
  double p = 2.0, q = 2.0;
  double p1 = 2.0, p2 = 2.0;
  std::string symbol = "bessel_potential:-1";
  int trials = 20;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  std::string out_dir = ".";
  std::string format = "csv";  // csv | json-summary
  PlancherelWeight weight = PlancherelWeight::DimSquared;
  double window_lo = -1.0, window_hi = -1.0;  // class-fit window, default [band/4, band]
  double spatial_band = 1.0;                  // full-symbol experiments
  std::string input;                          // optional grid-function file
};

// Plain-text "key = value" lines; '#' starts a comment. Keys match the CLI
// long flags. Unknown keys are an error.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation = "<=";  // how value compares to threshold
  bool pass = false;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_labels;  // optional leading label column
};

struct Report {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<std::pair<std::string, double>> results;
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::vector<std::string> notes;
  bool refused = false;
  std::string refusal_reason;

  bool passed() const;
  void check(const std::string& name, double value, double threshold,
             const std::string& relation = "<=");
  void note(const std::string& text);
  void result(const std::string& name, double value);
};

// Schur orthogonality at the declared band, Plancherel vs quadrature L^2 on
// seeded trials, and transform round trips.
Report run_plancherel_check(const ExperimentConfig& cfg);

// Besov profile(s) of seeded random functions (or the --in function).
Report run_besov_norm(const ExperimentConfig& cfg);

// Applies --symbol to seeded random functions; writes output samples and norms.
Report run_op_apply(const ExperimentConfig& cfg);

// Hormander class estimate of --symbol over the window.
Report run_class_fit(const ExperimentConfig& cfg);

// Weak Plancherel norm of --symbol at exponent 1/p1 - 1/p2.
Report run_weak_norm(const ExperimentConfig& cfg);

// Multiplier transfer: per-trial Besov and L^p ratios; at p1 = p2 = 2 the
// Besov ratios are asserted against the exact multiplier norm sup ||a(xi)||.
Report run_multiplier_transfer(const ExperimentConfig& cfg);

// Full-symbol transfer: trial ratios R, frozen-family constant K over the
// spatial grid and |beta| <= l = [n/p1] + 1, R/K report, and band-stability
// of R between band and 2*band.
Report run_full_symbol_transfer(const ExperimentConfig& cfg);

// Weak-norm band stability on the sphere plus trial ratios at (p1, p2).
Report run_weak_hormander(const ExperimentConfig& cfg);

// Sub-Laplacian parametrix identities and class fit; vector-field inverse
// bounds with the analytic constant, refusing resonant coefficients.
Report run_subelliptic(const ExperimentConfig& cfg);

// Writes <experiment>.<table>.csv per table plus summary.json or summary.csv
// (chosen by cfg format). Output is byte-deterministic for a fixed config.
void emit_report(const Report& report, const std::string& out_dir, const std::string& format);

Report run_experiment(const ExperimentConfig& cfg);  // dispatch on cfg.experiment

}  // namespace liequant
