#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "liequant/harness.hpp"
#include "liequant/serialization.hpp"

namespace {

struct FlagEntry {
  std::string key;
  std::string* slot;
  std::string help;
};

struct FlagSet {
  // every flag funnels through apply_config_entry so the CLI and config files
  // share one parser and one set of defaults
  std::vector<FlagEntry> entries;
  std::string config;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config, "key = value config file; flags override it");
    for (auto& e : entries) sub->add_option("--" + e.key, *e.slot, e.help);
  }
};

int run(const liequant::ExperimentConfig& cfg) {
  const liequant::Report rep = liequant::run_experiment(cfg);
  liequant::emit_report(rep, cfg.out_dir, cfg.format);

  if (rep.refused) {
    std::cout << rep.experiment << ": refused: " << rep.refusal_reason << "\n";
    return 2;
  }
  std::cout << rep.experiment << "\n";
  for (const auto& [name, value] : rep.results)
    std::cout << "  " << name << " = " << liequant::format_double(value) << "\n";
  for (const auto& c : rep.checks)
    std::cout << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": "
              << liequant::format_double(c.value) << " " << c.relation << " "
              << liequant::format_double(c.threshold) << "\n";
  for (const auto& n : rep.notes) std::cout << "  note: " << n << "\n";
  std::cout << (rep.passed() ? "passed" : "failed") << "\n";
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-differential operators on compact groups: transforms, Besov norms, "
               "symbol calculus, and reproducible operator-norm experiments"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"plancherel-check", "Schur orthogonality, Plancherel identity, transform round trips"},
      {"besov-norm", "dyadic profile and Besov norm of a function"},
      {"op-apply", "apply a symbol to trial functions or an input function"},
      {"class-fit", "Hormander class (m, rho, delta) estimate of a symbol"},
      {"weak-norm", "weak Plancherel norm; on the sphere: full band-stability study"},
      {"transfer", "multiplier transfer ratios with the exact L2 constant at p=2"},
      {"full-transfer", "full-symbol transfer ratios and the frozen-family constant"},
      {"subelliptic", "sub-Laplacian parametrix and vector-field inverse bounds"},
  };

  std::string group, band, oversample, r, p, q, p1, p2, symbol, trials, seed, tol, out_dir,
      format, weight, window_lo, window_hi, spatial_band, in;
  FlagSet flags;
  flags.entries = {
      {"group", &group, "torusN, su2, or s2"},
      {"band", &band, "frequency band L (half-integers allowed on su2)"},
      {"oversample", &oversample, "grid oversampling factor, default 1"},
      {"r", &r, "Besov smoothness"},
      {"p", &p, "integrability exponent (inf accepted)"},
      {"q", &q, "Besov summation exponent (inf accepted)"},
      {"p1", &p1, "source exponent for the weak norm, 1 < p1 <= 2"},
      {"p2", &p2, "target exponent for the weak norm, 2 <= p2 < inf"},
      {"symbol", &symbol, "builtin symbol spec, e.g. bessel_potential:-1"},
      {"trials", &trials, "number of random trial functions"},
      {"seed", &seed, "base RNG seed; trial t uses seed + t"},
      {"tol", &tol, "tolerance used by the experiment's checks"},
      {"out-dir", &out_dir, "directory for summary + table files"},
      {"format", &format, "csv or json-summary"},
      {"weight", &weight, "Plancherel weight: dim-squared or dim-times-rank"},
      {"window-lo", &window_lo, "class-fit window lower edge, default band/4"},
      {"window-hi", &window_hi, "class-fit window upper edge, default band"},
      {"spatial-band", &spatial_band, "spatial band for frozen-symbol runs"},
      {"in", &in, "input GridFunction CSV (op-apply)"},
  };
  for (const auto& [name, desc] : commands) flags.attach(app.add_subcommand(name, desc));

  if (argc <= 1) {
    std::cout << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    liequant::ExperimentConfig cfg;
    if (!flags.config.empty()) cfg = liequant::parse_config_file(flags.config);
    cfg.experiment = sub->get_name();
    const liequant::ExperimentConfig defaults;
    if (cfg.experiment == "subelliptic" && cfg.symbol == defaults.symbol)
      cfg.symbol = "sublaplacian_su2";
    if (cfg.experiment == "full-transfer" && cfg.symbol == defaults.symbol)
      cfg.symbol = "modulated_bessel:-1";
    for (auto& e : flags.entries)
      if (sub->count("--" + e.key)) liequant::apply_config_entry(cfg, e.key, *e.slot);
    return run(cfg);
  } catch (const liequant::SingularSymbolError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
