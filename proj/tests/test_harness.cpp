#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <liequant/harness.hpp>
#include <liequant/serialization.hpp>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

using namespace liequant;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "liequant-tests" / leaf;
  fs::create_directories(dir);
  return dir;
}

std::string write_temp(const std::string& leaf, const std::string& text) {
  const fs::path p = scratch_dir("configs") / leaf;
  std::ofstream out(p);
  out << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config defaults") {
  const ExperimentConfig cfg;
  CHECK(cfg.group == GroupId::su2());
  CHECK(cfg.band == 8.0);
  CHECK(cfg.trials == 20);
  CHECK(cfg.seed == 1);
  CHECK(cfg.tol == 1e-8);
  CHECK(cfg.symbol == "bessel_potential:-1");
  CHECK(cfg.format == "csv");
  CHECK(cfg.weight == PlancherelWeight::DimSquared);
}

TEST_CASE("config file parsing") {
  const std::string path = write_temp("good.cfg",
                                      "# comment line\n"
                                      "experiment = weak-norm\n"
                                      "group = s2\n"
                                      "band = 12\n"
                                      "p1 = 1.5\n"
                                      "p2 = 6\n"
                                      "q = inf\n"
                                      "trials = 7\n"
                                      "seed = 99\n"
                                      "weight = dim-times-rank\n"
                                      "format = json-summary\n"
                                      "\n"
                                      "tol = 1e-9\n");
  const ExperimentConfig cfg = parse_config_file(path);
  CHECK(cfg.experiment == "weak-norm");
  CHECK(cfg.group == GroupId::sphere());
  CHECK(cfg.band == 12.0);
  CHECK(cfg.p1 == 1.5);
  CHECK(cfg.p2 == 6.0);
  CHECK(std::isinf(cfg.q));
  CHECK(cfg.trials == 7);
  CHECK(cfg.seed == 99);
  CHECK(cfg.weight == PlancherelWeight::DimTimesRank);
  CHECK(cfg.format == "json-summary");
  CHECK(cfg.tol == 1e-9);
}

TEST_CASE("config rejects unknown keys and malformed lines") {
  CHECK_THROWS_WITH_AS(parse_config_file(write_temp("bad1.cfg", "bandwidth = 3\n")),
                       doctest::Contains("bandwidth"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_file(write_temp("bad2.cfg", "just words\n")),
                       doctest::Contains("expected key = value"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_file("/nonexistent/path.cfg"),
                       doctest::Contains("cannot read config"), std::runtime_error);

  ExperimentConfig cfg;
  CHECK_THROWS_AS(apply_config_entry(cfg, "format", "yaml"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_entry(cfg, "weight", "cubed"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_entry(cfg, "group", "so3"), std::invalid_argument);
}

TEST_CASE("format_double round trips exactly") {
  const std::vector<double> values = {0.0,     1.0 / 3.0,          0.1,  1e-308,
                                      6.02e23, 1.7976931348623157e308, -2.5, 4097.000000000001};
  for (double v : values) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("spectral serialization round trip") {
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 3.0);
  const GridFunction f = random_band_limited(grid, 5, 3.0);
  const SpectralCoefficients c = forward(f, 3.0);
  const fs::path path = scratch_dir("io") / "coeff.txt";
  save_spectral(c, path.string());
  const SpectralCoefficients back = load_spectral(path.string());
  CHECK(back.group == c.group);
  CHECK(back.band == c.band);
  REQUIRE(back.irreps.size() == c.irreps.size());
  for (std::size_t i = 0; i < c.irreps.size(); ++i) {
    CHECK(back.irreps[i] == c.irreps[i]);
    CHECK((back.blocks[i] - c.blocks[i]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("grid function serialization round trip") {
  const QuadratureGrid grid = haar_grid(GroupId::sphere(), 4.0);
  const GridFunction f = random_band_limited(grid, 6, 4.0, true);
  const fs::path path = scratch_dir("io") / "func.csv";
  save_grid_function(f, path.string());
  const GridFunction back = load_grid_function(path.string());
  CHECK(back.homogeneous == f.homogeneous);
  CHECK(back.grid.group() == f.grid.group());
  CHECK(back.grid.size() == f.grid.size());
  CHECK((back.values - f.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("symbol serialization round trip") {
  const Symbol a = builtin_symbol("modulated_bessel:-1", GroupId::su2(), 3.0);
  const fs::path path = scratch_dir("io") / "symbol.txt";
  save_symbol(a, path.string());
  const Symbol back = load_symbol(path.string());
  CHECK(back.group == a.group);
  CHECK(back.band == a.band);
  CHECK(back.spatial_band == a.spatial_band);
  REQUIRE(back.closed_form.has_value());
  CHECK(back.closed_form->spec == a.closed_form->spec);
  REQUIRE(back.modes.size() == a.modes.size());
  for (std::size_t m = 0; m < a.modes.size(); ++m) {
    CHECK(back.modes[m].eta == a.modes[m].eta);
    CHECK(back.modes[m].row == a.modes[m].row);
    CHECK(back.modes[m].col == a.modes[m].col);
    for (std::size_t i = 0; i < a.irreps.size(); ++i)
      CHECK((back.modes[m].bank[i] - a.modes[m].bank[i]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("report check relations") {
  Report rep;
  rep.check("a", 1.0, 2.0, "<=");
  rep.check("b", 3.0, 2.0, ">");
  rep.check("c", 2.0, 2.0, ">=");
  rep.check("d", 1.0, 2.0, "<");
  rep.check("e", 2.0, 2.0, "==");
  for (const Check& c : rep.checks) CHECK(c.pass);
  CHECK(rep.passed());
  rep.check("f", 3.0, 2.0, "<=");
  CHECK_FALSE(rep.passed());

  Report refused;
  refused.refused = true;
  CHECK_FALSE(refused.passed());
}

TEST_CASE("report emission is byte deterministic") {
  ExperimentConfig cfg;
  cfg.experiment = "weak-norm";
  cfg.group = GroupId::su2();
  cfg.band = 4.0;
  cfg.p1 = 4.0 / 3.0;
  cfg.p2 = 4.0;
  cfg.format = "json-summary";
  const fs::path d1 = scratch_dir("emit1");
  const fs::path d2 = scratch_dir("emit2");
  const Report r1 = run_experiment(cfg);
  emit_report(r1, d1.string(), cfg.format);
  const Report r2 = run_experiment(cfg);
  emit_report(r2, d2.string(), cfg.format);

  CHECK(slurp(d1 / "summary.json") == slurp(d2 / "summary.json"));
  for (const Table& t : r1.tables) {
    const std::string leaf = r1.experiment + "." + t.name + ".csv";
    CHECK(slurp(d1 / leaf) == slurp(d2 / leaf));
    CHECK_FALSE(slurp(d1 / leaf).empty());
  }
}

TEST_CASE("summary json is well formed and escaped") {
  Report rep;
  rep.experiment = "demo";
  rep.provenance.emplace_back("note-key", "quote \" backslash \\ newline \n tab \t");
  rep.result("value", 1.0 / 3.0);
  rep.check("bound", 0.5, 1.0, "<=");
  rep.note("control \x01 char and unicode \xc3\xa9");
  const fs::path dir = scratch_dir("escape");
  emit_report(rep, dir.string(), "json-summary");

  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["experiment"] == "demo");
  CHECK(j["provenance"]["note-key"] == "quote \" backslash \\ newline \n tab \t");
  CHECK(j["results"]["value"] == 1.0 / 3.0);
  CHECK(j["checks"][0]["pass"] == true);
  CHECK(j["passed"] == true);
}

TEST_CASE("summary csv lists checks and outcome") {
  Report rep;
  rep.experiment = "demo";
  rep.result("alpha, with comma", 2.0);
  rep.check("bound", 3.0, 2.0, "<=");
  const fs::path dir = scratch_dir("csvsum");
  emit_report(rep, dir.string(), "csv");
  const std::string text = slurp(dir / "summary.csv");
  CHECK(text.find("\"alpha, with comma\"") != std::string::npos);
  CHECK(text.find("bound") != std::string::npos);
  CHECK(text.find("passed") != std::string::npos);
  // the failed check flips the outcome row
  CHECK(text.find("passed,,0") != std::string::npos);
}

TEST_CASE("plancherel check runner passes on the torus") {
  ExperimentConfig cfg;
  cfg.experiment = "plancherel-check";
  cfg.group = GroupId::torus(1);
  cfg.band = 8.0;
  cfg.trials = 10;
  cfg.tol = 1e-10;
  const Report rep = run_experiment(cfg);
  CHECK(rep.passed());
  CHECK_FALSE(rep.refused);
  bool found = false;
  for (const auto& [name, value] : rep.results)
    if (name == "schur_max_rel_error") {
      CHECK(value < 1e-10);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("transfer runner: identity symbol gives unit ratios") {
  ExperimentConfig cfg;
  cfg.experiment = "transfer";
  cfg.group = GroupId::su2();
  cfg.band = 4.0;
  cfg.symbol = "identity";
  cfg.trials = 5;
  cfg.r = 1.0;
  cfg.q = 2.0;
  const Report rep = run_experiment(cfg);
  CHECK(rep.passed());
  bool saw_ratio = false, saw_sup = false;
  for (const auto& [name, value] : rep.results) {
    if (name == "max_besov_ratio") {
      CHECK(std::abs(value - 1.0) < 1e-12);
      saw_ratio = true;
    }
    if (name == "sup_opnorm") {
      CHECK(value == 1.0);
      saw_sup = true;
    }
  }
  CHECK(saw_ratio);
  CHECK(saw_sup);
}

TEST_CASE("runner refusals carry reasons") {
  ExperimentConfig cfg;
  cfg.experiment = "transfer";
  cfg.symbol = "modulated_bessel:-1";
  cfg.band = 4.0;
  const Report full_symbol = run_experiment(cfg);
  CHECK(full_symbol.refused);
  CHECK(full_symbol.refusal_reason.find("full-transfer") != std::string::npos);

  cfg.experiment = "weak-hormander";
  cfg.symbol = "bessel_potential:-1";
  cfg.group = GroupId::su2();
  const Report off_sphere = run_experiment(cfg);
  CHECK(off_sphere.refused);

  cfg.experiment = "subelliptic";
  cfg.group = GroupId::torus(1);
  cfg.symbol = "sublaplacian_su2";
  const Report torus_sub = run_experiment(cfg);
  CHECK(torus_sub.refused);

  cfg.experiment = "full-transfer";
  cfg.group = GroupId::su2();
  cfg.band = 0.5;  // below the symbol's spatial band
  cfg.symbol = "modulated_bessel:-1";
  const Report wide = run_experiment(cfg);
  CHECK(wide.refused);

  cfg.experiment = "no-such-experiment";
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("weak-norm dispatch goes through the sphere variant") {
  ExperimentConfig cfg;
  cfg.experiment = "weak-norm";
  cfg.group = GroupId::sphere();
  cfg.band = 8.0;
  cfg.p1 = 4.0 / 3.0;
  cfg.p2 = 4.0;
  cfg.trials = 3;
  cfg.weight = PlancherelWeight::DimTimesRank;
  const Report rep = run_experiment(cfg);
  CHECK_FALSE(rep.refused);
  bool saw_stability = false;
  for (const auto& [name, value] : rep.results) {
    if (name == "weak_norm_rel_change") {
      saw_stability = true;
      CHECK(value <= 0.05);
    }
  }
  CHECK(saw_stability);
}

TEST_CASE("op-apply runner writes loadable output") {
  const fs::path dir = scratch_dir("opapply");
  const QuadratureGrid grid = haar_grid(GroupId::su2(), 3.0);
  const GridFunction f = random_band_limited(grid, 4, 3.0);
  const fs::path in = dir / "input.csv";
  save_grid_function(f, in.string());

  ExperimentConfig cfg;
  cfg.experiment = "op-apply";
  cfg.group = GroupId::su2();
  cfg.band = 3.0;
  cfg.symbol = "bessel_potential:-1";
  cfg.input = in.string();
  cfg.out_dir = dir.string();
  const Report rep = run_experiment(cfg);
  CHECK(rep.passed());
  const GridFunction out = load_grid_function((dir / "op_apply.output.csv").string());
  const Symbol bp = builtin_symbol("bessel_potential:-1", grid.group(), 3.0);
  const GridFunction want = op_apply(bp, f);
  CHECK((out.values - want.values).cwiseAbs().maxCoeff() < 1e-12);
}

}  // TEST_SUITE
