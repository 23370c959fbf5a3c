#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "casimir/app/commands.hpp"

using namespace casimir;
using namespace casimir::app;
namespace fs = std::filesystem;

namespace {

json gold_json(const std::string& route = "drude-closed-form") {
  return json{{"system", {{"material", "gold"}, {"d_nm", 10.0}, {"v_m_per_s", 100.0}, {"T_K", 300.0}}},
              {"route", route}};
}

std::string config_error_path(const json& j) {
  try {
    parse_run_config(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

fs::path scratch_dir() {
  static std::atomic<int> counter{0};
  const auto dir = fs::temp_directory_path() /
                   ("casimir_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream l(line);
    while (std::getline(l, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Config, ParsesPresetsAndModels) {
  const auto c = parse_run_config(gold_json());
  EXPECT_EQ(c.route, friction::Route::drude_closed_form);
  EXPECT_EQ(c.denominators, friction::Denominators::drop);
  ASSERT_TRUE(std::holds_alternative<dielectric::Drude>(c.system.medium1.model));
  EXPECT_EQ(std::get<dielectric::Drude>(c.system.medium1.model).plasma_energy, 9.0);

  json j = gold_json();
  j["system"].erase("material");
  j["system"]["medium1"] = {{"model", "lorentz"}, {"resonance_energy_eV", 1.0}, {"damping_eV", 0.1}, {"strength", 0.5}};
  j["system"]["medium2"] = {{"preset", "pendry97"}, {"density_per_nm3", 0.05}};
  const auto m = parse_run_config(j);
  EXPECT_TRUE(std::holds_alternative<dielectric::Lorentz>(m.system.medium1.model));
  EXPECT_EQ(m.system.medium2.density_per_nm3, 0.05);
  // pendry97: omega_p^2 / nu = 1.12e10 s^-1.
  const auto& p = std::get<dielectric::Drude>(m.system.medium2.model);
  EXPECT_NEAR(comparisons::conductivity_rate(p) / 1.12e10, 1.0, 1e-12);
}

TEST(Config, ErrorsCarryFieldPaths) {
  json j = gold_json();
  j["system"]["d_nm"] = -1.0;
  EXPECT_EQ(config_error_path(j), "system.d_nm");
  j = gold_json();
  j["system"]["colour"] = "red";
  EXPECT_EQ(config_error_path(j), "system.colour");
  j = gold_json();
  j["route"] = "sideways";
  EXPECT_EQ(config_error_path(j), "route");
  j = gold_json();
  j["system"]["material"] = "copper";
  EXPECT_EQ(config_error_path(j), "system.material");
  j = gold_json();
  j["system"]["material"] = {{"model", "drude"}, {"plasma_energy_eV", 9.0}};
  EXPECT_EQ(config_error_path(j), "system.material.damping_eV");
  j = gold_json();
  j["quadrature"] = {{"rel_tol", "tight"}};
  EXPECT_EQ(config_error_path(j), "quadrature.rel_tol");
  j = gold_json();
  j["system"].erase("T_K");
  EXPECT_EQ(config_error_path(j), "system.T_K");
  EXPECT_EQ(config_error_path(json::array()), "<root>");
}

TEST(Config, EnvironmentToleranceOverride) {
  ::setenv(quadrature_env_var, "1e-6", 1);
  EXPECT_EQ(parse_run_config(gold_json()).quadrature.rel_tol, 1e-6);
  ::setenv(quadrature_env_var, "soon", 1);
  EXPECT_THROW(parse_run_config(gold_json()), ConfigError);
  ::unsetenv(quadrature_env_var);
  EXPECT_EQ(parse_run_config(gold_json()).quadrature.rel_tol, 1e-8);
}

TEST(Config, SweepRanges) {
  const auto s = parse_sweep_config(
      {{"base", gold_json()}, {"axis", "d"}, {"range", {{"min", 5}, {"max", 50}, {"count", 3}, {"spacing", "log"}}}});
  ASSERT_EQ(s.values.size(), 3u);
  EXPECT_NEAR(s.values[1], std::sqrt(250.0), 1e-12);
  EXPECT_THROW(parse_sweep_config({{"base", gold_json()}, {"axis", "x"}, {"values", {1}}}), ConfigError);
  EXPECT_THROW(parse_sweep_config({{"base", gold_json()}, {"axis", "d"}, {"values", {1, -2}}}), ConfigError);
  EXPECT_THROW(parse_sweep_config({{"base", gold_json()}, {"axis", "d"}}), ConfigError);
}

TEST(Compute, GoldRecord) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_compute(parse_run_config(gold_json()), out, err), ok);
  const auto record = json::parse(out.str());
  EXPECT_NEAR(record["result"]["force"].get<double>() / 3.29e-11, 1.0, 5e-3);
  EXPECT_EQ(record["result"]["force_unit"], "Pa");
  EXPECT_EQ(record["result"]["route"], "drude-closed-form");
  for (const char* key : {"H0", "G", "quadrature_error", "direction", "converged", "denominators"})
    EXPECT_TRUE(record["result"].contains(key)) << key;
}

TEST(Compute, DenseRecordAndCsv) {
  auto c = parse_run_config(gold_json("dense-full"));
  c.output.format = Format::csv;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_compute(c, out, err), ok);
  const auto rows = read_csv(out.str());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], compute_columns());
  EXPECT_EQ(rows[1][0], "dense-full");
  EXPECT_NEAR(std::stod(rows[1][2]) / 3.29e-11, 1.0, 1e-2);
}

TEST(Compute, ZeroVelocityAndErrors) {
  json j = gold_json("dense-full");
  j["system"]["v_m_per_s"] = 0.0;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_compute(parse_run_config(j), out, err), ok);
  EXPECT_EQ(json::parse(out.str())["result"]["force"].get<double>(), 0.0);

  j = gold_json("dense-full");
  j["system"]["material"] = {{"model", "plasma"}, {"plasma_energy_eV", 9.0}};
  std::ostringstream out2, err2;
  EXPECT_EQ(cmd_compute(parse_run_config(j), out2, err2), domain_error);
  EXPECT_NE(err2.str().find("delta-line"), std::string::npos);

  j = gold_json("dilute");
  std::ostringstream out3, err3;
  EXPECT_EQ(cmd_compute(parse_run_config(j), out3, err3), config_error);
}

TEST(Compute, NonConvergenceExitCode) {
  json j = gold_json("dense-full");
  j["quadrature"] = {{"abs_tol", 1e-300}, {"rel_tol", 1e-15}, {"max_subdivisions", 2}};
  std::ostringstream out, err;
  EXPECT_EQ(cmd_compute(parse_run_config(j), out, err), not_converged);
  EXPECT_FALSE(json::parse(out.str())["result"]["converged"].get<bool>());
}

TEST(Compute, RoundTripIsBitIdentical) {
  for (const char* route : {"dense-full", "drude-closed-form"}) {
    json j = gold_json(route);
    j["denominators"] = "keep";
    j["system"]["material"] = {{"model", "drude"}, {"plasma_energy_eV", 9.0 / 7.0 * 7.0 + 1e-13},
                               {"damping_eV", 0.1 / 3.0}, {"density_per_nm3", 0.059}};
    std::ostringstream out, err;
    ASSERT_EQ(cmd_compute(parse_run_config(j), out, err), ok);
    const auto first = json::parse(out.str());
    std::ostringstream again, err2;
    ASSERT_EQ(cmd_compute(parse_run_config(first["config"]), again, err2), ok);
    const auto second = json::parse(again.str());
    EXPECT_EQ(first["result"]["force"].get<double>(), second["result"]["force"].get<double>());
    EXPECT_EQ(first["result"]["H0"].get<double>(), second["result"]["H0"].get<double>());
    EXPECT_EQ(first.dump(), second.dump());
  }
}

TEST(Compute, WritesOnlyDeclaredPath) {
  const auto dir = scratch_dir();
  auto c = parse_run_config(gold_json());
  c.output.path = (dir / "result.json").string();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_compute(c, out, err), ok);
  EXPECT_TRUE(out.str().empty());
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    ++files;
    EXPECT_EQ(entry.path().filename(), "result.json");
  }
  EXPECT_EQ(files, 1u);
  std::ifstream in(dir / "result.json");
  EXPECT_NO_THROW(json::parse(in));
  fs::remove_all(dir);
}

TEST(Sweep, DistanceSlopeIsMinusFour) {
  auto s = parse_sweep_config(
      {{"base", gold_json("dense-full")}, {"axis", "d"}, {"range", {{"min", 5}, {"max", 50}, {"count", 6}, {"spacing", "log"}}}});
  s.base.output.format = Format::csv;
  s.base.denominators = friction::Denominators::keep;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_sweep(s, out, err, 3), ok);
  const auto rows = read_csv(out.str());
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0][0], "axis");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double x = std::log(std::stod(rows[i][1])), y = std::log(std::stod(rows[i][2]));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    if (i > 1) {
      EXPECT_GT(std::stod(rows[i][1]), std::stod(rows[i - 1][1]));  // ordered by axis value
    }
  }
  const double n = 6.0;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_NEAR(slope, -4.0, 4e-2);
}

TEST(Sweep, SingleValueMatchesComputeAndVelocityIsLinear) {
  SweepConfig s;
  s.base = parse_run_config(gold_json("dense-full"));
  s.axis = SweepAxis::v;
  s.values = {100.0};
  const auto rows = run_sweep(s, 1);
  ASSERT_TRUE(rows[0].result);
  EXPECT_EQ(rows[0].result->force, evaluate(s.base).force);
  s.values = {1.0, 2.0, 3.0, 10.0};
  const auto v = run_sweep(s, 4);
  for (const auto& r : v) EXPECT_NEAR(r.result->force / (r.value * v[0].result->force), 1.0, 1e-12);
}

TEST(Sweep, RowErrorsDoNotAbort) {
  SweepConfig s;
  s.base = parse_run_config(gold_json("dense-full"));
  s.axis = SweepAxis::damping;
  s.values = {0.035, 0.0, 0.07};  // zero damping is a delta line
  s.base.output.format = Format::csv;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_sweep(s, out, err, 2), domain_error);
  const auto rows = read_csv(out.str());
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_FALSE(rows[1][2].empty());
  EXPECT_TRUE(rows[2][2].empty());
  EXPECT_FALSE(rows[2][8].empty());
  EXPECT_FALSE(rows[3][2].empty());
}

TEST(Compare, GoldAndPendry) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_compare(parse_run_config(gold_json()), out, err), ok);
  const auto r = json::parse(out.str());
  EXPECT_NEAR(r["ratio_to_pendry"].get<double>() / 1.95e9, 1.0, 5e-3);
  EXPECT_NEAR(r["vp_ratio"].get<double>(), 1.2, 0.12);
  EXPECT_NEAR(r["ratio_to_pendry_measured"].get<double>() / r["ratio_to_pendry"].get<double>(), 1.0, 1e-12);

  json j = gold_json();
  j["system"] = {{"material", "pendry97"}, {"d_nm", 0.1}, {"v_m_per_s", 1.0}, {"T_K", 300.0}};
  std::ostringstream out2, err2;
  EXPECT_EQ(cmd_compare(parse_run_config(j), out2, err2), ok);
  const auto p = json::parse(out2.str());
  // Consistent with the closed form and the Pendry formula; the literature
  // values are compared in the acceptance report.
  EXPECT_GT(p["our_force_Pa"].get<double>(), 1e12);
  EXPECT_NEAR(p["our_force_Pa"].get<double>() / p["pendry_force_Pa"].get<double>() / p["ratio_to_pendry"].get<double>(),
              1.0, 1e-12);

  j["system"]["material"] = {{"model", "lorentz"}, {"resonance_energy_eV", 1.0}, {"damping_eV", 0.1}, {"strength", 0.5}};
  std::ostringstream out3, err3;
  EXPECT_EQ(cmd_compare(parse_run_config(j), out3, err3), domain_error);
}

TEST(Spectra, GoldPeakVacuumAndSmallM) {
  const double ep = 9.0 / std::sqrt(2.0);
  auto c = parse_run_config(gold_json("dense-full"));
  c.output.format = Format::csv;
  std::vector<double> grid{1e-4, 2e-4, 4e-4, 1.0, 6.0, ep, 6.6, 8.0};
  std::ostringstream out, err;
  EXPECT_EQ(cmd_spectra(c, grid, 1.0, out, err), ok);
  const auto rows = read_csv(out.str());
  ASSERT_EQ(rows.size(), grid.size() + 1);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"m_eV", "spectral1", "spectral2", "direct", "exchange"}));
  std::size_t best = 1;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (std::stod(rows[i][1]) > std::stod(rows[best][1])) best = i;
  EXPECT_NEAR(std::stod(rows[best][0]), ep, 1e-9);
  // Linear at small m.
  EXPECT_NEAR(std::stod(rows[2][1]) / std::stod(rows[1][1]), 2.0, 1e-6);
  EXPECT_NEAR(std::stod(rows[3][1]) / std::stod(rows[1][1]), 4.0, 1e-6);

  json j = gold_json("dense-full");
  j["system"].erase("material");
  j["system"]["medium1"] = {{"model", "vacuum"}};
  j["system"]["medium2"] = {{"preset", "gold"}};
  auto v = parse_run_config(j);
  v.output.format = Format::csv;
  std::ostringstream vout, verr;
  EXPECT_EQ(cmd_spectra(v, grid, 1.0, vout, verr), ok);
  const auto vrows = read_csv(vout.str());
  for (std::size_t i = 1; i < vrows.size(); ++i) EXPECT_EQ(std::stod(vrows[i][1]), 0.0);

  j["system"]["medium1"] = {{"model", "plasma"}, {"plasma_energy_eV", 9.0}};
  std::ostringstream pout, perr;
  EXPECT_EQ(cmd_spectra(parse_run_config(j), grid, 1.0, pout, perr), domain_error);
}

TEST(Spectra, GridSpecs) {
  EXPECT_EQ(parse_m_grid("0.5,1,2"), (std::vector<double>{0.5, 1.0, 2.0}));
  const auto lin = parse_m_grid("lin:1:3:3");
  EXPECT_EQ(lin, (std::vector<double>{1.0, 2.0, 3.0}));
  const auto lg = parse_m_grid("log:0.01:1:3");
  EXPECT_NEAR(lg[1], 0.1, 1e-15);
  EXPECT_THROW(parse_m_grid("lin:1:3"), ConfigError);
  EXPECT_THROW(parse_m_grid("0,1"), ConfigError);
  EXPECT_THROW(parse_m_grid("a,b"), ConfigError);
  EXPECT_THROW(parse_m_grid("log:0:1:3"), ConfigError);
}

TEST(Validate, ReportAndFaultInjection) {
  acceptance::Settings settings;
  std::ostringstream out;
  EXPECT_EQ(cmd_validate(settings, {1, 2}, out), ok);
  EXPECT_NE(out.str().find("PASS  criterion 1"), std::string::npos);
  EXPECT_NE(out.str().find("quadrature error"), std::string::npos);

  settings.constants.hbar_J_s *= 1.01;
  std::ostringstream bad;
  EXPECT_EQ(cmd_validate(settings, {1, 2, 3}, bad), failed);
  EXPECT_NE(bad.str().find("FAIL  criterion 1"), std::string::npos);
  EXPECT_NE(bad.str().find("PASS  criterion 2"), std::string::npos);
  EXPECT_NE(bad.str().find("PASS  criterion 3"), std::string::npos);
}
