#include <CLI11.hpp>

#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "casimir/app/commands.hpp"

namespace app = casimir::app;

namespace {

struct OutputFlags {
  std::string format;
  std::string out;
};

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
  cmd->add_option("--format", f.format, "json or csv (overrides the config)")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("-o,--out", f.out, "output file (overrides the config; stdout if neither is set)");
}

void apply_output_flags(app::OutputSpec& o, const OutputFlags& f) {
  if (!f.format.empty()) o.format = app::parse_format(f.format, "--format");
  if (!f.out.empty()) o.path = f.out;
}

template <class Body>
int with_config(Body&& body) {
  return app::guarded(std::cerr, std::forward<Body>(body));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Quantum friction between parallel plates and probe particles"};
  cli.require_subcommand(1);

  std::string config_path;
  OutputFlags out_flags;

  auto* compute = cli.add_subcommand("compute", "friction force for one configuration");
  compute->add_option("--config", config_path, "JSON run configuration")->required();
  add_output_flags(compute, out_flags);

  unsigned threads = 0;
  auto* sweep = cli.add_subcommand("sweep", "friction force along one parameter axis");
  sweep->add_option("--config", config_path, "JSON sweep configuration")->required();
  sweep->add_option("-j,--threads", threads, "worker threads (0 = hardware concurrency)");
  add_output_flags(sweep, out_flags);

  auto* compare = cli.add_subcommand("compare", "compare with the Pendry and Volokitin-Persson results");
  compare->add_option("--config", config_path, "JSON run configuration with Drude media")->required();
  add_output_flags(compare, out_flags);

  std::vector<int> criterion_ids;
  double perturb_hbar = 1.0;
  auto* validate = cli.add_subcommand("validate", "run the built-in acceptance checks");
  validate->add_option("-c,--criterion", criterion_ids, "criterion numbers (default: all)")
      ->check(CLI::Range(1, static_cast<int>(casimir::acceptance::criteria().size())));
  validate->add_option("--perturb-hbar", perturb_hbar, "multiply hbar by this factor (fault injection)")
      ->check(CLI::PositiveNumber);

  std::string m_grid = "log:1e-4:10:50";
  double u = 1.0;
  auto* spectra = cli.add_subcommand("spectra", "spectral densities and dense integrand channels");
  spectra->add_option("--config", config_path, "JSON run configuration")->required();
  spectra->add_option("--m-grid", m_grid, "a,b,c or lin:start:stop:count or log:start:stop:count (eV)")
      ->capture_default_str();
  spectra->add_option("--u", u, "dimensionless wavevector u = k d")->capture_default_str();
  add_output_flags(spectra, out_flags);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : app::config_error;
  }

  auto load_run = [&] {
    auto c = app::parse_run_config(app::read_json_file(config_path));
    apply_output_flags(c.output, out_flags);
    return c;
  };

  if (*compute) {
    int status = app::ok;
    const int load = with_config([&] {
      const auto c = load_run();
      status = app::cmd_compute(c, std::cout, std::cerr);
      return 0;
    });
    return load != 0 ? load : status;
  }
  if (*sweep) {
    int status = app::ok;
    const int load = with_config([&] {
      auto s = app::parse_sweep_config(app::read_json_file(config_path));
      apply_output_flags(s.base.output, out_flags);
      status = app::cmd_sweep(s, std::cout, std::cerr, threads);
      return 0;
    });
    return load != 0 ? load : status;
  }
  if (*compare) {
    int status = app::ok;
    const int load = with_config([&] {
      status = app::cmd_compare(load_run(), std::cout, std::cerr);
      return 0;
    });
    return load != 0 ? load : status;
  }
  if (*validate) {
    casimir::acceptance::Settings settings;
    settings.constants.hbar_J_s *= perturb_hbar;
    if (criterion_ids.empty()) {
      criterion_ids.resize(casimir::acceptance::criteria().size());
      std::iota(criterion_ids.begin(), criterion_ids.end(), 1);
    }
    return app::cmd_validate(settings, criterion_ids, std::cout);
  }
  if (*spectra) {
    int status = app::ok;
    const int load = with_config([&] {
      const auto c = load_run();
      status = app::cmd_spectra(c, app::parse_m_grid(m_grid), u, std::cout, std::cerr);
      return 0;
    });
    return load != 0 ? load : status;
  }
  return app::failed;
}
