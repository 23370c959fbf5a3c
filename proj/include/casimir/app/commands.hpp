#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "casimir/app/config.hpp"
#include "casimir/comparisons.hpp"
#include "casimir/friction.hpp"
#include "casimir/validation/acceptance.hpp"

// The CLI commands, kept free of argument parsing so tests can drive them.
// Every command returns a process exit status:
//   0 success, 1 validation failure, 2 config error, 3 physics-domain error,
//   4 numeric non-convergence.
namespace casimir::app {

enum Exit : int { ok = 0, failed = 1, config_error = 2, domain_error = 3, not_converged = 4 };

namespace detail {

inline std::string number_text(double x) {
  std::ostringstream o;
  o << std::setprecision(17) << x;
  return o.str();
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string join_notes(const std::vector<std::string>& notes) {
  std::string out;
  for (const auto& n : notes) out += (out.empty() ? "" : "; ") + n;
  return out;
}

/// Writes to `path` when given, otherwise to `fallback`. Nothing else is touched.
inline void emit(const std::optional<std::string>& path, const std::string& text, std::ostream& fallback) {
  if (!path) {
    fallback << text;
    return;
  }
  std::ofstream out(*path);
  if (!out) throw ConfigError("output.path", "cannot write '" + *path + "'");
  out << text;
}

}  // namespace detail

inline json result_to_json(const friction::FrictionResult& r) {
  return {{"route", friction::to_string(r.route)},
          {"denominators", friction::to_string(r.denominators)},
          {"force", r.force},
          {"force_unit", r.force_unit},
          {"direction", r.direction},
          {"H0", r.H0},
          {"H0_unit", r.H0_unit},
          {"G", r.G},
          {"G_unit", r.G_unit},
          {"quadrature_error", r.quadrature_error},
          {"converged", r.converged},
          {"notes", r.notes}};
}

inline const std::vector<std::string>& compute_columns() {
  static const std::vector<std::string> cols{"route",   "denominators", "force",           "force_unit",
                                             "H0",      "H0_unit",      "G",               "G_unit",
                                             "quadrature_error", "converged", "direction", "notes"};
  return cols;
}

inline std::string result_csv_row(const friction::FrictionResult& r) {
  using detail::csv_escape;
  using detail::number_text;
  return friction::to_string(r.route) + "," + friction::to_string(r.denominators) + "," + number_text(r.force) +
         "," + csv_escape(r.force_unit) + "," + number_text(r.H0) + "," + csv_escape(r.H0_unit) + "," +
         number_text(r.G) + "," + csv_escape(r.G_unit) + "," + number_text(r.quadrature_error) + "," +
         (r.converged ? "true" : "false") + "," + csv_escape(r.direction) + "," +
         csv_escape(detail::join_notes(r.notes));
}

inline friction::FrictionResult evaluate(const RunConfig& c) {
  return friction::compute(c.route, c.system, c.options());
}

/// Maps exceptions from `body` onto exit codes, printing the message to `err`.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return domain_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return failed;
  }
}

inline int cmd_compute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto r = evaluate(c);
    std::string text;
    if (c.output.format == Format::json) {
      json record{{"config", to_json(c)}, {"result", result_to_json(r)}};
      text = record.dump(2) + "\n";
    } else {
      std::string header;
      for (const auto& col : compute_columns()) header += (header.empty() ? "" : ",") + col;
      text = header + "\n" + result_csv_row(r) + "\n";
    }
    detail::emit(c.output.path, text, out);
    if (!r.converged) {
      err << "warning: quadrature did not reach the requested tolerance\n";
      return static_cast<int>(not_converged);
    }
    return static_cast<int>(ok);
  });
}

struct SweepRow {
  double value = 0.0;
  std::optional<friction::FrictionResult> result;
  std::string error;
  int status = ok;
};

/// Evaluates every sweep value, concurrently when `threads` > 1. Rows come
/// back in the order of `values`, whatever the completion order.
inline std::vector<SweepRow> run_sweep(const SweepConfig& s, unsigned threads = 0) {
  std::vector<SweepRow> rows(s.values.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(rows.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      row.value = s.values[i];
      try {
        row.result = evaluate(apply_axis(s.base, s.axis, s.values[i]));
        if (!row.result->converged) row.status = not_converged;
      } catch (const ConfigError& e) {
        row.error = e.what();
        row.status = config_error;
      } catch (const DomainError& e) {
        row.error = e.what();
        row.status = domain_error;
      } catch (const std::exception& e) {
        row.error = e.what();
        row.status = failed;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

inline int cmd_sweep(const SweepConfig& s, std::ostream& out, std::ostream& err, unsigned threads = 0) {
  return guarded(err, [&] {
    const auto rows = run_sweep(s, threads);
    std::string text;
    const std::string axis = to_string(s.axis);
    if (s.base.output.format == Format::json) {
      json j{{"axis", axis}, {"rows", json::array()}};
      for (const auto& r : rows) {
        json row{{"value", r.value}};
        if (r.result) {
          row["result"] = result_to_json(*r.result);
        } else {
          row["error"] = r.error;
        }
        j["rows"].push_back(row);
      }
      text = j.dump(2) + "\n";
    } else {
      std::ostringstream o;
      o << "axis,value,force,force_unit,H0,G,quadrature_error,converged,error\n";
      for (const auto& r : rows) {
        o << axis << "," << detail::number_text(r.value) << ",";
        if (r.result)
          o << detail::number_text(r.result->force) << "," << r.result->force_unit << ","
            << detail::number_text(r.result->H0) << "," << detail::number_text(r.result->G) << ","
            << detail::number_text(r.result->quadrature_error) << "," << (r.result->converged ? "true" : "false")
            << ",\n";
        else
          o << ",,,,,false," << detail::csv_escape(r.error) << "\n";
      }
      text = o.str();
    }
    detail::emit(s.base.output.path, text, out);
    int status = ok;
    for (const auto& r : rows) {
      if (!r.error.empty()) err << "row " << axis << "=" << r.value << ": " << r.error << "\n";
      status = std::max(status, r.status);
    }
    return status;
  });
}

inline int cmd_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto* drude = std::get_if<dielectric::Drude>(&c.system.medium1.model);
    if (!drude) throw UnsupportedModel("compare needs Drude media");
    const auto ours = friction::friction_drude_closed_form(c.system, c.options());
    const double rate = comparisons::conductivity_rate(*drude);
    const double d_m = units::nm_to_m(c.system.d_nm);
    const double fp = comparisons::pendry_force({rate, d_m, c.system.v_m_per_s});
    const auto vp = comparisons::vp_friction({rate, d_m, c.system.T_K, c.system.v_m_per_s});
    const double ratio = c.system.v_m_per_s > 0.0
                             ? comparisons::ratio_to_pendry(c.system.T_K, c.system.v_m_per_s, d_m)
                             : std::numeric_limits<double>::infinity();
    const auto z3 = comparisons::zeta3_factor();
    const double vp_ratio = ours.force > 0.0 ? vp.force / ours.force : std::numeric_limits<double>::quiet_NaN();
    if (c.output.format == Format::json) {
      json j{{"config", to_json(c)},
             {"conductivity_rate_per_s", rate},
             {"our_force_Pa", ours.force},
             {"pendry_force_Pa", fp},
             {"ratio_to_pendry", ratio},
             {"ratio_to_pendry_measured", fp > 0.0 ? ours.force / fp : std::numeric_limits<double>::infinity()},
             {"vp_coefficient_kg_per_s_m2", vp.coefficient},
             {"vp_force_Pa", vp.force},
             {"vp_ratio", vp_ratio},
             {"zeta3", z3.value},
             {"notes", ours.notes}};
      detail::emit(c.output.path, j.dump(2) + "\n", out);
    } else {
      using detail::number_text;
      std::ostringstream o;
      o << "conductivity_rate_per_s,our_force_Pa,pendry_force_Pa,ratio_to_pendry,vp_coefficient_kg_per_s_m2,"
           "vp_force_Pa,vp_ratio,zeta3\n"
        << number_text(rate) << "," << number_text(ours.force) << "," << number_text(fp) << ","
        << number_text(ratio) << "," << number_text(vp.coefficient) << "," << number_text(vp.force) << ","
        << number_text(vp_ratio) << "," << number_text(z3.value) << "\n";
      detail::emit(c.output.path, o.str(), out);
    }
    return static_cast<int>(ok);
  });
}

/// Runs the acceptance criteria; exit 0 iff every selected one passes.
inline int cmd_validate(const acceptance::Settings& settings, const std::vector<int>& ids, std::ostream& out) {
  bool all = true;
  for (int id : ids) {
    const auto r = acceptance::run(id, settings);
    acceptance::print(out, r);
    all = all && r.pass();
  }
  return all ? ok : failed;
}

/// m grid: "a,b,c" (explicit), "lin:start:stop:count" or "log:start:stop:count".
inline std::vector<double> parse_m_grid(const std::string& spec) {
  auto fail = [&](const std::string& why) { return ConfigError("--m-grid", why + " in '" + spec + "'"); };
  auto to_number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw fail("bad number '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw fail("bad number '" + s + "'");
    return v;
  };
  std::vector<std::string> parts;
  std::string item;
  const char sep = spec.rfind("lin:", 0) == 0 || spec.rfind("log:", 0) == 0 ? ':' : ',';
  std::istringstream in(spec);
  while (std::getline(in, item, sep)) parts.push_back(item);
  std::vector<double> grid;
  if (sep == ':') {
    if (parts.size() != 4) throw fail("expected kind:start:stop:count");
    const double a = to_number(parts[1]), b = to_number(parts[2]);
    const double n = to_number(parts[3]);
    if (!(n >= 1.0) || n != std::floor(n)) throw fail("count must be a positive integer");
    const bool log = parts[0] == "log";
    if (log && !(a > 0.0 && b > 0.0)) throw fail("log grid needs positive bounds");
    const auto count = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      grid.push_back(log ? a * std::pow(b / a, t) : a + (b - a) * t);
    }
  } else {
    for (const auto& p : parts) grid.push_back(to_number(p));
  }
  if (grid.empty()) throw fail("empty grid");
  for (double m : grid)
    if (!(m > 0.0)) throw fail("m values must be positive");
  return grid;
}

/// Columns m_eV, spectral1, spectral2, direct, exchange: the two media's
/// spectral densities and the dense integrand channels at the given u, with
/// the config's denominator treatment.
inline int cmd_spectra(const RunConfig& c, const std::vector<double>& m_grid, double u, std::ostream& out,
                       std::ostream& err) {
  return guarded(err, [&] {
    if (!(u > 0.0)) throw ConfigError("--u", "must be positive");
    auto density = [](const dielectric::PermittivityModel& m) -> dielectric::SpectralDensity {
      if (std::holds_alternative<dielectric::Vacuum>(m)) return {[](double) { return 0.0; }, 0.0};
      return dielectric::continuous_spectrum(m);
    };
    const auto s1 = density(c.system.medium1.model);
    const auto s2 = density(c.system.medium2.model);
    const friction::DenseIntegrand channels(c.system.medium1.model, c.system.medium2.model, c.denominators);
    using detail::number_text;
    std::string text;
    if (c.output.format == Format::json) {
      json rows = json::array();
      for (double m : m_grid) {
        const auto ch = channels(m, u);
        rows.push_back({{"m_eV", m}, {"spectral1", s1(m)}, {"spectral2", s2(m)}, {"direct", ch.direct},
                        {"exchange", ch.exchange}});
      }
      text = json{{"u", u}, {"denominators", friction::to_string(c.denominators)}, {"rows", rows}}.dump(2) + "\n";
    } else {
      std::ostringstream o;
      o << "m_eV,spectral1,spectral2,direct,exchange\n";
      for (double m : m_grid) {
        const auto ch = channels(m, u);
        o << number_text(m) << "," << number_text(s1(m)) << "," << number_text(s2(m)) << ","
          << number_text(ch.direct) << "," << number_text(ch.exchange) << "\n";
      }
      text = o.str();
    }
    detail::emit(c.output.path, text, out);
    return static_cast<int>(ok);
  });
}

}  // namespace casimir::app
