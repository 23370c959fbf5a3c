#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "casimir/comparisons.hpp"
#include "casimir/dielectric.hpp"
#include "casimir/errors.hpp"
#include "casimir/friction.hpp"
#include "casimir/quadrature.hpp"

// JSON run and sweep configurations.
//
// A run config looks like
//   {
//     "system": {"material": "gold", "d_nm": 10, "v_m_per_s": 100, "T_K": 300},
//     "route": "dense-full", "denominators": "drop",
//     "quadrature": {"rel_tol": 1e-8},
//     "output": {"format": "json", "path": "out.json"}
//   }
// "material" applies one medium to both sides; "medium1"/"medium2" set them
// separately. A medium is either {"preset": name} or {"model": kind, ...}.
// Unknown keys are rejected with the path of the offending field.
namespace casimir::app {

using json = nlohmann::json;

inline constexpr const char* quadrature_env_var = "CASIMIR_QUAD_TOL";

enum class Format { json, csv };

struct OutputSpec {
  Format format = Format::json;
  std::optional<std::string> path;
};

struct RunConfig {
  friction::PlateSystem system{};
  friction::Route route = friction::Route::dense_full;
  friction::Denominators denominators = friction::Denominators::drop;
  quad::QuadratureSpec quadrature{};
  OutputSpec output{};

  friction::FrictionOptions options() const {
    friction::FrictionOptions o;
    o.quadrature = quadrature;
    o.denominators = denominators;
    return o;
  }
};

enum class SweepAxis { d, v, T, damping, plasma_energy };

struct SweepConfig {
  RunConfig base;
  SweepAxis axis = SweepAxis::d;
  std::vector<double> values;
};

inline std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::d: return "d";
    case SweepAxis::v: return "v";
    case SweepAxis::T: return "T";
    case SweepAxis::damping: return "damping";
    case SweepAxis::plasma_energy: return "plasma_energy";
  }
  return "?";
}

/// Quadrature defaults, with the relative tolerance optionally overridden by
/// the CASIMIR_QUAD_TOL environment variable.
inline quad::QuadratureSpec default_quadrature() {
  quad::QuadratureSpec spec;
  if (const char* env = std::getenv(quadrature_env_var)) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("$") + quadrature_env_var,
                        "expected a positive number, got '" + std::string(env) + "'");
    spec.rel_tol = v;
  }
  return spec;
}

namespace detail {

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

inline void reject_unknown(const json& j, const std::string& path,
                           const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(join(path, it.key()), "unknown key (allowed: " + list + ")");
    }
}

inline double number(const json& j, const std::string& key, const std::string& path) {
  const auto p = join(path, key);
  if (!j.contains(key)) throw ConfigError(p, "missing required number");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(p, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(p, "must be finite");
  return x;
}

inline std::optional<double> optional_number(const json& j, const std::string& key,
                                             const std::string& path) {
  if (!j.contains(key)) return std::nullopt;
  return number(j, key, path);
}

inline std::string string(const json& j, const std::string& key, const std::string& path) {
  const auto p = join(path, key);
  if (!j.contains(key)) throw ConfigError(p, "missing required string");
  if (!j.at(key).is_string()) throw ConfigError(p, "expected a string");
  return j.at(key).get<std::string>();
}

inline std::vector<double> number_list(const json& j, const std::string& key,
                                       const std::string& path) {
  const auto p = join(path, key);
  if (!j.contains(key) || !j.at(key).is_array()) throw ConfigError(p, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.at(key).size(); ++i) {
    const auto& v = j.at(key)[i];
    if (!v.is_number() || !std::isfinite(v.get<double>()))
      throw ConfigError(p + "[" + std::to_string(i) + "]", "expected a finite number");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

/// Built-in materials: "gold" (hbar omega_p = 9.0 eV, hbar nu = 35 meV) and
/// "pendry97" (omega_p^2/nu = sigma/eps0 = 1.12e10 s^-1, hbar nu = 35 meV).
inline dielectric::PermittivityModel preset_model(const std::string& name, const std::string& path) {
  if (name == "gold") return dielectric::Drude{9.0, 0.035};
  if (name == "pendry97") return comparisons::drude_from_conductivity(1.12e10, 0.035);
  throw ConfigError(path, "unknown preset '" + name + "' (known: gold, pendry97)");
}

inline dielectric::MediumSpec parse_medium(const json& j, const std::string& path) {
  using namespace dielectric;
  detail::require_object(j, path);
  MediumSpec m;
  m.density_per_nm3 = detail::optional_number(j, "density_per_nm3", path);
  m.polarizability_nm3 = detail::optional_number(j, "polarizability_nm3", path);
  if (m.density_per_nm3 && !(*m.density_per_nm3 > 0.0))
    throw ConfigError(detail::join(path, "density_per_nm3"), "must be positive");
  if (m.polarizability_nm3 && !(*m.polarizability_nm3 > 0.0))
    throw ConfigError(detail::join(path, "polarizability_nm3"), "must be positive");

  const std::set<std::string> common{"density_per_nm3", "polarizability_nm3"};
  auto allow = [&](std::set<std::string> extra) {
    extra.insert(common.begin(), common.end());
    detail::reject_unknown(j, path, extra);
  };

  if (j.contains("preset")) {
    allow({"preset"});
    m.model = preset_model(detail::string(j, "preset", path), detail::join(path, "preset"));
    return m;
  }
  const std::string kind = detail::string(j, "model", path);
  if (kind == "vacuum") {
    allow({"model"});
    m.model = Vacuum{};
  } else if (kind == "plasma") {
    allow({"model", "plasma_energy_eV"});
    m.model = Plasma{detail::number(j, "plasma_energy_eV", path)};
  } else if (kind == "drude") {
    allow({"model", "plasma_energy_eV", "damping_eV"});
    m.model = Drude{detail::number(j, "plasma_energy_eV", path), detail::number(j, "damping_eV", path)};
  } else if (kind == "lorentz") {
    allow({"model", "resonance_energy_eV", "damping_eV", "strength"});
    m.model = Lorentz{detail::number(j, "resonance_energy_eV", path),
                      detail::number(j, "damping_eV", path), detail::number(j, "strength", path)};
  } else if (kind == "tabulated") {
    allow({"model", "file", "m_eV", "spectral"});
    if (j.contains("file")) {
      if (j.contains("m_eV") || j.contains("spectral"))
        throw ConfigError(path, "give either 'file' or inline 'm_eV'/'spectral', not both");
      m.model = load_tabulated(detail::string(j, "file", path));
    } else {
      m.model = Tabulated{detail::number_list(j, "m_eV", path), detail::number_list(j, "spectral", path)};
    }
  } else {
    throw ConfigError(detail::join(path, "model"),
                      "unknown model '" + kind + "' (known: vacuum, plasma, drude, lorentz, tabulated)");
  }
  try {
    validate(m.model);
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return m;
}

inline quad::QuadratureSpec parse_quadrature(const json& j, const std::string& path) {
  detail::require_object(j, path);
  detail::reject_unknown(j, path, {"abs_tol", "rel_tol", "max_subdivisions"});
  auto spec = default_quadrature();
  if (auto v = detail::optional_number(j, "abs_tol", path)) spec.abs_tol = *v;
  if (auto v = detail::optional_number(j, "rel_tol", path)) spec.rel_tol = *v;
  if (j.contains("max_subdivisions")) {
    const auto& v = j.at("max_subdivisions");
    if (!v.is_number_integer() || v.get<long long>() < 1)
      throw ConfigError(detail::join(path, "max_subdivisions"), "expected a positive integer");
    spec.max_subdivisions = v.get<std::size_t>();
  }
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return spec;
}

inline Format parse_format(const std::string& s, const std::string& path) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw ConfigError(path, "unknown format '" + s + "' (known: csv, json)");
}

inline RunConfig parse_run_config(const json& j, const std::string& path = "") {
  detail::require_object(j, path);
  detail::reject_unknown(j, path, {"system", "route", "denominators", "quadrature", "output"});
  RunConfig c;

  const auto sp = detail::join(path, "system");
  if (!j.contains("system")) throw ConfigError(sp, "missing required object");
  const json& s = j.at("system");
  detail::require_object(s, sp);
  detail::reject_unknown(s, sp, {"material", "medium1", "medium2", "d_nm", "v_m_per_s", "T_K"});
  if (s.contains("material")) {
    if (s.contains("medium1") || s.contains("medium2"))
      throw ConfigError(detail::join(sp, "material"), "give either 'material' or 'medium1'/'medium2'");
    const json& mat = s.at("material");
    const auto mp = detail::join(sp, "material");
    const auto medium = mat.is_string() ? dielectric::MediumSpec{preset_model(mat.get<std::string>(), mp), {}, {}}
                                        : parse_medium(mat, mp);
    c.system.medium1 = medium;
    c.system.medium2 = medium;
  } else {
    if (!s.contains("medium1") || !s.contains("medium2"))
      throw ConfigError(sp, "needs 'material' or both 'medium1' and 'medium2'");
    c.system.medium1 = parse_medium(s.at("medium1"), detail::join(sp, "medium1"));
    c.system.medium2 = parse_medium(s.at("medium2"), detail::join(sp, "medium2"));
  }
  c.system.d_nm = detail::number(s, "d_nm", sp);
  c.system.v_m_per_s = detail::number(s, "v_m_per_s", sp);
  c.system.T_K = detail::number(s, "T_K", sp);
  if (!(c.system.d_nm > 0.0)) throw ConfigError(detail::join(sp, "d_nm"), "must be positive");
  if (!(c.system.v_m_per_s >= 0.0)) throw ConfigError(detail::join(sp, "v_m_per_s"), "must be non-negative");
  if (!(c.system.T_K > 0.0)) throw ConfigError(detail::join(sp, "T_K"), "must be positive");

  if (j.contains("route")) {
    const auto r = friction::parse_route(detail::string(j, "route", path));
    if (!r) throw ConfigError(detail::join(path, "route"),
                              "unknown route (known: dilute, dense-full, drude-closed-form, hybrid)");
    c.route = *r;
  }
  if (j.contains("denominators")) {
    const auto d = friction::parse_denominators(detail::string(j, "denominators", path));
    if (!d) throw ConfigError(detail::join(path, "denominators"), "unknown value (known: drop, keep, literal)");
    c.denominators = *d;
  }
  c.quadrature = j.contains("quadrature") ? parse_quadrature(j.at("quadrature"), detail::join(path, "quadrature"))
                                          : default_quadrature();
  if (j.contains("output")) {
    const auto op = detail::join(path, "output");
    const json& o = j.at("output");
    detail::require_object(o, op);
    detail::reject_unknown(o, op, {"format", "path"});
    if (o.contains("format")) c.output.format = parse_format(detail::string(o, "format", op), detail::join(op, "format"));
    if (o.contains("path")) c.output.path = detail::string(o, "path", op);
  }
  return c;
}

inline std::optional<SweepAxis> parse_axis(const std::string& s) {
  if (s == "d") return SweepAxis::d;
  if (s == "v") return SweepAxis::v;
  if (s == "T") return SweepAxis::T;
  if (s == "damping") return SweepAxis::damping;
  if (s == "plasma_energy") return SweepAxis::plasma_energy;
  return std::nullopt;
}

/// Sweep: {"base": <run config>, "axis": "d", "values": [...]} or
/// {"base": ..., "axis": ..., "range": {"min", "max", "count", "spacing": "linear"|"log"}}.
inline SweepConfig parse_sweep_config(const json& j) {
  detail::require_object(j, "");
  detail::reject_unknown(j, "", {"base", "axis", "values", "range"});
  SweepConfig c;
  if (!j.contains("base")) throw ConfigError("base", "missing required object");
  c.base = parse_run_config(j.at("base"), "base");
  const auto axis = parse_axis(detail::string(j, "axis", ""));
  if (!axis) throw ConfigError("axis", "unknown axis (known: d, v, T, damping, plasma_energy)");
  c.axis = *axis;
  if (j.contains("values") == j.contains("range"))
    throw ConfigError("values", "give exactly one of 'values' or 'range'");
  if (j.contains("values")) {
    c.values = detail::number_list(j, "values", "");
  } else {
    const json& r = j.at("range");
    detail::require_object(r, "range");
    detail::reject_unknown(r, "range", {"min", "max", "count", "spacing"});
    const double lo = detail::number(r, "min", "range");
    const double hi = detail::number(r, "max", "range");
    if (!r.contains("count") || !r.at("count").is_number_integer() || r.at("count").get<long long>() < 1)
      throw ConfigError("range.count", "expected a positive integer");
    const auto n = r.at("count").get<std::size_t>();
    const std::string spacing = r.contains("spacing") ? detail::string(r, "spacing", "range") : "linear";
    if (spacing != "linear" && spacing != "log")
      throw ConfigError("range.spacing", "expected 'linear' or 'log'");
    if (spacing == "log" && !(lo > 0.0 && hi > 0.0))
      throw ConfigError("range", "log spacing needs positive bounds");
    for (std::size_t i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      c.values.push_back(spacing == "log" ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
    }
  }
  if (c.values.empty()) throw ConfigError("values", "sweep needs at least one value");
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    const double v = c.values[i];
    const bool ok = c.axis == SweepAxis::v || c.axis == SweepAxis::damping ? v >= 0.0 : v > 0.0;
    if (!ok) throw ConfigError("values[" + std::to_string(i) + "]", "out of domain for axis " + to_string(c.axis));
  }
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
}

inline json medium_to_json(const dielectric::MediumSpec& m) {
  using namespace dielectric;
  json j = std::visit(
      overloaded{[](const Vacuum&) { return json{{"model", "vacuum"}}; },
                 [](const Plasma& p) { return json{{"model", "plasma"}, {"plasma_energy_eV", p.plasma_energy}}; },
                 [](const Drude& p) {
                   return json{{"model", "drude"}, {"plasma_energy_eV", p.plasma_energy}, {"damping_eV", p.damping}};
                 },
                 [](const Lorentz& p) {
                   return json{{"model", "lorentz"},
                               {"resonance_energy_eV", p.resonance_energy},
                               {"damping_eV", p.damping},
                               {"strength", p.strength}};
                 },
                 [](const Tabulated& t) {
                   return json{{"model", "tabulated"}, {"m_eV", t.m}, {"spectral", t.spectral}};
                 }},
      m.model);
  if (m.density_per_nm3) j["density_per_nm3"] = *m.density_per_nm3;
  if (m.polarizability_nm3) j["polarizability_nm3"] = *m.polarizability_nm3;
  return j;
}

/// Fully resolved config (presets expanded, tables inlined). Parsing it back
/// gives an identical RunConfig.
inline json to_json(const RunConfig& c) {
  json j;
  j["system"] = {{"medium1", medium_to_json(c.system.medium1)},
                 {"medium2", medium_to_json(c.system.medium2)},
                 {"d_nm", c.system.d_nm},
                 {"v_m_per_s", c.system.v_m_per_s},
                 {"T_K", c.system.T_K}};
  j["route"] = friction::to_string(c.route);
  j["denominators"] = friction::to_string(c.denominators);
  j["quadrature"] = {{"abs_tol", c.quadrature.abs_tol},
                     {"rel_tol", c.quadrature.rel_tol},
                     {"max_subdivisions", c.quadrature.max_subdivisions}};
  json out{{"format", c.output.format == Format::json ? "json" : "csv"}};
  if (c.output.path) out["path"] = *c.output.path;
  j["output"] = out;
  return j;
}

/// Applies one sweep value to a copy of the base system.
inline RunConfig apply_axis(RunConfig c, SweepAxis axis, double value) {
  auto set_drude = [&](auto&& setter) {
    bool any = false;
    for (auto* m : {&c.system.medium1, &c.system.medium2})
      if (auto* d = std::get_if<dielectric::Drude>(&m->model)) {
        setter(*d);
        any = true;
      }
    if (!any) throw DomainError("axis " + to_string(axis) + " needs at least one Drude medium");
  };
  switch (axis) {
    case SweepAxis::d: c.system.d_nm = value; break;
    case SweepAxis::v: c.system.v_m_per_s = value; break;
    case SweepAxis::T: c.system.T_K = value; break;
    case SweepAxis::damping: set_drude([&](dielectric::Drude& d) { d.damping = value; }); break;
    case SweepAxis::plasma_energy: set_drude([&](dielectric::Drude& d) { d.plasma_energy = value; }); break;
  }
  return c;
}

}  // namespace casimir::app
