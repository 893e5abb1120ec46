#include "resetsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "resetsim/errors.hpp"
#include "resetsim/io.hpp"
#include "resetsim/units.hpp"

namespace resetsim::config {

using nlohmann::json;

std::vector<double> GridSpec::values() const { return rf::linear_grid(start, stop, step); }

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError(join(path, key), "unknown key");
  }
}

double quantity(const json& j, const std::string& path, std::string_view unit) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return io::parse_quantity(j.get<std::string>(), unit);
    } catch (const DomainError& e) {
      throw ConfigError(path, e.what());
    }
  }
  throw ConfigError(path, "expected a number or a unit-suffixed string");
}

void read(const json& j, const char* key, const std::string& path, std::string_view unit, double& out) {
  if (j.contains(key)) out = quantity(j[key], join(path, key), unit);
}

void read_int(const json& j, const char* key, const std::string& path, int& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  out = j[key].get<int>();
}

void read_string(const json& j, const char* key, const std::string& path, std::string& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_string()) throw ConfigError(join(path, key), "expected a string");
  out = j[key].get<std::string>();
}

void read_grid(const json& j, const char* key, const std::string& path, std::string_view unit, GridSpec& g) {
  if (!j.contains(key)) return;
  const auto p = join(path, key);
  check_keys(j[key], p, {"start", "stop", "step"});
  read(j[key], "start", p, unit, g.start);
  read(j[key], "stop", p, unit, g.stop);
  read(j[key], "step", p, unit, g.step);
  if (!(g.step > 0.0) || !(g.stop >= g.start)) throw ConfigError(p, "grid needs step > 0 and stop >= start");
}

rf::LadderForm parse_form(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected \"T\" or \"Pi\"");
  const auto s = j.get<std::string>();
  if (s == "T") return rf::LadderForm::T;
  if (s == "Pi") return rf::LadderForm::Pi;
  throw ConfigError(path, "expected \"T\" or \"Pi\"");
}

void read_filter(const json& j, const std::string& path, const char* series_unit, const char* shunt_unit,
                 rf::LadderTopology& topo, rf::LadderValues& values) {
  check_keys(j, path, {"series", "shunt", "order", "form"});
  read(j, "series", path, series_unit, values.series);
  read(j, "shunt", path, shunt_unit, values.shunt);
  read_int(j, "order", path, topo.order);
  if (j.contains("form")) topo.form = parse_form(j["form"], join(path, "form"));
}

protocols::PreparedState parse_state(const json& j, const std::string& path) {
  if (j == "g") return protocols::PreparedState::G;
  if (j == "e") return protocols::PreparedState::E;
  if (j == "f") return protocols::PreparedState::F;
  throw ConfigError(path, "expected \"g\", \"e\" or \"f\"");
}

std::array<double, 3> parse_row(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected [p_g, p_e, p_f]");
  std::array<double, 3> r{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ConfigError(path, "populations must be numbers");
    r[i] = j[i].get<double>();
    if (!(r[i] >= 0.0 && r[i] <= 1.0)) throw ConfigError(path, "populations must lie in [0, 1]");
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-6) throw ConfigError(path, "populations must sum to 1");
  return r;
}

template <class F>
void guard(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  if (schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(schema_version));
  guard("device", [&] { device.validate(); });
  guard("system", [&] { system.validate(); });
  auto grid = [](const GridSpec& g, const std::string& p, bool positive) {
    if (!(g.step > 0.0) || !(g.stop >= g.start)) throw ConfigError(p, "grid needs step > 0 and stop >= start");
    if (positive && !(g.start >= 0.0)) throw ConfigError(p, "grid must be non-negative");
  };
  grid(sweep.plateau, "sweep.plateau", true);
  grid(sweep.plateau_freq, "sweep.plateau_freq", true);
  grid(sweep.band, "sweep.band", true);
  grid(sweep.mode_band, "sweep.mode_band", true);
  grid(sweep.coupling, "sweep.coupling", true);
  grid(sweep.detuning, "sweep.detuning", false);
  if (!(sweep.plateau_freq.start > 0.0)) throw ConfigError("sweep.plateau_freq", "frequencies must be > 0");
  if (!(sweep.band.start > 0.0)) throw ConfigError("sweep.band", "frequencies must be > 0");
  if (!(sweep.rise_s >= 0.0)) throw ConfigError("sweep.rise", "must be >= 0");
  if (static_cast<int>(sweep.initial) >= system.qubit_levels)
    throw ConfigError("sweep.initial", "state not in the qubit space");
  guard("readout", [&] { readout.model.validate(); });
  if (readout.model.shots == 0) throw ConfigError("readout.shots", "must be > 0");
  const auto& p = benchmark.protocol;
  if (p != "eg" && p != "fe" && p != "concatenated" && p != "all")
    throw ConfigError("benchmark.protocol", "expected eg, fe, concatenated or all");
  if (!(benchmark.plateau_s >= 0.0)) throw ConfigError("benchmark.plateau", "must be >= 0");
  if (benchmark.levels != 2 && benchmark.levels != 3) throw ConfigError("benchmark.levels", "must be 2 or 3");
  if (benchmark.levels == 2 && p != "eg")
    throw ConfigError("benchmark.levels", "f protocols need 3 levels");
  for (const auto& f : output.formats) {
    if (f != "csv" && f != "json" && f != "svg") throw ConfigError("output.formats", "unknown format '" + f + "'");
  }
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset -> line and column.
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n'));
    const auto nl = text.rfind('\n', pos > 0 ? pos - 1 : 0);
    const std::size_t col = nl == std::string::npos ? pos : pos - nl - 1;
    throw ConfigError("", "JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                              ": " + e.what());
  }
  check_keys(doc, "", {"schema_version", "seed", "device", "system", "sweep", "readout", "benchmark", "output"});
  if (!doc.contains("schema_version")) throw ConfigError("schema_version", "missing");
  RunConfig c;
  read_int(doc, "schema_version", "", c.schema_version);
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(c.schema_version));
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("device")) {
    const auto& d = doc["device"];
    check_keys(d, "device", {"lowpass", "highpass", "z_ref", "line", "mode_freq", "mode_order"});
    if (d.contains("lowpass"))
      read_filter(d["lowpass"], "device.lowpass", "H", "F", c.device.lowpass_topology, c.device.lowpass);
    if (d.contains("highpass"))
      read_filter(d["highpass"], "device.highpass", "F", "H", c.device.highpass_topology, c.device.highpass);
    read(d, "z_ref", "device", "ohm", c.device.z_ref_ohm);
    read(d, "mode_freq", "device", "Hz", c.device.design_mode_freq_hz);
    read_int(d, "mode_order", "device", c.device.mode_order);
    if (d.contains("line")) {
      const auto& l = d["line"];
      check_keys(l, "device.line", {"length", "z0", "eps_eff", "alpha"});
      read(l, "length", "device.line", "m", c.device.line.length_m);
      read(l, "z0", "device.line", "ohm", c.device.line.z0_ohm);
      read(l, "alpha", "device.line", "Np/m", c.device.line.attenuation_np_m);
      if (l.contains("eps_eff")) {
        if (l["eps_eff"] == "auto") {
          c.calibrate_line = true;
        } else {
          const double eps = quantity(l["eps_eff"], "device.line.eps_eff", "");
          if (!(eps >= 1.0)) throw ConfigError("device.line.eps_eff", "must be >= 1 or \"auto\"");
          c.device.line.phase_velocity_m_s = kSpeedOfLight / std::sqrt(eps);
          c.calibrate_line = false;
        }
      }
    }
  }
  guard("device", [&] {
    c.device.validate();
    if (c.calibrate_line) c.device = c.device.calibrated();
  });

  if (doc.contains("system")) {
    const auto& s = doc["system"];
    const std::string p = "system";
    check_keys(s, p, {"qubit_max_freq", "anharmonicity", "coupling", "dissipator_freq", "dissipator_kappa", "t1",
                      "bath_temperature", "levels", "fock_cutoff"});
    auto rad = [&](const char* key, double& field) {
      double hz = ordinary(field);
      read(s, key, p, "Hz", hz);
      field = angular(hz);
    };
    rad("qubit_max_freq", c.system.qubit_max_freq_rad_s);
    rad("anharmonicity", c.system.anharmonicity_rad_s);
    rad("coupling", c.system.coupling_rad_s);
    rad("dissipator_freq", c.system.dissipator_freq_rad_s);
    rad("dissipator_kappa", c.system.dissipator_kappa_rad_s);
    read(s, "t1", p, "s", c.system.qubit_t1_s);
    read(s, "bath_temperature", p, "K", c.system.bath_temperature_k);
    read_int(s, "levels", p, c.system.qubit_levels);
    read_int(s, "fock_cutoff", p, c.system.fock_cutoff);
  }

  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    const std::string p = "sweep";
    check_keys(s, p, {"plateau", "plateau_freq", "rise", "initial", "band", "mode_band", "coupling", "detuning"});
    read_grid(s, "plateau", p, "s", c.sweep.plateau);
    read_grid(s, "plateau_freq", p, "Hz", c.sweep.plateau_freq);
    read(s, "rise", p, "s", c.sweep.rise_s);
    if (s.contains("initial")) c.sweep.initial = parse_state(s["initial"], "sweep.initial");
    read_grid(s, "band", p, "Hz", c.sweep.band);
    read_grid(s, "mode_band", p, "Hz", c.sweep.mode_band);
    read_grid(s, "coupling", p, "Hz", c.sweep.coupling);
    read_grid(s, "detuning", p, "Hz", c.sweep.detuning);
  }

  if (doc.contains("readout")) {
    const auto& r = doc["readout"];
    const std::string p = "readout";
    check_keys(r, p, {"centroids", "sigma", "shots", "resonator_kappa", "resonator_freq"});
    if (r.contains("centroids")) {
      const auto& cs = r["centroids"];
      if (!cs.is_array()) throw ConfigError("readout.centroids", "expected [[i, q], ...]");
      c.readout.model.centroids.clear();
      for (const auto& pt : cs) {
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
          throw ConfigError("readout.centroids", "each centroid is [i, q]");
        c.readout.model.centroids.push_back({pt[0].get<double>(), pt[1].get<double>()});
      }
    }
    read(r, "sigma", p, "", c.readout.model.sigma);
    if (r.contains("shots")) {
      if (!r["shots"].is_number_unsigned()) throw ConfigError("readout.shots", "expected a positive integer");
      c.readout.model.shots = r["shots"].get<std::size_t>();
    }
    read(r, "resonator_kappa", p, "Hz", c.readout.resonator_kappa_hz);
    read(r, "resonator_freq", p, "Hz", c.readout.resonator_freq_hz);
  }

  if (doc.contains("benchmark")) {
    const auto& b = doc["benchmark"];
    const std::string p = "benchmark";
    check_keys(b, p, {"protocol", "plateau", "levels", "preparation"});
    read_string(b, "protocol", p, c.benchmark.protocol);
    read(b, "plateau", p, "s", c.benchmark.plateau_s);
    read_int(b, "levels", p, c.benchmark.levels);
    if (b.contains("preparation")) {
      const auto& pr = b["preparation"];
      check_keys(pr, "benchmark.preparation", {"g", "e", "f"});
      if (pr.contains("g")) c.benchmark.preparation.g = parse_row(pr["g"], "benchmark.preparation.g");
      if (pr.contains("e")) c.benchmark.preparation.e = parse_row(pr["e"], "benchmark.preparation.e");
      if (pr.contains("f")) c.benchmark.preparation.f = parse_row(pr["f"], "benchmark.preparation.f");
    }
  }

  if (doc.contains("output")) {
    const auto& o = doc["output"];
    check_keys(o, "output", {"directory", "formats"});
    read_string(o, "directory", "output", c.output.directory);
    if (o.contains("formats")) {
      if (!o["formats"].is_array()) throw ConfigError("output.formats", "expected an array of strings");
      c.output.formats.clear();
      for (const auto& f : o["formats"]) {
        if (!f.is_string()) throw ConfigError("output.formats", "expected an array of strings");
        c.output.formats.push_back(f.get<std::string>());
      }
    }
  }

  c.readout.model.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const NotFoundError&) {
    throw ConfigError("--config", "cannot read config file '" + path + "'");
  }
  return parse_config(text);
}

std::string dump_config(const RunConfig& c) {
  auto form = [](rf::LadderForm f) { return f == rf::LadderForm::T ? "T" : "Pi"; };
  auto grid = [](const GridSpec& g) { return json{{"start", g.start}, {"stop", g.stop}, {"step", g.step}}; };
  auto row = [](const std::array<double, 3>& r) { return json::array({r[0], r[1], r[2]}); };
  json line{{"length", c.device.line.length_m},
            {"z0", c.device.line.z0_ohm},
            {"alpha", c.device.line.attenuation_np_m}};
  if (c.calibrate_line) line["eps_eff"] = "auto";
  else line["eps_eff"] = c.device.line.effective_permittivity();
  json centroids = json::array();
  for (const auto& p : c.readout.model.centroids) centroids.push_back({p.i, p.q});
  const json doc{
      {"schema_version", c.schema_version},
      {"seed", c.seed},
      {"device",
       {{"lowpass",
         {{"series", c.device.lowpass.series},
          {"shunt", c.device.lowpass.shunt},
          {"order", c.device.lowpass_topology.order},
          {"form", form(c.device.lowpass_topology.form)}}},
        {"highpass",
         {{"series", c.device.highpass.series},
          {"shunt", c.device.highpass.shunt},
          {"order", c.device.highpass_topology.order},
          {"form", form(c.device.highpass_topology.form)}}},
        {"z_ref", c.device.z_ref_ohm},
        {"line", line},
        {"mode_freq", c.device.design_mode_freq_hz},
        {"mode_order", c.device.mode_order}}},
      {"system",
       {{"qubit_max_freq", ordinary(c.system.qubit_max_freq_rad_s)},
        {"anharmonicity", ordinary(c.system.anharmonicity_rad_s)},
        {"coupling", ordinary(c.system.coupling_rad_s)},
        {"dissipator_freq", ordinary(c.system.dissipator_freq_rad_s)},
        {"dissipator_kappa", ordinary(c.system.dissipator_kappa_rad_s)},
        {"t1", c.system.qubit_t1_s},
        {"bath_temperature", c.system.bath_temperature_k},
        {"levels", c.system.qubit_levels},
        {"fock_cutoff", c.system.fock_cutoff}}},
      {"sweep",
       {{"plateau", grid(c.sweep.plateau)},
        {"plateau_freq", grid(c.sweep.plateau_freq)},
        {"rise", c.sweep.rise_s},
        {"initial", measurement::state_label(static_cast<std::size_t>(c.sweep.initial))},
        {"band", grid(c.sweep.band)},
        {"mode_band", grid(c.sweep.mode_band)},
        {"coupling", grid(c.sweep.coupling)},
        {"detuning", grid(c.sweep.detuning)}}},
      {"readout",
       {{"centroids", centroids},
        {"sigma", c.readout.model.sigma},
        {"shots", c.readout.model.shots},
        {"resonator_kappa", c.readout.resonator_kappa_hz},
        {"resonator_freq", c.readout.resonator_freq_hz}}},
      {"benchmark",
       {{"protocol", c.benchmark.protocol},
        {"plateau", c.benchmark.plateau_s},
        {"levels", c.benchmark.levels},
        {"preparation",
         {{"g", row(c.benchmark.preparation.g)},
          {"e", row(c.benchmark.preparation.e)},
          {"f", row(c.benchmark.preparation.f)}}}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}}};
  return doc.dump(2);
}

std::string fingerprint(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace resetsim::config
