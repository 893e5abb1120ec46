#include "resetsim/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "resetsim/config.hpp"
#include "resetsim/device.hpp"
#include "resetsim/errors.hpp"
#include "resetsim/io.hpp"
#include "resetsim/measurement.hpp"
#include "resetsim/mode_analysis.hpp"
#include "resetsim/reset_protocols.hpp"
#include "resetsim/rng.hpp"
#include "resetsim/units.hpp"

#ifndef RESETSIM_VERSION
#define RESETSIM_VERSION "0.0.0"
#endif

namespace resetsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string format;
};

/// Output bookkeeping for one run; every written file lands in the manifest.
class Run {
 public:
  Run(config::RunConfig cfg, fs::path dir, std::vector<std::string> formats, unsigned jobs)
      : cfg_(std::move(cfg)), dir_(std::move(dir)), formats_(std::move(formats)), jobs_(jobs) {}

  const config::RunConfig& cfg() const { return cfg_; }
  unsigned jobs() const { return jobs_; }
  bool wants(const std::string& format) const {
    return std::find(formats_.begin(), formats_.end(), format) != formats_.end();
  }

  void write(const std::string& name, const std::string& format, const std::string& content, bool always = false) {
    if (!always && !wants(format)) return;
    io::write_text(dir_ / name, content);
    outputs_.push_back({{"path", name}, {"format", format}, {"fnv1a64", config::fingerprint(content)},
                        {"bytes", content.size()}});
  }
  void write_json(const std::string& name, const json& doc) { write(name, "json", doc.dump(2) + "\n"); }

  void warn(std::string w) { warnings_.push_back(std::move(w)); }

  json manifest_entries() const { return outputs_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const fs::path& dir() const { return dir_; }

 private:
  config::RunConfig cfg_;
  fs::path dir_;
  std::vector<std::string> formats_;
  unsigned jobs_;
  json outputs_ = json::array();
  std::vector<std::string> warnings_;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json matrix_json(const measurement::AssignmentMatrix& m, const std::vector<std::string>& rows) {
  json cols = json::array();
  for (std::size_t k = 0; m.size() && k < m.p.front().size(); ++k) cols.push_back(measurement::state_label(k));
  return {{"rows", rows}, {"columns", cols}, {"p", m.p}};
}

json report_json(const protocols::ResetResult& r) {
  return {{"protocol", r.protocol},
          {"prepared", r.prepared},
          {"before", r.before},
          {"after", r.after},
          {"assigned_before", matrix_json(r.assigned_before, r.prepared)},
          {"assigned_after", matrix_json(r.assigned_after, r.prepared)},
          {"residual", r.residual},
          {"residual_true", r.residual_true},
          {"steady_state", r.steady_state},
          {"warnings", r.warnings}};
}

double db_or_floor(rf::Complex s) { return std::max(rf::to_db(s), -300.0); }

// ---------------------------------------------------------------------------

int cmd_sparams(Run& run, const std::optional<std::string>& band, const std::optional<std::string>& step,
                const std::optional<std::string>& netlist) {
  const auto& c = run.cfg();
  double lo = c.sweep.band.start, hi = c.sweep.band.stop, df = c.sweep.band.step;
  if (band) std::tie(lo, hi) = io::parse_range(*band, "Hz");
  if (step) df = io::parse_quantity(*step, "Hz");
  if (!(lo > 0.0) || !(hi > lo) || !(df > 0.0)) throw ConfigError("--band", "need 0 < lo < hi and step > 0");
  const auto grid = rf::linear_grid(lo, hi, df);

  const auto chain = c.device.dissipator_chain();
  const auto sweep = rf::sweep_s_params(chain, grid);
  const auto dip = c.device.diplexer();

  io::CsvTable line_csv({"freq_ghz", "s21_db", "s11_db"});
  io::CsvTable dip_csv({"freq_ghz", "s11_db", "s21_db", "s31_db", "s32_db"});
  io::Series s_line{"LP-line-LP |S21|", {}, {}}, s_lp{"diplexer |S21| (LP)", {}, {}},
      s_hp{"diplexer |S31| (HP)", {}, {}}, s_iso{"diplexer |S32|", {}, {}};
  for (const auto& p : sweep) {
    const double f = p.freq_hz / 1e9;
    line_csv.add_row({f, db_or_floor(p.s21), db_or_floor(p.s11)});
    s_line.x.push_back(f);
    s_line.y.push_back(db_or_floor(p.s21));
    const auto d = rf::diplexer_response(dip, p.freq_hz);
    dip_csv.add_row({f, db_or_floor(d.s11), db_or_floor(d.s21), db_or_floor(d.s31), db_or_floor(d.s32)});
    s_lp.x.push_back(f);
    s_lp.y.push_back(db_or_floor(d.s21));
    s_hp.x.push_back(f);
    s_hp.y.push_back(db_or_floor(d.s31));
    s_iso.x.push_back(f);
    s_iso.y.push_back(db_or_floor(d.s32));
  }
  run.write("sparams.csv", "csv", line_csv.str());
  run.write("diplexer.csv", "csv", dip_csv.str());
  run.write("dissipator.s2p", "csv", io::touchstone(sweep, chain.z_ref()));
  run.write("sparams.svg", "svg",
            io::render_svg(io::LinePlot{"Transmission", "frequency (GHz)", "|S| (dB)",
                                        {s_line, s_lp, s_hp, s_iso}, -140.0, 5.0}));

  json summary{{"band_ghz", {lo / 1e9, hi / 1e9}}, {"step_mhz", df / 1e6}, {"points", grid.size()}};
  try {
    summary["lowpass_cutoff_ghz"] = rf::find_cutoff(c.device.lowpass_chain(), 0.5e9, 12e9) / 1e9;
    summary["highpass_cutoff_ghz"] = rf::find_cutoff(c.device.highpass_chain(), 0.5e9, 12e9) / 1e9;
  } catch (const NotFoundError& e) {
    run.warn(e.what());
  }
  const auto iso = rf::diplexer_isolation(dip, lo, hi, df);
  summary["isolation_worst_db"] = iso.worst_db;
  summary["isolation_worst_ghz"] = iso.worst_freq_hz / 1e9;

  if (netlist) {
    const auto custom = io::load_netlist(io::read_text(*netlist));
    const auto cs = rf::sweep_s_params(custom, grid);
    io::CsvTable t({"freq_ghz", "s21_db", "s11_db"});
    for (const auto& p : cs) t.add_row({p.freq_hz / 1e9, db_or_floor(p.s21), db_or_floor(p.s11)});
    run.write("netlist.csv", "csv", t.str());
    run.write("netlist.s2p", "csv", io::touchstone(cs, custom.z_ref()));
    summary["netlist"] = *netlist;
  }
  run.write_json("sparams.json", summary);
  return kOk;
}

int cmd_modes(Run& run, const std::optional<std::string>& band) {
  const auto& c = run.cfg();
  double lo = c.sweep.mode_band.start, hi = c.sweep.mode_band.stop;
  if (band) std::tie(lo, hi) = io::parse_range(*band, "Hz");
  const auto& dev = c.device;
  const auto mirror = dev.mirror();
  modes::ModeSearchOptions opts;
  opts.scan_step_hz = c.sweep.mode_band.step;
  const auto found = modes::find_modes(dev.line, mirror, mirror, lo, hi, opts);

  io::CsvTable csv({"freq_ghz", "order", "kappa_mhz", "leakage_kappa_mhz", "round_trip_ns", "alpha_np_m_for_target"});
  json list = json::array();
  const double target = c.system.dissipator_kappa_rad_s;
  for (const auto& m : found) {
    const double leak = modes::leakage_linewidth(m, dev.line, mirror, mirror);
    const double alpha = modes::attenuation_for_linewidth(m, dev.line, mirror, mirror, target);
    csv.add_row({m.freq_hz() / 1e9, static_cast<double>(m.order), m.kappa_hz() / 1e6, ordinary(leak) / 1e6,
                 m.round_trip_s * 1e9, alpha});
    list.push_back({{"freq_ghz", m.freq_hz() / 1e9},
                    {"order", m.order},
                    {"kappa_mhz", m.kappa_hz() / 1e6},
                    {"leakage_kappa_mhz", ordinary(leak) / 1e6},
                    {"round_trip_ns", m.round_trip_s * 1e9},
                    {"alpha_np_m_for_target", alpha},
                    {"finesse", 1.0 / (m.round_trip_s * m.kappa_rad_s)}});
  }
  json doc{{"modes", list},
           {"target_kappa_mhz", ordinary(target) / 1e6},
           {"line", {{"length_m", dev.line.length_m},
                     {"eps_eff", dev.line.effective_permittivity()},
                     {"alpha_np_m", dev.line.attenuation_np_m}}}};

  const auto full = std::find_if(found.begin(), found.end(), [&](const auto& m) { return m.order == dev.mode_order; });
  if (full != found.end()) {
    const double fsr = 1.0 / full->round_trip_s;
    const double a = std::max(full->freq_hz() - 0.4 * fsr, 1e6);
    const double b = full->freq_hz() + 0.4 * fsr;
    const auto chain = dev.dissipator_chain();
    const auto fit = modes::linewidth_lorentzian(chain, a, b);
    doc["lorentzian"] = {{"center_ghz", ordinary(fit.center_rad_s) / 1e9},
                         {"fwhm_mhz", ordinary(fit.fwhm_rad_s) / 1e6},
                         {"relative_rms", fit.relative_rms},
                         {"poor_fit", fit.poor_fit}};
    if (fit.poor_fit) run.warn("Lorentzian fit residual above threshold");

    const double span = std::max(8.0 * ordinary(fit.fwhm_rad_s), 2e6);
    const auto grid = rf::linear_grid(ordinary(fit.center_rad_s) - span, ordinary(fit.center_rad_s) + span, span / 200);
    io::Series sim{"|S21|^2", {}, {}}, lor{"Lorentzian fit", {}, {}};
    for (const auto& p : rf::sweep_s_params(chain, grid)) {
      sim.x.push_back(p.freq_hz / 1e9);
      sim.y.push_back(std::norm(p.s21));
      lor.x.push_back(p.freq_hz / 1e9);
      lor.y.push_back(modes::lorentzian(angular(p.freq_hz), fit));
    }
    run.write("modes.svg", "svg", io::render_svg(io::LinePlot{"Dissipator mode", "frequency (GHz)", "|S21|^2", {sim, lor}}));
  } else {
    run.warn("no mode of order " + std::to_string(dev.mode_order) + " in the search band");
  }

  const double wq = c.system.qubit_max_freq_rad_s;
  const auto lp = rf::abcd_to_s(rf::cascade(dev.lowpass_chain(), wq), dev.z_ref_ohm);
  const auto hp = rf::abcd_to_s(rf::cascade(dev.highpass_chain(), wq), dev.z_ref_ohm);
  doc["purcell_suppression_db"] = {{"freq_ghz", ordinary(wq) / 1e9},
                                   {"lowpass", modes::purcell_suppression(lp(0, 0)).db},
                                   {"highpass", modes::purcell_suppression(hp(0, 0)).db}};
  run.write("modes.csv", "csv", csv.str());
  run.write_json("modes.json", doc);
  return kOk;
}

int cmd_gamma_map(Run& run, const std::optional<std::string>& kappa_flag) {
  const auto& c = run.cfg();
  double kappa = c.system.dissipator_kappa_rad_s;
  if (kappa_flag) kappa = angular(io::parse_quantity(*kappa_flag, "Hz"));
  const auto gs = c.sweep.coupling.values();
  const auto ds = c.sweep.detuning.values();
  const auto map = protocols::gamma_map(kappa, gs, ds);

  io::CsvTable csv({"g_mhz", "delta_mhz", "gamma_mhz", "gamma_inv_ns"});
  io::Heatmap hm{"Decay rate", "detuning (MHz)", "g (MHz)", "Gamma/2pi (MHz)", {}, {}, {}};
  for (double d : ds) hm.x.push_back(d / 1e6);
  json peaks = json::array();
  for (std::size_t i = 0; i < gs.size(); ++i) {
    hm.y.push_back(gs[i] / 1e6);
    std::vector<double> row;
    for (std::size_t j = 0; j < ds.size(); ++j) {
      const double g = map.gamma[i][j];
      csv.add_row({gs[i] / 1e6, ds[j] / 1e6, ordinary(g) / 1e6, g > 0.0 ? 1e9 / g : INFINITY});
      row.push_back(ordinary(g) / 1e6);
    }
    hm.z.push_back(std::move(row));
    const auto mr = dynamics::max_rate_condition(kappa, angular(gs[i]));
    peaks.push_back({{"g_mhz", gs[i] / 1e6}, {"saturates", mr.saturates}, {"gamma_max_mhz", ordinary(mr.gamma_max) / 1e6}});
  }
  run.write("gamma_map.csv", "csv", csv.str());
  run.write("gamma_map.svg", "svg", io::render_svg(hm));
  run.write_json("gamma_map.json", {{"kappa_mhz", ordinary(kappa) / 1e6}, {"columns", peaks}});
  return kOk;
}

int cmd_reset_sweep(Run& run) {
  const auto& c = run.cfg();
  protocols::SweepSpec spec;
  spec.plateau_s = c.sweep.plateau.values();
  spec.plateau_freq_hz = c.sweep.plateau_freq.values();
  spec.initial = c.sweep.initial;
  spec.params = c.system;
  spec.rise_s = c.sweep.rise_s;
  const auto map = protocols::reset_sweep(spec, run.jobs());

  io::CsvTable csv({"freq_ghz", "tp_ns", "p_e"});
  io::Heatmap hm{"Reset sweep", "plateau time (ns)", "plateau frequency (GHz)", "population", {}, {}, {}};
  for (double t : map.plateau_s) hm.x.push_back(t * 1e9);
  for (std::size_t i = 0; i < map.plateau_freq_hz.size(); ++i) {
    hm.y.push_back(map.plateau_freq_hz[i] / 1e9);
    for (std::size_t j = 0; j < map.plateau_s.size(); ++j) {
      if (std::isnan(map.population[i][j])) continue;
      csv.add_row({map.plateau_freq_hz[i] / 1e9, map.plateau_s[j] * 1e9, map.population[i][j]});
    }
  }
  hm.z = map.population;
  run.write("reset_sweep.csv", "csv", csv.str());
  run.write("reset_sweep.svg", "svg", io::render_svg(hm));
  json fails = json::array();
  for (const auto& f : map.failures)
    fails.push_back({{"freq_index", f.freq_index}, {"tp_index", f.tp_index}, {"message", f.message}});
  run.write("failures.json", "json", json{{"failures", fails}}.dump(2) + "\n", true);
  if (!map.failures.empty()) {
    const bool none_done = map.failures.size() == map.plateau_s.size() * map.plateau_freq_hz.size();
    run.warn(std::to_string(map.failures.size()) + " sweep cells failed: " + map.failures.front().message);
    return none_done ? kNumericError : kPartial;
  }
  return kOk;
}

int cmd_reset_bench(Run& run, const std::optional<std::string>& protocol_flag) {
  const auto& c = run.cfg();
  const std::string protocol = protocol_flag.value_or(c.benchmark.protocol);
  if (protocol != "eg" && protocol != "fe" && protocol != "concatenated" && protocol != "all")
    throw ConfigError("--protocol", "expected eg, fe, concatenated or all");
  auto params = c.system;
  params.qubit_levels = c.benchmark.levels;
  if (protocol != "eg" && params.qubit_levels != 3) throw ConfigError("benchmark.levels", "f protocols need 3 levels");

  protocols::BenchmarkOptions opts;
  opts.plateau_s = c.benchmark.plateau_s;
  opts.rise_s = c.sweep.rise_s;
  opts.preparation = c.benchmark.preparation;
  opts.readout = c.readout.model;

  std::vector<protocols::ResetResult> results;
  if (protocol == "eg" || protocol == "all") results.push_back(protocols::benchmark_eg_reset(params, opts));
  if (protocol == "fe" || protocol == "all") results.push_back(protocols::benchmark_fe_reset(params, opts));
  if (protocol == "concatenated" || protocol == "all") results.push_back(protocols::concatenated_reset(params, opts));

  // Fringe line-cut of the first-excited-state reset for timing figures.
  auto fringe_params = c.system;
  fringe_params.qubit_levels = 2;
  const auto tps = rf::linear_grid(0.0, 200e-9, 0.5e-9);
  const auto fringe = protocols::fringe_linecut(fringe_params, tps, c.sweep.rise_s);
  if (!fringe.warning.empty()) run.warn(fringe.warning);

  json residuals = json::object();
  json reports = json::array();
  for (const auto& r : results) {
    residuals[r.protocol] = r.residual;
    reports.push_back(report_json(r));
    for (const auto& w : r.warnings) run.warn(r.protocol + ": " + w);
  }
  json doc{{"protocol", protocol},
           {"residuals", residuals},
           {"first_min_ns", std::isnan(fringe.first_minimum_s) ? json(nullptr) : json(fringe.first_minimum_s * 1e9)},
           {"envelope_ns", fringe.envelope_s * 1e9},
           {"oscillatory", fringe.oscillatory},
           {"thermal_baseline", protocols::thermal_baseline(params)},
           {"reports", reports}};
  run.write_json("reset_bench.json", doc);

  io::CsvTable fr({"tp_ns", "p_e"});
  io::Series trace{"simulated", {}, {}};
  for (std::size_t i = 0; i < fringe.plateau_s.size(); ++i) {
    fr.add_row({fringe.plateau_s[i] * 1e9, fringe.population[i]});
    trace.x.push_back(fringe.plateau_s[i] * 1e9);
    trace.y.push_back(fringe.population[i]);
  }
  run.write("fringe.csv", "csv", fr.str());
  run.write("fringe.svg", "svg", io::render_svg(io::LinePlot{"Resonant line-cut", "plateau time (ns)", "P_e", {trace}}));

  // Single-shot record of the prepared-e row after the first protocol.
  const auto& first = results.front();
  const auto e_row = static_cast<std::size_t>(
      std::find(first.prepared.begin(), first.prepared.end(), "e") - first.prepared.begin());
  if (e_row < first.after.size()) {
    auto model = c.readout.model;
    model.shots = std::min<std::size_t>(model.shots, 20000);
    auto shots = measurement::sample_shots(first.after[e_row], model, 0x5407);
    io::CsvTable sc({"i", "q", "true_state", "assigned_state"});
    for (const auto& s : shots)
      sc.add_row({io::format_double(s.point.i), io::format_double(s.point.q), measurement::state_label(s.true_state),
                  measurement::state_label(s.assigned_state)});
    run.write("shots.csv", "csv", sc.str());
  }
  return kOk;
}

int cmd_thermal(Run& run, std::ostream& out, const std::optional<std::string>& freq,
                const std::optional<std::string>& temp, const std::optional<std::string>& pop) {
  const auto& c = run.cfg();
  const double f = freq ? io::parse_quantity(*freq, "Hz") : ordinary(c.system.qubit_max_freq_rad_s);
  if (temp && pop) throw ConfigError("--temp", "give either --temp or --pop, not both");
  double t = 0.0, p = 0.0;
  if (pop) {
    p = std::stod(*pop) / (pop->find('%') != std::string::npos ? 100.0 : 1.0);
    t = measurement::effective_temperature(angular(f), p);
  } else {
    t = temp ? io::parse_quantity(*temp, "K") : c.system.bath_temperature_k;
    p = measurement::thermal_population(angular(f), t);
  }
  char line[160];
  std::snprintf(line, sizeof line, "p_e = %.4f %% at %.4g GHz, T = %.3f mK\n", 100.0 * p, f / 1e9, t * 1e3);
  out << line;
  run.write_json("thermal.json", {{"freq_ghz", f / 1e9}, {"temperature_mk", t * 1e3}, {"p_e", p}});
  return kOk;
}

int cmd_fit_filter(Run& run) {
  const auto& c = run.cfg();
  const auto fit = fit_device(c.device);
  const auto& dev = fit.device;
  const auto iso = rf::diplexer_isolation(dev.diplexer(), 1e9, 10e9, 1e6);
  auto filter = [](const rf::FitResult& r, const rf::NetworkChain& chain, bool lowpass) {
    json res = json::array();
    for (double v : r.residuals) res.push_back(v);
    return json{{"series", r.values.series},
                {"shunt", r.values.shunt},
                {lowpass ? "series_nh" : "series_pf", r.values.series * (lowpass ? 1e9 : 1e12)},
                {lowpass ? "shunt_pf" : "shunt_nh", r.values.shunt * (lowpass ? 1e12 : 1e9)},
                {"cutoff_ghz", rf::find_cutoff(chain, 0.5e9, 12e9) / 1e9},
                {"residuals", res},
                {"objective", r.objective},
                {"iterations", r.iterations},
                {"converged", r.converged}};
  };
  json targets = json::array();
  for (const auto& t : default_lowpass_targets()) targets.push_back("lowpass: " + rf::describe(t));
  for (const auto& t : default_highpass_targets()) targets.push_back("highpass: " + rf::describe(t));
  json doc{{"lowpass", filter(fit.lowpass, dev.lowpass_chain(), true)},
           {"highpass", filter(fit.highpass, dev.highpass_chain(), false)},
           {"order", {dev.lowpass_topology.order, dev.highpass_topology.order}},
           {"targets", targets},
           {"isolation_worst_db", iso.worst_db},
           {"isolation_worst_ghz", iso.worst_freq_hz / 1e9},
           {"isolation_meets_60db", iso.worst_db <= -60.0},
           {"line_eps_eff", dev.line.effective_permittivity()}};
  if (iso.worst_db > -60.0) {
    run.warn("diplexer isolation " + io::format_double(iso.worst_db) + " dB does not reach -60 dB over 1-10 GHz");
  }
  run.write_json("fit_filter.json", doc);

  io::CsvTable csv({"freq_ghz", "s21_db", "s31_db", "s32_db"});
  for (double f : rf::linear_grid(1e9, 10e9, 10e6)) {
    const auto d = rf::diplexer_response(dev.diplexer(), f);
    csv.add_row({f / 1e9, db_or_floor(d.s21), db_or_floor(d.s31), db_or_floor(d.s32)});
  }
  run.write("fit_filter.csv", "csv", csv.str());
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dissipator-based qubit reset: network, mode and open-system simulations", "resetsim"};
  app.fallthrough();
  app.set_version_flag("--version", RESETSIM_VERSION);
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--out", g.out_dir, "Output directory (overrides output.directory)");
  app.add_option("--seed", g.seed, "RNG seed (overrides config seed)");
  app.add_option("--jobs", g.jobs, "Worker threads for sweeps")->check(CLI::Range(1u, 1024u));
  app.add_option("--format", g.format, "csv|json|svg|all")->check(CLI::IsMember({"csv", "json", "svg", "all"}));

  std::optional<std::string> band, step, netlist, kappa, protocol, freq, temp, pop, mode_band;
  auto* sp = app.add_subcommand("sparams", "S-parameters of the dissipator chain and the diplexer");
  sp->add_option("--band", band, "lo:hi, e.g. 1:10GHz");
  sp->add_option("--step", step, "Grid spacing, e.g. 5MHz");
  sp->add_option("--netlist", netlist, "Also sweep a chain from a JSON netlist");
  auto* md = app.add_subcommand("modes", "Standing-wave modes, linewidths and Purcell suppression");
  md->add_option("--band", mode_band, "Search band lo:hi");
  auto* gm = app.add_subcommand("gamma-map", "Decay rate over coupling and detuning");
  gm->add_option("--kappa", kappa, "Dissipator linewidth, e.g. 15MHz");
  auto* rs = app.add_subcommand("reset-sweep", "Population after reset over plateau frequency and time");
  auto* rb = app.add_subcommand("reset-bench", "Reset benchmarks with state preparation and readout errors");
  rb->add_option("--protocol", protocol, "eg|fe|concatenated|all");
  auto* th = app.add_subcommand("thermal", "Boltzmann population <-> effective temperature");
  th->add_option("--freq", freq, "Transition frequency, e.g. 4.86GHz");
  th->add_option("--temp", temp, "Temperature, e.g. 41mK");
  th->add_option("--pop", pop, "Excited population, fraction or percent (0.34%)");
  auto* ff = app.add_subcommand("fit-filter", "Fit ladder element values to the cutoff targets");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  const auto* sub = app.get_subcommands().front();
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();

  std::optional<Run> run;
  int code = kOk;
  std::string status = "ok";
  std::string message;
  try {
    auto cfg = g.config_path.empty() ? config::RunConfig::defaults() : config::load_config(g.config_path);
    if (g.seed) {
      cfg.seed = *g.seed;
      cfg.readout.model.seed = *g.seed;
    }
    std::vector<std::string> formats = cfg.output.formats;
    if (g.format == "all") formats = {"csv", "json", "svg"};
    else if (!g.format.empty()) formats = {g.format};
    const fs::path dir = g.out_dir.empty() ? fs::path(cfg.output.directory) : fs::path(g.out_dir);
    fs::create_directories(dir);
    run.emplace(std::move(cfg), dir, formats, g.jobs);

    if (sub == sp) code = cmd_sparams(*run, band, step, netlist);
    else if (sub == md) code = cmd_modes(*run, mode_band);
    else if (sub == gm) code = cmd_gamma_map(*run, kappa);
    else if (sub == rs) code = cmd_reset_sweep(*run);
    else if (sub == rb) code = cmd_reset_bench(*run, protocol);
    else if (sub == th) code = cmd_thermal(*run, out, freq, temp, pop);
    else if (sub == ff) code = cmd_fit_filter(*run);
    if (code == kPartial) status = "partial";
    if (code == kNumericError) status = "numeric_error";
  } catch (const ConfigError& e) {
    code = kConfigError;
    status = "config_error";
    message = e.what();
  } catch (const UsageError& e) {
    code = kConfigError;
    status = "config_error";
    message = e.what();
  } catch (const Error& e) {
    code = kNumericError;
    status = "numeric_error";
    message = e.what();
  } catch (const fs::filesystem_error& e) {
    code = kConfigError;
    status = "config_error";
    message = e.what();
  }
  if (!message.empty()) err << "resetsim " << sub->get_name() << ": " << message << "\n";

  const fs::path dir = run ? run->dir() : (g.out_dir.empty() ? fs::path() : fs::path(g.out_dir));
  if (!dir.empty()) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest{{"tool", "resetsim"},
                  {"version", RESETSIM_VERSION},
                  {"subcommand", sub->get_name()},
                  {"args", args},
                  {"status", status},
                  {"exit_code", code},
                  {"started_utc", started_utc},
                  {"wall_time_s", wall}};
    if (run) {
      const auto dump = config::dump_config(run->cfg());
      manifest["config_fnv1a64"] = config::fingerprint(dump);
      manifest["config"] = json::parse(dump);
      manifest["seed"] = run->cfg().seed;
      manifest["jobs"] = run->jobs();
      manifest["outputs"] = run->manifest_entries();
      manifest["warnings"] = run->warnings();
    }
    if (!message.empty()) manifest["error"] = message;
    try {
      fs::create_directories(dir);
      io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
      err << "resetsim: cannot write manifest: " << e.what() << "\n";
    }
  }
  return code;
}

}  // namespace resetsim::cli
