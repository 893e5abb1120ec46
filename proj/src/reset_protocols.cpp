#include "resetsim/reset_protocols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>

#include "resetsim/errors.hpp"
#include "resetsim/optimize.hpp"
#include "resetsim/rng.hpp"
#include "resetsim/units.hpp"

namespace resetsim::protocols {

using dynamics::DensityMatrix;
using dynamics::LindbladIntegrator;
using dynamics::PulseSchedule;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string label(PreparedState s) { return measurement::state_label(static_cast<std::size_t>(s)); }

template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

measurement::ReadoutModel reseeded(measurement::ReadoutModel m, std::uint64_t stream) {
  m.seed = derive_seed(m.seed, stream);
  return m;
}

}  // namespace

PreparationModel PreparationModel::device_defaults() {
  PreparationModel p;
  const double pe = measurement::thermal_population(angular(ghz(4.86)), mk(41.0));
  p.g = {1.0 - pe, pe, 0.0};
  p.e = {0.0668, 0.9256, 0.0076};
  p.f = {0.335, 0.007, 0.658};
  return p;
}

std::vector<double> PreparationModel::populations(PreparedState state, int levels) const {
  if (levels < 2 || levels > 3) throw DomainError("levels must be 2 or 3");
  const auto& row = state == PreparedState::G ? g : state == PreparedState::E ? e : f;
  std::vector<double> out(row.begin(), row.begin() + levels);
  for (std::size_t k = levels; k < row.size(); ++k) out.back() += row[k];
  return out;
}

QubitOutcome simulate_pulse(const SystemParams& params, const PulseSchedule& schedule,
                            std::span<const double> initial, const dynamics::EvolveOptions& options) {
  const auto model = dynamics::build_model(params, schedule);
  const auto rho0 = dynamics::initial_state(params, initial);
  const std::array<double, 2> times{0.0, schedule.duration()};
  const auto traj = dynamics::evolve_lindblad(rho0, model.hamiltonian, model.collapse, times, options);
  QubitOutcome out;
  out.populations = traj.states.back().populations(0);
  out.mode_occupation = traj.states.back().mean_number(1);
  out.trace_error = traj.max_trace_error;
  out.steps = traj.steps;
  return out;
}

double thermal_baseline(const SystemParams& params) {
  const double n = params.thermal_occupation();
  return n / (1.0 + 2.0 * n);
}

// ---------------------------------------------------------------------------

void SweepSpec::validate() const {
  if (plateau_s.empty() || plateau_freq_hz.empty()) throw DomainError("sweep grids must be nonempty");
  for (std::size_t i = 0; i < plateau_s.size(); ++i) {
    if (!(plateau_s[i] >= 0.0)) throw DomainError("plateau times must be >= 0");
    if (i > 0 && !(plateau_s[i] > plateau_s[i - 1])) throw DomainError("plateau times must be increasing");
  }
  for (std::size_t i = 0; i < plateau_freq_hz.size(); ++i) {
    if (!(plateau_freq_hz[i] > 0.0) || !std::isfinite(plateau_freq_hz[i]))
      throw DomainError("plateau frequencies must be > 0");
    if (i > 0 && !(plateau_freq_hz[i] > plateau_freq_hz[i - 1]))
      throw DomainError("plateau frequencies must be increasing");
  }
  if (!(rise_s >= 0.0)) throw DomainError("rise time must be >= 0");
  if (static_cast<int>(initial) >= params.qubit_levels) throw DomainError("initial state not in qubit space");
  params.validate();
}

SweepMap reset_sweep(const SweepSpec& spec, unsigned jobs) {
  spec.validate();
  const auto& p = spec.params;
  const auto prep = PreparationModel::ideal().populations(spec.initial, p.qubit_levels);
  const auto level = static_cast<std::size_t>(spec.initial);
  const double idle = p.qubit_max_freq_rad_s;
  const double tp_max = spec.plateau_s.back();
  const double rise = spec.rise_s;

  SweepMap map;
  map.plateau_freq_hz = spec.plateau_freq_hz;
  map.plateau_s = spec.plateau_s;
  map.population.assign(spec.plateau_freq_hz.size(), std::vector<double>(spec.plateau_s.size(), kNaN));
  std::mutex failure_lock;

  parallel_for(spec.plateau_freq_hz.size(), jobs, [&](std::size_t row) {
    std::size_t col = 0;
    try {
      const double wp = angular(spec.plateau_freq_hz[row]);
      const auto hold = dynamics::build_model(p, PulseSchedule::square(idle, wp, tp_max, rise));
      const auto fall = dynamics::build_model(p, PulseSchedule::square(idle, wp, 0.0, rise));
      const LindbladIntegrator hold_int(hold.hamiltonian, hold.collapse, spec.evolve);
      const LindbladIntegrator fall_int(fall.hamiltonian, fall.collapse, spec.evolve);

      Eigen::VectorXcd v = dynamics::vectorize(dynamics::initial_state(p, prep).matrix());
      hold_int.advance(v, 0.0, rise);
      double t = rise;
      for (; col < spec.plateau_s.size(); ++col) {
        const double target = rise + spec.plateau_s[col];
        hold_int.advance(v, t, target);
        t = target;
        Eigen::VectorXcd w = v;
        fall_int.advance(w, rise, 2.0 * rise);
        const Eigen::Index n = hold.hamiltonian.dim();
        const DensityMatrix rho(dynamics::unvectorize(w, n), hold.dims);
        if (spec.evolve.check_positivity && !(rho.min_eigenvalue() >= -spec.evolve.positivity_tolerance))
          throw StepSizeError("density matrix lost positivity; reduce the integrator step");
        map.population[row][col] = rho.populations(0)[level];
      }
    } catch (const Error& e) {
      std::lock_guard lock(failure_lock);
      for (; col < spec.plateau_s.size(); ++col) map.failures.push_back({row, col, e.what()});
    }
  });
  std::sort(map.failures.begin(), map.failures.end(), [](const CellFailure& a, const CellFailure& b) {
    return std::tie(a.freq_index, a.tp_index) < std::tie(b.freq_index, b.tp_index);
  });
  return map;
}

// ---------------------------------------------------------------------------

namespace {

/// Vertex of the parabola through three samples.
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d0 = (y1 - y0) / (x1 - x0);
  const double d1 = (y2 - y1) / (x2 - x1);
  const double curv = (d1 - d0) / (x2 - x0);
  if (!(curv > 0.0)) return x1;
  const double v = 0.5 * (x0 + x1) - d0 / (2.0 * curv);
  return std::clamp(v, x0, x2);
}

/// Slope and intercept of log(y) against x.
std::pair<double, double> loglinear(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ly = std::log(y[i]);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

}  // namespace

FringeFit analyze_fringe(std::span<const double> t, std::span<const double> p) {
  if (t.size() != p.size() || t.size() < 5) throw UsageError("fringe analysis needs >= 5 matching samples");
  FringeFit fit;
  fit.plateau_s.assign(t.begin(), t.end());
  fit.population.assign(p.begin(), p.end());
  fit.first_minimum_s = kNaN;
  const std::size_t n = t.size();
  const double range = *std::max_element(p.begin(), p.end()) - *std::min_element(p.begin(), p.end());

  std::vector<std::size_t> minima, maxima;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (p[i] < p[i - 1] && p[i] <= p[i + 1]) minima.push_back(i);
    if (p[i] > p[i - 1] && p[i] >= p[i + 1]) maxima.push_back(i);
  }
  for (std::size_t m : minima) {
    const auto later = std::find_if(maxima.begin(), maxima.end(), [&](std::size_t j) { return j > m; });
    if (later != maxima.end() && p[*later] - p[m] > 1e-3 * range) {
      fit.oscillatory = true;
      break;
    }
  }
  if (!minima.empty()) {
    const std::size_t i = minima.front();
    fit.first_minimum_s = parabola_vertex(t[i - 1], p[i - 1], t[i], p[i], t[i + 1], p[i + 1]);
  }

  const double tail = *std::min_element(p.begin() + static_cast<std::ptrdiff_t>(n / 2), p.end());
  const double baseline0 = fit.oscillatory ? tail : std::min(tail, p.back());
  const double amp0 = p.front() - baseline0;

  // Peak envelope, used as the initial guess and the fallback.
  std::vector<double> px{t[0]}, py{std::max(amp0, 1e-300)};
  for (std::size_t j : maxima) {
    if (p[j] - baseline0 > 1e-3 * amp0) {
      px.push_back(t[j]);
      py.push_back(p[j] - baseline0);
    }
  }
  double tau0 = (t.back() - t.front()) / 4.0;
  if (px.size() >= 2) {
    const auto [slope, icpt] = loglinear(px, py);
    if (slope < 0.0) tau0 = -1.0 / slope;
  } else if (!fit.oscillatory) {
    const double target = baseline0 + amp0 / std::exp(1.0);
    for (std::size_t i = 1; i < n; ++i) {
      if (p[i] <= target) {
        tau0 = t[i] - t[0];
        break;
      }
    }
  }

  const double t0 = t[0];
  std::vector<double> start;
  std::function<double(std::span<const double>, double)> model;
  if (fit.oscillatory) {
    double w0;
    double phi0 = 0.0;
    if (minima.size() >= 2) {
      w0 = kPi / (t[minima[1]] - t[minima[0]]);
      phi0 = w0 * (fit.first_minimum_s - t0) - kPi / 2.0;
    } else {
      w0 = kPi / (2.0 * (fit.first_minimum_s - t0));
    }
    start = {amp0, tau0, w0, phi0, baseline0};
    model = [t0](std::span<const double> q, double x) {
      const double c = std::cos(q[2] * (x - t0) - q[3]);
      return q[0] * std::exp(-(x - t0) / std::abs(q[1])) * c * c + q[4];
    };
  } else {
    start = {amp0, tau0, baseline0};
    model = [t0](std::span<const double> q, double x) { return q[0] * std::exp(-(x - t0) / std::abs(q[1])) + q[2]; };
  }

  // Fit in scaled units so all parameters are O(1).
  const double ts = tau0;
  std::vector<double> scaled = start;
  scaled[1] /= ts;
  if (fit.oscillatory) scaled[2] *= ts;
  auto unscale = [&](std::span<const double> q) {
    std::vector<double> u(q.begin(), q.end());
    u[1] *= ts;
    if (fit.oscillatory) u[2] /= ts;
    return u;
  };
  const auto res = optimize::levenberg_marquardt(
      [&](std::span<const double> q, std::span<double> out) {
        const auto u = unscale(q);
        for (std::size_t i = 0; i < n; ++i) out[i] = model(u, t[i]) - p[i];
      },
      scaled, n);
  const auto best = unscale(res.params);
  const double rel = res.rms_residual / std::max(std::abs(best[0]), 1e-300);
  fit.fit_ok = std::isfinite(rel) && rel < 0.05 && std::abs(best[1]) > 0.0;
  if (fit.fit_ok) {
    fit.envelope_s = std::abs(best[1]);
    if (fit.oscillatory) fit.oscillation_rad_s = std::abs(best[2]);
  } else {
    fit.envelope_s = tau0;
    if (fit.oscillatory) fit.oscillation_rad_s = start[2];
    fit.warning = "damped-oscillation fit failed (relative rms " + std::to_string(rel) +
                  "); envelope taken from the peak log-linear estimate";
  }
  return fit;
}

FringeFit fringe_linecut(const SystemParams& params, std::span<const double> plateau_s, double rise_s) {
  SweepSpec spec;
  spec.plateau_s.assign(plateau_s.begin(), plateau_s.end());
  spec.plateau_freq_hz = {ordinary(params.dissipator_freq_rad_s)};
  spec.initial = PreparedState::E;
  spec.params = params;
  spec.rise_s = rise_s;
  const auto map = reset_sweep(spec, 1);
  if (!map.failures.empty()) throw StepSizeError(map.failures.front().message);
  return analyze_fringe(map.plateau_s, map.population.front());
}

// ---------------------------------------------------------------------------

namespace {

ResetResult run_benchmark(const std::string& name, const SystemParams& params, const PulseSchedule& schedule,
                          const std::vector<PreparedState>& rows, const BenchmarkOptions& options) {
  ResetResult r;
  r.protocol = name;
  r.steady_state = thermal_baseline(params);
  for (auto s : rows) {
    const auto before = options.preparation.populations(s, params.qubit_levels);
    const auto out = simulate_pulse(params, schedule, before, options.evolve);
    r.prepared.push_back(label(s));
    r.before.push_back(before);
    r.after.push_back(out.populations);
  }
  r.assigned_before = measurement::assignment_matrix(r.before, reseeded(options.readout, 0));
  r.assigned_after = measurement::assignment_matrix(r.after, reseeded(options.readout, 1));
  return r;
}

std::size_t row_of(const ResetResult& r, const std::string& l) {
  return static_cast<std::size_t>(std::find(r.prepared.begin(), r.prepared.end(), l) - r.prepared.begin());
}

}  // namespace

ResetResult benchmark_eg_reset(const SystemParams& params, const BenchmarkOptions& options) {
  params.validate();
  const auto sched = PulseSchedule::square(params.qubit_max_freq_rad_s, params.dissipator_freq_rad_s,
                                           options.plateau_s, options.rise_s);
  auto r = run_benchmark("eg", params, sched, {PreparedState::G, PreparedState::E}, options);
  const auto e = row_of(r, "e");
  r.residual = 1.0 - r.assigned_after(e, 0);
  r.residual_true = 1.0 - r.after[e][0];
  return r;
}

ResetResult benchmark_fe_reset(const SystemParams& params, const BenchmarkOptions& options) {
  if (params.qubit_levels != 3) throw DomainError("f-e reset needs a 3-level transmon");
  SystemParams p = params;
  p.fock_cutoff = std::max(p.fock_cutoff, 7);
  p.validate();
  const double resonant = p.dissipator_freq_rad_s - p.anharmonicity_rad_s;
  const double plateau = options.plateau_freq_hz ? angular(*options.plateau_freq_hz) : resonant;
  const auto sched = PulseSchedule::square(p.qubit_max_freq_rad_s, plateau, options.plateau_s, options.rise_s);
  auto r = run_benchmark("fe", p, sched, {PreparedState::G, PreparedState::E, PreparedState::F}, options);
  if (std::abs(plateau - resonant) > p.dissipator_kappa_rad_s) {
    r.warnings.push_back("plateau misses the e-f resonance by " +
                         std::to_string(ordinary(plateau - resonant) / 1e6) + " MHz (more than kappa)");
  }
  const auto f = row_of(r, "f");
  r.residual = r.assigned_after(f, 2);
  r.residual_true = r.after[f][2];
  return r;
}

PulseSchedule ladder_schedule(const SystemParams& params, int stages, double plateau_s, double rise_s) {
  if (stages < 1) throw DomainError("ladder needs at least one stage");
  std::vector<dynamics::Plateau> plateaus;
  for (int k = stages; k >= 1; --k) {
    plateaus.push_back({params.dissipator_freq_rad_s - (k - 1) * params.anharmonicity_rad_s, plateau_s});
  }
  return PulseSchedule(params.qubit_max_freq_rad_s, std::move(plateaus), rise_s);
}

ResetResult concatenated_reset(const SystemParams& params, const BenchmarkOptions& options, bool flipped) {
  if (params.qubit_levels != 3) throw DomainError("concatenated reset needs a 3-level transmon");
  SystemParams p = params;
  p.fock_cutoff = std::max(p.fock_cutoff, 7);
  p.validate();
  auto sched = ladder_schedule(p, 2, options.plateau_s, options.rise_s);
  if (flipped) {
    auto plateaus = sched.plateaus();
    std::reverse(plateaus.begin(), plateaus.end());
    sched = PulseSchedule(p.qubit_max_freq_rad_s, std::move(plateaus), options.rise_s);
  }
  auto r = run_benchmark(flipped ? "concatenated-flipped" : "concatenated", p, sched,
                         {PreparedState::G, PreparedState::E, PreparedState::F}, options);
  const auto f = row_of(r, "f");
  r.residual = r.assigned_after(f, 2);
  r.residual_true = r.after[f][2];
  return r;
}

// ---------------------------------------------------------------------------

GammaMap gamma_map(double kappa, std::span<const double> coupling_hz, std::span<const double> detuning_hz) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
  if (coupling_hz.empty() || detuning_hz.empty()) throw DomainError("gamma map grids must be nonempty");
  GammaMap m;
  m.coupling_hz.assign(coupling_hz.begin(), coupling_hz.end());
  m.detuning_hz.assign(detuning_hz.begin(), detuning_hz.end());
  for (double g : coupling_hz) {
    if (!(g >= 0.0)) throw DomainError("coupling must be >= 0");
    std::vector<double> row;
    for (double d : detuning_hz) row.push_back(dynamics::purcell_decay_rate(kappa, angular(g), angular(d)));
    m.gamma.push_back(std::move(row));
  }
  return m;
}

SimultaneousResult simultaneous_reset(const SystemParams& params, std::span<const double> plateau_freq_hz,
                                      double plateau_s, double rise_s, const dynamics::EvolveOptions& evolve) {
  if (plateau_freq_hz.empty()) throw DomainError("at least one qubit is required");
  params.validate();
  std::vector<dynamics::TransmonSpec> qubits;
  for (double f : plateau_freq_hz) {
    dynamics::TransmonSpec q;
    q.levels = params.qubit_levels;
    q.anharmonicity_rad_s = params.anharmonicity_rad_s;
    q.coupling_rad_s = params.coupling_rad_s;
    q.t1_s = params.qubit_t1_s;
    q.schedule = PulseSchedule::square(params.qubit_max_freq_rad_s, angular(f), plateau_s, rise_s);
    qubits.push_back(std::move(q));
  }
  const auto model = dynamics::build_model(params, qubits);

  std::vector<dynamics::Matrix> factors;
  const auto excited = PreparationModel::ideal().populations(PreparedState::E, params.qubit_levels);
  for (std::size_t k = 0; k < qubits.size(); ++k) factors.push_back(dynamics::diagonal_state(params.qubit_levels, excited));
  factors.push_back(dynamics::thermal_state(params.fock_cutoff, params.thermal_occupation()));
  const auto rho0 = DensityMatrix::product(factors);
  const std::array<double, 2> times{0.0, qubits.front().schedule.duration()};
  const auto traj = dynamics::evolve_lindblad(rho0, model.hamiltonian, model.collapse, times, evolve);

  SimultaneousResult r;
  for (std::size_t k = 0; k < qubits.size(); ++k) {
    r.joint_pe.push_back(traj.states.back().populations(k)[1]);
    const auto alone = simulate_pulse(params, qubits[k].schedule, excited, evolve);
    r.independent_pe.push_back(alone.populations[1]);
    r.max_difference = std::max(r.max_difference, std::abs(r.joint_pe[k] - r.independent_pe[k]));
  }
  return r;
}

}  // namespace resetsim::protocols
