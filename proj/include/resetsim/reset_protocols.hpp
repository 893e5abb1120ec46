#pragma once

// Reset experiments built on the open-system model: plateau sweeps, fringe
// line-cuts, e-g / f-e / concatenated benchmarks and the analytic rate map.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resetsim/measurement.hpp"
#include "resetsim/open_system.hpp"
#include "resetsim/pulse.hpp"

namespace resetsim::protocols {

using dynamics::SystemParams;

enum class PreparedState { G = 0, E = 1, F = 2 };

/// Populations (g, e, f) produced by imperfect state preparation.
struct PreparationModel {
  std::array<double, 3> g{1.0, 0.0, 0.0};
  std::array<double, 3> e{0.0, 1.0, 0.0};
  std::array<double, 3> f{0.0, 0.0, 1.0};

  static PreparationModel ideal() { return {}; }
  /// g thermal at 41 mK and 4.86 GHz; e 92.56 % with 0.76 % f leakage; f 65.8 %.
  static PreparationModel device_defaults();

  /// Row for `state` folded onto `levels` levels (higher levels merge into the top one).
  std::vector<double> populations(PreparedState state, int levels) const;
};

/// Outcome of one simulated pulse.
struct QubitOutcome {
  std::vector<double> populations;  ///< qubit level populations
  double mode_occupation = 0.0;
  double trace_error = 0.0;
  std::size_t steps = 0;
};

QubitOutcome simulate_pulse(const SystemParams& params, const dynamics::PulseSchedule& schedule,
                            std::span<const double> initial_qubit_populations,
                            const dynamics::EvolveOptions& options = {});

/// Thermal steady-state excited population n / (1 + 2 n) of a two-level qubit
/// resonant with the mode.
double thermal_baseline(const SystemParams& params);

struct SweepSpec {
  std::vector<double> plateau_s;         ///< t_p grid, increasing, >= 0
  std::vector<double> plateau_freq_hz;   ///< plateau qubit frequencies
  PreparedState initial = PreparedState::E;
  SystemParams params;
  double rise_s = 2e-9;
  dynamics::EvolveOptions evolve;

  void validate() const;
};

struct CellFailure {
  std::size_t freq_index = 0;
  std::size_t tp_index = 0;
  std::string message;
};

struct SweepMap {
  std::vector<double> plateau_freq_hz;
  std::vector<double> plateau_s;
  /// population[freq][tp] of the initially prepared excited level; NaN for failed cells.
  std::vector<std::vector<double>> population;
  std::vector<CellFailure> failures;
};

/// Final population of the prepared level after pulse and return ramp for every
/// (frequency, t_p) cell. Within a row the plateau evolution is shared and a
/// fall ramp is branched off at each t_p. Rows run on `jobs` threads.
SweepMap reset_sweep(const SweepSpec& spec, unsigned jobs = 1);

struct FringeFit {
  std::vector<double> plateau_s;
  std::vector<double> population;
  double envelope_s = 0.0;        ///< 1 / decay rate of the population envelope
  double first_minimum_s = 0.0;   ///< NaN when the trace has no interior minimum
  double oscillation_rad_s = 0.0;
  bool oscillatory = false;
  bool fit_ok = false;
  std::string warning;
};

/// Envelope and first minimum of a population trace p(t_p). Oscillating traces
/// are fitted to A e^{-t/tau} cos^2(W t - phi) + B; monotone ones to A e^{-t/tau} + B.
FringeFit analyze_fringe(std::span<const double> plateau_s, std::span<const double> population);

/// Resonant plateau sweep from |e> followed by analyze_fringe.
FringeFit fringe_linecut(const SystemParams& params, std::span<const double> plateau_s, double rise_s = 2e-9);

struct BenchmarkOptions {
  double plateau_s = 200e-9;
  double rise_s = 2e-9;
  PreparationModel preparation = PreparationModel::device_defaults();
  measurement::ReadoutModel readout = measurement::ReadoutModel::default_model(3);
  /// Override of the plateau frequency (f-e benchmark only).
  std::optional<double> plateau_freq_hz;
  dynamics::EvolveOptions evolve;
};

struct ResetResult {
  std::string protocol;
  std::vector<std::string> prepared;               ///< row labels
  std::vector<std::vector<double>> before;         ///< true populations per row
  std::vector<std::vector<double>> after;
  measurement::AssignmentMatrix assigned_before;
  measurement::AssignmentMatrix assigned_after;
  /// Headline figure: assigned excited (not-g) fraction for e-g, assigned f otherwise.
  double residual = 0.0;
  double residual_true = 0.0;
  double steady_state = 0.0;
  std::vector<std::string> warnings;
};

/// Plateau at the dissipator frequency, rows prepared |g> and |e>.
ResetResult benchmark_eg_reset(const SystemParams& params, const BenchmarkOptions& options = {});

/// e-f transition resonant with the dissipator (w_q = w_d - alpha); rows |g>, |e>, |f>.
ResetResult benchmark_fe_reset(const SystemParams& params, const BenchmarkOptions& options = {});

/// f-e stage followed by e-g stage in one piecewise pulse; `flipped` swaps the order.
ResetResult concatenated_reset(const SystemParams& params, const BenchmarkOptions& options = {},
                               bool flipped = false);

/// Piecewise schedule that walks the ladder down from level `stages`:
/// plateau k makes the (k, k-1) transition resonant, w_q = w_d - (k - 1) alpha.
dynamics::PulseSchedule ladder_schedule(const SystemParams& params, int stages, double plateau_s,
                                        double rise_s);

struct GammaMap {
  std::vector<double> coupling_hz;
  std::vector<double> detuning_hz;
  /// gamma[g index][detuning index] in rad/s.
  std::vector<std::vector<double>> gamma;
};

GammaMap gamma_map(double kappa_rad_s, std::span<const double> coupling_hz, std::span<const double> detuning_hz);

struct SimultaneousResult {
  std::vector<double> joint_pe;        ///< per qubit, shared-mode simulation
  std::vector<double> independent_pe;  ///< per qubit, simulated alone
  double max_difference = 0.0;
};

/// Qubits prepared in |e> and pulsed to `plateau_freq_hz` at the same time,
/// sharing one dissipator mode, compared with one-at-a-time simulations.
SimultaneousResult simultaneous_reset(const SystemParams& params, std::span<const double> plateau_freq_hz,
                                      double plateau_s, double rise_s = 2e-9,
                                      const dynamics::EvolveOptions& evolve = {});

}  // namespace resetsim::protocols
