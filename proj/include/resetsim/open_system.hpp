#pragma once

// Lindblad dynamics of flux-tunable transmons exchanging excitations with one
// lossy dissipator mode, in the frame rotating at the mode frequency:
//
//   H/hbar = sum_q [ D_q(t) b_q^+ b_q + (alpha_q / 2) b_q^+ b_q^+ b_q b_q + g_q (b_q^+ a + b_q a^+) ]
//
// with D_q(t) = w_q(t) - w_d and collapse operators sqrt(k (1 + n)) a,
// sqrt(k n) a^+ and sqrt(1 / T1_q) b_q. Basis order: qubit_0 x ... x mode.

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "resetsim/pulse.hpp"

namespace resetsim::dynamics {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

struct SystemParams {
  double qubit_max_freq_rad_s = 0.0;
  double anharmonicity_rad_s = 0.0;  ///< negative for a transmon
  double coupling_rad_s = 0.0;
  double dissipator_freq_rad_s = 0.0;
  double dissipator_kappa_rad_s = 0.0;
  double qubit_t1_s = 0.0;           ///< 0 disables intrinsic relaxation
  double bath_temperature_k = 0.0;   ///< dissipator bath
  int qubit_levels = 2;
  int fock_cutoff = 5;

  /// Device defaults: 4.86 GHz qubit, -220 MHz anharmonicity, g = 10 MHz,
  /// dissipator at 4.37 GHz with kappa = 15 MHz, T1 = 35 us, cold bath.
  static SystemParams device_defaults();

  /// Bose occupation of the dissipator at the bath temperature.
  double thermal_occupation() const;
  void validate() const;
};

/// Qubit decay rate through a lossy mode,
/// G = (k - Re sqrt(-16 g^2 + (k - 2 i D)^2)) / 2, principal square root.
double purcell_decay_rate(double kappa_rad_s, double coupling_rad_s, double detuning_rad_s);

struct MaxRate {
  bool saturates = false;  ///< g >= kappa / 4
  double gamma_max = 0.0;  ///< attained at zero detuning
};

MaxRate max_rate_condition(double kappa_rad_s, double coupling_rad_s);

/// 1 / (exp(hbar w / k T) - 1); zero at T = 0.
double bose_occupation(double omega_rad_s, double temperature_k);

Matrix lowering_operator(int levels);
Matrix kron(const Matrix& a, const Matrix& b);

/// Thermal state of a truncated oscillator, renormalized after truncation.
Matrix thermal_state(int levels, double nbar);
/// Diagonal state from (possibly shorter) populations.
Matrix diagonal_state(int levels, std::span<const double> populations);

/// Population of the top Fock level in the truncated thermal state.
double thermal_tail_population(int levels, double nbar);

class DensityMatrix {
 public:
  DensityMatrix(Matrix rho, std::vector<int> dims);

  /// Tensor product of per-subsystem states, in order.
  static DensityMatrix product(const std::vector<Matrix>& factors);

  const Matrix& matrix() const noexcept { return rho_; }
  const std::vector<int>& dims() const noexcept { return dims_; }

  Complex trace() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
  /// Diagonal of the reduced state of one subsystem.
  std::vector<double> populations(std::size_t subsystem) const;
  double mean_number(std::size_t subsystem) const;

 private:
  Matrix rho_;
  std::vector<int> dims_;
};

/// H(t) = H0 + sum_k c_k(t) diag(d_k). Time dependence enters only through
/// operators diagonal in the product basis (frequency modulation).
struct TimeDependentHamiltonian {
  struct Term {
    Eigen::VectorXd diagonal;
    std::function<double(double)> coefficient;
  };

  Matrix static_part;
  std::vector<Term> terms;
  /// Times where a coefficient has a kink; integration steps land on them.
  std::vector<double> breakpoints;

  Matrix at(double t) const;
  Eigen::Index dim() const { return static_part.rows(); }
};

struct TransmonSpec {
  int levels = 2;
  double anharmonicity_rad_s = 0.0;
  double coupling_rad_s = 0.0;
  double t1_s = 0.0;
  PulseSchedule schedule{0.0, {}, 0.0};
};

struct OpenSystemModel {
  TimeDependentHamiltonian hamiltonian;
  std::vector<Matrix> collapse;
  std::vector<int> dims;  ///< qubits first, mode last
};

/// Shared-mode model for any number of transmons. `mode` supplies the
/// dissipator frequency, kappa, cutoff and bath temperature.
/// Throws DomainError when the thermal population of the top Fock level exceeds 1e-4.
OpenSystemModel build_model(const SystemParams& mode, const std::vector<TransmonSpec>& qubits);

/// Single-transmon model driven by `schedule`.
OpenSystemModel build_model(const SystemParams& params, const PulseSchedule& schedule);

/// Time-dependent Hamiltonian of the single-transmon model.
TimeDependentHamiltonian build_hamiltonian(const SystemParams& params, const PulseSchedule& schedule);

/// Hamiltonian snapshot with the qubit held at `qubit_freq_rad_s`.
Matrix build_hamiltonian(const SystemParams& params, double qubit_freq_rad_s);

std::vector<Matrix> collapse_operators(const SystemParams& params);

/// Initial state: qubit populations (g, e, f, ...) times the thermal mode.
DensityMatrix initial_state(const SystemParams& params, std::span<const double> qubit_populations);

struct EvolveOptions {
  double max_step_s = 0.1e-9;
  /// Steps per inverse characteristic rate of H(t) and the dissipators.
  double steps_per_rate = 50.0;
  /// Forces a fixed step (still capped so output times are hit exactly).
  double fixed_step_s = 0.0;
  double positivity_tolerance = 1e-6;
  bool check_positivity = true;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::size_t steps = 0;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
};

/// Non-autonomous RK4 on the vectorized Lindblad equation
/// d rho / dt = -i [H(t), rho] + sum_L D[L] rho. The state is recorded at
/// every entry of `times` (increasing, first entry is the start time).
Trajectory evolve_lindblad(const DensityMatrix& rho0, const TimeDependentHamiltonian& hamiltonian,
                           const std::vector<Matrix>& collapse, std::span<const double> times,
                           const EvolveOptions& options = {});

/// Reusable integrator: builds the Liouvillian once and advances states.
class LindbladIntegrator {
 public:
  LindbladIntegrator(const TimeDependentHamiltonian& hamiltonian, const std::vector<Matrix>& collapse,
                     EvolveOptions options = {});
  ~LindbladIntegrator();
  LindbladIntegrator(LindbladIntegrator&&) noexcept;
  LindbladIntegrator& operator=(LindbladIntegrator&&) noexcept;

  /// Advance `rho` from t0 to t1 in place; returns the number of RK4 steps.
  std::size_t advance(Eigen::VectorXcd& vec_rho, double t0, double t1) const;
  /// Step size used on [t0, t1].
  double step_for(double t0, double t1) const;

  Eigen::Index dim() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXcd vectorize(const Matrix& rho);
Matrix unvectorize(const Eigen::VectorXcd& v, Eigen::Index dim);

}  // namespace resetsim::dynamics
