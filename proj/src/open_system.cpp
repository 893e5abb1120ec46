#include "resetsim/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "resetsim/errors.hpp"
#include "resetsim/units.hpp"

namespace resetsim::dynamics {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

/// `op` acting on subsystem `k` of the product space `dims`.
Matrix embed(const Matrix& op, std::size_t k, const std::vector<int>& dims) {
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t i = 0; i < dims.size(); ++i) out = kron(out, i == k ? op : identity(dims[i]));
  return out;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

SystemParams SystemParams::device_defaults() {
  SystemParams p;
  p.qubit_max_freq_rad_s = angular(ghz(4.86));
  p.anharmonicity_rad_s = -angular(mhz(220.0));
  p.coupling_rad_s = angular(mhz(10.0));
  p.dissipator_freq_rad_s = angular(ghz(4.37));
  p.dissipator_kappa_rad_s = angular(mhz(15.0));
  p.qubit_t1_s = us(35.0);
  p.bath_temperature_k = mk(49.0);
  p.qubit_levels = 2;
  p.fock_cutoff = 5;
  return p;
}

double SystemParams::thermal_occupation() const {
  return bose_occupation(dissipator_freq_rad_s, bath_temperature_k);
}

void SystemParams::validate() const {
  require_finite(qubit_max_freq_rad_s, "qubit_max_freq");
  require_finite(anharmonicity_rad_s, "anharmonicity");
  require_finite(coupling_rad_s, "coupling");
  require_finite(dissipator_freq_rad_s, "dissipator_freq");
  require_finite(dissipator_kappa_rad_s, "dissipator_kappa");
  require_finite(qubit_t1_s, "qubit_t1");
  require_finite(bath_temperature_k, "bath_temperature");
  if (qubit_max_freq_rad_s <= 0.0) throw DomainError("qubit_max_freq must be > 0");
  if (dissipator_freq_rad_s <= 0.0) throw DomainError("dissipator_freq must be > 0");
  if (!(anharmonicity_rad_s < 0.0)) throw DomainError("anharmonicity must be negative for a transmon");
  if (!(dissipator_kappa_rad_s > 0.0)) throw DomainError("dissipator_kappa must be > 0");
  if (coupling_rad_s < 0.0) throw DomainError("coupling must be >= 0");
  if (qubit_t1_s < 0.0) throw DomainError("qubit_t1 must be >= 0 (0 disables)");
  if (bath_temperature_k < 0.0) throw DomainError("bath_temperature must be >= 0");
  if (qubit_levels != 2 && qubit_levels != 3) throw DomainError("qubit_levels must be 2 or 3");
  if (fock_cutoff < 3) throw DomainError("fock_cutoff must be >= 3");
}

double purcell_decay_rate(double kappa, double g, double delta) {
  const Complex k{kappa, -2.0 * delta};
  const Complex root = std::sqrt(Complex{-16.0 * g * g, 0.0} + k * k);
  return 0.5 * (kappa - root.real());
}

MaxRate max_rate_condition(double kappa, double g) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
  MaxRate r;
  r.saturates = g >= kappa / 4.0;
  r.gamma_max = r.saturates ? kappa / 2.0 : purcell_decay_rate(kappa, g, 0.0);
  return r;
}

double bose_occupation(double omega, double temperature) {
  if (temperature < 0.0) throw DomainError("temperature must be >= 0");
  if (temperature == 0.0) return 0.0;
  const double x = kHbar * omega / (kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

Matrix lowering_operator(int levels) {
  if (levels < 1) throw DomainError("levels must be >= 1");
  Matrix b = Matrix::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
  return b;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix thermal_state(int levels, double nbar) {
  if (nbar < 0.0) throw DomainError("nbar must be >= 0");
  const double r = nbar / (1.0 + nbar);
  Eigen::VectorXd p(levels);
  double w = 1.0;
  for (int n = 0; n < levels; ++n, w *= r) p(n) = w;
  p /= p.sum();
  return p.cast<Complex>().asDiagonal();
}

Matrix diagonal_state(int levels, std::span<const double> populations) {
  if (populations.size() > static_cast<std::size_t>(levels))
    throw DomainError("more populations than levels");
  Matrix rho = Matrix::Zero(levels, levels);
  for (std::size_t i = 0; i < populations.size(); ++i) {
    if (!(populations[i] >= 0.0)) throw DomainError("populations must be >= 0");
    rho(i, i) = populations[i];
  }
  return rho;
}

double thermal_tail_population(int levels, double nbar) {
  return thermal_state(levels, nbar)(levels - 1, levels - 1).real();
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(Matrix rho, std::vector<int> dims) : rho_(std::move(rho)), dims_(std::move(dims)) {
  const Eigen::Index n = std::accumulate(dims_.begin(), dims_.end(), Eigen::Index{1},
                                         [](Eigen::Index a, int d) { return a * d; });
  if (rho_.rows() != rho_.cols() || rho_.rows() != n)
    throw UsageError("density matrix size does not match subsystem dims");
}

DensityMatrix DensityMatrix::product(const std::vector<Matrix>& factors) {
  Matrix rho = Matrix::Identity(1, 1);
  std::vector<int> dims;
  for (const auto& f : factors) {
    rho = kron(rho, f);
    dims.push_back(static_cast<int>(f.rows()));
  }
  return DensityMatrix(std::move(rho), std::move(dims));
}

Complex DensityMatrix::trace() const { return rho_.trace(); }

double DensityMatrix::hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const {
  const Matrix h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<double> DensityMatrix::populations(std::size_t subsystem) const {
  if (subsystem >= dims_.size()) throw UsageError("subsystem index out of range");
  Eigen::Index stride = 1;
  for (std::size_t k = subsystem + 1; k < dims_.size(); ++k) stride *= dims_[k];
  const int d = dims_[subsystem];
  std::vector<double> p(d, 0.0);
  for (Eigen::Index i = 0; i < rho_.rows(); ++i) p[(i / stride) % d] += rho_(i, i).real();
  return p;
}

double DensityMatrix::mean_number(std::size_t subsystem) const {
  const auto p = populations(subsystem);
  double n = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) n += static_cast<double>(i) * p[i];
  return n;
}

Matrix TimeDependentHamiltonian::at(double t) const {
  Matrix h = static_part;
  for (const auto& term : terms) h.diagonal() += term.coefficient(t) * term.diagonal.cast<Complex>();
  return h;
}

// ---------------------------------------------------------------------------

OpenSystemModel build_model(const SystemParams& mode, const std::vector<TransmonSpec>& qubits) {
  if (qubits.empty()) throw UsageError("at least one qubit is required");
  SystemParams check = mode;
  check.validate();
  const double nbar = mode.thermal_occupation();
  const double tail = thermal_tail_population(mode.fock_cutoff, nbar);
  if (tail > 1e-4) {
    throw DomainError("fock_cutoff " + std::to_string(mode.fock_cutoff) +
                      " too small: thermal population of the top level is " + std::to_string(tail));
  }

  OpenSystemModel model;
  for (const auto& q : qubits) {
    if (q.levels != 2 && q.levels != 3) throw DomainError("qubit levels must be 2 or 3");
    model.dims.push_back(q.levels);
  }
  model.dims.push_back(mode.fock_cutoff);
  const std::size_t mode_index = qubits.size();
  const Matrix a = embed(lowering_operator(mode.fock_cutoff), mode_index, model.dims);
  const Eigen::Index dim = a.rows();

  auto& h = model.hamiltonian;
  h.static_part = Matrix::Zero(dim, dim);
  std::vector<double> bps;
  for (std::size_t k = 0; k < qubits.size(); ++k) {
    const auto& q = qubits[k];
    if (!(q.anharmonicity_rad_s < 0.0)) throw DomainError("anharmonicity must be negative for a transmon");
    if (q.coupling_rad_s < 0.0) throw DomainError("coupling must be >= 0");
    const Matrix b = embed(lowering_operator(q.levels), k, model.dims);
    const Matrix bd = b.adjoint();
    h.static_part += 0.5 * q.anharmonicity_rad_s * bd * bd * b * b;
    h.static_part += q.coupling_rad_s * (bd * a + b * a.adjoint());

    TimeDependentHamiltonian::Term term;
    term.diagonal = (bd * b).diagonal().real();
    const PulseSchedule sched = q.schedule;
    const double wd = mode.dissipator_freq_rad_s;
    term.coefficient = [sched, wd](double t) {
      const double w = t <= sched.duration() ? sched.frequency(std::max(t, 0.0)) : sched.idle_frequency();
      return w - wd;
    };
    h.terms.push_back(std::move(term));
    for (double t : sched.breakpoints()) bps.push_back(t);

    if (q.t1_s > 0.0) model.collapse.push_back(std::sqrt(1.0 / q.t1_s) * b);
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  h.breakpoints = std::move(bps);

  const double kappa = mode.dissipator_kappa_rad_s;
  model.collapse.insert(model.collapse.begin(), std::sqrt(kappa * (1.0 + nbar)) * a);
  if (nbar > 0.0) model.collapse.insert(model.collapse.begin() + 1, std::sqrt(kappa * nbar) * a.adjoint());
  return model;
}

OpenSystemModel build_model(const SystemParams& params, const PulseSchedule& schedule) {
  TransmonSpec q;
  q.levels = params.qubit_levels;
  q.anharmonicity_rad_s = params.anharmonicity_rad_s;
  q.coupling_rad_s = params.coupling_rad_s;
  q.t1_s = params.qubit_t1_s;
  q.schedule = schedule;
  return build_model(params, std::vector<TransmonSpec>{q});
}

TimeDependentHamiltonian build_hamiltonian(const SystemParams& params, const PulseSchedule& schedule) {
  return build_model(params, schedule).hamiltonian;
}

Matrix build_hamiltonian(const SystemParams& params, double qubit_freq_rad_s) {
  const PulseSchedule hold(qubit_freq_rad_s, {}, 0.0);
  return build_model(params, hold).hamiltonian.at(0.0);
}

std::vector<Matrix> collapse_operators(const SystemParams& params) {
  return build_model(params, PulseSchedule(params.qubit_max_freq_rad_s, {}, 0.0)).collapse;
}

DensityMatrix initial_state(const SystemParams& params, std::span<const double> qubit_populations) {
  const double total = std::accumulate(qubit_populations.begin(), qubit_populations.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("qubit populations must sum to 1");
  return DensityMatrix::product({diagonal_state(params.qubit_levels, qubit_populations),
                                 thermal_state(params.fock_cutoff, params.thermal_occupation())});
}

// ---------------------------------------------------------------------------

Eigen::VectorXcd vectorize(const Matrix& rho) {
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Matrix unvectorize(const Eigen::VectorXcd& v, Eigen::Index dim) {
  if (v.size() != dim * dim) throw UsageError("vector length does not match dimension");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

struct LindbladIntegrator::Impl {
  using Sparse = Eigen::SparseMatrix<Complex>;

  Eigen::Index dim = 0;
  Sparse liouvillian;
  std::vector<Eigen::VectorXcd> commutator_weights;  // -i (d_i - d_j) per vec index
  TimeDependentHamiltonian hamiltonian;
  double dissipation_rate = 0.0;
  EvolveOptions options;

  void derivative(double t, const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const {
    out.noalias() = liouvillian * v;
    for (std::size_t k = 0; k < commutator_weights.size(); ++k) {
      const double c = hamiltonian.terms[k].coefficient(t);
      if (c != 0.0) out.array() += c * commutator_weights[k].array() * v.array();
    }
  }
};

namespace {

Eigen::SparseMatrix<Complex> to_sparse(const Matrix& m) {
  return m.sparseView(Complex{1.0, 0.0}, 1e-300);
}

}  // namespace

LindbladIntegrator::LindbladIntegrator(const TimeDependentHamiltonian& hamiltonian,
                                       const std::vector<Matrix>& collapse, EvolveOptions options)
    : impl_(std::make_unique<Impl>()) {
  auto& s = *impl_;
  s.dim = hamiltonian.dim();
  s.hamiltonian = hamiltonian;
  s.options = options;
  const Eigen::Index n = s.dim;
  using Sparse = Impl::Sparse;

  Sparse eye(n, n);
  eye.setIdentity();
  auto skron = [](const Sparse& a, const Sparse& b) {
    std::vector<Eigen::Triplet<Complex>> trips;
    for (int i = 0; i < a.outerSize(); ++i)
      for (Sparse::InnerIterator ia(a, i); ia; ++ia)
        for (int j = 0; j < b.outerSize(); ++j)
          for (Sparse::InnerIterator ib(b, j); ib; ++ib)
            trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                               ia.value() * ib.value());
    Sparse out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
  };

  // Column-major vec: vec(A rho B) = (B^T kron A) vec(rho).
  const Sparse h0 = to_sparse(hamiltonian.static_part);
  Sparse l = -kI * (skron(eye, h0) - skron(Sparse(h0.transpose()), eye));
  for (const auto& c : collapse) {
    if (c.rows() != n) throw UsageError("collapse operator dimension mismatch");
    const Matrix cdc = c.adjoint() * c;
    const Sparse sc = to_sparse(c);
    const Sparse scdc = to_sparse(cdc);
    l += skron(to_sparse(c.conjugate()), sc);
    l -= 0.5 * skron(eye, scdc);
    l -= 0.5 * skron(Sparse(scdc.transpose()), eye);
    s.dissipation_rate += 0.5 * cdc.cwiseAbs().rowwise().sum().maxCoeff();
  }
  l.makeCompressed();
  s.liouvillian = std::move(l);

  for (const auto& term : hamiltonian.terms) {
    if (term.diagonal.size() != n) throw UsageError("Hamiltonian term dimension mismatch");
    Eigen::VectorXcd w(n * n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) w(i + j * n) = -kI * (term.diagonal(i) - term.diagonal(j));
    s.commutator_weights.push_back(std::move(w));
  }
}

LindbladIntegrator::~LindbladIntegrator() = default;
LindbladIntegrator::LindbladIntegrator(LindbladIntegrator&&) noexcept = default;
LindbladIntegrator& LindbladIntegrator::operator=(LindbladIntegrator&&) noexcept = default;

Eigen::Index LindbladIntegrator::dim() const { return impl_->dim; }

double LindbladIntegrator::step_for(double t0, double t1) const {
  const auto& s = *impl_;
  if (s.options.fixed_step_s > 0.0) return s.options.fixed_step_s;
  constexpr int kSamples = 32;
  double rate = 0.0;
  for (int k = 0; k <= kSamples; ++k) {
    const double t = t0 + (t1 - t0) * k / kSamples;
    rate = std::max(rate, s.hamiltonian.at(t).cwiseAbs().rowwise().sum().maxCoeff());
  }
  rate += s.dissipation_rate;
  double dt = s.options.max_step_s;
  if (rate > 0.0) dt = std::min(dt, 1.0 / (s.options.steps_per_rate * rate));
  return dt;
}

std::size_t LindbladIntegrator::advance(Eigen::VectorXcd& v, double t0, double t1) const {
  if (t1 < t0) throw UsageError("advance requires t1 >= t0");
  if (v.size() != impl_->dim * impl_->dim) throw UsageError("state vector dimension mismatch");
  std::vector<double> cuts{t0};
  for (double b : impl_->hamiltonian.breakpoints)
    if (b > t0 && b < t1) cuts.push_back(b);
  cuts.push_back(t1);

  const auto& s = *impl_;
  Eigen::VectorXcd k1(v.size()), k2(v.size()), k3(v.size()), k4(v.size()), tmp(v.size());
  std::size_t steps = 0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c];
    const double b = cuts[c + 1];
    if (b <= a) continue;
    const double dt_max = step_for(a, b);
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / dt_max - 1e-9));
    const double h = (b - a) / static_cast<double>(std::max<std::size_t>(n, 1));
    for (std::size_t i = 0; i < std::max<std::size_t>(n, 1); ++i) {
      const double t = a + h * static_cast<double>(i);
      s.derivative(t, v, k1);
      tmp = v + 0.5 * h * k1;
      s.derivative(t + 0.5 * h, tmp, k2);
      tmp = v + 0.5 * h * k2;
      s.derivative(t + 0.5 * h, tmp, k3);
      tmp = v + h * k3;
      s.derivative(t + h, tmp, k4);
      v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      ++steps;
    }
  }
  return steps;
}

Trajectory evolve_lindblad(const DensityMatrix& rho0, const TimeDependentHamiltonian& hamiltonian,
                           const std::vector<Matrix>& collapse, std::span<const double> times,
                           const EvolveOptions& options) {
  if (times.empty()) throw UsageError("time grid is empty");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] >= times[i - 1])) throw UsageError("time grid must be non-decreasing");
  if (rho0.matrix().rows() != hamiltonian.dim()) throw UsageError("state and Hamiltonian dimensions differ");

  const LindbladIntegrator integrator(hamiltonian, collapse, options);
  const Eigen::Index n = hamiltonian.dim();
  Eigen::VectorXcd v = vectorize(rho0.matrix());

  Trajectory traj;
  auto record = [&](double t) {
    DensityMatrix rho(unvectorize(v, n), rho0.dims());
    traj.max_trace_error = std::max(traj.max_trace_error, std::abs(rho.trace() - 1.0));
    traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, rho.hermiticity_error());
    if (options.check_positivity) {
      const double lam = rho.min_eigenvalue();
      if (!(lam >= -options.positivity_tolerance)) {
        throw StepSizeError("density matrix lost positivity (eigenvalue " + std::to_string(lam) + ") at t = " +
                            std::to_string(t * 1e9) + " ns; reduce the integrator step");
      }
    }
    traj.times.push_back(t);
    traj.states.push_back(std::move(rho));
  };

  record(times[0]);
  for (std::size_t i = 1; i < times.size(); ++i) {
    traj.steps += integrator.advance(v, times[i - 1], times[i]);
    record(times[i]);
  }
  return traj;
}

}  // namespace resetsim::dynamics
