#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "resetsim/errors.hpp"
#include "resetsim/open_system.hpp"
#include "resetsim/units.hpp"

namespace {

using namespace resetsim;
using namespace resetsim::dynamics;

SystemParams resonant(double g_mhz, double kappa_mhz, int levels = 2, int cutoff = 4) {
  SystemParams p;
  p.qubit_max_freq_rad_s = angular(ghz(4.37));
  p.anharmonicity_rad_s = -angular(mhz(220));
  p.coupling_rad_s = angular(mhz(g_mhz));
  p.dissipator_freq_rad_s = angular(ghz(4.37));
  p.dissipator_kappa_rad_s = angular(mhz(kappa_mhz));
  p.qubit_t1_s = 0.0;
  p.bath_temperature_k = 0.0;
  p.qubit_levels = levels;
  p.fock_cutoff = cutoff;
  return p;
}

TimeDependentHamiltonian static_h(const Matrix& h) { return {h, {}, {}}; }

std::vector<double> grid(double t_end, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = t_end * i / n;
  return t;
}

TEST(DecayRate, ClosedFormExamples) {
  const double k = angular(mhz(15)), g = angular(mhz(10));
  EXPECT_EQ(purcell_decay_rate(k, 0.0, angular(mhz(40))), 0.0);
  EXPECT_NEAR(purcell_decay_rate(k, g, 0.0), k / 2, 1e-9 * k);
  EXPECT_NEAR(1.0 / purcell_decay_rate(k, g, 0.0), 21.22e-9, 0.01e-9);
  const double d = angular(mhz(500));
  const double dispersive = k * g * g / (d * d + k * k / 4);
  const double exact = purcell_decay_rate(k, g, d);
  EXPECT_NEAR(exact, dispersive, 0.05 * dispersive);
  EXPECT_NEAR(ordinary(exact), 6.0e3, 0.1e3);
}

TEST(DecayRate, SymmetricAndPeakedAtResonance) {
  const double k = angular(mhz(15));
  for (double g_mhz : {1.0, 3.0, 5.0, 20.0}) {
    const double g = angular(mhz(g_mhz));
    const double r0 = purcell_decay_rate(k, g, 0.0);
    for (double d_mhz : {0.5, 5.0, 30.0, 300.0}) {
      const double d = angular(mhz(d_mhz));
      EXPECT_NEAR(purcell_decay_rate(k, g, d), purcell_decay_rate(k, g, -d), 1e-9 * r0);
      EXPECT_LE(purcell_decay_rate(k, g, d), r0 * (1 + 1e-12));
    }
  }
}

TEST(DecayRate, OverdampedMatchesRealRoot) {
  const double k = angular(mhz(15)), g = angular(mhz(2));
  EXPECT_NEAR(purcell_decay_rate(k, g, 0.0), (k - std::sqrt(k * k - 16 * g * g)) / 2, 1e-6);
}

TEST(DecayRate, MaxRateCondition) {
  const double k = angular(mhz(15));
  const auto at = max_rate_condition(k, k / 4);
  EXPECT_TRUE(at.saturates);
  EXPECT_NEAR(at.gamma_max, k / 2, 1e-9 * k);
  const auto below = max_rate_condition(k, k / 8);
  EXPECT_FALSE(below.saturates);
  EXPECT_NEAR(below.gamma_max, purcell_decay_rate(k, k / 8, 0.0), 1e-9 * k);
  EXPECT_LT(below.gamma_max, k / 2);
  const auto big = max_rate_condition(k, 1e6 * k);
  EXPECT_TRUE(big.saturates);
  EXPECT_NEAR(big.gamma_max, k / 2, 1e-9 * k);
  EXPECT_THROW(max_rate_condition(0.0, 1.0), DomainError);
}

TEST(Hamiltonian, ZeroCouplingResonantIsZero) {
  auto p = resonant(0.0, 15.0);
  EXPECT_EQ(build_hamiltonian(p, p.dissipator_freq_rad_s).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Hamiltonian, SingleExcitationBlock) {
  auto p = resonant(10.0, 15.0, 2, 3);
  const Matrix h = build_hamiltonian(p, p.dissipator_freq_rad_s);
  ASSERT_EQ(h.rows(), 6);
  // index = qubit * N + n
  EXPECT_DOUBLE_EQ(h(3, 1).real(), p.coupling_rad_s);
  EXPECT_DOUBLE_EQ(h(1, 3).real(), p.coupling_rad_s);
  EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Hamiltonian, ThreeLevelLadderElementIsSqrtTwoG) {
  auto p = resonant(10.0, 15.0, 3, 3);
  const double wq = p.dissipator_freq_rad_s + angular(mhz(30));
  const Matrix h = build_hamiltonian(p, wq);
  ASSERT_EQ(h.rows(), 9);
  // Brute force: b = lowering(3) x 1, a = 1 x lowering(3).
  const Matrix b = kron(lowering_operator(3), Matrix::Identity(3, 3));
  const Matrix a = kron(Matrix::Identity(3, 3), lowering_operator(3));
  const Matrix nq = b.adjoint() * b;
  const double det = wq - p.dissipator_freq_rad_s;
  const Matrix ref = det * nq + 0.5 * p.anharmonicity_rad_s * b.adjoint() * b.adjoint() * b * b +
                     p.coupling_rad_s * (b.adjoint() * a + b * a.adjoint());
  EXPECT_LT((h - ref).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(h(2 * 3 + 0, 1 * 3 + 1).real(), std::sqrt(2.0) * p.coupling_rad_s);
  EXPECT_NEAR(h(6, 6).real(), 2 * det + p.anharmonicity_rad_s, 1e-6);
}

TEST(Hamiltonian, TimeDependentFollowsSchedule) {
  auto p = resonant(10.0, 15.0);
  p.qubit_max_freq_rad_s = angular(ghz(4.86));
  const auto sched = PulseSchedule::square(p.qubit_max_freq_rad_s, p.dissipator_freq_rad_s, ns(50), ns(2));
  const auto h = build_hamiltonian(p, sched);
  for (double t : {0.0, ns(1.0), ns(20.0), ns(53.5)}) {
    const Matrix direct = build_hamiltonian(p, sched.frequency(t));
    EXPECT_LT((h.at(t) - direct).cwiseAbs().maxCoeff(), 1e-3) << t;
  }
  ASSERT_FALSE(h.breakpoints.empty());
}

TEST(States, ThermalAndProducts) {
  const Matrix th = thermal_state(6, 0.5);
  EXPECT_NEAR(th.trace().real(), 1.0, 1e-15);
  EXPECT_NEAR(th(1, 1).real() / th(0, 0).real(), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(thermal_tail_population(6, 0.5), th(5, 5).real(), 1e-15);
  EXPECT_EQ(thermal_state(4, 0.0)(0, 0), Complex(1.0));
  const std::vector<double> pop{0.25, 0.75};
  const auto rho = DensityMatrix::product({diagonal_state(3, pop), thermal_state(4, 0.2)});
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-14);
  EXPECT_NEAR(rho.populations(0)[1], 0.75, 1e-14);
  EXPECT_NEAR(rho.populations(0)[2], 0.0, 1e-15);
  // Truncated geometric series, ratio nbar / (1 + nbar).
  const double r = 0.2 / 1.2;
  const double z = 1 + r + r * r + r * r * r;
  EXPECT_NEAR(rho.mean_number(1), (r + 2 * r * r + 3 * r * r * r) / z, 1e-14);
  EXPECT_GE(rho.min_eigenvalue(), -1e-15);
  EXPECT_THROW(rho.populations(2), UsageError);
  EXPECT_NEAR(bose_occupation(angular(ghz(4.37)), 0.0), 0.0, 0.0);
}

TEST(Lindblad, NoDynamicsKeepsState) {
  const std::vector<double> pop{0.3, 0.7};
  const auto rho0 = DensityMatrix::product({diagonal_state(2, pop), thermal_state(3, 0.0)});
  const auto traj = evolve_lindblad(rho0, static_h(Matrix::Zero(6, 6)), {}, grid(ns(50), 5));
  for (const auto& s : traj.states) EXPECT_LT((s.matrix() - rho0.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Lindblad, IntrinsicT1Decay) {
  auto p = resonant(0.0, 15.0, 2, 3);
  p.qubit_t1_s = us(30);
  const std::vector<double> e{0.0, 1.0};
  const auto model = build_model(p, PulseSchedule::square(p.dissipator_freq_rad_s, p.dissipator_freq_rad_s, us(3), 0));
  const auto traj = evolve_lindblad(initial_state(p, e), model.hamiltonian, model.collapse, grid(us(3), 3));
  EXPECT_NEAR(traj.states.back().populations(0)[1], std::exp(-0.1), 1e-4);
}

TEST(Lindblad, ResonantSingleExcitationMatchesAnalytic) {
  const auto p = resonant(10.0, 15.0, 2, 3);
  const double k = p.dissipator_kappa_rad_s, g = p.coupling_rad_s;
  const double w = std::sqrt(g * g - k * k / 16);
  const std::vector<double> e{0.0, 1.0};
  const auto h = static_h(build_hamiltonian(p, p.dissipator_freq_rad_s));
  const auto traj = evolve_lindblad(initial_state(p, e), h, collapse_operators(p), grid(ns(150), 150));
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const double c = std::exp(-k * t / 4) * (std::cos(w * t) + k / (4 * w) * std::sin(w * t));
    EXPECT_NEAR(traj.states[i].populations(0)[1], c * c, 1e-7) << t;
  }
  EXPECT_LT(traj.max_trace_error, 1e-7 * 1.5);
  EXPECT_LT(traj.max_hermiticity_error, 1e-12);
}

TEST(Lindblad, ThermalSteadyStateDetailedBalance) {
  auto p = resonant(10.0, 15.0, 2, 10);
  // nbar = 1/2 at the mode frequency.
  p.bath_temperature_k = kHbar * p.dissipator_freq_rad_s / (kBoltzmann * std::log(3.0));
  ASSERT_NEAR(p.thermal_occupation(), 0.5, 1e-12);
  const std::vector<double> g{1.0, 0.0};
  const auto model = build_model(p, PulseSchedule::square(p.dissipator_freq_rad_s, p.dissipator_freq_rad_s, ns(800), 0));
  const auto traj = evolve_lindblad(initial_state(p, g), model.hamiltonian, model.collapse, grid(ns(800), 1));
  EXPECT_NEAR(traj.states.back().populations(0)[1], 0.5 / 2.0, 2e-4);
}

TEST(Lindblad, StepHalvingConverges) {
  auto p = SystemParams::device_defaults();
  const auto sched = PulseSchedule::square(p.qubit_max_freq_rad_s, p.dissipator_freq_rad_s, ns(60), ns(2));
  const auto model = build_model(p, sched);
  const std::vector<double> e{0.0, 1.0};
  const std::vector<double> times{0.0, sched.duration()};
  EvolveOptions coarse;
  EvolveOptions fine;
  fine.max_step_s = coarse.max_step_s / 2;
  fine.steps_per_rate = coarse.steps_per_rate * 2;
  const auto a = evolve_lindblad(initial_state(p, e), model.hamiltonian, model.collapse, times, coarse);
  const auto b = evolve_lindblad(initial_state(p, e), model.hamiltonian, model.collapse, times, fine);
  EXPECT_GT(b.steps, a.steps);
  const auto pa = a.states.back().populations(0), pb = b.states.back().populations(0);
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_LT(std::abs(pa[i] - pb[i]), 1e-6);
}

TEST(Lindblad, TraceAndHermiticityPreserved) {
  auto p = SystemParams::device_defaults();
  p.qubit_levels = 3;
  p.fock_cutoff = 6;
  const auto sched = PulseSchedule::square(p.qubit_max_freq_rad_s, p.dissipator_freq_rad_s, ns(100), ns(2));
  const auto model = build_model(p, sched);
  const std::vector<double> f{0.1, 0.2, 0.7};
  const auto traj = evolve_lindblad(initial_state(p, f), model.hamiltonian, model.collapse, grid(sched.duration(), 10));
  EXPECT_LT(traj.max_trace_error, 1e-7);
  EXPECT_LT(traj.max_hermiticity_error, 1e-10);
  for (const auto& s : traj.states) EXPECT_GE(s.min_eigenvalue(), -1e-9);
}

TEST(Lindblad, CoarseFixedStepRaisesStepSizeError) {
  const auto p = resonant(10.0, 15.0, 2, 3);
  const auto h = static_h(build_hamiltonian(p, p.dissipator_freq_rad_s));
  const std::vector<double> e{0.0, 1.0};
  EvolveOptions opt;
  opt.fixed_step_s = ns(25);
  EXPECT_THROW(evolve_lindblad(initial_state(p, e), h, collapse_operators(p), grid(ns(500), 20), opt),
               StepSizeError);
}

TEST(Lindblad, IntegratorAdvanceMatchesEvolve) {
  const auto p = resonant(10.0, 15.0, 2, 3);
  const auto h = static_h(build_hamiltonian(p, p.dissipator_freq_rad_s));
  const std::vector<double> e{0.0, 1.0};
  const auto rho0 = initial_state(p, e);
  const auto traj = evolve_lindblad(rho0, h, collapse_operators(p), grid(ns(40), 1));
  LindbladIntegrator integ(h, collapse_operators(p));
  Eigen::VectorXcd v = vectorize(rho0.matrix());
  integ.advance(v, 0.0, ns(20));
  integ.advance(v, ns(20), ns(40));
  EXPECT_LT((unvectorize(v, integ.dim()) - traj.states.back().matrix()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_THROW(integ.advance(v, 1.0, 0.0), UsageError);
}

TEST(Model, FockGuardAndValidation) {
  auto p = SystemParams::device_defaults();
  p.bath_temperature_k = 1.0;
  const auto sched = PulseSchedule::square(p.qubit_max_freq_rad_s, p.dissipator_freq_rad_s, ns(10), ns(2));
  EXPECT_THROW(build_model(p, sched), DomainError);
  auto q = SystemParams::device_defaults();
  q.fock_cutoff = 2;
  EXPECT_THROW(q.validate(), DomainError);
  q = SystemParams::device_defaults();
  q.anharmonicity_rad_s = 1.0;
  EXPECT_THROW(q.validate(), DomainError);
  q = SystemParams::device_defaults();
  q.coupling_rad_s = -1.0;
  EXPECT_THROW(q.validate(), DomainError);
}

TEST(Model, CollapseOperatorsIncludeThermalAbsorption) {
  auto p = SystemParams::device_defaults();
  EXPECT_EQ(collapse_operators(p).size(), 3u);
  p.bath_temperature_k = 0.0;
  EXPECT_EQ(collapse_operators(p).size(), 2u);
  p.qubit_t1_s = 0.0;
  EXPECT_EQ(collapse_operators(p).size(), 1u);
}

TEST(Model, SharedModeForTwoQubits) {
  auto p = SystemParams::device_defaults();
  p.bath_temperature_k = 0.0;
  TransmonSpec a{2, p.anharmonicity_rad_s, p.coupling_rad_s, 0.0,
                 PulseSchedule::square(p.qubit_max_freq_rad_s, p.dissipator_freq_rad_s, ns(10), ns(2))};
  const auto m = build_model(p, {a, a});
  EXPECT_EQ(m.dims, (std::vector<int>{2, 2, p.fock_cutoff}));
  EXPECT_EQ(m.hamiltonian.dim(), 2 * 2 * p.fock_cutoff);
}

}  // namespace
