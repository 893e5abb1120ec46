#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "resetsim/errors.hpp"
#include "resetsim/measurement.hpp"
#include "resetsim/rng.hpp"
#include "resetsim/units.hpp"

namespace {

using namespace resetsim;
using namespace resetsim::measurement;

ReadoutModel sharp(int states, std::size_t shots = 20000) {
  auto m = ReadoutModel::default_model(states);
  m.sigma = 1e-9;
  m.shots = shots;
  return m;
}

TEST(Thermal, PopulationExamples) {
  EXPECT_EQ(thermal_population(angular(ghz(4.86)), 0.0), 0.0);
  EXPECT_NEAR(thermal_population(angular(ghz(4.86)), mk(41)), 0.0034, 0.0001);
  EXPECT_NEAR(thermal_population(angular(ghz(4.37)), mk(49)), 0.0135, 0.0003);
  // Independent Boltzmann ratio.
  const double x = kHbar * angular(ghz(5)) / (kBoltzmann * mk(60));
  EXPECT_NEAR(thermal_population(angular(ghz(5)), mk(60)), std::exp(-x) / (1 + std::exp(-x)), 1e-15);
}

TEST(Thermal, EffectiveTemperatureExamples) {
  EXPECT_NEAR(effective_temperature(angular(ghz(4.86)), 0.0034), mk(41), mk(1));
  EXPECT_NEAR(effective_temperature(angular(ghz(4.37)), 0.0135), mk(49), mk(1));
  EXPECT_LT(effective_temperature(angular(ghz(4.86)), 1e-30), mk(4));
  for (double t : {0.01, 0.05, 0.2}) {
    const double w = angular(ghz(4.5));
    EXPECT_NEAR(effective_temperature(w, thermal_population(w, t)), t, 1e-12);
  }
}

TEST(Thermal, Errors) {
  EXPECT_THROW(effective_temperature(angular(ghz(4.86)), 0.5), NonThermalError);
  EXPECT_THROW(effective_temperature(angular(ghz(4.86)), 0.6), NonThermalError);
  EXPECT_THROW(effective_temperature(angular(ghz(4.86)), 0.0), DomainError);
  EXPECT_THROW(thermal_population(-1.0, 0.01), DomainError);
  EXPECT_THROW(thermal_population(1.0, -0.01), DomainError);
}

TEST(Readout, PureStateSharpModelHitsCentroid) {
  const auto m = sharp(2, 1000);
  const std::vector<double> g{1.0, 0.0};
  for (const auto& s : sample_shots(g, m)) {
    EXPECT_EQ(s.true_state, 0);
    EXPECT_EQ(s.assigned_state, 0);
    EXPECT_NEAR(s.point.i, 0.0, 1e-7);
    EXPECT_NEAR(s.point.q, 0.0, 1e-7);
  }
}

TEST(Readout, EvenSplitWithinBinomialBound) {
  auto m = ReadoutModel::default_model(2);
  m.shots = 100000;
  m.seed = 7;
  const std::vector<double> half{0.5, 0.5};
  const auto shots = sample_shots(half, m);
  ASSERT_EQ(shots.size(), m.shots);
  double e = 0;
  for (const auto& s : shots) e += s.true_state;
  EXPECT_NEAR(e / m.shots, 0.5, 0.005);
}

TEST(Readout, WellSeparatedCentroidsRarelyErr) {
  ReadoutModel m;
  m.centroids = {{0, 0}, {10, 0}};
  m.sigma = 1.0;
  m.shots = 100000;
  m.seed = 11;
  EXPECT_LT(gaussian_tail(5.0), 1e-6);
  const std::vector<double> half{0.5, 0.5};
  std::size_t wrong = 0;
  for (const auto& s : sample_shots(half, m)) wrong += s.assigned_state != s.true_state;
  EXPECT_LE(wrong, 2u);
}

TEST(Readout, TieGoesToLowestIndex) {
  const auto m = ReadoutModel::default_model(3);
  EXPECT_EQ(classify({0.0, 0.0}, m), 0);
  EXPECT_EQ(classify({5.5, 0.0}, m), 1);
  EXPECT_EQ(classify(m.centroids[2], m), 2);
  EXPECT_EQ(classify({2.75, 0.0}, m), 0);
  EXPECT_EQ(classify({2.75, -1.0}, m), 0);
}

TEST(Readout, OverlapMatchesGaussianTail) {
  ReadoutModel m;
  m.centroids = {{0, 0}, {3, 0}};
  m.sigma = 1.0;
  m.shots = 100000;
  m.seed = 3;
  const std::vector<double> g{1.0, 0.0};
  const auto shots = sample_shots(g, m);
  double wrong = 0;
  for (const auto& s : shots) wrong += s.assigned_state != 0;
  const double q = gaussian_tail(1.5);
  EXPECT_NEAR(q, 0.0668072, 1e-6);
  EXPECT_NEAR(wrong / m.shots, q, 4 * std::sqrt(q * (1 - q) / m.shots));
}

TEST(Readout, GaussianTailValues) {
  EXPECT_DOUBLE_EQ(gaussian_tail(0.0), 0.5);
  EXPECT_NEAR(gaussian_tail(1.0), 0.158655253931457, 1e-14);
  EXPECT_NEAR(gaussian_tail(-1.0), 1 - 0.158655253931457, 1e-14);
}

TEST(Assignment, IdealModelGivesIdentity) {
  const auto m = sharp(3, 5000);
  const auto a = assignment_matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, m);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(a(i, j), i == j ? 1.0 : 0.0);
}

TEST(Assignment, ResidualEntryMatchesPopulation) {
  auto m = ReadoutModel::default_model(2);
  m.seed = 42;
  const auto a = assignment_matrix({{0.9744, 0.0256}}, m);
  EXPECT_NEAR(a(0, 1), 0.0265, 0.005);
}

TEST(Assignment, PreparedFRowEntry) {
  auto m = ReadoutModel::default_model(3);
  m.seed = 42;
  const double s = 0.335 + 0.0 + 0.658;
  const auto a = assignment_matrix({{0.335 / s, 0.0, 0.658 / s}}, m);
  EXPECT_NEAR(a(0, 2), 0.658, 0.01);
  double sum = 0;
  for (double v : a.p[0]) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Assignment, DeterministicUnderSeed) {
  auto m = ReadoutModel::default_model(3);
  m.shots = 5000;
  m.seed = 99;
  const std::vector<std::vector<double>> rows{{0.9, 0.1, 0.0}, {0.1, 0.8, 0.1}};
  const auto a = assignment_matrix(rows, m);
  const auto b = assignment_matrix(rows, m);
  EXPECT_EQ(a.p, b.p);
  // Row k depends on stream k only.
  const auto single = assignment_matrix({rows[0]}, m);
  EXPECT_EQ(single.p[0], a.p[0]);
  m.seed = 100;
  EXPECT_NE(assignment_matrix(rows, m).p, a.p);
}

TEST(Assignment, Errors) {
  auto m = ReadoutModel::default_model(2);
  EXPECT_THROW(assignment_matrix({{0.5, 0.6}}, m), DomainError);
  EXPECT_THROW(assignment_matrix({{0.5, 0.25, 0.25}}, m), DomainError);
  m.sigma = 0.0;
  EXPECT_THROW(m.validate(), DomainError);
  m = ReadoutModel::default_model(2);
  m.centroids[1] = m.centroids[0];
  EXPECT_THROW(m.validate(), DomainError);
  EXPECT_EQ(state_label(0), "g");
  EXPECT_EQ(state_label(2), "f");
}

TEST(Rng, ReproducibleAndIndependentStreams) {
  Rng a(derive_seed(1, 0)), b(derive_seed(1, 0)), c(derive_seed(1, 1));
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  // First output of std::mt19937_64 seeded with 5489 is fixed by the standard.
  Rng d(5489);
  EXPECT_EQ(d.next_u64(), 14514284786278117030ull);
}

TEST(Rng, NormalMoments) {
  Rng r(123);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  Rng u(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

}  // namespace
