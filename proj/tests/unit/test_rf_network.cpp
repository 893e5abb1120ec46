#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include <Eigen/LU>

#include "resetsim/errors.hpp"
#include "resetsim/rf_network.hpp"
#include "resetsim/units.hpp"

namespace {

using namespace resetsim;
using namespace resetsim::rf;
using C = std::complex<double>;

// Independent reference: S21 of a series-Z / shunt-Y ladder between matched
// ports by plain ABCD products, no Eigen.
struct Ref {
  C a{1}, b{0}, c{0}, d{1};
  void series(C z) { b += a * z; d += c * z; }
  void shunt(C y) { a += b * y; c += d * y; }
  C s21(double z0) const { return 2.0 / (a + b / z0 + c * z0 + d); }
  C s11(double z0) const { return (a + b / z0 - c * z0 - d) / (a + b / z0 + c * z0 + d); }
};

Ref ref_lowpass(double l, double c, int order, double w) {
  Ref r;
  for (int k = 0; k < order; ++k) {
    if (k % 2 == 0) r.series(C(0, w * l));
    else r.shunt(C(0, w * c));
  }
  return r;
}

TEST(RfNetwork, SeriesImpedanceMatchesClosedForm) {
  const double z0 = 50.0, l = nh(5.0), w = angular(ghz(3.0));
  NetworkChain chain({TwoPortElement::series_inductor(l)});
  const auto s = abcd_to_s(cascade(chain, w), z0);
  const C z(0, w * l);
  EXPECT_NEAR(std::abs(s(1, 0) - 2.0 / (2.0 + z / z0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(s(0, 0) - (z / z0) / (2.0 + z / z0)), 0.0, 1e-14);
}

TEST(RfNetwork, ShuntAdmittanceMatchesClosedForm) {
  const double z0 = 50.0, c = pf(2.0), w = angular(ghz(2.0));
  NetworkChain chain({TwoPortElement::shunt_capacitor(c)});
  const auto s = abcd_to_s(cascade(chain, w), z0);
  const C y(0, w * c);
  EXPECT_NEAR(std::abs(s(1, 0) - 2.0 / (2.0 + y * z0)), 0.0, 1e-14);
}

TEST(RfNetwork, MatchedLineIsPurePropagation) {
  LineParams p{50.0, 0.02, 1.2e8, 0.7};
  const double w = angular(ghz(4.0));
  const auto s = abcd_to_s(cascade(NetworkChain({TwoPortElement::line(p)}), w), 50.0);
  const C expected = std::exp(-C(p.attenuation_np_m, w / p.phase_velocity_m_s) * p.length_m);
  EXPECT_NEAR(std::abs(s(0, 0)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(s(1, 0) - expected), 0.0, 1e-13);
}

TEST(RfNetwork, QuarterWaveTransformerInvertsLoad) {
  const double f = ghz(5.0), v = 1e8;
  LineParams p{70.0, v / f / 4.0, v, 0.0};
  const auto abcd = cascade(NetworkChain({TwoPortElement::line(p)}), angular(f));
  const C zin = input_impedance(abcd, 25.0);
  EXPECT_NEAR(zin.real(), 70.0 * 70.0 / 25.0, 1e-8);
  EXPECT_NEAR(zin.imag(), 0.0, 1e-8);
}

TEST(RfNetwork, LadderMatchesIndependentReference) {
  const double l = nh(4.488), c = pf(1.809);
  const auto chain = make_ladder({FilterKind::LowPass, 7, LadderForm::T}, {l, c});
  for (double f : {1e9, 3.3e9, 4.23e9, 8e9}) {
    const double w = angular(f);
    const auto s = abcd_to_s(cascade(chain, w), 50.0);
    const auto r = ref_lowpass(l, c, 7, w);
    EXPECT_NEAR(std::abs(s(1, 0) - r.s21(50.0)), 0.0, 1e-12) << f;
    EXPECT_NEAR(std::abs(s(0, 0) - r.s11(50.0)), 0.0, 1e-12) << f;
  }
}

TEST(RfNetwork, LosslessReciprocalProperties) {
  const auto chain = make_ladder({FilterKind::HighPass, 5, LadderForm::Pi}, {pf(0.3), nh(0.7)})
                         .then(TwoPortElement::line({50.0, 0.01, 1.1e8, 0.0}));
  for (double f = 0.5e9; f < 12e9; f += 0.37e9) {
    const auto abcd = cascade(chain, angular(f));
    // AD - BC cancels between large terms at the low end of a high-pass band.
    const double scale = std::abs(abcd(0, 0) * abcd(1, 1)) + std::abs(abcd(0, 1) * abcd(1, 0));
    EXPECT_NEAR(std::abs(abcd.determinant() - 1.0), 0.0, 1e-14 * scale);
    const auto s = abcd_to_s(abcd, 50.0);
    EXPECT_NEAR(std::norm(s(0, 0)) + std::norm(s(1, 0)), 1.0, 1e-10);
    // S12 - S21 = (det - 1) S21.
    EXPECT_NEAR(std::abs(s(0, 1) - s(1, 0)), 0.0, 1e-14 * scale * std::abs(s(1, 0)) + 1e-16);
  }
}

TEST(RfNetwork, CascadeIsAssociative) {
  const auto a = NetworkChain({TwoPortElement::series_inductor(nh(2)), TwoPortElement::shunt_capacitor(pf(1))});
  const auto b = NetworkChain({TwoPortElement::series_resistor(7.0), TwoPortElement::shunt_inductor(nh(3))});
  const double w = angular(ghz(2.5));
  const Abcd joined = cascade(a.then(b), w);
  const Abcd product = cascade(a, w) * cascade(b, w);
  EXPECT_NEAR((joined - product).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(RfNetwork, ReversalSwapsPorts) {
  const auto chain = NetworkChain({TwoPortElement::series_inductor(nh(3)), TwoPortElement::shunt_capacitor(pf(1)),
                                   TwoPortElement::series_resistor(10.0)});
  const double w = angular(ghz(3.0));
  const auto fwd = abcd_to_s(cascade(chain, w), 50.0);
  const auto rev = abcd_to_s(cascade(chain.reversed(), w), 50.0);
  const auto rev2 = abcd_to_s(reverse(cascade(chain, w)), 50.0);
  EXPECT_NEAR(std::abs(fwd(0, 0) - rev(1, 1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(fwd(1, 1) - rev(0, 0)), 0.0, 1e-12);
  EXPECT_NEAR((rev - rev2).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(RfNetwork, Errors) {
  EXPECT_THROW(cascade(NetworkChain{}, 1e9), UsageError);
  const NetworkChain l({TwoPortElement::series_inductor(nh(1))});
  EXPECT_THROW(cascade(l, 0.0), DomainError);
  EXPECT_THROW(cascade(l, -1.0), DomainError);
  const NetworkChain bad({TwoPortElement::series_inductor(NAN)});
  EXPECT_THROW(cascade(bad, 1e9), DomainError);
  Abcd singular;
  singular << 1.0, -50.0, 0.0, 0.0;  // A + B/Z + CZ + D = 0
  EXPECT_THROW(abcd_to_s(singular, 50.0), SingularNetworkError);
  const std::vector<double> down{2e9, 1e9};
  EXPECT_THROW(sweep_s_params(l, down), Error);
  const std::vector<double> too_high{1e9, 25e9};
  EXPECT_THROW(sweep_s_params(l, too_high), Error);
}

TEST(RfNetwork, SweepCoversGrid) {
  const auto grid = linear_grid(1e9, 10e9, 5e6);
  ASSERT_EQ(grid.size(), 1801u);
  EXPECT_DOUBLE_EQ(grid.front(), 1e9);
  EXPECT_NEAR(grid.back(), 10e9, 1e-3);
  const auto pts = sweep_s_params(NetworkChain({TwoPortElement::series_resistor(1.0)}), grid);
  ASSERT_EQ(pts.size(), grid.size());
  EXPECT_DOUBLE_EQ(pts[17].freq_hz, grid[17]);
}

TEST(RfNetwork, LadderTopologyShapes) {
  const auto t = make_ladder({FilterKind::LowPass, 7, LadderForm::T}, {nh(1), pf(1)});
  ASSERT_EQ(t.size(), 7u);
  EXPECT_EQ(t.elements().front().kind(), TwoPortElement::Kind::SeriesImpedance);
  EXPECT_EQ(t.elements().back().kind(), TwoPortElement::Kind::SeriesImpedance);
  const auto pi = make_ladder({FilterKind::HighPass, 3, LadderForm::Pi}, {pf(1), nh(1)});
  ASSERT_EQ(pi.size(), 3u);
  EXPECT_EQ(pi.elements().front().kind(), TwoPortElement::Kind::ShuntAdmittance);
  EXPECT_NEAR(image_impedance({FilterKind::LowPass, 7, LadderForm::T}, {nh(4.488), pf(1.809)}), 49.81, 0.01);
  EXPECT_THROW(make_ladder({FilterKind::LowPass, 0, LadderForm::T}, {nh(1), pf(1)}), Error);
}

TEST(RfNetwork, FindCutoffFirstOrderOracles) {
  // |S21|^2 = 1 / (1 + (w L / 2 Z0)^2): -3.0103 dB at w = 2 Z0 / L.
  const double l = nh(5.0);
  const auto lp = NetworkChain({TwoPortElement::series_inductor(l)});
  const double half_power_db = 10.0 * std::log10(0.5);
  EXPECT_NEAR(find_cutoff(lp, 0.1e9, 10e9, half_power_db), ordinary(2.0 * 50.0 / l), 2.0);
  // Series capacitor: w = 1 / (2 Z0 C).
  const double c = pf(0.5);
  const auto hp = NetworkChain({TwoPortElement::series_capacitor(c)});
  EXPECT_NEAR(find_cutoff(hp, 0.1e9, 15e9, half_power_db), ordinary(1.0 / (2.0 * 50.0 * c)), 2.0);
  EXPECT_THROW(find_cutoff(lp, 0.1e9, 0.2e9), NotFoundError);
}

TEST(RfNetwork, DesignValueLaddersEdges) {
  // Scan plus bisection on the independent reference locates the same edge.
  const double l = nh(4.488), c = pf(1.809);
  auto db = [&](double f) { return 20 * std::log10(std::abs(ref_lowpass(l, c, 7, angular(f)).s21(50.0))); };
  double a = 0.0, b = 0.0;
  for (double f = 0.5e9; f < 12e9; f += 1e6) {
    if (db(f) >= -3.0 && db(f + 1e6) < -3.0) {
      a = f;
      b = f + 1e6;
    }
  }
  ASSERT_GT(a, 0.0);
  for (int i = 0; i < 60; ++i) {
    const double m = 0.5 * (a + b);
    (db(m) >= -3.0 ? a : b) = m;
  }
  const auto lp = make_ladder({FilterKind::LowPass, 7, LadderForm::T}, {l, c});
  EXPECT_NEAR(find_cutoff(lp, 0.5e9, 12e9), 0.5 * (a + b), 1e3);
  EXPECT_NEAR(find_cutoff(lp, 0.5e9, 12e9), 3.27e9, 0.01e9);
}

TEST(RfNetwork, DiplexerConservesPowerAndOpenBranch) {
  const auto lp = make_ladder({FilterKind::LowPass, 7, LadderForm::T}, {nh(4.488), pf(1.809)});
  const auto hp = make_ladder({FilterKind::HighPass, 7, LadderForm::T}, {pf(0.266), nh(0.660)});
  const DiplexerSpec both{lp, hp, 50.0};
  for (double f = 1e9; f <= 10e9; f += 0.45e9) {
    const auto r = diplexer_response(both, f);
    EXPECT_NEAR(std::norm(r.s11) + std::norm(r.s21) + std::norm(r.s31), 1.0, 1e-9) << f;
  }
  const DiplexerSpec lp_only{lp, std::nullopt, 50.0};
  const double f = ghz(2.0);
  const auto s = abcd_to_s(cascade(lp, angular(f)), 50.0);
  const auto r = diplexer_response(lp_only, f);
  EXPECT_NEAR(std::abs(r.s21 - s(1, 0)), 0.0, 1e-12);
  EXPECT_EQ(r.s31, C(0.0));
  const DiplexerSpec none{std::nullopt, std::nullopt, 50.0};
  EXPECT_NEAR(std::abs(diplexer_response(none, f).s11 - 1.0), 0.0, 1e-15);
}

TEST(RfNetwork, DiplexerIsolationReport) {
  const auto lp = make_ladder({FilterKind::LowPass, 7, LadderForm::T}, {nh(4.488), pf(1.809)});
  const auto hp = make_ladder({FilterKind::HighPass, 7, LadderForm::T}, {pf(0.266), nh(0.660)});
  const auto iso = diplexer_isolation({lp, hp, 50.0}, 1e9, 10e9);
  EXPECT_LT(iso.worst_db, -60.0);
  EXPECT_LE(iso.best_db, iso.worst_db);
  EXPECT_GE(iso.worst_freq_hz, 1e9);
  EXPECT_LE(iso.worst_freq_hz, 10e9);
  const auto at = diplexer_response({lp, hp, 50.0}, iso.worst_freq_hz);
  EXPECT_NEAR(to_db(at.s32), iso.worst_db, 1e-9);
}

}  // namespace
