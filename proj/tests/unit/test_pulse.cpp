#include <gtest/gtest.h>

#include <cmath>

#include "resetsim/errors.hpp"
#include "resetsim/pulse.hpp"
#include "resetsim/units.hpp"

namespace {

using namespace resetsim;
using namespace resetsim::dynamics;

TEST(Pulse, SquareScheduleShape) {
  const double idle = angular(4.86e9), plat = angular(4.37e9);
  const auto s = PulseSchedule::square(idle, plat, ns(100), ns(2));
  EXPECT_DOUBLE_EQ(s.duration(), ns(104));
  EXPECT_DOUBLE_EQ(s.frequency(0.0), idle);
  EXPECT_DOUBLE_EQ(s.frequency(ns(2) + ns(50)), plat);
  EXPECT_NEAR(s.frequency(ns(1)), 0.5 * (idle + plat), 1e-12 * idle);
  EXPECT_NEAR(s.frequency(ns(103)), 0.5 * (idle + plat), 1e-12 * idle);
  EXPECT_DOUBLE_EQ(s.frequency(s.duration()), idle);
  EXPECT_DOUBLE_EQ(s.plateau_start(0), ns(2));
  EXPECT_DOUBLE_EQ(s.plateau_end(0), ns(102));
}

TEST(Pulse, RaisedCosineEdgeValues) {
  const double idle = 10.0, plat = 2.0, tr = 4.0;
  const auto s = PulseSchedule::square(idle, plat, 10.0, tr);
  for (double t : {0.5, 1.0, 2.5, 3.9}) {
    const double expect = idle + (plat - idle) * 0.5 * (1 - std::cos(kPi * t / tr));
    EXPECT_NEAR(s.frequency(t), expect, 1e-12);
  }
  const auto lin = PulseSchedule::square(idle, plat, 10.0, tr, EdgeShape::Linear);
  EXPECT_NEAR(lin.frequency(1.0), idle + (plat - idle) * 0.25, 1e-12);
}

TEST(Pulse, MultiPlateauBreakpoints) {
  const PulseSchedule s(0.0, {{1.0, 5.0}, {2.0, 3.0}}, 1.0);
  EXPECT_DOUBLE_EQ(s.duration(), 1 + 5 + 1 + 3 + 1);
  const auto bp = s.breakpoints();
  const std::vector<double> expect{0, 1, 6, 7, 10, 11};
  EXPECT_EQ(bp, expect);
  EXPECT_DOUBLE_EQ(s.frequency(6.5), 1.5);
  EXPECT_DOUBLE_EQ(s.frequency(8.0), 2.0);
}

TEST(Pulse, ZeroRiseIsStep) {
  const auto s = PulseSchedule::square(5.0, 1.0, 10.0, 0.0);
  EXPECT_DOUBLE_EQ(s.duration(), 10.0);
  EXPECT_DOUBLE_EQ(s.frequency(5.0), 1.0);
}

TEST(Pulse, Errors) {
  const auto s = PulseSchedule::square(5.0, 1.0, 10.0, 1.0);
  EXPECT_THROW(s.frequency(-1e-6), DomainError);
  EXPECT_THROW(s.frequency(12.0 + 1e-6), DomainError);
  EXPECT_NO_THROW(s.frequency(12.0 + 1e-15));
  EXPECT_THROW(PulseSchedule::square(5.0, 1.0, -1.0, 1.0), DomainError);
  EXPECT_THROW(PulseSchedule::square(5.0, 1.0, 1.0, -1.0), DomainError);
}

}  // namespace
