#pragma once

#include <numbers>

namespace resetsim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// CODATA 2018 exact / recommended values.
inline constexpr double kHbar = 1.054571817e-34;          // J s
inline constexpr double kBoltzmann = 1.380649e-23;        // J / K
inline constexpr double kSpeedOfLight = 299792458.0;      // m / s

/// Hz -> rad/s.
constexpr double angular(double freq_hz) { return kTwoPi * freq_hz; }
/// rad/s -> Hz.
constexpr double ordinary(double omega_rad_s) { return omega_rad_s / kTwoPi; }

constexpr double ghz(double v) { return v * 1e9; }
constexpr double mhz(double v) { return v * 1e6; }
constexpr double ns(double v) { return v * 1e-9; }
constexpr double us(double v) { return v * 1e-6; }
constexpr double mk(double v) { return v * 1e-3; }
constexpr double nh(double v) { return v * 1e-9; }
constexpr double pf(double v) { return v * 1e-12; }
constexpr double ff(double v) { return v * 1e-15; }

}  // namespace resetsim
