#pragma once

// Strict JSON run configuration. Every physical field accepts a number in SI
// units or a unit-suffixed string ("4.86GHz", "49mK"). Unknown keys are errors.

#include <cstdint>
#include <string>
#include <vector>

#include "resetsim/device.hpp"
#include "resetsim/measurement.hpp"
#include "resetsim/open_system.hpp"
#include "resetsim/reset_protocols.hpp"

namespace resetsim::config {

inline constexpr int kSchemaVersion = 1;

/// Inclusive linear grid.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  std::vector<double> values() const;
};

struct SweepSection {
  GridSpec plateau{0.0, 200e-9, 2e-9};               ///< t_p [s]
  GridSpec plateau_freq{4.20e9, 4.55e9, 10e6};       ///< [Hz]
  double rise_s = 2e-9;
  protocols::PreparedState initial = protocols::PreparedState::E;
  GridSpec band{1e9, 10e9, 5e6};                     ///< S-parameter band [Hz]
  GridSpec mode_band{3.5e9, 6.0e9, 0.5e6};           ///< mode search band [Hz]
  GridSpec coupling{0.5e6, 20e6, 0.5e6};             ///< gamma-map g/2pi [Hz]
  GridSpec detuning{-100e6, 100e6, 1e6};             ///< gamma-map detuning/2pi [Hz]
};

struct ReadoutSection {
  measurement::ReadoutModel model = measurement::ReadoutModel::default_model(3);
  /// Recorded only; the readout resonator is not simulated.
  double resonator_kappa_hz = 3.0e6;
  double resonator_freq_hz = 7.3e9;
};

struct BenchmarkSection {
  std::string protocol = "all";  ///< eg | fe | concatenated | all
  double plateau_s = 200e-9;
  int levels = 3;
  protocols::PreparationModel preparation = protocols::PreparationModel::device_defaults();
};

struct OutputSection {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json", "svg"};
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  Device device = Device::design_defaults();
  bool calibrate_line = true;  ///< eps_eff "auto"
  dynamics::SystemParams system = dynamics::SystemParams::device_defaults();
  SweepSection sweep;
  ReadoutSection readout;
  BenchmarkSection benchmark;
  OutputSection output;
  std::uint64_t seed = 20240601;

  static RunConfig defaults() { return {}; }
  void validate() const;
};

/// Parse and validate; missing keys keep their defaults. Throws ConfigError
/// naming the JSON path (or line and column for syntax errors).
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Canonical JSON of the resolved configuration (SI units, sorted keys).
std::string dump_config(const RunConfig& config);

/// FNV-1a 64 of `text`, as 16 hex digits.
std::string fingerprint(const std::string& text);

}  // namespace resetsim::config
