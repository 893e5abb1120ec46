#pragma once

// The reset-line device: two identical diplexers joined by a low-pass line.

#include <vector>

#include "resetsim/filter_fit.hpp"
#include "resetsim/mode_analysis.hpp"
#include "resetsim/rf_network.hpp"

namespace resetsim {

struct Device {
  rf::LadderTopology lowpass_topology{rf::FilterKind::LowPass, 7, rf::LadderForm::T};
  rf::LadderTopology highpass_topology{rf::FilterKind::HighPass, 7, rf::LadderForm::T};
  rf::LadderValues lowpass;   ///< series L, shunt C
  rf::LadderValues highpass;  ///< series C, shunt L
  rf::LineParams line;
  double z_ref_ohm = 50.0;
  double design_mode_freq_hz = 4.23e9;
  int mode_order = 2;  ///< full-wave mode

  /// Design values L = 4.488 nH, C = 1.809 pF (low-pass), C = 0.266 pF,
  /// L = 0.660 nH (high-pass), 25 mm line; phase velocity calibrated so the
  /// full-wave mode sits at 4.23 GHz.
  static Device design_defaults();

  rf::NetworkChain lowpass_chain() const;
  rf::NetworkChain highpass_chain() const;
  /// Low-pass filter, line, mirrored low-pass filter.
  rf::NetworkChain dissipator_chain() const;
  rf::DiplexerSpec diplexer() const;
  modes::ReflectionFn mirror() const;

  /// Copy with the line phase velocity set so mode `mode_order` lands on
  /// `design_mode_freq_hz` for the current filter values.
  Device calibrated() const;

  void validate() const;
};

std::vector<rf::FitTarget> default_lowpass_targets();
std::vector<rf::FitTarget> default_highpass_targets();

struct DeviceFit {
  Device device;
  rf::FitResult lowpass;
  rf::FitResult highpass;
};

/// Fit both filters to their default targets, then recalibrate the line.
DeviceFit fit_device(const Device& start, const rf::FitOptions& options = {});

}  // namespace resetsim
