#pragma once

// Standing-wave dissipator mode of a line bounded by two reflective filters.

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "resetsim/rf_network.hpp"

namespace resetsim::modes {

using rf::Complex;

/// Reflection coefficient seen from the line into a termination, vs angular frequency.
using ReflectionFn = std::function<Complex(double omega)>;

/// Reflection from the line side into `filter` whose far port is terminated
/// in the filter's reference impedance. The filter's first element faces the line.
Complex boundary_reflection(const rf::NetworkChain& filter, double omega, double line_z0_ohm);

/// Boundary as a reusable function object.
ReflectionFn filter_boundary(rf::NetworkChain filter, double line_z0_ohm);

/// Frequency-independent reflection (ideal mirror, matched load, ...).
ReflectionFn constant_boundary(Complex gamma);

struct DissipatorMode {
  double omega_rad_s = 0.0;
  double kappa_rad_s = 0.0;
  /// Number of half wavelengths along the line, round(beta L / pi); full-wave = 2.
  int order = 0;
  double round_trip_s = 0.0;
  std::string method;

  double freq_hz() const;
  double kappa_hz() const;
};

struct ModeSearchOptions {
  double scan_step_hz = 0.5e6;
  double tolerance_hz = 1.0;
};

/// arg(Gamma_L Gamma_R e^{-2 i beta L}) wrapped to (-pi, pi].
double round_trip_phase(const rf::LineParams& line, const ReflectionFn& left, const ReflectionFn& right,
                        double omega);

/// Roots of the round-trip phase condition inside [band_lo, band_hi].
/// Each mode carries its round-trip linewidth when the cavity is lossy, else 0.
std::vector<DissipatorMode> find_modes(const rf::LineParams& line, const ReflectionFn& left,
                                       const ReflectionFn& right, double band_lo_hz, double band_hi_hz,
                                       const ModeSearchOptions& options = {});

/// -d arg(Gamma)/d omega by central difference.
double reflection_group_delay(const ReflectionFn& gamma, double omega);

/// Round-trip time including the group delay of both mirrors.
double round_trip_time(const rf::LineParams& line, const ReflectionFn& left, const ReflectionFn& right,
                       double omega);

/// kappa = -ln(|Gamma_L Gamma_R|^2 e^{-4 alpha L}) / tau_rt.
/// Throws ZeroLossError for a lossless cavity.
double linewidth_roundtrip(const DissipatorMode& mode, const rf::LineParams& line, const ReflectionFn& left,
                           const ReflectionFn& right);

/// Mirror-leakage-only part of the linewidth (alpha forced to 0).
double leakage_linewidth(const DissipatorMode& mode, const rf::LineParams& line, const ReflectionFn& left,
                         const ReflectionFn& right);

/// Line attenuation that makes the round-trip linewidth equal `target_kappa_rad_s`.
/// Returns a negative value when mirror leakage alone already exceeds the target.
double attenuation_for_linewidth(const DissipatorMode& mode, const rf::LineParams& line,
                                 const ReflectionFn& left, const ReflectionFn& right,
                                 double target_kappa_rad_s);

/// Phase velocity that places the mode of `order` half wavelengths exactly at
/// `target_freq_hz` given the actual boundary phases.
double calibrate_phase_velocity(const rf::LineParams& line, const ReflectionFn& left, const ReflectionFn& right,
                                double target_freq_hz, int order);

struct LorentzianFit {
  double center_rad_s = 0.0;
  double fwhm_rad_s = 0.0;
  double amplitude = 0.0;
  double baseline = 0.0;
  /// RMS residual relative to the fitted amplitude.
  double relative_rms = 0.0;
  bool poor_fit = false;
  bool converged = false;
};

/// Damped least squares of A / (1 + (2 (w - w0) / fwhm)^2) + B over (w0, fwhm, A, B),
/// initialized from a peak / half-maximum scan.
LorentzianFit fit_lorentzian(std::span<const double> omega, std::span<const double> power,
                             double poor_fit_threshold = 0.05);

double lorentzian(double omega, const LorentzianFit& fit);

/// Fit |S21|^2 of a full LP-line-LP chain. The band is scanned with
/// `n_points`, then re-sampled over +-8 estimated linewidths around the peak.
LorentzianFit linewidth_lorentzian(const rf::NetworkChain& full_chain, double band_lo_hz, double band_hi_hz,
                                   std::size_t n_points = 4001);

struct PurcellFactor {
  double linear = 0.0;
  double db = 0.0;
};

/// (1 - |S11|^2) / |1 - S11|^2.
PurcellFactor purcell_suppression(Complex s11);

}  // namespace resetsim::modes
