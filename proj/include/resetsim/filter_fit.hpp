#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "resetsim/rf_network.hpp"

namespace resetsim::rf {

/// |S21| edge at `level_db` located by find_cutoff inside [band_lo, band_hi].
struct CutoffTarget {
  double freq_hz = 0.0;
  double level_db = -3.0;
  double band_lo_hz = 0.5e9;
  double band_hi_hz = 12e9;
  double weight = 1.0;
};

/// One-sided bound: |S21| at `freq_hz` must not exceed `max_db`.
struct StopbandTarget {
  double freq_hz = 0.0;
  double max_db = -30.0;
  double weight = 1.0;
};

/// Constant-k section impedance sqrt(L/C).
struct ImageImpedanceTarget {
  double ohm = 50.0;
  double weight = 1.0;
};

using FitTarget = std::variant<CutoffTarget, StopbandTarget, ImageImpedanceTarget>;

struct FitOptions {
  int max_iterations = 2000;
  /// Objective value below which the targets count as met.
  double tolerance = 1e-12;
};

struct FitResult {
  LadderValues values;
  /// One entry per target: relative frequency error, dB excess / 10, or log impedance ratio.
  std::vector<double> residuals;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Per-target residuals for a given ladder.
std::vector<double> target_residuals(const LadderTopology& topology, const LadderValues& values,
                                     std::span<const FitTarget> targets, double z_ref_ohm = 50.0);

/// Nelder-Mead in log(element value) space minimizing the weighted sum of
/// squared residuals. Returns the best point even when not converged.
FitResult fit_elements(const LadderTopology& topology, std::span<const FitTarget> targets,
                       const LadderValues& initial, double z_ref_ohm = 50.0,
                       const FitOptions& options = {});

std::string describe(const FitTarget& target);

}  // namespace resetsim::rf
