#pragma once

// Boltzmann population / temperature conversions and a Gaussian single-shot
// readout model with nearest-centroid discrimination.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace resetsim::measurement {

/// Excited population of a two-level system in equilibrium at `temperature_k`.
double thermal_population(double omega_rad_s, double temperature_k);

/// Inverse of thermal_population. Throws NonThermalError for p_e >= 0.5 and
/// DomainError for p_e <= 0 or non-positive frequency.
double effective_temperature(double omega_rad_s, double p_excited);

struct IqPoint {
  double i = 0.0;
  double q = 0.0;
};

struct ReadoutModel {
  std::vector<IqPoint> centroids;  ///< index = state (g, e, f, ...)
  double sigma = 1.0;
  std::size_t shots = 100000;
  std::uint64_t seed = 0;

  /// Centroids tuned for ~0.3 % two-state misassignment at sigma = 1:
  /// g = (0, 0), e = (5.5, 0), f at 5.5 from both.
  static ReadoutModel default_model(int states = 3);

  std::size_t states() const noexcept { return centroids.size(); }
  void validate() const;
};

struct Shot {
  IqPoint point;
  int true_state = 0;
  int assigned_state = -1;
};

/// Draw `model.shots` shots: a true state from `populations`, then a point
/// from that state's isotropic Gaussian. `stream` selects an independent sub-stream.
std::vector<Shot> sample_shots(std::span<const double> populations, const ReadoutModel& model,
                               std::uint64_t stream = 0);

/// Nearest centroid; exact ties go to the lowest state index.
int classify(const IqPoint& point, const ReadoutModel& model);
void classify(std::vector<Shot>& shots, const ReadoutModel& model);

struct AssignmentMatrix {
  /// rows: prepared state, columns: assigned state.
  std::vector<std::vector<double>> p;

  std::size_t size() const noexcept { return p.size(); }
  double operator()(std::size_t prepared, std::size_t assigned) const { return p.at(prepared).at(assigned); }
};

/// Monte-Carlo assignment matrix; row k samples `prepared[k]` on sub-stream k.
AssignmentMatrix assignment_matrix(const std::vector<std::vector<double>>& prepared, const ReadoutModel& model);

/// Gaussian tail Q(x) = P(Z > x).
double gaussian_tail(double x);

std::string state_label(std::size_t index);

}  // namespace resetsim::measurement
