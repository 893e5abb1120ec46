#pragma once

#include <vector>

namespace resetsim::dynamics {

enum class EdgeShape { RaisedCosine, Linear };

/// Flat segment of the commanded qubit frequency.
struct Plateau {
  double freq_rad_s = 0.0;
  double duration_s = 0.0;
};

/// Piecewise qubit-frequency trajectory: idle -> plateau_1 -> ... -> plateau_n -> idle,
/// every transition an edge of `rise_s`. A single plateau lasts t_p + 2 t_r.
class PulseSchedule {
 public:
  PulseSchedule(double idle_freq_rad_s, std::vector<Plateau> plateaus, double rise_s,
                EdgeShape shape = EdgeShape::RaisedCosine);

  static PulseSchedule square(double idle_freq_rad_s, double plateau_freq_rad_s, double plateau_s,
                              double rise_s, EdgeShape shape = EdgeShape::RaisedCosine);

  /// Commanded frequency at t; throws DomainError outside [0, duration].
  double frequency(double t) const;

  double duration() const noexcept { return duration_; }
  double idle_frequency() const noexcept { return idle_; }
  double rise_time() const noexcept { return rise_; }
  EdgeShape shape() const noexcept { return shape_; }
  const std::vector<Plateau>& plateaus() const noexcept { return plateaus_; }

  double plateau_start(std::size_t k) const;
  double plateau_end(std::size_t k) const;
  /// Segment boundaries, starting at 0 and ending at duration().
  std::vector<double> breakpoints() const;

 private:
  double idle_;
  std::vector<Plateau> plateaus_;
  double rise_;
  EdgeShape shape_;
  double duration_;
};

}  // namespace resetsim::dynamics
