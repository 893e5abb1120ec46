#include "resetsim/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resetsim/errors.hpp"
#include "resetsim/units.hpp"

namespace resetsim::dynamics {

PulseSchedule::PulseSchedule(double idle_freq_rad_s, std::vector<Plateau> plateaus, double rise_s,
                             EdgeShape shape)
    : idle_(idle_freq_rad_s), plateaus_(std::move(plateaus)), rise_(rise_s), shape_(shape) {
  if (!(rise_s >= 0.0) || !std::isfinite(rise_s)) throw DomainError("rise time must be >= 0");
  duration_ = rise_ * static_cast<double>(plateaus_.size() + 1);
  for (const auto& p : plateaus_) {
    if (!(p.duration_s >= 0.0)) throw DomainError("plateau duration must be >= 0");
    duration_ += p.duration_s;
  }
  if (plateaus_.empty()) duration_ = 0.0;
}

PulseSchedule PulseSchedule::square(double idle_freq_rad_s, double plateau_freq_rad_s, double plateau_s,
                                    double rise_s, EdgeShape shape) {
  return PulseSchedule(idle_freq_rad_s, {{plateau_freq_rad_s, plateau_s}}, rise_s, shape);
}

double PulseSchedule::plateau_start(std::size_t k) const {
  double t = rise_;
  for (std::size_t i = 0; i < k; ++i) t += plateaus_.at(i).duration_s + rise_;
  return t;
}

double PulseSchedule::plateau_end(std::size_t k) const { return plateau_start(k) + plateaus_.at(k).duration_s; }

std::vector<double> PulseSchedule::breakpoints() const {
  std::vector<double> b{0.0};
  for (std::size_t k = 0; k < plateaus_.size(); ++k) {
    b.push_back(plateau_start(k));
    b.push_back(plateau_end(k));
  }
  if (!plateaus_.empty()) b.push_back(duration_);
  return b;
}

double PulseSchedule::frequency(double t) const {
  const double slack = 1e-12 * std::max(duration_, 1e-9);
  if (!(t >= -slack) || !(t <= duration_ + slack)) {
    throw DomainError("t = " + std::to_string(t) + " s lies outside the pulse schedule [0, " +
                      std::to_string(duration_) + "]");
  }
  if (plateaus_.empty()) return idle_;

  auto edge = [&](double from, double to, double s) {
    const double x = rise_ > 0.0 ? std::clamp(s / rise_, 0.0, 1.0) : 1.0;
    const double w = shape_ == EdgeShape::RaisedCosine ? 0.5 * (1.0 - std::cos(kPi * x)) : x;
    return from + (to - from) * w;
  };

  double start = 0.0;
  double prev = idle_;
  for (const auto& p : plateaus_) {
    if (t < start + rise_) return edge(prev, p.freq_rad_s, t - start);
    start += rise_;
    if (t <= start + p.duration_s) return p.freq_rad_s;
    start += p.duration_s;
    prev = p.freq_rad_s;
  }
  return edge(prev, idle_, t - start);
}

}  // namespace resetsim::dynamics
