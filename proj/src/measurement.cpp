#include "resetsim/measurement.hpp"

#include <cmath>
#include <numeric>

#include "resetsim/errors.hpp"
#include "resetsim/rng.hpp"
#include "resetsim/units.hpp"

namespace resetsim::measurement {

double thermal_population(double omega, double temperature) {
  if (!(omega > 0.0)) throw DomainError("frequency must be > 0");
  if (!(temperature >= 0.0)) throw DomainError("temperature must be >= 0");
  if (temperature == 0.0) return 0.0;
  const double x = kHbar * omega / (kBoltzmann * temperature);
  // r / (1 + r) with r = e^{-x}
  return 1.0 / (std::exp(x) + 1.0);
}

double effective_temperature(double omega, double p) {
  if (!(omega > 0.0)) throw DomainError("frequency must be > 0");
  if (p >= 0.5) throw NonThermalError("p_e = " + std::to_string(p) + " >= 0.5 has no positive temperature");
  if (!(p > 0.0)) throw DomainError("p_e must be > 0");
  return kHbar * omega / (kBoltzmann * std::log((1.0 - p) / p));
}

ReadoutModel ReadoutModel::default_model(int states) {
  if (states < 2 || states > 3) throw DomainError("default readout model has 2 or 3 states");
  ReadoutModel m;
  m.centroids = {{0.0, 0.0}, {5.5, 0.0}};
  if (states == 3) m.centroids.push_back({2.75, 5.5 * std::sqrt(3.0) / 2.0});
  m.sigma = 1.0;
  return m;
}

void ReadoutModel::validate() const {
  if (centroids.size() < 2) throw DomainError("readout model needs at least two centroids");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be > 0");
  for (std::size_t a = 0; a < centroids.size(); ++a) {
    for (std::size_t b = a + 1; b < centroids.size(); ++b) {
      if (centroids[a].i == centroids[b].i && centroids[a].q == centroids[b].q)
        throw DomainError("centroids must be pairwise distinct");
    }
  }
}

namespace {

void check_simplex(std::span<const double> populations, std::size_t states) {
  if (populations.empty() || populations.size() > states)
    throw DomainError("population vector length must be 1.." + std::to_string(states));
  double total = 0.0;
  for (double p : populations) {
    if (!(p >= -1e-12) || !std::isfinite(p)) throw DomainError("populations must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) throw DomainError("populations must sum to 1 (got " + std::to_string(total) + ")");
}

}  // namespace

std::vector<Shot> sample_shots(std::span<const double> populations, const ReadoutModel& model,
                               std::uint64_t stream) {
  model.validate();
  check_simplex(populations, model.states());
  const double total = std::accumulate(populations.begin(), populations.end(), 0.0);

  Rng rng(derive_seed(model.seed, stream));
  std::vector<Shot> shots(model.shots);
  for (auto& s : shots) {
    const double u = rng.uniform() * total;
    double acc = 0.0;
    int state = static_cast<int>(populations.size()) - 1;
    for (std::size_t k = 0; k < populations.size(); ++k) {
      acc += populations[k];
      if (u < acc) {
        state = static_cast<int>(k);
        break;
      }
    }
    const auto& c = model.centroids[state];
    s.true_state = state;
    s.point.i = c.i + model.sigma * rng.normal();
    s.point.q = c.q + model.sigma * rng.normal();
  }
  classify(shots, model);
  return shots;
}

int classify(const IqPoint& point, const ReadoutModel& model) {
  int best = 0;
  double best_d = INFINITY;
  for (std::size_t k = 0; k < model.centroids.size(); ++k) {
    const double di = point.i - model.centroids[k].i;
    const double dq = point.q - model.centroids[k].q;
    const double d = di * di + dq * dq;
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

void classify(std::vector<Shot>& shots, const ReadoutModel& model) {
  for (auto& s : shots) s.assigned_state = classify(s.point, model);
}

AssignmentMatrix assignment_matrix(const std::vector<std::vector<double>>& prepared, const ReadoutModel& model) {
  if (model.shots == 0) throw DomainError("shots must be > 0");
  AssignmentMatrix m;
  for (std::size_t row = 0; row < prepared.size(); ++row) {
    const auto shots = sample_shots(prepared[row], model, row);
    std::vector<double> counts(model.states(), 0.0);
    for (const auto& s : shots) counts[s.assigned_state] += 1.0;
    for (auto& c : counts) c /= static_cast<double>(shots.size());
    m.p.push_back(std::move(counts));
  }
  return m;
}

double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

std::string state_label(std::size_t index) {
  static constexpr const char* kLabels[] = {"g", "e", "f", "h"};
  return index < 4 ? kLabels[index] : std::to_string(index);
}

}  // namespace resetsim::measurement
