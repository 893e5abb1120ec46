#include "resetsim/filter_fit.hpp"

#include <cmath>
#include <sstream>

#include "resetsim/errors.hpp"
#include "resetsim/optimize.hpp"
#include "resetsim/units.hpp"

namespace resetsim::rf {

namespace {

// Residual assigned when the cutoff edge cannot be located at all.
constexpr double kMissingCutoff = 1.0;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double weight_of(const FitTarget& t) {
  return std::visit([](const auto& x) { return x.weight; }, t);
}

}  // namespace

std::vector<double> target_residuals(const LadderTopology& topology, const LadderValues& values,
                                     std::span<const FitTarget> targets, double z_ref_ohm) {
  const NetworkChain chain = make_ladder(topology, values, z_ref_ohm);
  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto& target : targets) {
    out.push_back(std::visit(
        overloaded{
            [&](const CutoffTarget& t) {
              try {
                const double f = find_cutoff(chain, t.band_lo_hz, t.band_hi_hz, t.level_db, 5e6, 10.0);
                return (f - t.freq_hz) / t.freq_hz;
              } catch (const NotFoundError&) {
                return kMissingCutoff;
              }
            },
            [&](const StopbandTarget& t) {
              const double db = to_db(abcd_to_s(cascade(chain, angular(t.freq_hz)), z_ref_ohm)(1, 0));
              return db > t.max_db ? (db - t.max_db) / 10.0 : 0.0;
            },
            [&](const ImageImpedanceTarget& t) { return std::log(image_impedance(topology, values) / t.ohm); },
        },
        target));
  }
  return out;
}

FitResult fit_elements(const LadderTopology& topology, std::span<const FitTarget> targets,
                       const LadderValues& initial, double z_ref_ohm, const FitOptions& options) {
  if (targets.empty()) throw UsageError("fit_elements needs at least one target");
  if (!(initial.series > 0.0) || !(initial.shunt > 0.0)) {
    throw DomainError("initial element values must be positive");
  }
  topology.validate();

  auto unpack = [](std::span<const double> x) { return LadderValues{std::exp(x[0]), std::exp(x[1])}; };
  auto objective = [&](std::span<const double> x) {
    const auto r = target_residuals(topology, unpack(x), targets, z_ref_ohm);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) sum += weight_of(targets[i]) * r[i] * r[i];
    return sum;
  };

  const std::vector<double> start{std::log(initial.series), std::log(initial.shunt)};
  FitResult res;
  const double f0 = objective(start);
  if (f0 <= options.tolerance) {
    res.values = initial;
    res.objective = f0;
    res.iterations = 0;
    res.converged = true;
  } else {
    optimize::SimplexOptions so;
    so.max_iterations = options.max_iterations;
    so.initial_step = 0.05;
    so.f_tolerance = options.tolerance * 1e-3;
    so.x_tolerance = 1e-9;
    const auto nm = optimize::nelder_mead(objective, start, so);
    res.values = unpack(nm.x);
    res.objective = nm.value;
    res.iterations = nm.iterations;
    res.converged = nm.converged || nm.value <= options.tolerance;
  }
  res.residuals = target_residuals(topology, res.values, targets, z_ref_ohm);
  return res;
}

std::string describe(const FitTarget& target) {
  std::ostringstream s;
  std::visit(overloaded{
                 [&](const CutoffTarget& t) { s << "cutoff " << t.level_db << " dB @ " << t.freq_hz / 1e9 << " GHz"; },
                 [&](const StopbandTarget& t) { s << "stopband <= " << t.max_db << " dB @ " << t.freq_hz / 1e9 << " GHz"; },
                 [&](const ImageImpedanceTarget& t) { s << "image impedance " << t.ohm << " ohm"; },
             },
             target);
  return s.str();
}

}  // namespace resetsim::rf
