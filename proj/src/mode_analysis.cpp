#include "resetsim/mode_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "resetsim/errors.hpp"
#include "resetsim/optimize.hpp"
#include "resetsim/units.hpp"

namespace resetsim::modes {

namespace {

// Below this round-trip amplitude there is no cavity worth calling a mode.
constexpr double kMinRoundTripAmplitude = 1e-2;

double wrap_phase(double x) {
  x = std::remainder(x, kTwoPi);
  return x <= -kPi ? x + kTwoPi : x;
}

}  // namespace

double DissipatorMode::freq_hz() const { return ordinary(omega_rad_s); }
double DissipatorMode::kappa_hz() const { return ordinary(kappa_rad_s); }

Complex boundary_reflection(const rf::NetworkChain& filter, double omega, double line_z0_ohm) {
  const Complex z_in = rf::input_impedance(rf::cascade(filter, omega), filter.z_ref());
  if (!std::isfinite(z_in.real())) return 1.0;
  const Complex den = z_in + line_z0_ohm;
  if (std::abs(den) == 0.0) throw SingularNetworkError("Z_in + Z0 = 0 at the cavity boundary");
  return (z_in - line_z0_ohm) / den;
}

ReflectionFn filter_boundary(rf::NetworkChain filter, double line_z0_ohm) {
  return [filter = std::move(filter), line_z0_ohm](double omega) {
    return boundary_reflection(filter, omega, line_z0_ohm);
  };
}

ReflectionFn constant_boundary(Complex gamma) {
  return [gamma](double) { return gamma; };
}

double round_trip_phase(const rf::LineParams& line, const ReflectionFn& left, const ReflectionFn& right,
                        double omega) {
  const double propagation = -2.0 * line.beta(omega) * line.length_m;
  return wrap_phase(std::arg(left(omega) * right(omega)) + propagation);
}

std::vector<DissipatorMode> find_modes(const rf::LineParams& line, const ReflectionFn& left,
                                       const ReflectionFn& right, double band_lo_hz, double band_hi_hz,
                                       const ModeSearchOptions& options) {
  line.validate();
  if (!(band_lo_hz > 0.0) || !(band_hi_hz > band_lo_hz)) throw UsageError("invalid mode search band");

  auto phase = [&](double f) { return round_trip_phase(line, left, right, angular(f)); };
  auto amplitude = [&](double f) { return std::abs(left(angular(f)) * right(angular(f))); };

  std::vector<DissipatorMode> modes;
  const auto grid = rf::linear_grid(band_lo_hz, band_hi_hz, options.scan_step_hz);
  double prev = phase(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = phase(grid[i]);
    const bool sign_change = (prev > 0.0) != (cur > 0.0) || cur == 0.0;
    // A wrap from +pi to -pi also flips sign; real roots have a small jump.
    if (sign_change && std::abs(cur - prev) < kPi) {
      double a = grid[i - 1], b = grid[i];
      const bool a_positive = prev > 0.0;
      while (b - a > options.tolerance_hz) {
        const double m = 0.5 * (a + b);
        if ((phase(m) > 0.0) == a_positive) a = m; else b = m;
      }
      const double f = 0.5 * (a + b);
      if (amplitude(f) >= kMinRoundTripAmplitude) {
        DissipatorMode mode;
        mode.omega_rad_s = angular(f);
        mode.order = static_cast<int>(std::lround(line.beta(mode.omega_rad_s) * line.length_m / kPi));
        mode.round_trip_s = round_trip_time(line, left, right, mode.omega_rad_s);
        mode.method = "phase-roundtrip";
        try {
          mode.kappa_rad_s = linewidth_roundtrip(mode, line, left, right);
        } catch (const ZeroLossError&) {
          mode.kappa_rad_s = 0.0;
        }
        modes.push_back(mode);
      }
    }
    prev = cur;
  }
  return modes;
}

double reflection_group_delay(const ReflectionFn& gamma, double omega) {
  const double h = omega * 1e-6;
  const double dphi = wrap_phase(std::arg(gamma(omega + h)) - std::arg(gamma(omega - h)));
  return -dphi / (2.0 * h);
}

double round_trip_time(const rf::LineParams& line, const ReflectionFn& left, const ReflectionFn& right,
                       double omega) {
  return 2.0 * line.length_m / line.phase_velocity_m_s + reflection_group_delay(left, omega) +
         reflection_group_delay(right, omega);
}

double linewidth_roundtrip(const DissipatorMode& mode, const rf::LineParams& line, const ReflectionFn& left,
                           const ReflectionFn& right) {
  const double w = mode.omega_rad_s;
  const double mirrors = std::abs(left(w) * right(w));
  const double loss = -2.0 * std::log(mirrors) + 4.0 * line.attenuation_np_m * line.length_m;
  if (!(loss > 1e-15)) throw ZeroLossError("lossless cavity: |Gamma_L Gamma_R| = 1 and alpha = 0");
  const double tau = mode.round_trip_s > 0.0 ? mode.round_trip_s : round_trip_time(line, left, right, w);
  return loss / tau;
}

double leakage_linewidth(const DissipatorMode& mode, const rf::LineParams& line, const ReflectionFn& left,
                         const ReflectionFn& right) {
  rf::LineParams lossless = line;
  lossless.attenuation_np_m = 0.0;
  return linewidth_roundtrip(mode, lossless, left, right);
}

double attenuation_for_linewidth(const DissipatorMode& mode, const rf::LineParams& line,
                                 const ReflectionFn& left, const ReflectionFn& right,
                                 double target_kappa_rad_s) {
  const double w = mode.omega_rad_s;
  const double tau = mode.round_trip_s > 0.0 ? mode.round_trip_s : round_trip_time(line, left, right, w);
  const double mirrors = std::abs(left(w) * right(w));
  return (target_kappa_rad_s * tau + 2.0 * std::log(mirrors)) / (4.0 * line.length_m);
}

double calibrate_phase_velocity(const rf::LineParams& line, const ReflectionFn& left, const ReflectionFn& right,
                                double target_freq_hz, int order) {
  if (order < 1) throw DomainError("mode order must be >= 1");
  const double w = angular(target_freq_hz);
  const double boundary = std::arg(left(w) * right(w));
  // 2 beta L = boundary + 2 pi order  =>  beta L = pi order + boundary / 2.
  return w * line.length_m / (kPi * order + 0.5 * boundary);
}

// ---------------------------------------------------------------------------

double lorentzian(double omega, const LorentzianFit& fit) {
  const double u = 2.0 * (omega - fit.center_rad_s) / fit.fwhm_rad_s;
  return fit.amplitude / (1.0 + u * u) + fit.baseline;
}

LorentzianFit fit_lorentzian(std::span<const double> omega, std::span<const double> power,
                             double poor_fit_threshold) {
  if (omega.size() != power.size() || omega.size() < 5) {
    throw UsageError("Lorentzian fit needs >= 5 matching samples");
  }
  const std::size_t n = omega.size();
  const auto peak = static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
  const double p_max = power[peak];
  const double p_min = *std::min_element(power.begin(), power.end());
  if (!(p_max > p_min)) throw NotFoundError("flat data: no peak to fit");

  // Half-maximum crossings with linear interpolation.
  const double half = 0.5 * (p_max + p_min);
  double left_w = std::numeric_limits<double>::quiet_NaN(), right_w = left_w;
  for (std::size_t i = peak; i > 0; --i) {
    if (power[i - 1] < half) {
      const double t = (half - power[i - 1]) / (power[i] - power[i - 1]);
      left_w = omega[i - 1] + t * (omega[i] - omega[i - 1]);
      break;
    }
  }
  for (std::size_t i = peak; i + 1 < n; ++i) {
    if (power[i + 1] < half) {
      const double t = (power[i] - half) / (power[i] - power[i + 1]);
      right_w = omega[i] + t * (omega[i + 1] - omega[i]);
      break;
    }
  }
  double width;
  if (std::isfinite(left_w) && std::isfinite(right_w)) width = right_w - left_w;
  else if (std::isfinite(left_w)) width = 2.0 * (omega[peak] - left_w);
  else if (std::isfinite(right_w)) width = 2.0 * (right_w - omega[peak]);
  else width = 0.1 * (omega.back() - omega.front());
  width = std::max(width, 1e-9 * std::abs(omega[peak]));

  // Work in scaled units: u = (w - w_peak) / width, power / p_max.
  const double w0 = omega[peak];
  std::vector<double> u(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = (omega[i] - w0) / width;
    y[i] = power[i] / p_max;
  }
  auto residuals = [&](std::span<const double> p, std::span<double> out) {
    const double fw = std::abs(p[1]) + 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = 2.0 * (u[i] - p[0]) / fw;
      out[i] = p[2] / (1.0 + x * x) + p[3] - y[i];
    }
  };
  const double b0 = p_min / p_max;
  const auto ls = optimize::levenberg_marquardt(residuals, {0.0, 1.0, 1.0 - b0, b0}, n);

  LorentzianFit fit;
  fit.center_rad_s = w0 + ls.params[0] * width;
  fit.fwhm_rad_s = std::abs(ls.params[1]) * width;
  fit.amplitude = ls.params[2] * p_max;
  fit.baseline = ls.params[3] * p_max;
  fit.relative_rms = ls.rms_residual / std::max(std::abs(ls.params[2]), 1e-300);
  fit.poor_fit = !(fit.relative_rms <= poor_fit_threshold);
  fit.converged = ls.converged;
  return fit;
}

LorentzianFit linewidth_lorentzian(const rf::NetworkChain& full_chain, double band_lo_hz, double band_hi_hz,
                                   std::size_t n_points) {
  if (n_points < 5) throw UsageError("need at least 5 sweep points");
  auto sample = [&](double lo, double hi, std::vector<double>& w, std::vector<double>& p) {
    w.resize(n_points);
    p.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
      const double f = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
      w[i] = angular(f);
      p[i] = std::norm(rf::abcd_to_s(rf::cascade(full_chain, w[i]), full_chain.z_ref())(1, 0));
    }
  };

  std::vector<double> w, p;
  sample(band_lo_hz, band_hi_hz, w, p);
  const auto peak = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  if (peak == 0 || peak + 1 == n_points) throw NotFoundError("|S21|^2 peak lies on the band edge");

  double center_hz = ordinary(w[peak]);
  double step_hz = (band_hi_hz - band_lo_hz) / static_cast<double>(n_points - 1);
  // Width estimate from the coarse scan; unresolved peaks start at one grid step.
  double width_hz = step_hz;
  {
    const double half = 0.5 * p[peak];
    std::size_t l = peak, r = peak;
    while (l > 0 && p[l] > half) --l;
    while (r + 1 < n_points && p[r] > half) ++r;
    width_hz = std::max(step_hz, ordinary(w[r] - w[l]));
  }

  LorentzianFit fit;
  for (int pass = 0; pass < 3; ++pass) {
    const double lo = std::max(band_lo_hz, center_hz - 8.0 * width_hz);
    const double hi = std::min(band_hi_hz, center_hz + 8.0 * width_hz);
    sample(lo, hi, w, p);
    fit = fit_lorentzian(w, p);
    const double new_width = ordinary(fit.fwhm_rad_s);
    const bool settled = std::abs(new_width - width_hz) < 0.02 * width_hz;
    center_hz = ordinary(fit.center_rad_s);
    width_hz = new_width;
    if (settled) break;
  }
  return fit;
}

PurcellFactor purcell_suppression(Complex s11) {
  const double mag2 = std::norm(s11);
  if (mag2 > 1.0 + 1e-12) throw DomainError("|S11| > 1 is not passive");
  const double den = std::norm(1.0 - s11);
  if (den == 0.0) throw DomainError("S11 = +1: open-circuit singularity (0/0)");
  PurcellFactor f;
  f.linear = std::max(0.0, 1.0 - mag2) / den;
  f.db = f.linear > 0.0 ? 10.0 * std::log10(f.linear) : -std::numeric_limits<double>::infinity();
  return f;
}

}  // namespace resetsim::modes
