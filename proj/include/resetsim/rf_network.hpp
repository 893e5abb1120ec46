#pragma once

// Frequency-domain two-port analysis of lumped LC ladders and transmission
// lines. Time dependence is e^{+i w t}: Z_L = i w L, Z_C = 1 / (i w C).

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace resetsim::rf {

using Complex = std::complex<double>;
using Abcd = Eigen::Matrix2cd;
using SMatrix = Eigen::Matrix2cd;

/// Physical description of a uniform TEM line segment.
struct LineParams {
  double z0_ohm = 50.0;
  double length_m = 0.0;
  double phase_velocity_m_s = 0.0;
  double attenuation_np_m = 0.0;

  /// Phase velocity c / sqrt(eps_eff).
  static LineParams from_permittivity(double z0_ohm, double length_m, double eps_eff,
                                      double attenuation_np_m = 0.0);

  double beta(double omega) const { return omega / phase_velocity_m_s; }
  double effective_permittivity() const;
  void validate() const;
};

/// One cascadable building block: a series impedance, a shunt admittance or
/// a line segment. Immutable after construction.
class TwoPortElement {
 public:
  enum class Kind { SeriesImpedance, ShuntAdmittance, TransmissionLine };
  /// Impedance (series) or admittance (shunt) as a function of angular frequency.
  using Immittance = std::function<Complex(double omega)>;

  static TwoPortElement series(Immittance z, std::string label);
  static TwoPortElement shunt(Immittance y, std::string label);
  static TwoPortElement line(LineParams params, std::string label = "line");

  static TwoPortElement series_inductor(double henry, std::string label = "L");
  static TwoPortElement series_capacitor(double farad, std::string label = "C");
  static TwoPortElement series_resistor(double ohm, std::string label = "R");
  static TwoPortElement shunt_inductor(double henry, std::string label = "L");
  static TwoPortElement shunt_capacitor(double farad, std::string label = "C");
  static TwoPortElement shunt_resistor(double ohm, std::string label = "R");

  Kind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }
  const std::optional<LineParams>& line_params() const noexcept { return line_; }

  /// Series Z or shunt Y at `omega`; throws for line elements.
  Complex immittance(double omega) const;

 private:
  TwoPortElement(Kind kind, Immittance f, std::optional<LineParams> line, std::string label);

  Kind kind_;
  Immittance value_;
  std::optional<LineParams> line_;
  std::string label_;
};

/// Ordered element list, input port first, with a real reference impedance.
class NetworkChain {
 public:
  NetworkChain() = default;
  explicit NetworkChain(std::vector<TwoPortElement> elements, double z_ref_ohm = 50.0);

  const std::vector<TwoPortElement>& elements() const noexcept { return elements_; }
  double z_ref() const noexcept { return z_ref_; }
  bool empty() const noexcept { return elements_.empty(); }
  std::size_t size() const noexcept { return elements_.size(); }

  NetworkChain then(const TwoPortElement& element) const;
  /// Concatenation A ++ B keeps the left operand's reference impedance.
  NetworkChain then(const NetworkChain& other) const;
  /// Same elements in opposite order (port 2 becomes the input).
  NetworkChain reversed() const;

 private:
  std::vector<TwoPortElement> elements_;
  double z_ref_ = 50.0;
};

Abcd abcd_of_element(const TwoPortElement& element, double omega);

/// Ordered product of element matrices. Throws UsageError for an empty chain.
Abcd cascade(const NetworkChain& chain, double omega);

/// Standard ABCD -> S conversion for equal real reference impedances.
SMatrix abcd_to_s(const Abcd& abcd, double z_ref_ohm);

/// Input impedance at port 1 when port 2 is terminated in `load_ohm`.
Complex input_impedance(const Abcd& abcd, Complex load_ohm);

/// Same network seen from port 2 (reciprocal reversal).
Abcd reverse(const Abcd& abcd);

struct SweepPoint {
  double freq_hz = 0.0;
  Complex s11, s21, s12, s22;
};

std::vector<SweepPoint> sweep_s_params(const NetworkChain& chain, std::span<const double> freqs_hz);

/// Linear grid start, start+step, ..., up to stop (inclusive within step/1e6).
std::vector<double> linear_grid(double start, double stop, double step);

double to_db(Complex amplitude);
double to_db(double magnitude);

// ---------------------------------------------------------------------------
// Ladder filters and the diplexer.

enum class FilterKind { LowPass, HighPass };
/// T: series element at both ports. Pi: shunt element at both ports.
enum class LadderForm { T, Pi };

struct LadderTopology {
  FilterKind kind = FilterKind::LowPass;
  int order = 7;
  LadderForm form = LadderForm::T;

  void validate() const;
};

/// Element values of a two-value ladder. For a low-pass ladder the series
/// value is an inductance [H] and the shunt value a capacitance [F]; for a
/// high-pass ladder the series value is a capacitance and the shunt an inductance.
struct LadderValues {
  double series = 0.0;
  double shunt = 0.0;
};

NetworkChain make_ladder(const LadderTopology& topology, const LadderValues& values,
                         double z_ref_ohm = 50.0);

/// sqrt(L / C) of the ladder's constant-k section.
double image_impedance(const LadderTopology& topology, const LadderValues& values);

/// Two filters joined at an ideal lossless parallel junction (the common
/// port). Either branch may be absent, which models an open circuit.
struct DiplexerSpec {
  std::optional<NetworkChain> lowpass;
  std::optional<NetworkChain> highpass;
  double z_ref_ohm = 50.0;
};

/// Three-port transmissions of the diplexer with all ports matched.
/// Port 1 is the common port, 2 the low-pass port, 3 the high-pass port.
struct DiplexerResponse {
  double freq_hz = 0.0;
  Complex s11, s21, s31, s32;
};

DiplexerResponse diplexer_response(const DiplexerSpec& spec, double freq_hz);

struct IsolationReport {
  double worst_db = 0.0;       ///< max |S32| over the band
  double worst_freq_hz = 0.0;
  double best_db = 0.0;        ///< min |S32| over the band
  double best_freq_hz = 0.0;
};

/// Worst-case low-pass-port to high-pass-port transmission over [lo, hi].
IsolationReport diplexer_isolation(const DiplexerSpec& spec, double band_lo_hz, double band_hi_hz,
                                   double step_hz = 1e6);

/// Frequency where |S21| crosses `target_db`. The band is scanned with
/// `scan_step_hz`; when one band end is in the passband the crossing nearest
/// the stopband end is the filter edge. Refined by bisection to `tol_hz`.
double find_cutoff(const NetworkChain& chain, double band_lo_hz, double band_hi_hz,
                   double target_db = -3.0, double scan_step_hz = 1e6, double tol_hz = 1.0);

}  // namespace resetsim::rf
