#include "resetsim/rf_network.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "resetsim/errors.hpp"
#include "resetsim/units.hpp"

namespace resetsim::rf {

namespace {

constexpr Complex kI{0.0, 1.0};

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

LineParams LineParams::from_permittivity(double z0_ohm, double length_m, double eps_eff,
                                         double attenuation_np_m) {
  require_positive(eps_eff, "effective permittivity");
  LineParams p;
  p.z0_ohm = z0_ohm;
  p.length_m = length_m;
  p.phase_velocity_m_s = kSpeedOfLight / std::sqrt(eps_eff);
  p.attenuation_np_m = attenuation_np_m;
  p.validate();
  return p;
}

double LineParams::effective_permittivity() const {
  const double r = kSpeedOfLight / phase_velocity_m_s;
  return r * r;
}

void LineParams::validate() const {
  require_positive(z0_ohm, "line Z0");
  require_positive(phase_velocity_m_s, "line phase velocity");
  if (!(length_m >= 0.0) || !std::isfinite(length_m)) {
    throw DomainError("line length must be >= 0");
  }
  if (!(attenuation_np_m >= 0.0) || !std::isfinite(attenuation_np_m)) {
    throw DomainError("line attenuation must be >= 0");
  }
}

TwoPortElement::TwoPortElement(Kind kind, Immittance f, std::optional<LineParams> line,
                               std::string label)
    : kind_(kind), value_(std::move(f)), line_(std::move(line)), label_(std::move(label)) {}

TwoPortElement TwoPortElement::series(Immittance z, std::string label) {
  return TwoPortElement(Kind::SeriesImpedance, std::move(z), std::nullopt, std::move(label));
}

TwoPortElement TwoPortElement::shunt(Immittance y, std::string label) {
  return TwoPortElement(Kind::ShuntAdmittance, std::move(y), std::nullopt, std::move(label));
}

TwoPortElement TwoPortElement::line(LineParams params, std::string label) {
  params.validate();
  return TwoPortElement(Kind::TransmissionLine, nullptr, params, std::move(label));
}

TwoPortElement TwoPortElement::series_inductor(double henry, std::string label) {
  return series([henry](double w) { return kI * w * henry; }, std::move(label));
}

TwoPortElement TwoPortElement::series_capacitor(double farad, std::string label) {
  return series([farad](double w) { return 1.0 / (kI * w * farad); }, std::move(label));
}

TwoPortElement TwoPortElement::series_resistor(double ohm, std::string label) {
  return series([ohm](double) { return Complex(ohm, 0.0); }, std::move(label));
}

TwoPortElement TwoPortElement::shunt_inductor(double henry, std::string label) {
  return shunt([henry](double w) { return 1.0 / (kI * w * henry); }, std::move(label));
}

TwoPortElement TwoPortElement::shunt_capacitor(double farad, std::string label) {
  return shunt([farad](double w) { return kI * w * farad; }, std::move(label));
}

TwoPortElement TwoPortElement::shunt_resistor(double ohm, std::string label) {
  return shunt([ohm](double) { return Complex(1.0 / ohm, 0.0); }, std::move(label));
}

Complex TwoPortElement::immittance(double omega) const {
  if (kind_ == Kind::TransmissionLine) {
    throw UsageError("immittance() is undefined for line element '" + label_ + "'");
  }
  return value_(omega);
}

NetworkChain::NetworkChain(std::vector<TwoPortElement> elements, double z_ref_ohm)
    : elements_(std::move(elements)), z_ref_(z_ref_ohm) {
  require_positive(z_ref_ohm, "reference impedance");
}

NetworkChain NetworkChain::then(const TwoPortElement& element) const {
  auto copy = elements_;
  copy.push_back(element);
  return NetworkChain(std::move(copy), z_ref_);
}

NetworkChain NetworkChain::then(const NetworkChain& other) const {
  auto copy = elements_;
  copy.insert(copy.end(), other.elements_.begin(), other.elements_.end());
  return NetworkChain(std::move(copy), z_ref_);
}

NetworkChain NetworkChain::reversed() const {
  auto copy = elements_;
  std::reverse(copy.begin(), copy.end());
  return NetworkChain(std::move(copy), z_ref_);
}

Abcd abcd_of_element(const TwoPortElement& element, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw DomainError("angular frequency must be positive, got " + std::to_string(omega));
  }
  Abcd m = Abcd::Identity();
  switch (element.kind()) {
    case TwoPortElement::Kind::SeriesImpedance: {
      const Complex z = element.immittance(omega);
      if (!finite(z)) throw DomainError("non-finite impedance in element '" + element.label() + "'");
      m(0, 1) = z;
      break;
    }
    case TwoPortElement::Kind::ShuntAdmittance: {
      const Complex y = element.immittance(omega);
      if (!finite(y)) throw DomainError("non-finite admittance in element '" + element.label() + "'");
      m(1, 0) = y;
      break;
    }
    case TwoPortElement::Kind::TransmissionLine: {
      const LineParams& p = *element.line_params();
      const Complex gl = Complex(p.attenuation_np_m, p.beta(omega)) * p.length_m;
      const Complex ch = std::cosh(gl);
      const Complex sh = std::sinh(gl);
      m(0, 0) = ch;
      m(0, 1) = p.z0_ohm * sh;
      m(1, 0) = sh / p.z0_ohm;
      m(1, 1) = ch;
      if (!finite(ch) || !finite(sh)) {
        throw DomainError("non-finite line matrix in element '" + element.label() + "'");
      }
      break;
    }
  }
  return m;
}

Abcd cascade(const NetworkChain& chain, double omega) {
  if (chain.empty()) throw UsageError("cascade of an empty chain");
  Abcd m = Abcd::Identity();
  for (const auto& e : chain.elements()) m = m * abcd_of_element(e, omega);
  return m;
}

SMatrix abcd_to_s(const Abcd& abcd, double z_ref_ohm) {
  require_positive(z_ref_ohm, "reference impedance");
  const Complex a = abcd(0, 0), b = abcd(0, 1), c = abcd(1, 0), d = abcd(1, 1);
  const double z = z_ref_ohm;
  const Complex sum = a + b / z + c * z + d;
  if (std::abs(sum) == 0.0 || !finite(sum)) throw SingularNetworkError("A + B/Z + CZ + D = 0");
  const Complex det = a * d - b * c;
  SMatrix s;
  s(0, 0) = (a + b / z - c * z - d) / sum;
  s(0, 1) = 2.0 * det / sum;
  s(1, 0) = 2.0 / sum;
  s(1, 1) = (-a + b / z - c * z + d) / sum;
  return s;
}

Complex input_impedance(const Abcd& abcd, Complex load_ohm) {
  const Complex den = abcd(1, 0) * load_ohm + abcd(1, 1);
  if (std::abs(den) == 0.0) return Complex(std::numeric_limits<double>::infinity(), 0.0);
  return (abcd(0, 0) * load_ohm + abcd(0, 1)) / den;
}

Abcd reverse(const Abcd& abcd) {
  const Complex det = abcd.determinant();
  if (std::abs(det) == 0.0) throw SingularNetworkError("ABCD determinant is zero");
  Abcd r;
  r(0, 0) = abcd(1, 1);
  r(0, 1) = abcd(0, 1);
  r(1, 0) = abcd(1, 0);
  r(1, 1) = abcd(0, 0);
  return r / det;
}

std::vector<SweepPoint> sweep_s_params(const NetworkChain& chain, std::span<const double> freqs_hz) {
  std::vector<SweepPoint> out;
  out.reserve(freqs_hz.size());
  double prev = 0.0;
  for (double f : freqs_hz) {
    if (!(f > prev) || f > 20e9) {
      throw UsageError("frequency grid must be increasing within (0, 20] GHz");
    }
    prev = f;
    SMatrix s;
    try {
      s = abcd_to_s(cascade(chain, angular(f)), chain.z_ref());
    } catch (const SingularNetworkError& e) {
      std::ostringstream msg;
      msg << e.what() << " at f = " << f << " Hz";
      throw SingularNetworkError(msg.str());
    }
    out.push_back({f, s(0, 0), s(1, 0), s(0, 1), s(1, 1)});
  }
  return out;
}

std::vector<double> linear_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) throw UsageError("linear_grid needs step > 0 and stop >= start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-6)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = start + static_cast<double>(i) * step;
  return g;
}

double to_db(Complex amplitude) { return to_db(std::abs(amplitude)); }

double to_db(double magnitude) {
  if (magnitude <= 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(magnitude);
}

// ---------------------------------------------------------------------------

void LadderTopology::validate() const {
  if (order < 1) throw DomainError("ladder order must be >= 1");
}

NetworkChain make_ladder(const LadderTopology& topology, const LadderValues& values, double z_ref_ohm) {
  topology.validate();
  require_positive(values.series, "series element value");
  require_positive(values.shunt, "shunt element value");
  const bool series_first = topology.form == LadderForm::T;
  std::vector<TwoPortElement> elements;
  elements.reserve(static_cast<std::size_t>(topology.order));
  for (int i = 0; i < topology.order; ++i) {
    const bool series = (i % 2 == 0) == series_first;
    const std::string idx = std::to_string(i + 1);
    if (topology.kind == FilterKind::LowPass) {
      elements.push_back(series ? TwoPortElement::series_inductor(values.series, "Ls" + idx)
                                : TwoPortElement::shunt_capacitor(values.shunt, "Cp" + idx));
    } else {
      elements.push_back(series ? TwoPortElement::series_capacitor(values.series, "Cs" + idx)
                                : TwoPortElement::shunt_inductor(values.shunt, "Lp" + idx));
    }
  }
  return NetworkChain(std::move(elements), z_ref_ohm);
}

double image_impedance(const LadderTopology& topology, const LadderValues& values) {
  return topology.kind == FilterKind::LowPass ? std::sqrt(values.series / values.shunt)
                                              : std::sqrt(values.shunt / values.series);
}

DiplexerResponse diplexer_response(const DiplexerSpec& spec, double freq_hz) {
  const double z = spec.z_ref_ohm;
  const double w = angular(freq_hz);
  DiplexerResponse r;
  r.freq_hz = freq_hz;

  // Branch matrices run from the common junction outward to the branch port.
  std::optional<Abcd> lp, hp;
  if (spec.lowpass) lp = cascade(*spec.lowpass, w);
  if (spec.highpass) hp = cascade(*spec.highpass, w);

  auto branch_admittance = [&](const std::optional<Abcd>& m) -> Complex {
    if (!m) return 0.0;
    return 1.0 / input_impedance(*m, z);
  };
  // Voltage transfer from the junction to a matched branch port.
  auto branch_gain = [&](const std::optional<Abcd>& m) -> Complex {
    if (!m) return 0.0;
    return 1.0 / ((*m)(0, 0) + (*m)(0, 1) / z);
  };

  const Complex y_lp = branch_admittance(lp);
  const Complex y_hp = branch_admittance(hp);

  // Driven from the common port.
  {
    const Complex y_load = y_lp + y_hp;
    Complex v_j = 1.0;  // per unit source voltage; open junction when both branches vanish
    r.s11 = 1.0;
    if (std::abs(y_load) > 0.0) {
      const Complex z_load = 1.0 / y_load;
      v_j = z_load / (z + z_load);
      r.s11 = (z_load - z) / (z_load + z);
    }
    r.s21 = 2.0 * v_j * branch_gain(lp);
    r.s31 = 2.0 * v_j * branch_gain(hp);
  }
  // Driven from the low-pass port; the junction sees Z_ref || HP branch.
  if (!lp || !hp) {
    r.s32 = 0.0;
  } else {
    const Complex y_j = 1.0 / z + y_hp;
    const Abcd from_port2 = reverse(*lp);
    const Complex z_j = 1.0 / y_j;
    const Complex den = from_port2(0, 0) + from_port2(0, 1) / z_j +
                        z * (from_port2(1, 0) + from_port2(1, 1) / z_j);
    if (std::abs(den) == 0.0) throw SingularNetworkError("diplexer junction is singular");
    const Complex v_j = 1.0 / den;
    r.s32 = 2.0 * v_j * branch_gain(hp);
  }
  return r;
}

IsolationReport diplexer_isolation(const DiplexerSpec& spec, double band_lo_hz, double band_hi_hz,
                                   double step_hz) {
  if (!(band_lo_hz > 0.0) || band_hi_hz > 20e9 || !(band_hi_hz > band_lo_hz)) {
    throw UsageError("isolation band must lie in (0, 20] GHz");
  }
  IsolationReport rep;
  rep.worst_db = -std::numeric_limits<double>::infinity();
  rep.best_db = std::numeric_limits<double>::infinity();
  for (double f : linear_grid(band_lo_hz, band_hi_hz, step_hz)) {
    const double db = to_db(diplexer_response(spec, f).s32);
    if (db > rep.worst_db || rep.worst_freq_hz == 0.0) {
      rep.worst_db = db;
      rep.worst_freq_hz = f;
    }
    if (db < rep.best_db || rep.best_freq_hz == 0.0) {
      rep.best_db = db;
      rep.best_freq_hz = f;
    }
  }
  return rep;
}

double find_cutoff(const NetworkChain& chain, double band_lo_hz, double band_hi_hz, double target_db,
                   double scan_step_hz, double tol_hz) {
  if (!(band_lo_hz > 0.0) || !(band_hi_hz > band_lo_hz)) throw UsageError("invalid cutoff search band");
  auto excess = [&](double f) {
    return to_db(abcd_to_s(cascade(chain, angular(f)), chain.z_ref())(1, 0)) - target_db;
  };
  const auto grid = linear_grid(band_lo_hz, band_hi_hz, scan_step_hz);
  std::vector<double> val(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) val[i] = excess(grid[i]);

  std::vector<std::size_t> crossings;  // index i: sign change between i and i+1
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if ((val[i] >= 0.0) != (val[i + 1] >= 0.0)) crossings.push_back(i);
  }
  if (crossings.empty()) {
    std::ostringstream msg;
    msg << "|S21| does not cross " << target_db << " dB in [" << band_lo_hz << ", " << band_hi_hz
        << "] Hz; endpoint levels " << val.front() + target_db << " dB and " << val.back() + target_db
        << " dB";
    throw NotFoundError(msg.str());
  }
  const bool lo_pass = val.front() >= 0.0;
  const bool hi_pass = val.back() >= 0.0;
  std::size_t pick = crossings.front();
  if (lo_pass && !hi_pass) pick = crossings.back();    // low-pass edge
  if (!lo_pass && hi_pass) pick = crossings.front();   // high-pass edge

  double a = grid[pick], b = grid[pick + 1];
  const bool a_pass = val[pick] >= 0.0;
  while (b - a > tol_hz) {
    const double m = 0.5 * (a + b);
    if ((excess(m) >= 0.0) == a_pass) a = m; else b = m;
  }
  return 0.5 * (a + b);
}

}  // namespace resetsim::rf
