#include "resetsim/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "resetsim/errors.hpp"
#include "resetsim/units.hpp"

namespace resetsim::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

double parse_quantity(std::string_view text, std::string_view unit) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr == s.data())
    throw DomainError("cannot parse quantity '" + std::string(text) + "'");
  std::string_view rest = trim(std::string_view(res.ptr, static_cast<std::size_t>(s.data() + s.size() - res.ptr)));
  if (rest.empty()) return value;

  std::string_view prefix;
  bool matched = false;
  std::vector<std::string_view> spellings{unit};
  if (unit == "ohm") spellings = {"ohm", "Ohm", "\xce\xa9"};
  for (auto u : spellings) {
    if (ends_with(rest, u)) {
      prefix = trim(rest.substr(0, rest.size() - u.size()));
      matched = true;
      break;
    }
  }
  if (!matched) {
    throw DomainError("quantity '" + std::string(text) + "' must be in " + std::string(unit));
  }
  static const std::map<std::string_view, double> kPrefixes{
      {"", 1.0},   {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"\xc2\xb5", 1e-6},
      {"m", 1e-3}, {"k", 1e3},   {"M", 1e6},   {"G", 1e9},  {"T", 1e12}};
  const auto it = kPrefixes.find(prefix);
  if (it == kPrefixes.end())
    throw DomainError("unknown SI prefix '" + std::string(prefix) + "' in '" + std::string(text) + "'");
  return value * it->second;
}

std::pair<double, double> parse_range(std::string_view text, std::string_view unit) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw DomainError("range '" + std::string(text) + "' must be lo:hi");
  std::string lo(trim(text.substr(0, colon)));
  const std::string hi(trim(text.substr(colon + 1)));
  // A bare low end inherits the high end's suffix ("1:10GHz").
  double probe = 0.0;
  const auto r = std::from_chars(lo.data(), lo.data() + lo.size(), probe);
  if (r.ec == std::errc{} && r.ptr == lo.data() + lo.size()) {
    const auto hr = std::from_chars(hi.data(), hi.data() + hi.size(), probe);
    if (hr.ec == std::errc{}) lo += std::string(hr.ptr, hi.data() + hi.size());
  }
  return {parse_quantity(lo, unit), parse_quantity(hi, unit)};
}

// ---------------------------------------------------------------------------

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw UsageError("CSV row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

CsvTable trajectory_table(const dynamics::Trajectory& traj) {
  if (traj.states.empty()) throw UsageError("empty trajectory");
  const int levels = traj.states.front().dims().front();
  std::vector<std::string> header{"t_ns", "p_g", "p_e"};
  if (levels >= 3) header.push_back("p_f");
  header.push_back("n_dissipator");
  header.push_back("trace_err");
  CsvTable table(header);
  const std::size_t mode = traj.states.front().dims().size() - 1;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto& rho = traj.states[i];
    const auto p = rho.populations(0);
    std::vector<double> row{traj.times[i] * 1e9, p[0], p[1]};
    if (levels >= 3) row.push_back(p[2]);
    row.push_back(rho.mean_number(mode));
    row.push_back(std::abs(rho.trace() - 1.0));
    table.add_row(row);
  }
  return table;
}

std::string touchstone(const std::vector<rf::SweepPoint>& sweep, double z_ref_ohm) {
  std::string out = "! resetsim two-port sweep\n# GHZ S RI R " + format_double(z_ref_ohm) + "\n";
  for (const auto& p : sweep) {
    out += format_double(p.freq_hz / 1e9);
    // Touchstone v1 two-port order: S11 S21 S12 S22.
    for (const auto& s : {p.s11, p.s21, p.s12, p.s22}) out += ' ' + format_double(s.real()) + ' ' + format_double(s.imag());
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 78.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 58.0;

const std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<double> nice_ticks(double lo, double hi) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return ticks;
}

struct Frame {
  double x0, x1, y0, y1;
  double sx(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double sy(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::string header(const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) +
                  "\" viewBox=\"0 0 " + px(kWidth) + " " + px(kHeight) +
                  "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + px(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + esc(title) + "</text>\n";
  return s;
}

std::string axes(const Frame& f, const std::string& xl, const std::string& yl) {
  std::string s;
  const double l = kLeft, r = kWidth - kRight, t = kTop, b = kHeight - kBottom;
  s += "<rect x=\"" + px(l) + "\" y=\"" + px(t) + "\" width=\"" + px(r - l) + "\" height=\"" + px(b - t) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double x : nice_ticks(f.x0, f.x1)) {
    s += "<line x1=\"" + px(f.sx(x)) + "\" y1=\"" + px(b) + "\" x2=\"" + px(f.sx(x)) + "\" y2=\"" + px(b + 5) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + px(f.sx(x)) + "\" y=\"" + px(b + 19) + "\" text-anchor=\"middle\">" + num(x) + "</text>\n";
  }
  for (double y : nice_ticks(f.y0, f.y1)) {
    s += "<line x1=\"" + px(l - 5) + "\" y1=\"" + px(f.sy(y)) + "\" x2=\"" + px(l) + "\" y2=\"" + px(f.sy(y)) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + px(l - 8) + "\" y=\"" + px(f.sy(y) + 4) + "\" text-anchor=\"end\">" + num(y) + "</text>\n";
  }
  s += "<text x=\"" + px((l + r) / 2) + "\" y=\"" + px(kHeight - 14) + "\" text-anchor=\"middle\">" + esc(xl) +
       "</text>\n";
  s += "<text transform=\"translate(18 " + px((t + b) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" + esc(yl) +
       "</text>\n";
  return s;
}

/// Fixed five-stop perceptual map, t in [0, 1].
std::string colormap(double t) {
  static constexpr std::array<std::array<double, 3>, 5> kStops{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), 3);
  const double u = t - static_cast<double>(i);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(kStops[i][0] + u * (kStops[i + 1][0] - kStops[i][0]))),
                static_cast<int>(std::lround(kStops[i][1] + u * (kStops[i + 1][1] - kStops[i][1]))),
                static_cast<int>(std::lround(kStops[i][2] + u * (kStops[i + 1][2] - kStops[i][2]))));
  return buf;
}

}  // namespace

std::string render_svg(const LinePlot& plot) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) throw UsageError("series '" + s.name + "' has mismatched x and y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) { x0 = std::isfinite(x0) ? x0 - 1 : 0; x1 = x0 + 2; }
  if (plot.y_hi > plot.y_lo) {
    y0 = plot.y_lo;
    y1 = plot.y_hi;
  } else if (!(y1 > y0)) {
    y0 = std::isfinite(y0) ? y0 - 1 : 0;
    y1 = y0 + 2;
  } else {
    const double pad = 0.04 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }
  const Frame f{x0, x1, y0, y1};
  std::string s = header(plot.title) + axes(f, plot.x_label, plot.y_label);
  s += "<clipPath id=\"plot\"><rect x=\"" + px(kLeft) + "\" y=\"" + px(kTop) + "\" width=\"" +
       px(kWidth - kLeft - kRight) + "\" height=\"" + px(kHeight - kTop - kBottom) + "\"/></clipPath>\n";
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& ser = plot.series[k];
    const char* color = kPalette[k % kPalette.size()];
    std::string pts;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      pts += px(f.sx(ser.x[i])) + "," + px(f.sy(std::clamp(ser.y[i], y0 - (y1 - y0), y1 + (y1 - y0)))) + " ";
    }
    s += "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\"" + std::string(color) +
         "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
    const double lx = kWidth - kRight + 12.0;
    s += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly - 4) + "\" x2=\"" + px(lx + 18) + "\" y2=\"" + px(ly - 4) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + px(lx + 24) + "\" y=\"" + px(ly) + "\">" + esc(ser.name) + "</text>\n";
  }
  return s + "</svg>\n";
}

std::string render_svg(const Heatmap& map) {
  if (map.x.empty() || map.y.empty()) throw UsageError("heatmap axes must be nonempty");
  if (map.z.size() != map.y.size()) throw UsageError("heatmap rows do not match y axis");
  double z0 = INFINITY, z1 = -INFINITY;
  for (const auto& row : map.z) {
    if (row.size() != map.x.size()) throw UsageError("heatmap columns do not match x axis");
    for (double v : row) {
      if (!std::isfinite(v)) continue;
      z0 = std::min(z0, v);
      z1 = std::max(z1, v);
    }
  }
  if (!(z1 > z0)) { z0 = std::isfinite(z0) ? z0 : 0.0; z1 = z0 + 1.0; }

  // Cell edges halfway between samples.
  auto edges = [](const std::vector<double>& c) {
    std::vector<double> e(c.size() + 1);
    if (c.size() == 1) return std::vector<double>{c[0] - 0.5, c[0] + 0.5};
    for (std::size_t i = 1; i < c.size(); ++i) e[i] = 0.5 * (c[i - 1] + c[i]);
    e.front() = c.front() - (e[1] - c.front());
    e.back() = c.back() + (c.back() - e[c.size() - 1]);
    return e;
  };
  const auto xe = edges(map.x);
  const auto ye = edges(map.y);
  const Frame f{xe.front(), xe.back(), ye.front(), ye.back()};
  std::string s = header(map.title);
  for (std::size_t r = 0; r < map.y.size(); ++r) {
    for (std::size_t c = 0; c < map.x.size(); ++c) {
      const double v = map.z[r][c];
      const std::string fill = std::isfinite(v) ? colormap((v - z0) / (z1 - z0)) : "#999999";
      const double xa = f.sx(xe[c]), xb = f.sx(xe[c + 1]);
      const double ya = f.sy(ye[r + 1]), yb = f.sy(ye[r]);
      s += "<rect x=\"" + px(std::min(xa, xb)) + "\" y=\"" + px(std::min(ya, yb)) + "\" width=\"" +
           px(std::abs(xb - xa) + 0.3) + "\" height=\"" + px(std::abs(yb - ya) + 0.3) + "\" fill=\"" + fill +
           "\"/>\n";
    }
  }
  s += axes(f, map.x_label, map.y_label);
  // Colour bar.
  const double bx = kWidth - kRight + 24.0, bw = 18.0, bt = kTop, bb = kHeight - kBottom;
  constexpr int kSteps = 64;
  for (int i = 0; i < kSteps; ++i) {
    const double t0 = static_cast<double>(i) / kSteps;
    const double y = bb - (bb - bt) * (t0 + 1.0 / kSteps);
    s += "<rect x=\"" + px(bx) + "\" y=\"" + px(y) + "\" width=\"" + px(bw) + "\" height=\"" +
         px((bb - bt) / kSteps + 0.3) + "\" fill=\"" + colormap(t0 + 0.5 / kSteps) + "\"/>\n";
  }
  s += "<rect x=\"" + px(bx) + "\" y=\"" + px(bt) + "\" width=\"" + px(bw) + "\" height=\"" + px(bb - bt) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double z : nice_ticks(z0, z1)) {
    const double y = bb - (z - z0) / (z1 - z0) * (bb - bt);
    s += "<text x=\"" + px(bx + bw + 4) + "\" y=\"" + px(y + 4) + "\">" + num(z) + "</text>\n";
  }
  s += "<text transform=\"translate(" + px(kWidth - 16) + " " + px((bt + bb) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + esc(map.z_label) + "</text>\n";
  return s + "</svg>\n";
}

// ---------------------------------------------------------------------------

namespace {

double quantity(const nlohmann::json& j, std::string_view unit, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return parse_quantity(j.get<std::string>(), unit);
    } catch (const DomainError& e) {
      throw ConfigError(where, e.what());
    }
  }
  throw ConfigError(where, "expected a number or a unit-suffixed string");
}

}  // namespace

rf::NetworkChain load_netlist(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("netlist is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "netlist must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "z_ref" && key != "elements") throw ConfigError(key, "unknown netlist key");
  }
  const double z_ref = doc.contains("z_ref") ? quantity(doc["z_ref"], "ohm", "z_ref") : 50.0;
  if (!doc.contains("elements") || !doc["elements"].is_array()) throw ConfigError("elements", "missing element list");

  std::vector<rf::TwoPortElement> elements;
  std::size_t i = 0;
  for (const auto& e : doc["elements"]) {
    const std::string where = "elements[" + std::to_string(i++) + "]";
    if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string())
      throw ConfigError(where, "element needs a string 'kind'");
    const auto kind = e["kind"].get<std::string>();
    const std::string label = e.value("label", kind);
    auto value = [&](std::string_view unit) {
      if (!e.contains("value")) throw ConfigError(where + ".value", "missing");
      const double v = quantity(e["value"], unit, where + ".value");
      if (!(v > 0.0)) throw ConfigError(where + ".value", "must be > 0");
      return v;
    };
    auto allow = [&](std::initializer_list<std::string_view> keys) {
      for (const auto& [k, _] : e.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError(where + "." + k, "unknown key");
      }
    };
    if (kind == "line") {
      allow({"kind", "label", "z0", "length", "eps_eff", "phase_velocity", "alpha"});
      rf::LineParams p;
      p.z0_ohm = e.contains("z0") ? quantity(e["z0"], "ohm", where + ".z0") : z_ref;
      if (!e.contains("length")) throw ConfigError(where + ".length", "missing");
      p.length_m = quantity(e["length"], "m", where + ".length");
      if (e.contains("phase_velocity")) {
        p.phase_velocity_m_s = quantity(e["phase_velocity"], "m/s", where + ".phase_velocity");
      } else if (e.contains("eps_eff")) {
        p.phase_velocity_m_s = kSpeedOfLight / std::sqrt(quantity(e["eps_eff"], "", where + ".eps_eff"));
      } else {
        throw ConfigError(where, "line needs eps_eff or phase_velocity");
      }
      p.attenuation_np_m = e.contains("alpha") ? quantity(e["alpha"], "Np/m", where + ".alpha") : 0.0;
      try {
        p.validate();
      } catch (const DomainError& err) {
        throw ConfigError(where, err.what());
      }
      elements.push_back(rf::TwoPortElement::line(p, label));
      continue;
    }
    allow({"kind", "label", "value"});
    if (kind == "series_l") elements.push_back(rf::TwoPortElement::series_inductor(value("H"), label));
    else if (kind == "series_c") elements.push_back(rf::TwoPortElement::series_capacitor(value("F"), label));
    else if (kind == "series_r") elements.push_back(rf::TwoPortElement::series_resistor(value("ohm"), label));
    else if (kind == "shunt_l") elements.push_back(rf::TwoPortElement::shunt_inductor(value("H"), label));
    else if (kind == "shunt_c") elements.push_back(rf::TwoPortElement::shunt_capacitor(value("F"), label));
    else if (kind == "shunt_r") elements.push_back(rf::TwoPortElement::shunt_resistor(value("ohm"), label));
    else throw ConfigError(where + ".kind", "unknown element kind '" + kind + "'");
  }
  if (elements.empty()) throw ConfigError("elements", "netlist has no elements");
  return rf::NetworkChain(std::move(elements), z_ref);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace resetsim::io
