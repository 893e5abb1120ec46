#pragma once

// Plain-text outputs (CSV, Touchstone, SVG) and unit-suffixed quantity parsing.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "resetsim/open_system.hpp"
#include "resetsim/rf_network.hpp"

namespace resetsim::io {

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Parse "4.86GHz", "41 mK", "25mm", "0.5Np/m" or a bare number. `unit` is the
/// expected SI unit symbol ("Hz", "K", "m", "s", "H", "F", "ohm", "Np/m"); an
/// optional SI prefix (f p n u m k M G) may precede it. Throws DomainError.
double parse_quantity(std::string_view text, std::string_view unit);

/// "lo:hi" with an optional shared unit suffix ("1:10GHz").
std::pair<double, double> parse_range(std::string_view text, std::string_view unit);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// t_ns,p_g,p_e[,p_f],n_dissipator,trace_err for qubit subsystem 0.
CsvTable trajectory_table(const dynamics::Trajectory& trajectory);

/// Touchstone v1 two-port file, frequencies in GHz, real/imaginary pairs.
std::string touchstone(const std::vector<rf::SweepPoint>& sweep, double z_ref_ohm);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  /// Optional fixed y range; automatic when lo >= hi.
  double y_lo = 0.0;
  double y_hi = 0.0;
};

struct Heatmap {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string z_label;
  std::vector<double> x;                 ///< columns
  std::vector<double> y;                 ///< rows
  std::vector<std::vector<double>> z;    ///< z[row][col]; NaN cells drawn grey
};

std::string render_svg(const LinePlot& plot);
std::string render_svg(const Heatmap& map);

/// Ladder or arbitrary chain from JSON: {"z_ref": "50ohm", "elements": [
///   {"kind": "series_l", "value": "4.488nH"}, {"kind": "shunt_c", "value": "1.809pF"},
///   {"kind": "line", "z0": "50ohm", "length": "25mm", "eps_eff": 10.9, "alpha": "0Np/m"}, ...]}.
/// Kinds: series_l, series_c, series_r, shunt_l, shunt_c, shunt_r, line.
rf::NetworkChain load_netlist(const std::string& json_text);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace resetsim::io
