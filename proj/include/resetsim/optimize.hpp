#pragma once

#include <functional>
#include <span>
#include <vector>

namespace resetsim::optimize {

struct SimplexOptions {
  int max_iterations = 4000;
  /// Stop when the spread of objective values across the simplex drops below this.
  double f_tolerance = 1e-14;
  /// ... and the simplex diameter drops below this.
  double x_tolerance = 1e-10;
  /// Initial simplex edge added to each coordinate of the start point.
  double initial_step = 0.05;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead downhill simplex (standard reflection / expansion /
/// contraction / shrink coefficients 1, 2, 1/2, 1/2). Deterministic.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, const SimplexOptions& options = {});

struct LeastSquaresResult {
  std::vector<double> params;
  double rms_residual = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt on residuals r(p) with a forward-difference Jacobian.
/// `residuals` writes `n_residuals` values.
LeastSquaresResult levenberg_marquardt(
    const std::function<void(std::span<const double> params, std::span<double> out)>& residuals,
    std::vector<double> start, std::size_t n_residuals, int max_evaluations = 4000);

}  // namespace resetsim::optimize
