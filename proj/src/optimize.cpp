#include "resetsim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Core>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "resetsim/errors.hpp"

namespace resetsim::optimize {

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, const SimplexOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw UsageError("nelder_mead needs at least one parameter");

  std::vector<std::vector<double>> pts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += options.initial_step;
  std::vector<double> val(n + 1);
  for (std::size_t i = 0; i <= n; ++i) val[i] = objective(pts[i]);

  std::vector<std::size_t> order(n + 1);
  SimplexResult res;
  auto point_at = [&](const std::vector<double>& centroid, const std::vector<double>& worst, double t) {
    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (worst[j] - centroid[j]);
    return p;
  };

  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return val[a] < val[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) diameter = std::max(diameter, std::abs(pts[i][j] - pts[best][j]));
    }
    if (val[worst] - val[best] <= options.f_tolerance && diameter <= options.x_tolerance) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);
    }

    auto reflected = point_at(centroid, pts[worst], -1.0);
    const double f_r = objective(reflected);
    if (f_r < val[best]) {
      auto expanded = point_at(centroid, pts[worst], -2.0);
      const double f_e = objective(expanded);
      if (f_e < f_r) {
        pts[worst] = std::move(expanded);
        val[worst] = f_e;
      } else {
        pts[worst] = std::move(reflected);
        val[worst] = f_r;
      }
      continue;
    }
    if (f_r < val[second]) {
      pts[worst] = std::move(reflected);
      val[worst] = f_r;
      continue;
    }
    const bool outside = f_r < val[worst];
    auto contracted = point_at(centroid, pts[worst], outside ? -0.5 : 0.5);
    const double f_c = objective(contracted);
    if (f_c < std::min(f_r, val[worst])) {
      pts[worst] = std::move(contracted);
      val[worst] = f_c;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
      val[i] = objective(pts[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  res.x = pts[best];
  res.value = val[best];
  return res;
}

namespace {

struct ResidualFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::function<void(std::span<const double>, std::span<double>)>* fn;
  int n_in;
  int n_out;

  int inputs() const { return n_in; }
  int values() const { return n_out; }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    (*fn)(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
          std::span<double>(fvec.data(), static_cast<std::size_t>(fvec.size())));
    return 0;
  }
};

}  // namespace

LeastSquaresResult levenberg_marquardt(
    const std::function<void(std::span<const double>, std::span<double>)>& residuals,
    std::vector<double> start, std::size_t n_residuals, int max_evaluations) {
  if (start.empty() || n_residuals < start.size()) {
    throw UsageError("least squares needs at least as many residuals as parameters");
  }
  ResidualFunctor f{&residuals, static_cast<int>(start.size()), static_cast<int>(n_residuals)};
  Eigen::NumericalDiff<ResidualFunctor> numdiff(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ResidualFunctor>> lm(numdiff);
  lm.parameters.maxfev = max_evaluations;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-14;

  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(start.data(), static_cast<Eigen::Index>(start.size()));
  const auto status = lm.minimize(x);

  Eigen::VectorXd r(static_cast<Eigen::Index>(n_residuals));
  f(x, r);
  LeastSquaresResult out;
  out.params.assign(x.data(), x.data() + x.size());
  out.rms_residual = std::sqrt(r.squaredNorm() / static_cast<double>(n_residuals));
  out.evaluations = static_cast<int>(lm.nfev);
  using Status = Eigen::LevenbergMarquardtSpace::Status;
  out.converged = status == Status::RelativeReductionTooSmall || status == Status::RelativeErrorTooSmall ||
                  status == Status::RelativeErrorAndReductionTooSmall || status == Status::CosinusTooSmall ||
                  status == Status::FtolTooSmall || status == Status::XtolTooSmall ||
                  status == Status::GtolTooSmall;
  return out;
}

}  // namespace resetsim::optimize
