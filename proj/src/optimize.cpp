#include "barlink/optimize.hpp"

#include <cmath>

#include "barlink/errors.hpp"

namespace barlink {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

UpdateWindow::UpdateWindow(std::size_t window, double tolerance)
    : norms_(window == 0 ? 1 : window, 0.0), tolerance_(tolerance) {}

bool UpdateWindow::push(double norm) {
  sum_ += norm - norms_[next_];
  norms_[next_] = norm;
  next_ = (next_ + 1) % norms_.size();
  if (filled_ < norms_.size()) ++filled_;
  return filled_ == norms_.size() && sum_ / static_cast<double>(norms_.size()) < tolerance_;
}

DescentResult gradient_descent(const ValueFn& value, const GradientFn& gradient, std::vector<double> x0,
                               const DescentConfig& config) {
  if (!(config.eta > 0.0)) throw RangeError("step size must be positive");
  DescentResult out;
  out.x = std::move(x0);
  double current = value(out.x);
  if (!std::isfinite(current)) throw NumericError("objective is not finite at the starting point");
  out.trajectory.emplace_back(0, current);
  UpdateWindow window(config.window, config.tolerance);
  std::vector<double> trial(out.x.size());
  for (std::size_t k = 1; k <= config.iterations; ++k) {
    auto g = gradient(out.x);
    double eta = config.eta;
    double next = current;
    for (int attempt = 0;; ++attempt) {
      for (std::size_t m = 0; m < trial.size(); ++m) trial[m] = out.x[m] - eta * g[m];
      next = value(trial);
      if (!config.backtracking || (std::isfinite(next) && next <= current) || attempt >= 60) break;
      eta *= 0.5;
    }
    if (!std::isfinite(next)) throw NumericError("objective diverged during gradient descent");
    double moved = 0.0;
    for (std::size_t m = 0; m < trial.size(); ++m) moved += (trial[m] - out.x[m]) * (trial[m] - out.x[m]);
    out.x.swap(trial);
    current = next;
    out.iterations = k;
    out.trajectory.emplace_back(k, current);
    if (window.push(std::sqrt(moved))) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace barlink
