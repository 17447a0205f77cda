#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace barlink {

// Stops once the mean norm of the last `window` parameter updates falls
// below `tolerance`.
class UpdateWindow {
 public:
  UpdateWindow(std::size_t window, double tolerance);
  // Records one update norm; true when the stop rule fires.
  bool push(double norm);

 private:
  std::vector<double> norms_;
  std::size_t next_ = 0;
  std::size_t filled_ = 0;
  double sum_ = 0.0;
  double tolerance_;
};

struct DescentConfig {
  double eta = 0.1;
  std::size_t iterations = 500;
  double tolerance = 1e-6;
  std::size_t window = 5;
  // Halve the step until the objective does not increase.
  bool backtracking = true;
};

struct DescentResult {
  std::vector<double> x;
  std::vector<std::pair<std::size_t, double>> trajectory;  // (iteration, value) after every step
  std::size_t iterations = 0;
  bool converged = false;
};

using ValueFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

DescentResult gradient_descent(const ValueFn& value, const GradientFn& gradient, std::vector<double> x0,
                               const DescentConfig& config);

double norm2(std::span<const double> v);

}  // namespace barlink
