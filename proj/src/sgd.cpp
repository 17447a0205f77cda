#include "barlink/sgd.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <utility>

#include "barlink/errors.hpp"

namespace barlink {

bool FitReport::same_result(const FitReport& other) const {
  return beta == other.beta && lambda == other.lambda && alpha == other.alpha && q0 == other.q0 &&
         trajectory == other.trajectory && iterations == other.iterations && converged == other.converged;
}

namespace {

std::vector<double> initial_beta(const Dataset& data, const std::vector<double>& beta0) {
  if (beta0.empty()) return std::vector<double>(data.dim(), 0.0);
  if (beta0.size() != data.dim()) throw DimensionError("initial beta does not match the feature dimension");
  return beta0;
}

}  // namespace

FitReport sgd_fit(const Dataset& data, const SgdConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (!(config.eta > 0.0)) throw RangeError("step size must be positive");
  if (config.alpha > 0.0 && !data.aggregates) throw Error("alpha > 0 needs an auxiliary sequence with aggregates");
  BarParameters params{initial_beta(data, config.beta0), config.lambda, config.alpha,
                       config.q0 ? *config.q0 : init_q0(data)};
  params.validate();
  BarObjective objective(data, params.lambda, params.q0);

  std::vector<TimeIndex> eligible;
  for (TimeIndex t = 1; t <= data.steps(); ++t) {
    if (!objective.likelihood_senders(t).empty()) eligible.push_back(t);
  }
  if (eligible.empty()) throw Error("no sender has a main edge: cannot fit");

  FitReport report;
  report.lambda = params.lambda;
  report.alpha = params.alpha;
  report.q0 = params.q0;
  std::vector<double> beta = std::move(params.beta);
  if (config.trace_every > 0) report.trajectory.emplace_back(0, objective.objective(beta, config.alpha));

  Rng rng(config.seed);
  UpdateWindow window(config.window, config.tolerance);
  std::vector<double> grad_lk(beta.size());
  std::vector<double> grad_reg(beta.size());
  auto draw = [&] {
    TimeIndex t = eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];
    auto senders = objective.likelihood_senders(t);
    return std::pair{t, senders[std::uniform_int_distribution<std::size_t>(0, senders.size() - 1)(rng)]};
  };
  // Samples are drawn a few iterations ahead so their data can be prefetched
  // in stages while earlier gradients are computed.
  constexpr std::size_t kAhead = 3;
  std::array<std::pair<TimeIndex, NodeId>, kAhead> ahead;
  for (std::size_t m = 0; m < kAhead && m < config.iterations; ++m) {
    ahead[m] = draw();
    for (int stage = 0; stage < static_cast<int>(m); ++stage) objective.prefetch_likelihood(ahead[m].second, stage);
  }
  for (std::size_t k = 1; k <= config.iterations; ++k) {
    const auto [t, i_lk] = ahead[(k - 1) % kAhead];
    if (k + kAhead <= config.iterations) {
      ahead[(k - 1) % kAhead] = draw();
      objective.prefetch_likelihood(ahead[(k - 1) % kAhead].second, 0);
    }
    if (k + 1 <= config.iterations) objective.prefetch_likelihood(ahead[k % kAhead].second, 2);
    if (k + 2 <= config.iterations) objective.prefetch_likelihood(ahead[(k + 1) % kAhead].second, 1);
    std::fill(grad_lk.begin(), grad_lk.end(), 0.0);
    std::fill(grad_reg.begin(), grad_reg.end(), 0.0);
    objective.add_sender_likelihood_gradient(beta, t, i_lk, grad_lk, config.zero_sample, &rng);
    if (config.alpha > 0.0) {
      auto reg_senders = objective.regularizer_senders(t);
      if (!reg_senders.empty()) {
        NodeId i_reg = reg_senders[std::uniform_int_distribution<std::size_t>(0, reg_senders.size() - 1)(rng)];
        objective.add_sender_regularizer_gradient(beta, t, i_reg, grad_reg);
      }
    }
    double eta = config.eta;
    if (config.schedule == StepSchedule::inverse_sqrt) eta /= std::sqrt(static_cast<double>(k));
    double moved = 0.0;
    for (std::size_t m = 0; m < beta.size(); ++m) {
      double step = eta * (-grad_lk[m] + config.alpha * grad_reg[m]);
      beta[m] -= step;
      moved += step * step;
    }
    for (double b : beta) {
      if (!std::isfinite(b)) throw NumericError("SGD diverged; reduce the step size");
    }
    report.iterations = k;
    bool stop = window.push(std::sqrt(moved));
    if (config.trace_every > 0 && (k % config.trace_every == 0 || stop || k == config.iterations)) {
      report.trajectory.emplace_back(k, objective.objective(beta, config.alpha));
    }
    if (stop) {
      report.converged = true;
      break;
    }
  }
  report.beta = std::move(beta);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

FitReport bar_gradient_descent(const Dataset& data, double lambda, double alpha, const DescentConfig& config,
                               std::optional<double> q0, std::vector<double> beta0) {
  const auto start = std::chrono::steady_clock::now();
  if (alpha > 0.0 && !data.aggregates) throw Error("alpha > 0 needs an auxiliary sequence with aggregates");
  BarParameters params{initial_beta(data, beta0), lambda, alpha, q0 ? *q0 : init_q0(data)};
  params.validate();
  BarObjective objective(data, lambda, params.q0);
  auto result = gradient_descent([&](std::span<const double> b) { return objective.objective(b, alpha); },
                                 [&](std::span<const double> b) { return objective.objective_gradient(b, alpha); },
                                 std::move(params.beta), config);
  FitReport report;
  report.beta = std::move(result.x);
  report.lambda = lambda;
  report.alpha = alpha;
  report.q0 = params.q0;
  report.trajectory = std::move(result.trajectory);
  report.iterations = result.iterations;
  report.converged = result.converged;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace barlink
