#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "barlink/bar_model.hpp"
#include "barlink/optimize.hpp"

namespace barlink {

enum class StepSchedule { constant, inverse_sqrt };

struct SgdConfig {
  double lambda = 0.5;
  double alpha = 0.0;
  double eta = 0.05;
  std::size_t iterations = 2000;
  std::uint64_t seed = 1;
  StepSchedule schedule = StepSchedule::constant;
  // 0 enumerates every zero term of the sampled sender; k > 0 subsamples k.
  std::size_t zero_sample = 0;
  double tolerance = 1e-6;
  std::size_t window = 50;
  // Evaluate the full objective every `trace_every` iterations (0: never).
  std::size_t trace_every = 0;
  std::optional<double> q0;  // default: init_q0(dataset)
  std::vector<double> beta0;  // default: zeros
};

struct FitReport {
  std::vector<double> beta;
  double lambda = 0.0;
  double alpha = 0.0;
  double q0 = 0.0;
  std::vector<std::pair<std::size_t, double>> trajectory;  // (iteration, objective)
  std::size_t iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;

  // Equality of everything except wall time.
  bool same_result(const FitReport& other) const;
};

// Stochastic descent drawing one likelihood sender and one regularizer sender
// per iteration at a shared step t. Steps without main senders are never drawn.
FitReport sgd_fit(const Dataset& data, const SgdConfig& config);

// Deterministic full-batch descent of the same objective.
FitReport bar_gradient_descent(const Dataset& data, double lambda, double alpha, const DescentConfig& config,
                               std::optional<double> q0 = std::nullopt, std::vector<double> beta0 = {});

}  // namespace barlink
