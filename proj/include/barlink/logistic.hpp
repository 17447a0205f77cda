#pragma once

// Logistic regression baselines without intercept. The averaged variant
// regresses A(t) on the running mean of a pair's features,
//   Favg(1) = F(1),  Favg(t) = (Favg(t-1) (t-1) + F(t)) / t,
// with F(t) = 0 when the pair is outside the support at t. The raw variant
// uses F(t) itself.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "barlink/optimize.hpp"
#include "barlink/pair_history.hpp"
#include "barlink/temporal_graph.hpp"

namespace barlink {

enum class LogisticVariant { averaged, raw };

// Streaming running mean of one pair.
class AveragedFeatureState {
 public:
  explicit AveragedFeatureState(std::size_t dim) : mean_(dim, 0.0) {}

  // Advances to step t > time(), applying the absent branch to every skipped
  // step and then step t with `features` (nullopt when absent).
  void update(TimeIndex t, std::optional<std::span<const double>> features);
  std::span<const double> mean() const { return mean_; }
  TimeIndex time() const { return time_; }

 private:
  std::vector<double> mean_;
  TimeIndex time_ = 0;
};

// Favg(t) of one pair, recomputed from scratch.
std::vector<double> averaged_features(const Dataset& data, NodeId i, NodeId j, TimeIndex t);

// One row per (pair, step) with a nonzero feature vector and a defined outcome.
struct LogisticDesign {
  std::size_t dim = 0;
  std::vector<double> x;  // rows * dim
  std::vector<double> y;  // 0 or 1
  std::size_t rows() const { return y.size(); }
};

LogisticDesign logistic_design(const Dataset& data, LogisticVariant variant);

// Mean log-loss and its gradient.
double logistic_loss(const LogisticDesign& design, std::span<const double> beta);
std::vector<double> logistic_gradient(const LogisticDesign& design, std::span<const double> beta);

struct LogisticConfig {
  LogisticVariant variant = LogisticVariant::averaged;
  DescentConfig descent{1.0, 500, 1e-6, 5, true};
};

struct LogisticModel {
  LogisticVariant variant = LogisticVariant::averaged;
  std::vector<double> beta;
  std::vector<std::pair<std::size_t, double>> trajectory;
  std::size_t iterations = 0;
  bool converged = false;
};

LogisticModel logistic_fit(const Dataset& data, const LogisticConfig& config);

// Scores step T+1 of a dataset with horizon T. Horizon features default to
// F(T) when the pair is in the support at T, matching the BAR scorer.
class LogisticScorer {
 public:
  LogisticScorer(const Dataset& data, LogisticVariant variant, std::vector<double> beta);

  double score(NodeId i, NodeId j) const;
  double score(NodeId i, NodeId j, std::optional<std::span<const double>> horizon) const;

 private:
  double score_pair(std::optional<std::size_t> pair, std::optional<std::span<const double>> horizon) const;

  const Dataset* data_;
  PairHistory history_;
  LogisticVariant variant_;
  std::vector<double> beta_;
};

}  // namespace barlink
