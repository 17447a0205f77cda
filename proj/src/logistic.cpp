#include "barlink/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "barlink/bar_model.hpp"
#include "barlink/errors.hpp"

namespace barlink {

namespace {

bool all_zero(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

bool counts_in_likelihood(const Dataset& data, NodeId i, NodeId j) {
  if (i == j) return false;
  return data.mode == SequenceMode::single || (i < data.main_nodes && j < data.main_nodes);
}

void push_row(LogisticDesign& design, std::span<const double> x, double scale, bool positive) {
  for (double v : x) design.x.push_back(v * scale);
  design.y.push_back(positive ? 1.0 : 0.0);
}

}  // namespace

void AveragedFeatureState::update(TimeIndex t, std::optional<std::span<const double>> features) {
  if (t <= time_) throw RangeError("averaged features advance forward in time only");
  if (features && features->size() != mean_.size()) throw DimensionError("feature vector has the wrong dimension");
  while (time_ + 1 < t) {
    ++time_;
    if (time_ == 1) continue;  // Favg(1) of an absent pair stays 0
    double decay = static_cast<double>(time_ - 1) / time_;
    for (double& m : mean_) m *= decay;
  }
  time_ = t;
  const double prev = static_cast<double>(t - 1);
  for (std::size_t k = 0; k < mean_.size(); ++k) {
    double f = features ? (*features)[k] : 0.0;
    mean_[k] = (mean_[k] * prev + f) / t;
  }
}

std::vector<double> averaged_features(const Dataset& data, NodeId i, NodeId j, TimeIndex t) {
  if (t < 1 || t > data.steps()) throw RangeError("time step " + std::to_string(t) + " out of range");
  const auto& support = data.support();
  std::vector<double> sum(data.dim(), 0.0);
  for (TimeIndex s = 1; s <= t; ++s) {
    if (auto slot = support.at(s).find_slot(i, j)) {
      auto f = data.features.row(s, *slot);
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += f[k];
    }
  }
  for (double& v : sum) v /= t;
  return sum;
}

LogisticDesign logistic_design(const Dataset& data, LogisticVariant variant) {
  LogisticDesign design;
  design.dim = data.dim();
  const PairHistory history(data.support());
  const int T = data.steps();
  std::vector<double> sum(design.dim);
  for (NodeId i = 0; i < history.sender_count(); ++i) {
    for (std::size_t p = history.pair_begin(i); p < history.pair_end(i); ++p) {
      NodeId j = history.receiver(p);
      if (!counts_in_likelihood(data, i, j)) continue;
      auto obs = history.observations(p);
      auto outcome = [&](TimeIndex t, std::uint32_t slot) {
        if (data.mode == SequenceMode::single) return data.labels[static_cast<std::size_t>(t - 1)][slot] > 0;
        return data.main.at(t).contains(i, j);
      };
      if (variant == LogisticVariant::raw) {
        for (const auto& o : obs) {
          auto f = data.features.row(o.step, o.slot);
          if (!all_zero(f)) push_row(design, f, 1.0, outcome(o.step, o.slot));
        }
        continue;
      }
      std::fill(sum.begin(), sum.end(), 0.0);
      std::size_t next = 0;
      const TimeIndex last = data.mode == SequenceMode::single ? obs.back().step : T;
      for (TimeIndex t = obs.front().step; t <= last; ++t) {
        bool observed = next < obs.size() && obs[next].step == t;
        std::uint32_t slot = observed ? obs[next].slot : 0;
        if (observed) {
          auto f = data.features.row(t, slot);
          for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += f[k];
          ++next;
        }
        // Single mode has an outcome only where a labeled observation exists.
        if (data.mode == SequenceMode::single && !observed) continue;
        if (!all_zero(sum)) push_row(design, sum, 1.0 / t, outcome(t, slot));
      }
    }
  }
  return design;
}

double logistic_loss(const LogisticDesign& design, std::span<const double> beta) {
  if (beta.size() != design.dim) throw DimensionError("beta does not match the design dimension");
  if (design.rows() == 0) return 0.0;
  double loss = 0.0;
  for (std::size_t r = 0; r < design.rows(); ++r) {
    double z = 0.0;
    for (std::size_t k = 0; k < design.dim; ++k) z += beta[k] * design.x[r * design.dim + k];
    loss += softplus(z) - design.y[r] * z;
  }
  return loss / static_cast<double>(design.rows());
}

std::vector<double> logistic_gradient(const LogisticDesign& design, std::span<const double> beta) {
  if (beta.size() != design.dim) throw DimensionError("beta does not match the design dimension");
  std::vector<double> grad(design.dim, 0.0);
  if (design.rows() == 0) return grad;
  for (std::size_t r = 0; r < design.rows(); ++r) {
    const double* x = design.x.data() + r * design.dim;
    double z = 0.0;
    for (std::size_t k = 0; k < design.dim; ++k) z += beta[k] * x[k];
    double w = sigmoid(z) - design.y[r];
    for (std::size_t k = 0; k < design.dim; ++k) grad[k] += w * x[k];
  }
  for (double& g : grad) g /= static_cast<double>(design.rows());
  return grad;
}

LogisticModel logistic_fit(const Dataset& data, const LogisticConfig& config) {
  auto design = logistic_design(data, config.variant);
  if (design.rows() == 0) throw Error("no observations with features to fit the logistic baseline");
  auto result = gradient_descent([&](std::span<const double> b) { return logistic_loss(design, b); },
                                 [&](std::span<const double> b) { return logistic_gradient(design, b); },
                                 std::vector<double>(design.dim, 0.0), config.descent);
  LogisticModel model;
  model.variant = config.variant;
  model.beta = std::move(result.x);
  model.trajectory = std::move(result.trajectory);
  model.iterations = result.iterations;
  model.converged = result.converged;
  return model;
}

LogisticScorer::LogisticScorer(const Dataset& data, LogisticVariant variant, std::vector<double> beta)
    : data_(&data), history_(data.support()), variant_(variant), beta_(std::move(beta)) {
  if (beta_.size() != data.dim()) throw DimensionError("beta does not match the feature dimension");
}

double LogisticScorer::score_pair(std::optional<std::size_t> pair,
                                  std::optional<std::span<const double>> horizon) const {
  const std::size_t d = beta_.size();
  std::vector<double> x(d, 0.0);
  if (horizon) {
    if (horizon->size() != d) throw DimensionError("horizon features have the wrong dimension");
    std::copy(horizon->begin(), horizon->end(), x.begin());
  }
  if (variant_ == LogisticVariant::averaged) {
    if (pair) {
      for (const auto& o : history_.observations(*pair)) {
        auto f = data_->features.row(o.step, o.slot);
        for (std::size_t k = 0; k < d; ++k) x[k] += f[k];
      }
    }
    const double horizon_step = data_->steps() + 1;
    for (double& v : x) v /= horizon_step;
  }
  double z = 0.0;
  for (std::size_t k = 0; k < d; ++k) z += beta_[k] * x[k];
  return sigmoid(z);
}

double LogisticScorer::score(NodeId i, NodeId j, std::optional<std::span<const double>> horizon) const {
  const std::size_t universe = data_->total_nodes();
  if (i >= universe || j >= universe) throw RangeError("unknown node id in scored pair");
  return score_pair(history_.find(i, j), horizon);
}

double LogisticScorer::score(NodeId i, NodeId j) const {
  const std::size_t universe = data_->total_nodes();
  if (i >= universe || j >= universe) throw RangeError("unknown node id in scored pair");
  auto pair = history_.find(i, j);
  std::optional<std::span<const double>> horizon;
  if (pair) {
    const auto& last = history_.observations(*pair).back();
    if (last.step == data_->steps()) horizon = data_->features.row(last.step, last.slot);
  }
  return score_pair(pair, horizon);
}

}  // namespace barlink
