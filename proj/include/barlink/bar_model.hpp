#pragma once

// Bernoulli auto-regressive link model.
//
// For a pair (i, j) the outcome at step t is Bernoulli(Q(t)) with
//   Q(t) = lambda * Q(t-1) + (1 - lambda) * P(t),   Q(0) = q0,
//   P(t) = sigmoid(beta . F(t))  when the pair is in the support at t, else 0.
// Unrolled, Q(t) = lambda^t q0 + D(t) where the dynamic part
//   D(t) = sum_{s<=t} lambda^(t-s) (1 - lambda) P(s)
// is nonzero only for pairs observed in the support at some s <= t. Every
// sum below therefore runs over the pair history instead of all N^2 pairs;
// the lambda^t q0 background is handled in closed form.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "barlink/pair_history.hpp"
#include "barlink/temporal_graph.hpp"

namespace barlink {

using Rng = std::mt19937_64;

// Probabilities are clamped to [eps, 1 - eps] before any log or reciprocal.
inline constexpr double kProbabilityEpsilon = 1e-12;

double clamp_probability(double q);
double sigmoid(double x);

// sigmoid(beta . features), or 0 when the pair is outside the support.
double edge_probability(std::span<const double> beta, std::optional<std::span<const double>> features);

// Q(t) by the forward recursion over p = (P(1), ..., P(t)).
double q_recursive(double q0, std::span<const double> p, double lambda);

// Edge density of the first main step, |A(1)| / (n (n - 1)), clamped.
double init_q0(const AdjacencySeries& main);
// Dual mode: as above. Single mode: share of positive labels among the
// first step that has observations.
double init_q0(const Dataset& data);

struct BarParameters {
  std::vector<double> beta;
  double lambda = 0.5;
  double alpha = 0.0;
  double q0 = 0.0;

  void validate() const;
};

struct ProbabilityTrace {
  std::vector<double> p_steps;  // P(1..t)
  double q_value = 0.0;         // Q(t), unclamped
};

class BarObjective {
 public:
  BarObjective(const Dataset& data, double lambda, double q0);

  const Dataset& data() const { return *data_; }
  const PairHistory& history() const { return history_; }
  double lambda() const { return lambda_; }
  double q0() const { return q0_; }
  std::size_t dim() const { return data_->dim(); }
  int steps() const { return data_->steps(); }

  // lambda^t q0, defined for t in 0..T+1.
  double background(TimeIndex t) const { return background_[static_cast<std::size_t>(t)]; }

  // D(t) of one history pair. A non-empty `grad` receives its gradient.
  double dynamic_part(std::span<const double> beta, std::size_t pair, TimeIndex t, std::span<double> grad = {}) const;
  double q(std::span<const double> beta, NodeId i, NodeId j, TimeIndex t) const;
  ProbabilityTrace trace(std::span<const double> beta, NodeId i, NodeId j, TimeIndex t) const;

  double log_likelihood(std::span<const double> beta) const;
  double regularizer(std::span<const double> beta) const;
  double objective(std::span<const double> beta, double alpha) const;

  // Gradients of f = log Q(t)_ij, g = log(1 - Q(t)_ij) and
  // h = (sum_j (Q(t)_ij - B(t)_ij) Phi(t)_{j,ell})^2.
  std::vector<double> grad_f(std::span<const double> beta, TimeIndex t, NodeId i, NodeId j) const;
  std::vector<double> grad_g(std::span<const double> beta, TimeIndex t, NodeId i, NodeId j) const;
  std::vector<double> grad_h(std::span<const double> beta, TimeIndex t, NodeId i, std::size_t ell) const;

  // Adds the gradient of sender i's log-likelihood terms at step t. Zero terms
  // are enumerated over the sender's support history (all other zeros have
  // zero gradient). zero_limit > 0 replaces them by a reweighted uniform
  // subsample of that many pairs drawn with `rng`.
  void add_sender_likelihood_gradient(std::span<const double> beta, TimeIndex t, NodeId i, std::span<double> out,
                                      std::size_t zero_limit = 0, Rng* rng = nullptr) const;
  // Hints that sender i's likelihood terms are needed soon. Stage 0 fetches
  // the sender's index entry, stage 1 its pair records, stage 2 its
  // observations; each stage reads what the previous one fetched. Issues
  // cache prefetches only and never changes results.
  void prefetch_likelihood(NodeId i, int stage) const;
  // Adds sum_ell grad h(t, i, ell).
  void add_sender_regularizer_gradient(std::span<const double> beta, TimeIndex t, NodeId i,
                                       std::span<double> out) const;

  // Gradient of -log_likelihood + alpha * regularizer.
  std::vector<double> objective_gradient(std::span<const double> beta, double alpha) const;

  // Senders that own a likelihood term (resp. an auxiliary edge) at step t.
  std::span<const NodeId> likelihood_senders(TimeIndex t) const;
  std::span<const NodeId> regularizer_senders(TimeIndex t) const;

 private:
  // Forward recursion of D(t) (and its gradient) for t = 1..T.
  void pair_series(std::span<const double> beta, std::size_t pair, std::span<double> dyn,
                   std::span<double> grad) const;
  // r_ell = sum_j (Q(t)_ij - B(t)_ij) Phi(t)_{j,ell}. When `pair_grads` is
  // non-null it receives (pair, grad D) for each contributing history pair.
  void regularizer_residual(std::span<const double> beta, TimeIndex t, NodeId i, std::span<double> residual,
                            std::vector<std::pair<std::size_t, std::vector<double>>>* pair_grads) const;
  const SenderAggregates& aggregates() const;
  bool in_likelihood(NodeId i, NodeId j) const;
  // Features of the k-th observation of a history pair.
  std::span<const double> observed_features(std::size_t pair, std::size_t k) const {
    const std::size_t d = data_->dim();
    return {records_.data() + (history_.observation_offset(pair) + k) * (d + 1) + 1, d};
  }
  // dynamic_part over `count` records starting at flat observation `offset`.
  double dynamic_from(std::span<const double> beta, std::size_t offset, std::size_t count, TimeIndex t,
                      std::span<double> grad) const;
  bool main_edge(std::size_t lk, TimeIndex t) const {
    auto bit = static_cast<std::size_t>(t - 1);
    return (lk_main_[lk * lk_words_ + bit / 64] >> (bit % 64)) & 1u;
  }

  // Dual-mode likelihood pairs of one sender, packed for the SGD hot path.
  struct LikelihoodPair {
    std::size_t obs_offset = 0;
    std::uint32_t obs_count = 0;
    TimeIndex first_step = 0;
  };

  const Dataset* data_;
  PairHistory history_;
  // Observations in history order as [step, f_1..f_d] records, so that one
  // sender's terms read one contiguous block instead of a row in every step.
  std::vector<double> records_;
  // Per main sender: its history pairs inside the likelihood, with a bitmask
  // over steps of main-edge presence (lk_words_ words per pair).
  std::vector<std::size_t> lk_offsets_;
  std::vector<LikelihoodPair> lk_pairs_;
  std::vector<std::uint64_t> lk_main_;
  std::size_t lk_words_ = 0;
  double lambda_;
  double q0_;
  std::vector<double> lambda_pow_;
  std::vector<double> background_;
};

// Scores Q(T+1) for pairs of a trained dataset of horizon T.
class BarScorer {
 public:
  BarScorer(const BarObjective& objective, std::vector<double> beta);

  // P(T+1) from the pair's last-step features when it is in the support at T.
  double score(NodeId i, NodeId j) const;
  // P(T+1) from explicit horizon features; nullopt means outside the support.
  double score(NodeId i, NodeId j, std::optional<std::span<const double>> horizon) const;
  // Score of a pair with no history and no horizon support.
  double background() const;

 private:
  double history_term(NodeId i, NodeId j, std::optional<std::size_t>& pair) const;

  const BarObjective* objective_;
  std::vector<double> beta_;
};

std::vector<double> score_links(const BarObjective& objective, std::span<const double> beta,
                                std::span<const Edge> pairs);

}  // namespace barlink
