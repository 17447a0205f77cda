#include "barlink/bar_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#if __has_include(<sys/mman.h>)
#include <sys/mman.h>
#endif

#include "barlink/errors.hpp"

namespace barlink {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void axpy(double w, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += w * x[k];
}

void check_beta(std::span<const double> beta, std::size_t dim) {
  if (beta.size() != dim) {
    throw DimensionError("beta has " + std::to_string(beta.size()) + " entries, features have " +
                         std::to_string(dim));
  }
}

}  // namespace

double clamp_probability(double q) { return std::clamp(q, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double edge_probability(std::span<const double> beta, std::optional<std::span<const double>> features) {
  if (!features) return 0.0;
  if (features->size() != beta.size()) {
    throw DimensionError("feature vector has " + std::to_string(features->size()) + " entries, beta has " +
                         std::to_string(beta.size()));
  }
  return sigmoid(dot(beta, *features));
}

double q_recursive(double q0, std::span<const double> p, double lambda) {
  double q = q0;
  for (double ps : p) q = lambda * q + (1.0 - lambda) * ps;
  return q;
}

double init_q0(const AdjacencySeries& main) {
  const std::size_t n = main.node_count();
  if (n < 2) throw RangeError("initial density needs at least two main nodes");
  if (main.steps() < 1) throw RangeError("main series has no steps");
  const auto& first = main.at(1);
  std::size_t edges = 0;
  for (NodeId i : first.active_senders()) {
    for (NodeId j : first.out_neighbors(i)) edges += (i != j);
  }
  return clamp_probability(static_cast<double>(edges) / (static_cast<double>(n) * static_cast<double>(n - 1)));
}

double init_q0(const Dataset& data) {
  if (data.mode == SequenceMode::dual) return init_q0(data.main);
  for (TimeIndex t = 1; t <= data.steps(); ++t) {
    const auto& labels = data.labels[static_cast<std::size_t>(t - 1)];
    if (labels.empty()) continue;
    auto positives = std::count(labels.begin(), labels.end(), std::int8_t{1});
    return clamp_probability(static_cast<double>(positives) / static_cast<double>(labels.size()));
  }
  throw RangeError("labeled series has no observations");
}

void BarParameters::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw RangeError("lambda must lie in [0, 1]");
  if (!(alpha >= 0.0)) throw RangeError("alpha must be non-negative");
  if (!(q0 >= 0.0 && q0 <= 1.0)) throw RangeError("q0 must lie in [0, 1]");
  for (double b : beta) {
    if (!std::isfinite(b)) throw RangeError("beta must be finite");
  }
}

namespace {

// Random sender access over a large record array is TLB bound with 4 KiB
// pages. The hint is advisory and ignored where unsupported.
void advise_huge_pages(std::vector<double>& v) {
#ifdef MADV_HUGEPAGE
  constexpr std::uintptr_t kHuge = std::uintptr_t{1} << 21;
  auto begin = (reinterpret_cast<std::uintptr_t>(v.data()) + kHuge - 1) & ~(kHuge - 1);
  auto end = reinterpret_cast<std::uintptr_t>(v.data() + v.size()) & ~(kHuge - 1);
  if (end > begin) madvise(reinterpret_cast<void*>(begin), end - begin, MADV_HUGEPAGE);
#else
  (void)v;
#endif
}

}  // namespace

BarObjective::BarObjective(const Dataset& data, double lambda, double q0)
    : data_(&data), history_(data.support()), lambda_(lambda), q0_(q0) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw RangeError("lambda must lie in [0, 1]");
  if (!(q0 >= 0.0 && q0 <= 1.0)) throw RangeError("q0 must lie in [0, 1]");
  const auto horizon = static_cast<std::size_t>(data.steps()) + 2;
  lambda_pow_.resize(horizon);
  background_.resize(horizon);
  lambda_pow_[0] = 1.0;
  for (std::size_t k = 1; k < horizon; ++k) lambda_pow_[k] = lambda_pow_[k - 1] * lambda;
  for (std::size_t k = 0; k < horizon; ++k) background_[k] = lambda_pow_[k] * q0;
  const std::size_t d = data.dim();
  records_.resize(history_.observation_count() * (d + 1));
  advise_huge_pages(records_);
  for (std::size_t p = 0; p < history_.pair_count(); ++p) {
    double* out = records_.data() + history_.observation_offset(p) * (d + 1);
    for (const auto& obs : history_.observations(p)) {
      *out++ = static_cast<double>(obs.step);
      auto f = data.features.row(obs.step, obs.slot);
      out = std::copy(f.begin(), f.end(), out);
    }
  }
  if (data.mode != SequenceMode::dual) return;

  const std::size_t senders = std::min<std::size_t>(history_.sender_count(), data.main_nodes);
  const auto T = static_cast<std::size_t>(data.steps());
  lk_words_ = (T + 63) / 64;
  lk_offsets_.assign(senders + 1, 0);
  for (NodeId i = 0; i < senders; ++i) {
    for (std::size_t p = history_.pair_begin(i); p < history_.pair_end(i); ++p) {
      if (!in_likelihood(i, history_.receiver(p))) continue;
      lk_pairs_.push_back({history_.observation_offset(p), static_cast<std::uint32_t>(history_.observations(p).size()),
                           history_.first_step(p)});
    }
    lk_offsets_[i + 1] = lk_pairs_.size();
  }
  lk_main_.assign(lk_pairs_.size() * lk_words_, 0);
  for (TimeIndex t = 1; t <= data.steps(); ++t) {
    const auto& step = data.main.at(t);
    const auto bit = static_cast<std::size_t>(t - 1);
    for (NodeId i = 0; i < senders && i < step.node_count(); ++i) {
      // Merge the sorted main row with the sender's sorted history receivers.
      auto row = step.out_neighbors(i);
      auto it = row.begin();
      std::size_t lk = lk_offsets_[i];
      for (std::size_t p = history_.pair_begin(i); p < history_.pair_end(i) && it != row.end(); ++p) {
        NodeId j = history_.receiver(p);
        if (!in_likelihood(i, j)) continue;
        while (it != row.end() && *it < j) ++it;
        if (it != row.end() && *it == j) lk_main_[lk * lk_words_ + bit / 64] |= std::uint64_t{1} << (bit % 64);
        ++lk;
      }
    }
  }
}

const SenderAggregates& BarObjective::aggregates() const {
  if (!data_->aggregates) throw Error("regularizer needs sender aggregates of an auxiliary sequence");
  return *data_->aggregates;
}

bool BarObjective::in_likelihood(NodeId i, NodeId j) const {
  if (i == j) return false;
  if (data_->mode == SequenceMode::single) return true;
  return i < data_->main_nodes && j < data_->main_nodes;
}

double BarObjective::dynamic_part(std::span<const double> beta, std::size_t pair, TimeIndex t,
                                  std::span<double> grad) const {
  return dynamic_from(beta, history_.observation_offset(pair), history_.observations(pair).size(), t, grad);
}

double BarObjective::dynamic_from(std::span<const double> beta, std::size_t offset, std::size_t count, TimeIndex t,
                                  std::span<double> grad) const {
  if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t d = dim();
  const double* rec = records_.data() + offset * (d + 1);
  double value = 0.0;
  for (std::size_t k = 0; k < count; ++k, rec += d + 1) {
    auto step = static_cast<TimeIndex>(rec[0]);
    if (step > t) break;
    std::span<const double> f(rec + 1, d);
    double p = sigmoid(dot(beta, f));
    double w = lambda_pow_[static_cast<std::size_t>(t - step)] * (1.0 - lambda_);
    value += w * p;
    if (!grad.empty()) axpy(w * p * (1.0 - p), f, grad);
  }
  return value;
}

void BarObjective::pair_series(std::span<const double> beta, std::size_t pair, std::span<double> dyn,
                               std::span<double> grad) const {
  const std::size_t d = dim();
  const int T = steps();
  auto obs = history_.observations(pair);
  std::size_t next = 0;
  dyn[0] = 0.0;
  if (!grad.empty()) std::fill(grad.begin(), grad.begin() + static_cast<std::ptrdiff_t>(d), 0.0);
  for (TimeIndex t = 1; t <= T; ++t) {
    auto ut = static_cast<std::size_t>(t);
    dyn[ut] = lambda_ * dyn[ut - 1];
    if (!grad.empty()) {
      for (std::size_t k = 0; k < d; ++k) grad[ut * d + k] = lambda_ * grad[(ut - 1) * d + k];
    }
    if (next < obs.size() && obs[next].step == t) {
      auto f = observed_features(pair, next);
      double p = sigmoid(dot(beta, f));
      dyn[ut] += (1.0 - lambda_) * p;
      if (!grad.empty()) axpy((1.0 - lambda_) * p * (1.0 - p), f, grad.subspan(ut * d, d));
      ++next;
    }
  }
}

double BarObjective::q(std::span<const double> beta, NodeId i, NodeId j, TimeIndex t) const {
  check_beta(beta, dim());
  if (t < 0 || t > steps()) throw RangeError("time step " + std::to_string(t) + " outside 0.." + std::to_string(steps()));
  double value = background(t);
  if (auto pair = history_.find(i, j)) value += dynamic_part(beta, *pair, t);
  return value;
}

ProbabilityTrace BarObjective::trace(std::span<const double> beta, NodeId i, NodeId j, TimeIndex t) const {
  check_beta(beta, dim());
  if (t < 1 || t > steps()) throw RangeError("time step " + std::to_string(t) + " outside 1.." + std::to_string(steps()));
  ProbabilityTrace out;
  out.p_steps.assign(static_cast<std::size_t>(t), 0.0);
  if (auto pair = history_.find(i, j)) {
    for (const auto& obs : history_.observations(*pair)) {
      if (obs.step > t) break;
      out.p_steps[static_cast<std::size_t>(obs.step - 1)] = edge_probability(beta, data_->features.row(obs.step, obs.slot));
    }
  }
  out.q_value = q_recursive(q0_, out.p_steps, lambda_);
  return out;
}

double BarObjective::log_likelihood(std::span<const double> beta) const {
  check_beta(beta, dim());
  const int T = steps();
  const auto uT = static_cast<std::size_t>(T);
  std::vector<double> dyn(uT + 1);
  double ll = 0.0;

  if (data_->mode == SequenceMode::single) {
    for (NodeId i = 0; i < history_.sender_count(); ++i) {
      for (std::size_t p = history_.pair_begin(i); p < history_.pair_end(i); ++p) {
        if (history_.receiver(p) == i) continue;
        pair_series(beta, p, dyn, {});
        for (const auto& obs : history_.observations(p)) {
          double q = clamp_probability(background(obs.step) + dyn[static_cast<std::size_t>(obs.step)]);
          bool positive = data_->labels[static_cast<std::size_t>(obs.step - 1)][obs.slot] > 0;
          ll += positive ? std::log(q) : std::log1p(-q);
        }
      }
    }
    return ll;
  }

  const std::size_t n = data_->main_nodes;
  std::vector<double> explicit_terms(uT + 1, 0.0);
  for (NodeId i = 0; i < n && i < history_.sender_count(); ++i) {
    for (std::size_t p = history_.pair_begin(i); p < history_.pair_end(i); ++p) {
      NodeId j = history_.receiver(p);
      if (!in_likelihood(i, j)) continue;
      pair_series(beta, p, dyn, {});
      for (TimeIndex t = history_.first_step(p); t <= T; ++t) {
        double q = clamp_probability(background(t) + dyn[static_cast<std::size_t>(t)]);
        ll += data_->main.at(t).contains(i, j) ? std::log(q) : std::log1p(-q);
        explicit_terms[static_cast<std::size_t>(t)] += 1.0;
      }
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  for (TimeIndex t = 1; t <= T; ++t) {
    const double qb = clamp_probability(background(t));
    const auto& step = data_->main.at(t);
    double terms = explicit_terms[static_cast<std::size_t>(t)];
    for (NodeId i : step.active_senders()) {
      for (NodeId j : step.out_neighbors(i)) {
        if (i == j) continue;
        auto pair = history_.find(i, j);
        if (pair && history_.first_step(*pair) <= t) continue;
        ll += std::log(qb);
        terms += 1.0;
      }
    }
    ll += (pairs - terms) * std::log1p(-qb);
  }
  return ll;
}

double BarObjective::regularizer(std::span<const double> beta) const {
  check_beta(beta, dim());
  const auto& agg = aggregates();
  const std::size_t d = dim();
  const int T = steps();
  const auto uT = static_cast<std::size_t>(T);
  const auto& aux = *data_->aux;
  std::vector<double> dyn;
  std::vector<double> r(d);
  double reg = 0.0;
  for (NodeId i = 0; i < agg.node_count(); ++i) {
    const std::size_t first = i < history_.sender_count() ? history_.pair_begin(i) : 0;
    const std::size_t last = i < history_.sender_count() ? history_.pair_end(i) : 0;
    dyn.assign((last - first) * (uT + 1), 0.0);
    for (std::size_t p = first; p < last; ++p) {
      pair_series(beta, p, std::span<double>(dyn).subspan((p - first) * (uT + 1), uT + 1), {});
    }
    for (TimeIndex t = 1; t <= T; ++t) {
      const double base = background(t);
      auto cols = agg.column_sums(t);
      auto own = agg.row(t, i);
      for (std::size_t k = 0; k < d; ++k) r[k] = base * (cols[k] - own[k]);
      for (std::size_t p = first; p < last; ++p) {
        NodeId j = history_.receiver(p);
        if (j == i || history_.first_step(p) > t) continue;
        double c = dyn[(p - first) * (uT + 1) + static_cast<std::size_t>(t)] - (aux.at(t).contains(i, j) ? 1.0 : 0.0);
        axpy(c, agg.row(t, j), r);
      }
      reg += dot(r, r);
    }
  }
  return reg;
}

double BarObjective::objective(std::span<const double> beta, double alpha) const {
  double value = -log_likelihood(beta);
  if (alpha != 0.0) value += alpha * regularizer(beta);
  return value;
}

std::vector<double> BarObjective::grad_f(std::span<const double> beta, TimeIndex t, NodeId i, NodeId j) const {
  check_beta(beta, dim());
  std::vector<double> g(dim(), 0.0);
  auto pair = history_.find(i, j);
  if (!pair || history_.first_step(*pair) > t) return g;
  double q = clamp_probability(background(t) + dynamic_part(beta, *pair, t, g));
  for (double& v : g) v /= q;
  return g;
}

std::vector<double> BarObjective::grad_g(std::span<const double> beta, TimeIndex t, NodeId i, NodeId j) const {
  check_beta(beta, dim());
  std::vector<double> g(dim(), 0.0);
  auto pair = history_.find(i, j);
  if (!pair || history_.first_step(*pair) > t) return g;
  double q = clamp_probability(background(t) + dynamic_part(beta, *pair, t, g));
  for (double& v : g) v = -v / (1.0 - q);
  return g;
}

void BarObjective::regularizer_residual(std::span<const double> beta, TimeIndex t, NodeId i,
                                        std::span<double> residual,
                                        std::vector<std::pair<std::size_t, std::vector<double>>>* pair_grads) const {
  const auto& agg = aggregates();
  const std::size_t d = dim();
  const double base = background(t);
  auto cols = agg.column_sums(t);
  auto own = agg.row(t, i);
  for (std::size_t k = 0; k < d; ++k) residual[k] = base * (cols[k] - own[k]);
  if (i >= history_.sender_count()) return;
  const auto& step = data_->aux->at(t);
  std::vector<double> g(pair_grads ? d : 0);
  for (std::size_t p = history_.pair_begin(i); p < history_.pair_end(i); ++p) {
    NodeId j = history_.receiver(p);
    if (j == i || history_.first_step(p) > t) continue;
    double c = dynamic_part(beta, p, t, g) - (step.contains(i, j) ? 1.0 : 0.0);
    axpy(c, agg.row(t, j), residual);
    if (pair_grads) pair_grads->emplace_back(p, g);
  }
}

std::vector<double> BarObjective::grad_h(std::span<const double> beta, TimeIndex t, NodeId i, std::size_t ell) const {
  check_beta(beta, dim());
  if (ell >= dim()) throw RangeError("feature index out of range");
  std::vector<double> r(dim());
  std::vector<std::pair<std::size_t, std::vector<double>>> grads;
  regularizer_residual(beta, t, i, r, &grads);
  std::vector<double> out(dim(), 0.0);
  const auto& agg = aggregates();
  for (const auto& [p, g] : grads) axpy(2.0 * r[ell] * agg.row(t, history_.receiver(p))[ell], g, out);
  return out;
}

void BarObjective::add_sender_regularizer_gradient(std::span<const double> beta, TimeIndex t, NodeId i,
                                                   std::span<double> out) const {
  std::vector<double> r(dim());
  std::vector<std::pair<std::size_t, std::vector<double>>> grads;
  regularizer_residual(beta, t, i, r, &grads);
  const auto& agg = aggregates();
  for (const auto& [p, g] : grads) axpy(2.0 * dot(r, agg.row(t, history_.receiver(p))), g, out);
}

void BarObjective::add_sender_likelihood_gradient(std::span<const double> beta, TimeIndex t, NodeId i,
                                                  std::span<double> out, std::size_t zero_limit, Rng* rng) const {
  const std::size_t d = dim();
  const auto& step = data_->main.at(t);
  if (i >= step.node_count()) return;
  std::vector<double> g(d);

  if (data_->mode == SequenceMode::single) {
    const auto& labels = data_->labels[static_cast<std::size_t>(t - 1)];
    for (std::size_t slot = step.row_begin(i); slot < step.row_end(i); ++slot) {
      NodeId j = step.target(slot);
      if (j == i) continue;
      auto pair = history_.find(i, j);
      double q = clamp_probability(background(t) + dynamic_part(beta, *pair, t, g));
      double w = labels[slot] > 0 ? 1.0 / q : -1.0 / (1.0 - q);
      axpy(w, g, out);
    }
    return;
  }

  // Ones first, then zeros, each in receiver order.
  if (i + 1 >= lk_offsets_.size()) return;
  const std::size_t lk_begin = lk_offsets_[i];
  const std::size_t lk_end = lk_offsets_[i + 1];
  std::vector<std::size_t> zeros;
  for (std::size_t lk = lk_begin; lk < lk_end; ++lk) {
    const auto& pr = lk_pairs_[lk];
    if (pr.first_step > t) continue;
    if (!main_edge(lk, t)) {
      zeros.push_back(lk);
      continue;
    }
    double q = clamp_probability(background(t) + dynamic_from(beta, pr.obs_offset, pr.obs_count, t, g));
    axpy(1.0 / q, g, out);
  }
  double weight = 1.0;
  if (zero_limit > 0 && zeros.size() > zero_limit) {
    if (!rng) throw Error("zero subsampling needs a random generator");
    for (std::size_t k = 0; k < zero_limit; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, zeros.size() - 1);
      std::swap(zeros[k], zeros[pick(*rng)]);
    }
    weight = static_cast<double>(zeros.size()) / static_cast<double>(zero_limit);
    zeros.resize(zero_limit);
  }
  for (std::size_t lk : zeros) {
    const auto& pr = lk_pairs_[lk];
    double q = clamp_probability(background(t) + dynamic_from(beta, pr.obs_offset, pr.obs_count, t, g));
    axpy(-weight / (1.0 - q), g, out);
  }
}

void BarObjective::prefetch_likelihood(NodeId i, int stage) const {
  if (i + 1 >= lk_offsets_.size()) return;
  if (stage == 0) {
    __builtin_prefetch(lk_offsets_.data() + i);
    return;
  }
  const std::size_t begin = lk_offsets_[i];
  const std::size_t end = lk_offsets_[i + 1];
  if (begin == end) return;
  if (stage == 1) {
    __builtin_prefetch(lk_pairs_.data() + begin);
    __builtin_prefetch(lk_pairs_.data() + end - 1);
    __builtin_prefetch(lk_main_.data() + begin * lk_words_);
    return;
  }
  constexpr std::size_t kLine = 64;
  constexpr std::size_t kMaxLines = 256;
  const std::size_t stride = dim() + 1;
  const auto& last = lk_pairs_[end - 1];
  const auto* from = reinterpret_cast<const char*>(records_.data() + lk_pairs_[begin].obs_offset * stride);
  const auto* to = reinterpret_cast<const char*>(records_.data() + (last.obs_offset + last.obs_count) * stride);
  for (std::size_t n = 0; from < to && n < kMaxLines; from += kLine, ++n) __builtin_prefetch(from);
}

std::vector<double> BarObjective::objective_gradient(std::span<const double> beta, double alpha) const {
  check_beta(beta, dim());
  const std::size_t d = dim();
  const int T = steps();
  const auto uT = static_cast<std::size_t>(T);
  std::vector<double> grad(d, 0.0);
  std::vector<double> dyn;
  std::vector<double> dgrad;

  // Likelihood part: only history pairs have a nonzero gradient.
  dyn.resize(uT + 1);
  dgrad.resize((uT + 1) * d);
  for (NodeId i = 0; i < history_.sender_count(); ++i) {
    for (std::size_t p = history_.pair_begin(i); p < history_.pair_end(i); ++p) {
      NodeId j = history_.receiver(p);
      if (!in_likelihood(i, j)) continue;
      pair_series(beta, p, dyn, dgrad);
      auto term = [&](TimeIndex t, bool positive) {
        auto ut = static_cast<std::size_t>(t);
        double q = clamp_probability(background(t) + dyn[ut]);
        double w = positive ? -1.0 / q : 1.0 / (1.0 - q);
        axpy(w, std::span<const double>(dgrad).subspan(ut * d, d), grad);
      };
      if (data_->mode == SequenceMode::single) {
        for (const auto& obs : history_.observations(p)) {
          term(obs.step, data_->labels[static_cast<std::size_t>(obs.step - 1)][obs.slot] > 0);
        }
      } else {
        for (TimeIndex t = history_.first_step(p); t <= T; ++t) term(t, data_->main.at(t).contains(i, j));
      }
    }
  }
  if (alpha == 0.0) return grad;

  const auto& agg = aggregates();
  const auto& aux = *data_->aux;
  std::vector<double> r(d);
  for (NodeId i = 0; i < agg.node_count(); ++i) {
    const std::size_t first = i < history_.sender_count() ? history_.pair_begin(i) : 0;
    const std::size_t last = i < history_.sender_count() ? history_.pair_end(i) : 0;
    if (first == last) continue;  // residual has no beta dependence
    const std::size_t stride = uT + 1;
    dyn.assign((last - first) * stride, 0.0);
    dgrad.assign((last - first) * stride * d, 0.0);
    for (std::size_t p = first; p < last; ++p) {
      pair_series(beta, p, std::span<double>(dyn).subspan((p - first) * stride, stride),
                  std::span<double>(dgrad).subspan((p - first) * stride * d, stride * d));
    }
    for (TimeIndex t = 1; t <= T; ++t) {
      auto ut = static_cast<std::size_t>(t);
      const double base = background(t);
      auto cols = agg.column_sums(t);
      auto own = agg.row(t, i);
      for (std::size_t k = 0; k < d; ++k) r[k] = base * (cols[k] - own[k]);
      for (std::size_t p = first; p < last; ++p) {
        NodeId j = history_.receiver(p);
        if (j == i || history_.first_step(p) > t) continue;
        double c = dyn[(p - first) * stride + ut] - (aux.at(t).contains(i, j) ? 1.0 : 0.0);
        axpy(c, agg.row(t, j), r);
      }
      for (std::size_t p = first; p < last; ++p) {
        NodeId j = history_.receiver(p);
        if (j == i || history_.first_step(p) > t) continue;
        double w = 2.0 * alpha * dot(r, agg.row(t, j));
        axpy(w, std::span<const double>(dgrad).subspan(((p - first) * stride + ut) * d, d), grad);
      }
    }
  }
  return grad;
}

std::span<const NodeId> BarObjective::likelihood_senders(TimeIndex t) const { return data_->main.at(t).active_senders(); }

std::span<const NodeId> BarObjective::regularizer_senders(TimeIndex t) const {
  if (data_->mode == SequenceMode::single) return {};
  return data_->aux->at(t).active_senders();
}

BarScorer::BarScorer(const BarObjective& objective, std::vector<double> beta)
    : objective_(&objective), beta_(std::move(beta)) {
  check_beta(beta_, objective.dim());
}

double BarScorer::background() const { return objective_->background(objective_->steps() + 1); }

double BarScorer::history_term(NodeId i, NodeId j, std::optional<std::size_t>& pair) const {
  const std::size_t universe = objective_->data().total_nodes();
  if (i >= universe || j >= universe) throw RangeError("unknown node id in scored pair");
  pair = objective_->history().find(i, j);
  double q = background();
  if (pair) q += objective_->lambda() * objective_->dynamic_part(beta_, *pair, objective_->steps());
  return q;
}

double BarScorer::score(NodeId i, NodeId j) const {
  std::optional<std::size_t> pair;
  double q = history_term(i, j, pair);
  if (!pair) return q;
  const TimeIndex T = objective_->steps();
  auto obs = objective_->history().observations(*pair);
  if (obs.back().step != T) return q;
  auto f = objective_->data().features.row(T, obs.back().slot);
  return q + (1.0 - objective_->lambda()) * edge_probability(beta_, f);
}

double BarScorer::score(NodeId i, NodeId j, std::optional<std::span<const double>> horizon) const {
  std::optional<std::size_t> pair;
  double q = history_term(i, j, pair);
  return q + (1.0 - objective_->lambda()) * edge_probability(beta_, horizon);
}

std::vector<double> score_links(const BarObjective& objective, std::span<const double> beta,
                                std::span<const Edge> pairs) {
  BarScorer scorer(objective, std::vector<double>(beta.begin(), beta.end()));
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& e : pairs) out.push_back(scorer.score(e.src, e.dst));
  return out;
}

}  // namespace barlink
