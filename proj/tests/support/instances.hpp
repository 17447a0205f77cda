#pragma once

// Hand-rolled generators of small random datasets and a dense evaluator of the
// BAR objective that enumerates every pair and step explicitly.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "barlink/bar_model.hpp"
#include "barlink/temporal_graph.hpp"

namespace barlink::testing {

struct InstanceShape {
  std::size_t N = 8;
  std::size_t n = 6;
  int T = 3;
  std::size_t d = 3;
  double aux_density = 0.3;
  // Probability that a main edge sits on an auxiliary edge of the same step,
  // and that an arbitrary main pair fires anyway.
  double main_on_support = 0.6;
  double main_background = 0.05;
  double feature_scale = 1.0;
};

inline Dataset random_dual_dataset(const InstanceShape& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, s.feature_scale);
  std::vector<std::vector<Edge>> aux(static_cast<std::size_t>(s.T));
  std::vector<std::vector<Edge>> main(static_cast<std::size_t>(s.T));
  std::vector<std::vector<double>> feats(static_cast<std::size_t>(s.T));
  for (int t = 0; t < s.T; ++t) {
    for (NodeId i = 0; i < s.N; ++i) {
      for (NodeId j = 0; j < s.N; ++j) {
        if (i == j) continue;
        bool in_aux = unit(rng) < s.aux_density;
        if (in_aux) {
          aux[t].push_back({i, j});
          for (std::size_t k = 0; k < s.d; ++k) feats[t].push_back(normal(rng));
        }
        if (i < s.n && j < s.n) {
          double p = in_aux ? s.main_on_support : s.main_background;
          if (unit(rng) < p) main[t].push_back({i, j});
        }
      }
    }
  }
  auto a = build_series(s.N, NetworkRole::auxiliary, aux, s.d, feats);
  auto m = build_series(s.n, NetworkRole::main, main);
  DatasetOptions opts;
  opts.warn = false;
  return make_dual_dataset(NodeIndex::identity(s.N), s.n, m.adjacency, a.adjacency, a.features, opts);
}

inline std::vector<double> random_beta(std::size_t d, std::uint64_t seed, double scale = 0.5) {
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> beta(d);
  for (double& b : beta) b = normal(rng);
  return beta;
}

// Dense per-step arrays of a dual dataset.
class DenseModel {
 public:
  DenseModel(const Dataset& data, std::span<const double> beta, double lambda, double q0)
      : N_(data.total_nodes()), n_(data.main_nodes), T_(data.steps()), d_(data.dim()) {
    const auto& aux = *data.aux;
    A_.assign(T_, std::vector<double>(N_ * N_, 0.0));
    B_.assign(T_, std::vector<double>(N_ * N_, 0.0));
    F_.assign(T_, std::vector<double>(N_ * N_ * d_, 0.0));
    Q_.assign(T_, std::vector<double>(N_ * N_, 0.0));
    for (int t = 1; t <= T_; ++t) {
      auto& a = A_[t - 1];
      auto& b = B_[t - 1];
      auto& f = F_[t - 1];
      for (const auto& e : data.main.at(t).edges()) a[e.src * N_ + e.dst] = 1.0;
      const auto& step = aux.at(t);
      for (NodeId i = 0; i < N_; ++i) {
        for (std::size_t slot = step.row_begin(i); slot < step.row_end(i); ++slot) {
          NodeId j = step.target(slot);
          b[i * N_ + j] = 1.0;
          auto row = data.features.row(t, slot);
          for (std::size_t k = 0; k < d_; ++k) f[(i * N_ + j) * d_ + k] = row[k];
        }
      }
    }
    for (std::size_t i = 0; i < N_; ++i) {
      for (std::size_t j = 0; j < N_; ++j) {
        double q = q0;
        for (int t = 0; t < T_; ++t) {
          double p = 0.0;
          if (B_[t][i * N_ + j] == 1.0) {
            double z = 0.0;
            for (std::size_t k = 0; k < d_; ++k) z += beta[k] * F_[t][(i * N_ + j) * d_ + k];
            p = 1.0 / (1.0 + std::exp(-z));
          }
          q = lambda * q + (1.0 - lambda) * p;
          Q_[t][i * N_ + j] = q;
        }
      }
    }
  }

  double log_likelihood() const {
    double ll = 0.0;
    for (int t = 0; t < T_; ++t) {
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
          if (i == j) continue;
          double q = clamp_probability(Q_[t][i * N_ + j]);
          ll += A_[t][i * N_ + j] == 1.0 ? std::log(q) : std::log(1.0 - q);
        }
      }
    }
    return ll;
  }

  // Phi(t)_{j, ell} = sum_k B(t)_{jk} F(t)_{jk, ell}
  std::vector<double> phi(int t) const {
    std::vector<double> out(N_ * d_, 0.0);
    for (std::size_t j = 0; j < N_; ++j) {
      for (std::size_t k = 0; k < N_; ++k) {
        if (B_[t][j * N_ + k] != 1.0) continue;
        for (std::size_t l = 0; l < d_; ++l) out[j * d_ + l] += F_[t][(j * N_ + k) * d_ + l];
      }
    }
    return out;
  }

  // ((Q - B) Phi)_{i, ell} at step t (1-based), self pairs excluded.
  double residual(int t, std::size_t i, std::size_t ell) const {
    auto ph = phi(t - 1);
    double r = 0.0;
    for (std::size_t j = 0; j < N_; ++j) {
      if (j == i) continue;
      r += (Q_[t - 1][i * N_ + j] - B_[t - 1][i * N_ + j]) * ph[j * d_ + ell];
    }
    return r;
  }

  double regularizer() const {
    double reg = 0.0;
    for (int t = 1; t <= T_; ++t) {
      for (std::size_t i = 0; i < N_; ++i) {
        for (std::size_t l = 0; l < d_; ++l) {
          double r = residual(t, i, l);
          reg += r * r;
        }
      }
    }
    return reg;
  }

  double q(int t, std::size_t i, std::size_t j) const { return Q_[t - 1][i * N_ + j]; }

 private:
  std::size_t N_;
  std::size_t n_;
  int T_;
  std::size_t d_;
  std::vector<std::vector<double>> A_, B_, F_, Q_;
};

// Central finite-difference gradient of a scalar function of beta.
template <class Fn>
std::vector<double> finite_difference(Fn&& fn, std::vector<double> beta, double h = 1e-6) {
  std::vector<double> g(beta.size());
  for (std::size_t k = 0; k < beta.size(); ++k) {
    double keep = beta[k];
    beta[k] = keep + h;
    double up = fn(beta);
    beta[k] = keep - h;
    double down = fn(beta);
    beta[k] = keep;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

// max_k |a_k - b_k| / max(|b|_inf, floor)
inline double relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-8) {
  double scale = floor;
  for (double v : b) scale = std::max(scale, std::abs(v));
  double err = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) err = std::max(err, std::abs(a[k] - b[k]));
  return err / scale;
}

}  // namespace barlink::testing
