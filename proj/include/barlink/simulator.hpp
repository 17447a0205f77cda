#pragma once

// Synthetic dual-sequence generator.
//
// Auxiliary networks start as a directed Erdos-Renyi graph and then evolve by
// independent edge births and deaths. Every present auxiliary edge carries
// Poisson features whose mean vector follows a Gaussian random walk. Main
// networks are Bernoulli draws from the BAR probabilities under a known beta.
//
// All randomness flows from one generator consumed in a fixed order, so a seed
// fixes the whole scenario.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "barlink/bar_model.hpp"
#include "barlink/temporal_graph.hpp"

namespace barlink {

struct ScenarioConfig {
  std::size_t N = 1000;  // auxiliary universe
  std::size_t n = 1000;  // main universe, the first n auxiliary nodes
  double p = 5e-3;
  double p_add = 5e-6;
  double p_del = 5e-5;
  int T = 15;
  std::size_t d = 10;
  // Per-step covariance of the mean walk is walk_variance * I.
  double walk_variance = 0.05;
  double mu0 = 1.0;
  double lambda = 0.5;
  std::uint64_t seed = 1;
  // Replaces the drawn coefficient vector; used as given (no normalization).
  std::vector<double> beta;

  void validate() const;
};

struct GroundTruth {
  std::vector<double> beta;
  double lambda = 0.0;
  double q0 = 0.0;
  std::vector<std::vector<double>> mu_series;  // mu_t for t = 1..T
  // Main edges per step drawn from the background term alone (the pair never
  // had auxiliary support up to that step).
  std::vector<std::size_t> background_edges;
};

struct Scenario {
  Dataset data;
  GroundTruth truth;
};

// Ordered pairs i != j, each present with probability p. Sorted.
std::vector<Edge> generate_initial_auxiliary(std::size_t N, double p, Rng& rng);

// Each present edge dies with probability p_del; each absent pair i != j is
// born with probability p_add. `prev` must be sorted; the result is sorted.
std::vector<Edge> evolve_auxiliary(const std::vector<Edge>& prev, std::size_t N, double p_add, double p_del,
                                   Rng& rng);

// Unit-norm vector with components drawn uniformly from [0, 1].
std::vector<double> draw_beta(std::size_t d, Rng& rng);

struct FeatureDraw {
  std::vector<std::vector<double>> values;     // per step, edge_counts[t] * d values
  std::vector<std::vector<double>> mu_series;  // per step, d values
};
// mu_t = mu_{t-1} + eps_t with eps_t ~ N(0, walk_variance I); features are
// Poisson(max(mu_t, 0)) elementwise, fresh for every edge.
FeatureDraw generate_features(const std::vector<std::size_t>& edge_counts, std::size_t d, double mu0,
                              double walk_variance, Rng& rng);

struct MainDraw {
  AdjacencySeries main;
  double q0 = 0.0;
  std::vector<std::size_t> background_edges;
};
// Q0 is the expected density of the first step, the mean of P(1) over the
// n (n - 1) main pairs.
MainDraw generate_main(const AdjacencySeries& aux, const EdgeFeatureSeries& features, std::span<const double> beta,
                       double lambda, std::size_t n, Rng& rng);

Scenario simulate(const ScenarioConfig& config);

// Named parameter rows of the published simulation table (1..7), with N = n
// scaled from 10000 by `scale`.
ScenarioConfig table1_row(int row, double scale = 1.0);
inline constexpr int kTable1Rows = 7;

}  // namespace barlink
