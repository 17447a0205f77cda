#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "barlink/bar_model.hpp"
#include "barlink/errors.hpp"
#include "barlink/pair_history.hpp"
#include "barlink/simulator.hpp"

using namespace barlink;

namespace {

double binomial_sd(double trials, double p) { return std::sqrt(trials * p * (1 - p)); }

}  // namespace

TEST(InitialAuxiliary, ZeroProbabilityIsEmpty) {
  Rng rng(1);
  EXPECT_TRUE(generate_initial_auxiliary(50, 0.0, rng).empty());
}

TEST(InitialAuxiliary, UnitProbabilityIsComplete) {
  Rng rng(1);
  auto edges = generate_initial_auxiliary(20, 1.0, rng);
  EXPECT_EQ(edges.size(), 20u * 19u);
  for (const auto& e : edges) EXPECT_NE(e.src, e.dst);
}

TEST(InitialAuxiliary, EdgeCountIsBinomial) {
  const double N = 1000;
  const double p = 5e-3;
  const double pairs = N * (N - 1);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    auto edges = generate_initial_auxiliary(1000, p, rng);
    EXPECT_LT(std::abs(static_cast<double>(edges.size()) - p * pairs), 4 * binomial_sd(pairs, p));
    EXPECT_TRUE(std::is_sorted(edges.begin(), edges.end()));
    EXPECT_EQ(std::adjacent_find(edges.begin(), edges.end()), edges.end());
  }
}

TEST(EvolveAuxiliary, NoDynamicsIsFixedPoint) {
  Rng rng(3);
  auto edges = generate_initial_auxiliary(100, 0.05, rng);
  EXPECT_EQ(evolve_auxiliary(edges, 100, 0.0, 0.0, rng), edges);
}

TEST(EvolveAuxiliary, CertainDeathEmptiesGraph) {
  Rng rng(3);
  auto edges = generate_initial_auxiliary(100, 0.05, rng);
  EXPECT_TRUE(evolve_auxiliary(edges, 100, 0.0, 1.0, rng).empty());
}

TEST(EvolveAuxiliary, BirthsAndDeathsAreBinomial) {
  const std::size_t N = 400;
  const double pairs = static_cast<double>(N) * (N - 1);
  Rng rng(5);
  auto prev = generate_initial_auxiliary(N, 0.02, rng);
  const double p_add = 1e-3;
  const double p_del = 0.1;
  auto next = evolve_auxiliary(prev, N, p_add, p_del, rng);
  std::vector<Edge> survivors;
  std::set_intersection(prev.begin(), prev.end(), next.begin(), next.end(), std::back_inserter(survivors));
  double deaths = static_cast<double>(prev.size() - survivors.size());
  double births = static_cast<double>(next.size() - survivors.size());
  double m = static_cast<double>(prev.size());
  EXPECT_LT(std::abs(deaths - p_del * m), 4 * binomial_sd(m, p_del));
  EXPECT_LT(std::abs(births - p_add * (pairs - m)), 4 * binomial_sd(pairs - m, p_add));
  for (const auto& e : next) EXPECT_NE(e.src, e.dst);
}

TEST(EvolveAuxiliary, LongRunDensityMatchesMarkovStationaryDistribution) {
  const std::size_t N = 300;
  const double pairs = static_cast<double>(N) * (N - 1);
  const double p_add = 2e-3;
  const double p_del = 2e-2;
  // Two-state chain per pair: stationary presence probability p_add / (p_add + p_del).
  const double pi = p_add / (p_add + p_del);
  Rng rng(8);
  auto edges = generate_initial_auxiliary(N, 0.0, rng);
  for (int t = 0; t < 600; ++t) edges = evolve_auxiliary(edges, N, p_add, p_del, rng);
  // After 600 steps the chain is mixed: |1 - p_add - p_del|^600 < 1e-5.
  EXPECT_LT(std::abs(static_cast<double>(edges.size()) - pi * pairs), 4 * binomial_sd(pairs, pi));
}

TEST(DrawBeta, UnitNormNonNegative) {
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    auto beta = draw_beta(10, rng);
    double norm = std::sqrt(std::inner_product(beta.begin(), beta.end(), beta.begin(), 0.0));
    EXPECT_NEAR(norm, 1.0, 1e-12);
    for (double b : beta) EXPECT_GE(b, 0.0);
  }
}

TEST(Features, ZeroWalkKeepsMeanConstant) {
  Rng rng(4);
  auto draw = generate_features({3, 5, 0, 2}, 4, 1.5, 0.0, rng);
  ASSERT_EQ(draw.mu_series.size(), 4u);
  for (const auto& mu : draw.mu_series) {
    for (double m : mu) EXPECT_EQ(m, 1.5);
  }
  EXPECT_EQ(draw.values[0].size(), 12u);
  EXPECT_EQ(draw.values[2].size(), 0u);
}

TEST(Features, ZeroMeanGivesZeroFeatures) {
  Rng rng(4);
  auto draw = generate_features({100}, 3, 0.0, 0.0, rng);
  for (double v : draw.values[0]) EXPECT_EQ(v, 0.0);
}

TEST(Features, SampleMeanMatchesPoissonMean) {
  Rng rng(6);
  const std::size_t count = 20000;
  auto draw = generate_features({count, count, count}, 5, 1.0, 0.05, rng);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t l = 0; l < 5; ++l) {
      double sum = 0;
      for (std::size_t e = 0; e < count; ++e) sum += draw.values[t][e * 5 + l];
      double mu = std::max(draw.mu_series[t][l], 0.0);
      EXPECT_LT(std::abs(sum / count - mu), 4 * std::sqrt(std::max(mu, 1e-12) / count) + 1e-12);
    }
  }
}

TEST(Features, NegativeMeanIsClamped) {
  Rng rng(9);
  // A large walk variance drives some coordinates below zero quickly.
  auto draw = generate_features(std::vector<std::size_t>(30, 50), 6, 0.1, 1.0, rng);
  bool saw_negative = false;
  for (std::size_t t = 0; t < 30; ++t) {
    for (std::size_t l = 0; l < 6; ++l) {
      if (draw.mu_series[t][l] >= 0) continue;
      saw_negative = true;
      for (std::size_t e = 0; e < 50; ++e) EXPECT_EQ(draw.values[t][e * 6 + l], 0.0);
    }
  }
  EXPECT_TRUE(saw_negative);
}

TEST(GenerateMain, LambdaOneIsBernoulliQ0) {
  ScenarioConfig c;
  c.N = c.n = 300;
  c.p = 0.02;
  c.T = 6;
  c.lambda = 1.0;
  c.seed = 2;
  auto sc = simulate(c);
  const double pairs = 300.0 * 299.0;
  for (TimeIndex t = 1; t <= c.T; ++t) {
    double edges = static_cast<double>(sc.data.main.at(t).edge_count());
    EXPECT_LT(std::abs(edges - sc.truth.q0 * pairs), 4 * binomial_sd(pairs, sc.truth.q0));
  }
}

TEST(GenerateMain, SaturatedProbabilityWithLambdaZeroCopiesSupport) {
  ScenarioConfig c;
  c.N = c.n = 120;
  c.p = 0.05;
  c.T = 3;
  c.lambda = 0.0;
  c.mu0 = 50.0;
  c.walk_variance = 0.0;
  c.beta = std::vector<double>(c.d, 10.0);
  auto sc = simulate(c);
  for (TimeIndex t = 1; t <= c.T; ++t) {
    EXPECT_EQ(sc.data.main.at(t).edges(), sc.data.aux->at(t).edges());
    EXPECT_EQ(sc.truth.background_edges[t - 1], 0u);
  }
}

TEST(GenerateMain, EmpiricalFrequencyMatchesQ) {
  // One supported pair, fixed features, 10^4 independent replicates.
  std::vector<std::vector<Edge>> aux{{{0, 1}}, {{0, 1}}, {}};
  auto a = build_series(2, NetworkRole::auxiliary, aux, 2, {{0.4, 1.0}, {2.0, -0.5}, {}});
  std::vector<double> beta{0.6, 0.8};
  const double lambda = 0.3;
  Rng rng(12);
  std::vector<double> hits(3, 0.0);
  std::vector<double> q0s;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    auto draw = generate_main(a.adjacency, a.features, beta, lambda, 2, rng);
    q0s.push_back(draw.q0);
    for (TimeIndex t = 1; t <= 3; ++t) hits[t - 1] += draw.main.contains(t, 0, 1);
  }
  // Q0 is the mean of P(1) over the two ordered pairs.
  double p1 = sigmoid(0.6 * 0.4 + 0.8 * 1.0);
  double p2 = sigmoid(0.6 * 2.0 - 0.8 * 0.5);
  double q0 = p1 / 2;
  EXPECT_NEAR(q0s.front(), q0, 1e-15);
  std::vector<double> q{lambda * q0 + (1 - lambda) * p1};
  q.push_back(lambda * q[0] + (1 - lambda) * p2);
  q.push_back(lambda * q[1]);
  for (int t = 0; t < 3; ++t) {
    EXPECT_LT(std::abs(hits[t] / reps - q[t]), 4 * std::sqrt(q[t] * (1 - q[t]) / reps)) << "step " << t + 1;
  }
}

TEST(GenerateMain, EdgesDecomposeIntoSupportAndBackground) {
  ScenarioConfig c;
  c.N = 400;
  c.n = 300;
  c.p = 0.01;
  c.seed = 4;
  auto sc = simulate(c);
  // Every main edge lies on a pair with support up to its step, or was counted
  // as a background draw.
  for (TimeIndex t = 1; t <= c.T; ++t) {
    std::size_t unsupported = 0;
    for (const auto& e : sc.data.main.at(t).edges()) {
      bool seen = false;
      for (TimeIndex s = 1; s <= t && !seen; ++s) seen = sc.data.aux->contains(s, e.src, e.dst);
      unsupported += !seen;
      EXPECT_LT(e.src, c.n);
      EXPECT_LT(e.dst, c.n);
      EXPECT_NE(e.src, e.dst);
    }
    EXPECT_EQ(unsupported, sc.truth.background_edges[t - 1]);
  }
}

TEST(Simulate, SameSeedIsBitIdentical) {
  ScenarioConfig c;
  c.N = c.n = 200;
  c.p = 0.02;
  c.seed = 77;
  auto a = simulate(c);
  auto b = simulate(c);
  ASSERT_EQ(a.data.steps(), b.data.steps());
  for (TimeIndex t = 1; t <= c.T; ++t) {
    EXPECT_EQ(a.data.main.at(t).edges(), b.data.main.at(t).edges());
    EXPECT_EQ(a.data.aux->at(t).edges(), b.data.aux->at(t).edges());
    auto fa = a.data.features.step_values(t);
    auto fb = b.data.features.step_values(t);
    EXPECT_TRUE(std::equal(fa.begin(), fa.end(), fb.begin(), fb.end()));
  }
  EXPECT_EQ(a.truth.beta, b.truth.beta);
  EXPECT_EQ(a.truth.q0, b.truth.q0);
  c.seed = 78;
  auto d = simulate(c);
  EXPECT_NE(a.truth.beta, d.truth.beta);
}

TEST(Simulate, ShapesAreConsistent) {
  auto c = table1_row(1, 0.1);
  auto sc = simulate(c);
  EXPECT_EQ(sc.data.total_nodes(), 1000u);
  EXPECT_EQ(sc.data.main_nodes, 1000u);
  EXPECT_EQ(sc.data.steps(), 15);
  EXPECT_EQ(sc.data.dim(), 10u);
  EXPECT_EQ(sc.truth.mu_series.size(), 15u);
  for (TimeIndex t = 1; t <= 15; ++t) {
    EXPECT_EQ(sc.data.features.step_values(t).size(), sc.data.aux->at(t).edge_count() * 10);
  }
}

TEST(Simulate, InvalidConfigRejected) {
  ScenarioConfig c;
  c.p = 1.5;
  EXPECT_THROW(c.validate(), RangeError);
  c = ScenarioConfig{};
  c.n = c.N + 1;
  EXPECT_THROW(c.validate(), RangeError);
  c = ScenarioConfig{};
  c.T = 0;
  EXPECT_THROW(c.validate(), RangeError);
}

TEST(Table1, RowParameters) {
  auto r1 = table1_row(1);
  EXPECT_EQ(r1.N, 10000u);
  EXPECT_EQ(r1.p, 5e-4);
  EXPECT_DOUBLE_EQ(r1.p_add, 5e-7);
  EXPECT_DOUBLE_EQ(r1.p_del, 5e-6);
  auto r2 = table1_row(2, 0.1);
  EXPECT_EQ(r2.N, 1000u);
  EXPECT_EQ(r2.n, 1000u);
  EXPECT_EQ(r2.p, 5e-3);
  EXPECT_DOUBLE_EQ(r2.p_del, 5e-5);
  const double p_del[] = {0.0005, 0.005, 0.05, 0.2, 0.5};
  for (int row = 3; row <= 7; ++row) EXPECT_EQ(table1_row(row).p_del, p_del[row - 3]);
  EXPECT_THROW(table1_row(0), RangeError);
  EXPECT_THROW(table1_row(8), RangeError);
}

TEST(Table1, HighTurnoverRowHasLowerDegree) {
  auto low = table1_row(3, 0.1);
  auto high = table1_row(7, 0.1);
  auto a = simulate(low);
  auto b = simulate(high);
  double da = static_cast<double>(a.data.main.at(15).edge_count()) / 1000.0;
  double db = static_cast<double>(b.data.main.at(15).edge_count()) / 1000.0;
  EXPECT_LT(db, 0.5 * da);
}
