#include "barlink/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "barlink/errors.hpp"

namespace barlink {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::uint64_t pair_key(NodeId i, NodeId j) { return (std::uint64_t{i} << 32) | j; }

// Visits, in increasing order, a Bernoulli(p) subset of the ordered pairs
// i != j of an N-node universe by drawing geometric gaps.
template <class Visit>
void skip_sample_pairs(std::size_t N, double p, Rng& rng, Visit&& visit) {
  if (N < 2 || p <= 0.0) return;
  const std::uint64_t row = N - 1;
  const std::uint64_t total = static_cast<std::uint64_t>(N) * row;
  auto emit = [&](std::uint64_t k) {
    auto src = static_cast<NodeId>(k / row);
    auto r = static_cast<NodeId>(k % row);
    visit(Edge{src, r < src ? r : r + 1});
  };
  if (p >= 1.0) {
    for (std::uint64_t k = 0; k < total; ++k) emit(k);
    return;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_q = std::log1p(-p);
  std::uint64_t k = 0;
  while (true) {
    double u = 1.0 - unit(rng);  // (0, 1]
    double gap = std::floor(std::log(u) / log_q);
    if (gap >= static_cast<double>(total - k)) return;
    k += static_cast<std::uint64_t>(gap);
    emit(k);
    if (++k >= total) return;
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!is_probability(p) || !is_probability(p_add) || !is_probability(p_del)) {
    throw RangeError("edge probabilities must lie in [0, 1]");
  }
  if (n < 2 || N < n) throw RangeError("node counts must satisfy N >= n >= 2");
  if (N > (std::size_t{1} << 31)) throw RangeError("node count too large");
  if (T < 1) throw RangeError("T must be at least 1");
  if (d < 1) throw RangeError("feature dimension must be at least 1");
  if (!(walk_variance >= 0.0)) throw RangeError("walk variance must be non-negative");
  if (!is_probability(lambda)) throw RangeError("lambda must lie in [0, 1]");
  if (!beta.empty() && beta.size() != d) throw DimensionError("beta override does not match d");
}

std::vector<Edge> generate_initial_auxiliary(std::size_t N, double p, Rng& rng) {
  std::vector<Edge> edges;
  skip_sample_pairs(N, p, rng, [&](Edge e) { edges.push_back(e); });
  return edges;
}

std::vector<Edge> evolve_auxiliary(const std::vector<Edge>& prev, std::size_t N, double p_add, double p_del,
                                   Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> survivors;
  survivors.reserve(prev.size());
  for (const auto& e : prev) {
    if (unit(rng) >= p_del) survivors.push_back(e);
  }
  std::vector<Edge> births;
  skip_sample_pairs(N, p_add, rng, [&](Edge e) {
    if (!std::binary_search(prev.begin(), prev.end(), e)) births.push_back(e);
  });
  std::vector<Edge> out;
  out.reserve(survivors.size() + births.size());
  std::merge(survivors.begin(), survivors.end(), births.begin(), births.end(), std::back_inserter(out));
  return out;
}

std::vector<double> draw_beta(std::size_t d, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> beta(d);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& b : beta) {
      b = unit(rng);
      norm += b * b;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& b : beta) b /= norm;
  return beta;
}

FeatureDraw generate_features(const std::vector<std::size_t>& edge_counts, std::size_t d, double mu0,
                              double walk_variance, Rng& rng) {
  FeatureDraw out;
  std::vector<double> mu(d, mu0);
  std::normal_distribution<double> step(0.0, std::sqrt(walk_variance));
  for (std::size_t count : edge_counts) {
    if (walk_variance > 0.0) {
      for (double& m : mu) m += step(rng);
    }
    out.mu_series.push_back(mu);
    std::vector<std::poisson_distribution<int>> draws;
    draws.reserve(d);
    for (double m : mu) draws.emplace_back(m > 0.0 ? m : 1.0);
    std::vector<double> values(count * d, 0.0);
    for (std::size_t e = 0; e < count; ++e) {
      for (std::size_t k = 0; k < d; ++k) {
        if (mu[k] > 0.0) values[e * d + k] = draws[k](rng);
      }
    }
    out.values.push_back(std::move(values));
  }
  return out;
}

MainDraw generate_main(const AdjacencySeries& aux, const EdgeFeatureSeries& features, std::span<const double> beta,
                       double lambda, std::size_t n, Rng& rng) {
  if (n < 2 || n > aux.node_count()) throw RangeError("main universe must satisfy 2 <= n <= N");
  if (features.dim() != beta.size()) throw DimensionError("beta does not match the feature dimension");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);

  // Dynamic part of Q for every main pair that has had auxiliary support.
  struct Track {
    std::uint64_t key;
    double dyn;
  };
  std::vector<Track> tracks;
  std::vector<Track> fresh;
  std::vector<Track> merged;

  MainDraw out;
  std::vector<EdgeStep> steps;
  double background = 0.0;
  for (TimeIndex t = 1; t <= aux.steps(); ++t) {
    const auto& step = aux.at(t);
    for (auto& tr : tracks) tr.dyn *= lambda;
    fresh.clear();
    double p_sum = 0.0;
    for (NodeId i : step.active_senders()) {
      if (i >= n) break;
      for (std::size_t slot = step.row_begin(i); slot < step.row_end(i); ++slot) {
        NodeId j = step.target(slot);
        if (j >= n || j == i) continue;
        double p = edge_probability(beta, features.row(t, slot));
        p_sum += p;
        fresh.push_back({pair_key(i, j), (1.0 - lambda) * p});
      }
    }
    if (t == 1) {
      out.q0 = std::clamp(p_sum / pairs, 0.0, 1.0);
      background = out.q0;
    }
    background *= lambda;

    merged.clear();
    merged.reserve(tracks.size() + fresh.size());
    std::size_t a = 0;
    std::size_t b = 0;
    while (a < tracks.size() || b < fresh.size()) {
      if (b == fresh.size() || (a < tracks.size() && tracks[a].key < fresh[b].key)) {
        merged.push_back(tracks[a++]);
      } else if (a == tracks.size() || fresh[b].key < tracks[a].key) {
        merged.push_back(fresh[b++]);
      } else {
        merged.push_back({tracks[a].key, tracks[a].dyn + fresh[b].dyn});
        ++a;
        ++b;
      }
    }
    tracks.swap(merged);

    std::vector<Edge> edges;
    for (const auto& tr : tracks) {
      if (unit(rng) < background + tr.dyn) {
        edges.push_back({static_cast<NodeId>(tr.key >> 32), static_cast<NodeId>(tr.key & 0xffffffffu)});
      }
    }
    std::size_t from_background = 0;
    skip_sample_pairs(n, background, rng, [&](Edge e) {
      auto key = pair_key(e.src, e.dst);
      auto it = std::lower_bound(tracks.begin(), tracks.end(), key,
                                 [](const Track& tr, std::uint64_t k) { return tr.key < k; });
      if (it != tracks.end() && it->key == key) return;
      edges.push_back(e);
      ++from_background;
    });
    std::sort(edges.begin(), edges.end());
    out.background_edges.push_back(from_background);
    steps.emplace_back(n, edges);
  }
  out.main = AdjacencySeries(n, NetworkRole::main, std::move(steps));
  return out;
}

Scenario simulate(const ScenarioConfig& config) {
  config.validate();
  Rng rng(config.seed);
  std::vector<std::vector<Edge>> aux_edges;
  aux_edges.push_back(generate_initial_auxiliary(config.N, config.p, rng));
  for (int t = 2; t <= config.T; ++t) {
    aux_edges.push_back(evolve_auxiliary(aux_edges.back(), config.N, config.p_add, config.p_del, rng));
  }
  std::vector<double> beta = config.beta.empty() ? draw_beta(config.d, rng) : config.beta;

  std::vector<std::size_t> counts;
  for (const auto& e : aux_edges) counts.push_back(e.size());
  auto feats = generate_features(counts, config.d, config.mu0, config.walk_variance, rng);

  std::vector<EdgeStep> steps;
  steps.reserve(aux_edges.size());
  for (auto& e : aux_edges) {
    steps.emplace_back(config.N, e);
    std::vector<Edge>().swap(e);
  }
  AdjacencySeries aux(config.N, NetworkRole::auxiliary, std::move(steps));
  EdgeFeatureSeries features(config.d, std::move(feats.values));
  auto main = generate_main(aux, features, beta, config.lambda, config.n, rng);

  DatasetOptions options;
  options.warn = false;
  Scenario out{make_dual_dataset(NodeIndex::identity(config.N), config.n, main.main, aux, features, options), {}};
  out.truth.beta = std::move(beta);
  out.truth.lambda = config.lambda;
  out.truth.q0 = main.q0;
  out.truth.mu_series = std::move(feats.mu_series);
  out.truth.background_edges = std::move(main.background_edges);
  return out;
}

ScenarioConfig table1_row(int row, double scale) {
  if (row < 1 || row > kTable1Rows) throw RangeError("table rows are numbered 1.." + std::to_string(kTable1Rows));
  if (!(scale > 0.0)) throw RangeError("scale must be positive");
  ScenarioConfig c;
  c.N = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(10000.0 * scale)));
  c.n = c.N;
  c.p = row == 1 ? 5e-4 : 5e-3;
  c.p_add = 1e-3 * c.p;
  static constexpr double kDeletion[] = {0.0, 0.0, 0.0, 0.0005, 0.005, 0.05, 0.2, 0.5};
  c.p_del = row <= 2 ? 1e-2 * c.p : kDeletion[row];
  return c;
}

}  // namespace barlink
