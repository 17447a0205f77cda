#include "barlink/experiment.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "barlink/errors.hpp"
#include "barlink/evaluation.hpp"
#include "barlink/parallel.hpp"

namespace barlink {

TestPairs collect_test_pairs(const Dataset& data, TimeIndex test_time, std::size_t exact_limit,
                             std::size_t zero_count, std::uint64_t seed) {
  if (data.mode != SequenceMode::dual) throw Error("test pairs need a dual-sequence dataset");
  if (test_time < 1 || test_time > data.steps()) throw RangeError("test step out of range");
  const std::size_t n = data.main_nodes;
  const auto& test = data.main.at(test_time);
  TestPairs out;
  for (NodeId i : test.active_senders()) {
    for (NodeId j : test.out_neighbors(i)) {
      if (i != j) out.positives.push_back({i, j});
    }
  }
  if (out.positives.empty()) throw Error("test step " + std::to_string(test_time) + " has no main edges");
  if (n <= exact_limit) {
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = 0; j < n; ++j) {
        if (i != j && !test.contains(i, j)) out.negatives.push_back({i, j});
      }
    }
    return out;
  }
  out.sampled = true;
  const double population = static_cast<double>(n) * static_cast<double>(n - 1) - static_cast<double>(out.positives.size());
  zero_count = static_cast<std::size_t>(std::min(static_cast<double>(zero_count), population / 2));
  Rng rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(2 * zero_count);
  while (out.negatives.size() < zero_count) {
    NodeId i = pick(rng);
    NodeId j = pick(rng);
    if (i == j || test.contains(i, j)) continue;
    if (seen.insert((std::uint64_t{i} << 32) | j).second) out.negatives.push_back({i, j});
  }
  std::sort(out.negatives.begin(), out.negatives.end());
  return out;
}

double pairs_auc(const TestPairs& pairs, const PairScore& score) {
  std::vector<double> pos;
  std::vector<double> neg;
  pos.reserve(pairs.positives.size());
  neg.reserve(pairs.negatives.size());
  for (const auto& e : pairs.positives) pos.push_back(score(e.src, e.dst));
  for (const auto& e : pairs.negatives) neg.push_back(score(e.src, e.dst));
  return auc_roc(pos, neg);
}

PairScore artifact_scorer(const ModelArtifact& model, std::shared_ptr<const Dataset> train) {
  switch (model.kind) {
    case ModelKind::bar: {
      if (model.beta.size() != train->dim()) throw DimensionError("model beta does not match the dataset features");
      auto objective = std::make_shared<BarObjective>(*train, model.lambda, model.q0);
      auto scorer = std::make_shared<BarScorer>(*objective, model.beta);
      return [train, objective, scorer](NodeId i, NodeId j) { return scorer->score(i, j); };
    }
    case ModelKind::logistic:
    case ModelKind::logistic_raw: {
      auto variant = model.kind == ModelKind::logistic ? LogisticVariant::averaged : LogisticVariant::raw;
      auto scorer = std::make_shared<LogisticScorer>(*train, variant, model.beta);
      return [train, scorer](NodeId i, NodeId j) { return scorer->score(i, j); };
    }
    case ModelKind::gft: {
      auto gft = std::make_shared<GftModel>(gft_fit(*train, model.gft));
      return [gft](NodeId i, NodeId j) { return gft->score(i, j); };
    }
  }
  throw Error("unknown model kind");
}

SweepResult sweep_bar(const Dataset& data, TimeIndex validation_step, const std::vector<double>& lambdas,
                      const std::vector<double>& alphas, const SgdConfig& sgd, std::size_t exact_limit,
                      std::size_t jobs) {
  if (lambdas.empty() || alphas.empty()) throw RangeError("sweep grids must be non-empty");
  if (validation_step < 2 || validation_step > data.steps()) {
    throw RangeError("validation step must lie in 2.." + std::to_string(data.steps()));
  }
  Dataset train = truncate_dataset(data, validation_step - 1);
  TestPairs pairs = collect_test_pairs(data, validation_step, exact_limit);
  SweepResult out;
  for (double lambda : lambdas) {
    for (double alpha : alphas) out.rows.push_back({lambda, alpha, 0.0});
  }
  parallel_for(out.rows.size(), jobs, [&](std::size_t k) {
    SgdConfig config = sgd;
    config.lambda = out.rows[k].lambda;
    config.alpha = out.rows[k].alpha;
    FitReport fit = sgd_fit(train, config);
    BarObjective objective(train, fit.lambda, fit.q0);
    BarScorer scorer(objective, fit.beta);
    out.rows[k].auc = pairs_auc(pairs, [&](NodeId i, NodeId j) { return scorer.score(i, j); });
  });
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    if (out.rows[k].auc > out.rows[out.best].auc) out.best = k;
  }
  return out;
}

ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& config) {
  const TimeIndex test = config.test_step ? config.test_step : data.steps();
  if (test < 2 || test > data.steps()) throw RangeError("test step must lie in 2.." + std::to_string(data.steps()));
  Dataset train = truncate_dataset(data, test - 1);
  TestPairs pairs = collect_test_pairs(data, test, config.exact_limit);

  ExperimentResult out;
  out.test_degree = static_cast<double>(pairs.positives.size()) / static_cast<double>(data.main_nodes);

  SgdConfig sgd = config.sgd;
  if (config.lambda_grid.size() * config.alpha_grid.size() > 1) {
    out.sweep = sweep_bar(train, test - 1, config.lambda_grid, config.alpha_grid, config.sgd, config.exact_limit,
                          config.jobs);
  } else {
    out.sweep.rows.push_back({config.lambda_grid.at(0), config.alpha_grid.at(0), 0.0});
  }
  sgd.lambda = out.sweep.rows[out.sweep.best].lambda;
  sgd.alpha = out.sweep.rows[out.sweep.best].alpha;
  out.bar = sgd_fit(train, sgd);
  {
    BarObjective objective(train, out.bar.lambda, out.bar.q0);
    BarScorer scorer(objective, out.bar.beta);
    out.auc_bar = pairs_auc(pairs, [&](NodeId i, NodeId j) { return scorer.score(i, j); });
  }
  if (config.run_gft) {
    GftConfig gft_config = config.gft;
    if (config.gft_reduce_k && train.main_nodes <= gft_config.node_cap) {
      const std::size_t rank = numerical_rank(dense_adjacency(train.main.at(train.steps()), train.main_nodes));
      if (rank == 0) throw NumericError("last training network is empty; GFT cannot be fit");
      gft_config.k = std::min(gft_config.k, rank);
    }
    out.gft_k = gft_config.k;
    GftModel gft = gft_fit(train, gft_config);
    out.auc_gft = pairs_auc(pairs, [&](NodeId i, NodeId j) { return gft.score(i, j); });
  }
  if (config.run_logistic) {
    LogisticModel logistic = logistic_fit(train, config.logistic);
    LogisticScorer scorer(train, logistic.variant, logistic.beta);
    out.auc_logistic = pairs_auc(pairs, [&](NodeId i, NodeId j) { return scorer.score(i, j); });
  }
  return out;
}

}  // namespace barlink
