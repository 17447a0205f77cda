#pragma once

// End-to-end comparison on a dual-sequence dataset: train on steps before the
// test step, select (lambda, alpha) on the last training step, then score every
// main pair at the test step with BAR, GFT and the averaged logistic model.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "barlink/gft.hpp"
#include "barlink/logistic.hpp"
#include "barlink/model_io.hpp"
#include "barlink/sgd.hpp"

namespace barlink {

// Positives are main edges at the test step; negatives are the other ordered
// main pairs, all of them up to `exact_limit` nodes and a uniform sample of
// `zero_count` pairs above it.
struct TestPairs {
  std::vector<Edge> positives;
  std::vector<Edge> negatives;
  bool sampled = false;
};
TestPairs collect_test_pairs(const Dataset& data, TimeIndex test_time, std::size_t exact_limit = 2000,
                             std::size_t zero_count = 1000000, std::uint64_t seed = 1);

using PairScore = std::function<double(NodeId, NodeId)>;
double pairs_auc(const TestPairs& pairs, const PairScore& score);

// Scores step T+1 of `train` with a stored model. GFT artifacts hold only
// hyperparameters, so the estimate is refit on `train` here.
PairScore artifact_scorer(const ModelArtifact& model, std::shared_ptr<const Dataset> train);

struct SweepRow {
  double lambda = 0.0;
  double alpha = 0.0;
  double auc = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // lambda-major order
  std::size_t best = 0;
};

// Fits BAR on steps 1..validation-1 for every grid point and ranks the
// validation step. Ties keep the earliest row. Grid points run on up to
// `jobs` threads (0: all cores); results do not depend on `jobs`.
SweepResult sweep_bar(const Dataset& data, TimeIndex validation_step, const std::vector<double>& lambdas,
                      const std::vector<double>& alphas, const SgdConfig& sgd, std::size_t exact_limit = 2000,
                      std::size_t jobs = 1);

struct ExperimentConfig {
  std::vector<double> lambda_grid{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> alpha_grid{0.0};
  SgdConfig sgd;
  GftConfig gft;
  LogisticConfig logistic;
  bool run_gft = true;
  // Refit GFT with k = rank(A(T)) when the last training network has rank
  // below gft.k instead of failing the experiment.
  bool gft_reduce_k = true;
  bool run_logistic = true;
  TimeIndex test_step = 0;  // 0: last step
  std::size_t exact_limit = 2000;
  std::size_t jobs = 1;  // sweep threads
};

struct ExperimentResult {
  SweepResult sweep;
  FitReport bar;
  double auc_bar = 0.0;
  std::optional<double> auc_gft;
  std::size_t gft_k = 0;  // rank actually used
  std::optional<double> auc_logistic;
  double test_degree = 0.0;  // main edges per main node at the test step
};

ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& config);

}  // namespace barlink
