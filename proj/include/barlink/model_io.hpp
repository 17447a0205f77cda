#pragma once

// Plain-text model artifacts, one "key values..." record per line:
//
//   barlink-model 1
//   kind bar            (bar | logistic | logistic-raw | gft)
//   lambda 0.5
//   alpha 0
//   q0 0.0049
//   dim 3
//   beta 0.1 0.2 0.3
//
// GFT artifacts carry k, nu, tau, ridge, iterations, tolerance and node_cap
// instead of lambda..beta; the estimate is refit from the data on predict.
//
// Ground-truth sidecars written by the simulator:
//
//   barlink-truth 1
//   lambda 0.5
//   q0 0.0049
//   dim 3
//   beta 0.1 0.2 0.3
//   steps 2
//   mu 1 1.02 0.97 1.1       (step, then dim values)
//   background 1 12          (step, main edges from the background term)

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "barlink/gft.hpp"
#include "barlink/simulator.hpp"

namespace barlink {

enum class ModelKind { bar, logistic, logistic_raw, gft };

std::string_view kind_name(ModelKind kind);
ModelKind parse_kind(std::string_view name);

struct ModelArtifact {
  ModelKind kind = ModelKind::bar;
  double lambda = 0.0;
  double alpha = 0.0;
  double q0 = 0.0;
  std::vector<double> beta;
  GftConfig gft;
};

void write_model(const std::filesystem::path& path, const ModelArtifact& model);
ModelArtifact read_model(const std::filesystem::path& path);

void write_truth(const std::filesystem::path& path, const GroundTruth& truth);
GroundTruth read_truth(const std::filesystem::path& path);

}  // namespace barlink
