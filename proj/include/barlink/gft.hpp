#pragma once

// Graph feature tracking baseline. Estimates A(T+1) by
//   min_S 1/2 |S - A(T)|_F^2 + nu/2 |S Omega - G_hat|_F^2 + tau |S|_*
// where Omega = V_k Sigma_k^-1 from the SVD of A(T) and G_hat forecasts the
// feature maps G(t) = A(t) Omega one step ahead. Dense: memory is O(n^2).

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "barlink/temporal_graph.hpp"

namespace barlink {

Eigen::MatrixXd dense_adjacency(const EdgeStep& step, std::size_t n);

// Throws NumericError when sigma_k vanishes.
Eigen::MatrixXd gft_feature_map(const Eigen::MatrixXd& a_last, std::size_t k);

// Number of singular values above the threshold gft_feature_map uses.
std::size_t numerical_rank(const Eigen::MatrixXd& a);

// Per entry, ridge fit of y_t = a + b t (penalty on b only) over t = 1..T,
// evaluated at T+1. Fewer than two steps returns the last map.
Eigen::MatrixXd gft_forecast(const std::vector<Eigen::MatrixXd>& maps, double ridge);

// U max(Sigma - threshold, 0) V'. A zero threshold returns the input.
Eigen::MatrixXd singular_value_threshold(const Eigen::MatrixXd& x, double threshold, double* nuclear_norm = nullptr);

double gft_objective(const Eigen::MatrixXd& s, const Eigen::MatrixXd& a_last, const Eigen::MatrixXd& omega,
                     const Eigen::MatrixXd& g_hat, double nu, double tau);

struct GftSolveResult {
  Eigen::MatrixXd s;               // clamped to [0, 1]
  std::vector<double> objective;   // unclamped iterates, starting at S = A(T)
  std::size_t iterations = 0;
  bool converged = false;
};

// Proximal gradient from S = A(T). The step defaults to 1/L with
// L = 1 + nu |Omega|_2^2; larger steps are rejected.
GftSolveResult gft_solve(const Eigen::MatrixXd& a_last, const Eigen::MatrixXd& omega, const Eigen::MatrixXd& g_hat,
                         double nu, double tau, std::size_t iterations, double tolerance = 1e-6,
                         std::optional<double> step = std::nullopt);

struct GftConfig {
  std::size_t k = 10;
  double nu = 1.0;
  double tau = 0.1;
  double ridge = 1.0;
  std::size_t iterations = 100;
  double tolerance = 1e-6;
  std::size_t node_cap = 5000;
};

struct GftModel {
  GftConfig config;
  Eigen::MatrixXd omega;
  Eigen::MatrixXd g_hat;
  Eigen::MatrixXd s;
  std::size_t iterations = 0;
  bool converged = false;

  // S entry for main pairs; 0 for pairs touching auxiliary-only nodes.
  double score(NodeId i, NodeId j) const;
};

// Fits on the main series of a dual-mode dataset. Throws ScaleError above
// the node cap.
GftModel gft_fit(const Dataset& data, const GftConfig& config);

}  // namespace barlink
