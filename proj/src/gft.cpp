#include "barlink/gft.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "barlink/errors.hpp"

namespace barlink {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ThinSvd {
  MatrixXd u;   // rows x r
  VectorXd s;   // r, descending
  MatrixXd v;   // cols x r
};

bool reconstructs(const MatrixXd& x, const ThinSvd& f) {
  if (!f.u.allFinite() || !f.s.allFinite() || !f.v.allFinite()) return false;
  return (f.u * f.s.asDiagonal() * f.v.transpose() - x).norm() <= 1e-10 * std::max(1.0, x.norm());
}

// Eigendecomposition of the smaller Gram matrix. Loses accuracy for
// singular values near sqrt(eps) * sigma_1; their vectors are set to zero.
ThinSvd gram_svd(const MatrixXd& x) {
  const bool tall = x.rows() >= x.cols();
  const MatrixXd gram = tall ? MatrixXd(x.transpose() * x) : MatrixXd(x * x.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  const Eigen::Index r = gram.rows();
  ThinSvd f;
  f.s = eig.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
  MatrixXd side = eig.eigenvectors().rowwise().reverse();
  MatrixXd other = tall ? MatrixXd(x * side) : MatrixXd(x.transpose() * side);
  const double cutoff = 1e-7 * (r ? f.s(0) : 0.0);
  for (Eigen::Index c = 0; c < r; ++c) {
    if (f.s(c) > cutoff) {
      other.col(c) /= f.s(c);
    } else {
      other.col(c).setZero();
    }
  }
  f.u = tall ? std::move(other) : std::move(side);
  f.v = tall ? std::move(side) : std::move(other);
  return f;
}

// Eigen 3.4.0's BDCSVD occasionally returns a wrong factorization while
// reporting success (relative reconstruction error ~1e-2 seen on 1000 x 1000
// solver iterates), so every result is checked.
ThinSvd thin_svd(const MatrixXd& x) {
  if (!x.allFinite()) throw NumericError("SVD input is not finite");
  ThinSvd f;
  if (x.size() == 0) return f;
  Eigen::BDCSVD<MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  f.u = svd.matrixU();
  f.s = svd.singularValues();
  f.v = svd.matrixV();
  if (reconstructs(x, f)) return f;
  f = gram_svd(x);
  if (reconstructs(x, f)) return f;
  throw NumericError("SVD failed to reconstruct its input");
}

VectorXd singular_values(const MatrixXd& x) { return thin_svd(x).s; }

// Singular values at or below this count as zero.
double rank_floor(const VectorXd& sigma) {
  return sigma.size() ? std::max(1.0, sigma(0)) * 1e-12 * static_cast<double>(sigma.size()) : 0.0;
}

// A(t) Omega from the sparse rows of A(t).
MatrixXd feature_map_product(const EdgeStep& step, const MatrixXd& omega) {
  MatrixXd g = MatrixXd::Zero(omega.rows(), omega.cols());
  for (NodeId i : step.active_senders()) {
    for (NodeId j : step.out_neighbors(i)) g.row(i) += omega.row(j);
  }
  return g;
}

}  // namespace

MatrixXd dense_adjacency(const EdgeStep& step, std::size_t n) {
  MatrixXd a = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (NodeId i : step.active_senders()) {
    if (i >= n) continue;
    for (NodeId j : step.out_neighbors(i)) {
      if (j < n) a(i, j) = 1.0;
    }
  }
  return a;
}

MatrixXd gft_feature_map(const MatrixXd& a_last, std::size_t k) {
  const auto rank_limit = static_cast<std::size_t>(std::min(a_last.rows(), a_last.cols()));
  if (k < 1 || k > rank_limit) throw RangeError("feature map rank k must lie in 1.." + std::to_string(rank_limit));
  ThinSvd svd = thin_svd(a_last);
  const VectorXd& sigma = svd.s;
  const auto kk = static_cast<Eigen::Index>(k);
  if (sigma(kk - 1) <= rank_floor(sigma)) {
    throw NumericError("last network has rank below k = " + std::to_string(k) + "; reduce k");
  }
  return svd.v.leftCols(kk) * sigma.head(kk).cwiseInverse().asDiagonal();
}

std::size_t numerical_rank(const MatrixXd& a) {
  const VectorXd sigma = singular_values(a);
  const double floor = rank_floor(sigma);
  std::size_t r = 0;
  while (r < static_cast<std::size_t>(sigma.size()) && sigma(static_cast<Eigen::Index>(r)) > floor) ++r;
  return r;
}

MatrixXd gft_forecast(const std::vector<MatrixXd>& maps, double ridge) {
  if (maps.empty()) throw RangeError("forecast needs at least one feature map");
  if (!(ridge >= 0.0)) throw RangeError("ridge weight must be non-negative");
  const std::size_t T = maps.size();
  if (T < 2) return maps.back();
  const double t_mean = (static_cast<double>(T) + 1.0) / 2.0;
  MatrixXd y_mean = MatrixXd::Zero(maps[0].rows(), maps[0].cols());
  for (const auto& g : maps) y_mean += g;
  y_mean /= static_cast<double>(T);
  MatrixXd cross = MatrixXd::Zero(y_mean.rows(), y_mean.cols());
  double spread = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    double c = static_cast<double>(t + 1) - t_mean;
    cross += c * (maps[t] - y_mean);
    spread += c * c;
  }
  MatrixXd slope = cross / (spread + ridge);
  return y_mean + slope * (static_cast<double>(T) + 1.0 - t_mean);
}

MatrixXd singular_value_threshold(const MatrixXd& x, double threshold, double* nuclear_norm) {
  if (!(threshold >= 0.0)) throw RangeError("threshold must be non-negative");
  if (threshold == 0.0) {
    if (nuclear_norm) *nuclear_norm = singular_values(x).sum();
    return x;
  }
  ThinSvd svd = thin_svd(x);
  VectorXd shrunk = (svd.s.array() - threshold).cwiseMax(0.0);
  Eigen::Index r = 0;
  while (r < shrunk.size() && shrunk(r) > 0.0) ++r;
  if (nuclear_norm) *nuclear_norm = shrunk.head(r).sum();
  return svd.u.leftCols(r) * shrunk.head(r).asDiagonal() * svd.v.leftCols(r).transpose();
}

double gft_objective(const MatrixXd& s, const MatrixXd& a_last, const MatrixXd& omega, const MatrixXd& g_hat,
                     double nu, double tau) {
  double value = 0.5 * (s - a_last).squaredNorm() + 0.5 * nu * (s * omega - g_hat).squaredNorm();
  if (tau != 0.0) value += tau * singular_values(s).sum();
  return value;
}

GftSolveResult gft_solve(const MatrixXd& a_last, const MatrixXd& omega, const MatrixXd& g_hat, double nu, double tau,
                         std::size_t iterations, double tolerance, std::optional<double> step) {
  if (a_last.rows() != a_last.cols() || omega.rows() != a_last.cols() || g_hat.rows() != a_last.rows() ||
      g_hat.cols() != omega.cols()) {
    throw DimensionError("GFT inputs have inconsistent shapes");
  }
  if (!(nu >= 0.0) || !(tau >= 0.0)) throw RangeError("nu and tau must be non-negative");
  const double omega_norm = omega.size() ? singular_values(omega)(0) : 0.0;
  const double lipschitz = 1.0 + nu * omega_norm * omega_norm;
  const double eta = step ? *step : 1.0 / lipschitz;
  if (!(eta > 0.0) || eta > (1.0 / lipschitz) * (1.0 + 1e-12)) {
    throw RangeError("GFT step exceeds 1/L = " + std::to_string(1.0 / lipschitz) + " and may diverge");
  }

  GftSolveResult out;
  MatrixXd s = a_last;
  auto smooth = [&](const MatrixXd& m) {
    return 0.5 * (m - a_last).squaredNorm() + 0.5 * nu * (m * omega - g_hat).squaredNorm();
  };
  out.objective.push_back(gft_objective(s, a_last, omega, g_hat, nu, tau));
  for (std::size_t k = 1; k <= iterations; ++k) {
    MatrixXd grad = (s - a_last) + nu * (s * omega - g_hat) * omega.transpose();
    double nuclear = 0.0;
    MatrixXd next = singular_value_threshold(s - eta * grad, tau * eta, tau != 0.0 ? &nuclear : nullptr);
    double change = (next - s).norm();
    double scale = std::max(1.0, s.norm());
    s = std::move(next);
    out.objective.push_back(smooth(s) + tau * nuclear);
    out.iterations = k;
    if (!std::isfinite(out.objective.back())) throw NumericError("GFT objective diverged");
    if (change <= tolerance * scale) {
      out.converged = true;
      break;
    }
  }
  out.s = s.cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

double GftModel::score(NodeId i, NodeId j) const {
  if (i >= s.rows() || j >= s.cols()) return 0.0;
  return s(i, j);
}

GftModel gft_fit(const Dataset& data, const GftConfig& config) {
  if (data.mode != SequenceMode::dual) throw Error("GFT needs a main network sequence without labels");
  const std::size_t n = data.main_nodes;
  if (n > config.node_cap) {
    throw ScaleError("GFT is dense and does not scale to " + std::to_string(n) + " nodes (cap " +
                     std::to_string(config.node_cap) + ")");
  }
  const int T = data.steps();
  GftModel model;
  model.config = config;
  MatrixXd a_last = dense_adjacency(data.main.at(T), n);
  model.omega = gft_feature_map(a_last, config.k);
  std::vector<MatrixXd> maps;
  maps.reserve(static_cast<std::size_t>(T));
  for (TimeIndex t = 1; t <= T; ++t) maps.push_back(feature_map_product(data.main.at(t), model.omega));
  model.g_hat = gft_forecast(maps, config.ridge);
  maps.clear();
  auto solved = gft_solve(a_last, model.omega, model.g_hat, config.nu, config.tau, config.iterations,
                          config.tolerance);
  model.s = std::move(solved.s);
  model.iterations = solved.iterations;
  model.converged = solved.converged;
  return model;
}

}  // namespace barlink
