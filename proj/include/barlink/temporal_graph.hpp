#pragma once

// Sparse data model for time-indexed directed networks.
//
// Every time step is stored as a compressed sparse row structure keyed by
// sender, with receivers sorted inside each row. Edge features live in a flat
// array parallel to the CSR slots of the step they belong to.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace barlink {

using NodeId = std::uint32_t;
// Time steps are 1-based: valid values are 1..T.
using TimeIndex = int;

enum class NetworkRole { main, auxiliary };

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Maps opaque node labels to dense indices in order of first appearance.
class NodeIndex {
 public:
  NodeIndex() = default;
  static NodeIndex identity(std::size_t count);

  NodeId intern(std::string_view label);
  std::optional<NodeId> find(std::string_view label) const;
  const std::string& label(NodeId id) const { return labels_.at(id); }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> ids_;
};

// One time step of a directed network in CSR form.
class EdgeStep {
 public:
  EdgeStep() = default;
  // `edges` must be sorted by (src, dst) and free of duplicates.
  EdgeStep(std::size_t node_count, std::span<const Edge> edges);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return targets_.size(); }

  std::size_t row_begin(NodeId i) const { return offsets_[i]; }
  std::size_t row_end(NodeId i) const { return offsets_[i + 1]; }
  std::size_t out_degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  std::span<const NodeId> out_neighbors(NodeId i) const;
  NodeId target(std::size_t slot) const { return targets_[slot]; }

  // Slot of (i, j) in this step; binary search over row i.
  std::optional<std::size_t> find_slot(NodeId i, NodeId j) const;
  bool contains(NodeId i, NodeId j) const { return find_slot(i, j).has_value(); }

  // Senders with at least one out-edge, ascending.
  std::span<const NodeId> active_senders() const { return active_senders_; }

  std::vector<Edge> edges() const;

 private:
  std::size_t node_count_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<NodeId> active_senders_;
};

class AdjacencySeries {
 public:
  AdjacencySeries() = default;
  AdjacencySeries(std::size_t node_count, NetworkRole role, std::vector<EdgeStep> steps);

  std::size_t node_count() const { return node_count_; }
  NetworkRole role() const { return role_; }
  int steps() const { return static_cast<int>(steps_.size()); }

  const EdgeStep& at(TimeIndex t) const;
  bool contains(TimeIndex t, NodeId i, NodeId j) const { return at(t).contains(i, j); }
  std::size_t total_edges() const;

 private:
  std::size_t node_count_ = 0;
  NetworkRole role_ = NetworkRole::main;
  std::vector<EdgeStep> steps_;
};

// Per-step feature rows parallel to the CSR slots of a support series.
class EdgeFeatureSeries {
 public:
  EdgeFeatureSeries() = default;
  EdgeFeatureSeries(std::size_t dim, std::vector<std::vector<double>> values);

  std::size_t dim() const { return dim_; }
  int steps() const { return static_cast<int>(values_.size()); }
  std::span<const double> row(TimeIndex t, std::size_t slot) const {
    return {values_[t - 1].data() + slot * dim_, dim_};
  }
  std::span<const double> step_values(TimeIndex t) const { return values_.at(t - 1); }

 private:
  std::size_t dim_ = 0;
  std::vector<std::vector<double>> values_;
};

// Dense N x d sender-level feature sums for every step.
class SenderAggregates {
 public:
  SenderAggregates() = default;
  SenderAggregates(std::size_t node_count, std::size_t dim, std::vector<std::vector<double>> values);

  std::size_t node_count() const { return node_count_; }
  std::size_t dim() const { return dim_; }
  int steps() const { return static_cast<int>(values_.size()); }
  std::span<const double> row(TimeIndex t, NodeId i) const {
    return {values_[t - 1].data() + static_cast<std::size_t>(i) * dim_, dim_};
  }
  // Sum of all rows at step t.
  std::span<const double> column_sums(TimeIndex t) const { return column_sums_.at(t - 1); }

 private:
  std::size_t node_count_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<double>> column_sums_;
};

SenderAggregates compute_sender_aggregates(const AdjacencySeries& aux, const EdgeFeatureSeries& features);

struct DensityStat {
  std::size_t edges = 0;
  double degree = 0.0;  // edges / nodes
};
std::vector<DensityStat> density_stats(const AdjacencySeries& series);

// Builds a series from unsorted per-step edge lists. Each step's edges are
// sorted; features (dim values per edge, same order as the input edges) are
// permuted along. Duplicate (src, dst) within a step raises ParseError.
struct SeriesBuild {
  AdjacencySeries adjacency;
  EdgeFeatureSeries features;
  std::vector<std::vector<std::int8_t>> labels;
};
SeriesBuild build_series(std::size_t node_count, NetworkRole role, std::vector<std::vector<Edge>> edges,
                         std::size_t dim = 0, std::vector<std::vector<double>> features = {},
                         std::vector<std::vector<std::int8_t>> labels = {});

enum class SequenceMode { dual, single };

// Paired main/auxiliary sequences (dual mode) or one labeled sequence with
// edge features (single mode). Immutable after construction.
struct Dataset {
  SequenceMode mode = SequenceMode::dual;
  NodeIndex nodes;
  std::size_t main_nodes = 0;  // n; main node ids are 0..n-1
  AdjacencySeries main;
  std::optional<AdjacencySeries> aux;
  EdgeFeatureSeries features;                   // parallel to support()
  std::vector<std::vector<std::int8_t>> labels;  // single mode: +1/-1 parallel to main
  std::optional<SenderAggregates> aggregates;
  std::size_t main_edges_without_support = 0;

  int steps() const { return main.steps(); }
  std::size_t total_nodes() const { return mode == SequenceMode::dual ? aux->node_count() : main.node_count(); }
  std::size_t dim() const { return features.dim(); }
  // Series whose edges carry features and define where P can be nonzero.
  const AdjacencySeries& support() const { return mode == SequenceMode::dual ? *aux : main; }
};

struct DatasetOptions {
  bool drop_self_loops = true;
  bool compute_aggregates = true;
  bool warn = true;
};

// Main and aux must share a node index where main ids come first. Both series
// are padded with empty steps to the longer horizon.
Dataset make_dual_dataset(NodeIndex nodes, std::size_t main_nodes, const AdjacencySeries& main,
                          const AdjacencySeries& aux, const EdgeFeatureSeries& features,
                          const DatasetOptions& options = {});
Dataset make_single_dataset(NodeIndex nodes, const AdjacencySeries& main, const EdgeFeatureSeries& features,
                            std::vector<std::vector<std::int8_t>> labels, const DatasetOptions& options = {});

// Steps 1..last_step of every member.
Dataset truncate_dataset(const Dataset& data, TimeIndex last_step);

}  // namespace barlink
