#include "barlink/temporal_graph.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>

#include "barlink/errors.hpp"

namespace barlink {

NodeIndex NodeIndex::identity(std::size_t count) {
  NodeIndex index;
  for (std::size_t i = 0; i < count; ++i) index.intern(std::to_string(i));
  return index;
}

NodeId NodeIndex::intern(std::string_view label) {
  std::string key(label);
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  auto id = static_cast<NodeId>(labels_.size());
  ids_.emplace(key, id);
  labels_.push_back(std::move(key));
  return id;
}

std::optional<NodeId> NodeIndex::find(std::string_view label) const {
  auto it = ids_.find(std::string(label));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

EdgeStep::EdgeStep(std::size_t node_count, std::span<const Edge> edges)
    : node_count_(node_count), offsets_(node_count + 1, 0) {
  targets_.reserve(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    if (e.src >= node_count || e.dst >= node_count) {
      throw RangeError("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                       ") outside node universe of size " + std::to_string(node_count));
    }
    if (k > 0 && !(edges[k - 1] < e)) throw Error("EdgeStep: edges must be sorted and unique");
    ++offsets_[e.src + 1];
    targets_.push_back(e.dst);
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  for (std::size_t i = 0; i < node_count; ++i) {
    if (offsets_[i + 1] > offsets_[i]) active_senders_.push_back(static_cast<NodeId>(i));
  }
}

std::span<const NodeId> EdgeStep::out_neighbors(NodeId i) const {
  return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::optional<std::size_t> EdgeStep::find_slot(NodeId i, NodeId j) const {
  if (i >= node_count_) return std::nullopt;
  auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return std::nullopt;
  return static_cast<std::size_t>(it - targets_.begin());
}

std::vector<Edge> EdgeStep::edges() const {
  std::vector<Edge> out;
  out.reserve(targets_.size());
  for (NodeId i : active_senders_) {
    for (NodeId j : out_neighbors(i)) out.push_back({i, j});
  }
  return out;
}

AdjacencySeries::AdjacencySeries(std::size_t node_count, NetworkRole role, std::vector<EdgeStep> steps)
    : node_count_(node_count), role_(role), steps_(std::move(steps)) {
  for (const auto& s : steps_) {
    if (s.node_count() != node_count_) throw Error("AdjacencySeries: step node count mismatch");
  }
}

const EdgeStep& AdjacencySeries::at(TimeIndex t) const {
  if (t < 1 || t > steps()) {
    throw RangeError("time step " + std::to_string(t) + " outside 1.." + std::to_string(steps()));
  }
  return steps_[static_cast<std::size_t>(t - 1)];
}

std::size_t AdjacencySeries::total_edges() const {
  std::size_t total = 0;
  for (const auto& s : steps_) total += s.edge_count();
  return total;
}

EdgeFeatureSeries::EdgeFeatureSeries(std::size_t dim, std::vector<std::vector<double>> values)
    : dim_(dim), values_(std::move(values)) {
  for (const auto& v : values_) {
    if (dim_ == 0 ? !v.empty() : v.size() % dim_ != 0) {
      throw DimensionError("feature storage is not a multiple of the feature dimension");
    }
  }
}

SenderAggregates::SenderAggregates(std::size_t node_count, std::size_t dim, std::vector<std::vector<double>> values)
    : node_count_(node_count), dim_(dim), values_(std::move(values)) {
  column_sums_.reserve(values_.size());
  for (const auto& v : values_) {
    if (v.size() != node_count_ * dim_) throw DimensionError("SenderAggregates: wrong step size");
    std::vector<double> sums(dim_, 0.0);
    for (std::size_t i = 0; i < node_count_; ++i) {
      for (std::size_t l = 0; l < dim_; ++l) sums[l] += v[i * dim_ + l];
    }
    column_sums_.push_back(std::move(sums));
  }
}

SenderAggregates compute_sender_aggregates(const AdjacencySeries& aux, const EdgeFeatureSeries& features) {
  const std::size_t n = aux.node_count();
  const std::size_t d = features.dim();
  if (features.steps() != aux.steps()) throw DimensionError("features and auxiliary series differ in length");
  std::vector<std::vector<double>> values;
  values.reserve(static_cast<std::size_t>(aux.steps()));
  for (TimeIndex t = 1; t <= aux.steps(); ++t) {
    const auto& step = aux.at(t);
    if (features.step_values(t).size() != step.edge_count() * d) {
      throw DimensionError("feature rows do not match auxiliary edges at step " + std::to_string(t));
    }
    std::vector<double> phi(n * d, 0.0);
    for (NodeId i : step.active_senders()) {
      double* out = phi.data() + static_cast<std::size_t>(i) * d;
      for (std::size_t slot = step.row_begin(i); slot < step.row_end(i); ++slot) {
        auto f = features.row(t, slot);
        for (std::size_t l = 0; l < d; ++l) out[l] += f[l];
      }
    }
    values.push_back(std::move(phi));
  }
  return SenderAggregates(n, d, std::move(values));
}

std::vector<DensityStat> density_stats(const AdjacencySeries& series) {
  std::vector<DensityStat> out;
  for (TimeIndex t = 1; t <= series.steps(); ++t) {
    DensityStat s;
    s.edges = series.at(t).edge_count();
    s.degree = series.node_count() ? static_cast<double>(s.edges) / static_cast<double>(series.node_count()) : 0.0;
    out.push_back(s);
  }
  return out;
}

SeriesBuild build_series(std::size_t node_count, NetworkRole role, std::vector<std::vector<Edge>> edges,
                         std::size_t dim, std::vector<std::vector<double>> features,
                         std::vector<std::vector<std::int8_t>> labels) {
  const bool has_features = !features.empty();
  const bool has_labels = !labels.empty();
  if (has_features && features.size() != edges.size()) throw DimensionError("features/edges step count mismatch");
  if (has_labels && labels.size() != edges.size()) throw DimensionError("labels/edges step count mismatch");

  SeriesBuild out;
  std::vector<EdgeStep> steps;
  std::vector<std::vector<double>> sorted_features;
  steps.reserve(edges.size());
  for (std::size_t s = 0; s < edges.size(); ++s) {
    auto& list = edges[s];
    if (has_features && features[s].size() != list.size() * dim) {
      throw DimensionError("feature count does not match edge count at step " + std::to_string(s + 1));
    }
    std::vector<std::size_t> order(list.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return list[a] < list[b]; });
    std::vector<Edge> sorted;
    sorted.reserve(list.size());
    for (std::size_t k : order) {
      if (!sorted.empty() && sorted.back() == list[k]) {
        throw ParseError("duplicate edge (" + std::to_string(list[k].src) + ", " + std::to_string(list[k].dst) +
                         ") at step " + std::to_string(s + 1));
      }
      sorted.push_back(list[k]);
    }
    steps.emplace_back(node_count, sorted);
    if (has_features) {
      std::vector<double> f;
      f.reserve(features[s].size());
      for (std::size_t k : order) {
        f.insert(f.end(), features[s].begin() + static_cast<std::ptrdiff_t>(k * dim),
                 features[s].begin() + static_cast<std::ptrdiff_t>((k + 1) * dim));
      }
      sorted_features.push_back(std::move(f));
    } else {
      sorted_features.emplace_back();
    }
    if (has_labels) {
      std::vector<std::int8_t> l;
      l.reserve(order.size());
      for (std::size_t k : order) l.push_back(labels[s][k]);
      out.labels.push_back(std::move(l));
    }
  }
  out.adjacency = AdjacencySeries(node_count, role, std::move(steps));
  out.features = EdgeFeatureSeries(has_features ? dim : 0, std::move(sorted_features));
  return out;
}

namespace {

// Rebuilds `series` padded to `steps`, keeping slots accepted by `keep`.
SeriesBuild rebuild(const AdjacencySeries& series, const EdgeFeatureSeries* features,
                    const std::vector<std::vector<std::int8_t>>* labels, int steps, bool drop_self_loops) {
  const std::size_t d = features ? features->dim() : 0;
  std::vector<std::vector<Edge>> edges(static_cast<std::size_t>(steps));
  std::vector<std::vector<double>> feats;
  std::vector<std::vector<std::int8_t>> labs;
  if (features) feats.resize(static_cast<std::size_t>(steps));
  if (labels) labs.resize(static_cast<std::size_t>(steps));
  for (TimeIndex t = 1; t <= std::min(steps, series.steps()); ++t) {
    const auto& step = series.at(t);
    auto idx = static_cast<std::size_t>(t - 1);
    for (NodeId i : step.active_senders()) {
      for (std::size_t slot = step.row_begin(i); slot < step.row_end(i); ++slot) {
        NodeId j = step.target(slot);
        if (drop_self_loops && i == j) continue;
        edges[idx].push_back({i, j});
        if (features) {
          auto f = features->row(t, slot);
          feats[idx].insert(feats[idx].end(), f.begin(), f.end());
        }
        if (labels) labs[idx].push_back((*labels)[idx][slot]);
      }
    }
  }
  return build_series(series.node_count(), series.role(), std::move(edges), d, std::move(feats), std::move(labs));
}

}  // namespace

Dataset make_dual_dataset(NodeIndex nodes, std::size_t main_nodes, const AdjacencySeries& main,
                          const AdjacencySeries& aux, const EdgeFeatureSeries& features,
                          const DatasetOptions& options) {
  if (main.node_count() != main_nodes) throw DimensionError("main series node count differs from main_nodes");
  if (aux.node_count() < main_nodes) throw DimensionError("auxiliary universe smaller than main universe");
  if (features.steps() != aux.steps()) throw DimensionError("features and auxiliary series differ in length");
  const int steps = std::max(main.steps(), aux.steps());

  Dataset data;
  data.mode = SequenceMode::dual;
  data.nodes = std::move(nodes);
  data.main_nodes = main_nodes;
  data.main = rebuild(main, nullptr, nullptr, steps, options.drop_self_loops).adjacency;
  auto aux_build = rebuild(aux, &features, nullptr, steps, options.drop_self_loops);
  data.aux = std::move(aux_build.adjacency);
  data.features = std::move(aux_build.features);
  if (options.compute_aggregates) data.aggregates = compute_sender_aggregates(*data.aux, data.features);

  // Main edges that never appear in the auxiliary sequence.
  std::vector<std::uint64_t> aux_pairs;
  for (TimeIndex t = 1; t <= steps; ++t) {
    for (const auto& e : data.aux->at(t).edges()) aux_pairs.push_back((std::uint64_t{e.src} << 32) | e.dst);
  }
  std::sort(aux_pairs.begin(), aux_pairs.end());
  for (TimeIndex t = 1; t <= steps; ++t) {
    for (const auto& e : data.main.at(t).edges()) {
      auto key = (std::uint64_t{e.src} << 32) | e.dst;
      if (!std::binary_search(aux_pairs.begin(), aux_pairs.end(), key)) ++data.main_edges_without_support;
    }
  }
  if (options.warn && data.main_edges_without_support > 0) {
    std::cerr << "warning: " << data.main_edges_without_support
              << " main edge observations never appear in the auxiliary sequence\n";
  }
  return data;
}

Dataset make_single_dataset(NodeIndex nodes, const AdjacencySeries& main, const EdgeFeatureSeries& features,
                            std::vector<std::vector<std::int8_t>> labels, const DatasetOptions& options) {
  if (features.steps() != main.steps() || labels.size() != static_cast<std::size_t>(main.steps())) {
    throw DimensionError("labeled series, labels and features differ in length");
  }
  for (TimeIndex t = 1; t <= main.steps(); ++t) {
    for (auto l : labels[static_cast<std::size_t>(t - 1)]) {
      if (l != 1 && l != -1) throw RangeError("labels must be -1 or 1");
    }
  }
  auto built = rebuild(main, &features, &labels, main.steps(), options.drop_self_loops);
  Dataset data;
  data.mode = SequenceMode::single;
  data.nodes = std::move(nodes);
  data.main_nodes = main.node_count();
  data.main = std::move(built.adjacency);
  data.features = std::move(built.features);
  data.labels = std::move(built.labels);
  return data;
}

Dataset truncate_dataset(const Dataset& data, TimeIndex last_step) {
  if (last_step < 1 || last_step > data.steps()) {
    throw RangeError("cannot truncate to step " + std::to_string(last_step));
  }
  DatasetOptions options;
  options.drop_self_loops = false;
  options.warn = false;
  options.compute_aggregates = data.aggregates.has_value();
  auto main = rebuild(data.main, data.mode == SequenceMode::single ? &data.features : nullptr,
                      data.mode == SequenceMode::single ? &data.labels : nullptr, last_step, false);
  if (data.mode == SequenceMode::single) {
    return make_single_dataset(data.nodes, main.adjacency, main.features, std::move(main.labels), options);
  }
  auto aux = rebuild(*data.aux, &data.features, nullptr, last_step, false);
  return make_dual_dataset(data.nodes, data.main_nodes, main.adjacency, aux.adjacency, aux.features, options);
}

}  // namespace barlink
