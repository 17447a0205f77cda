#pragma once

// Text edge lists, one record per line, whitespace separated:
//   main       t src dst
//   auxiliary  t src dst f_1 ... f_d
//   labeled    t src dst label f_1 ... f_d     (label in {-1, 1})
// Lines starting with '#' are comments. Node ids are opaque strings.
//
// A dataset directory holds nodes.txt ("label main|aux" per line, in index
// order), main.txt + aux.txt (dual mode) or labeled.txt (single mode).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "barlink/temporal_graph.hpp"

namespace barlink {

enum class EdgeListKind { main, auxiliary, labeled };

struct EdgeListData {
  AdjacencySeries adjacency;
  EdgeFeatureSeries features;                   // empty for main
  std::vector<std::vector<std::int8_t>> labels;  // labeled only
};

// dim == 0 infers the feature count from the first record. node_count == 0
// sizes the universe to the node index after loading; otherwise every id
// must intern below node_count.
EdgeListData load_edge_list(const std::filesystem::path& path, EdgeListKind kind, std::size_t dim,
                            NodeIndex& nodes, std::size_t node_count = 0);

void write_edge_list(const std::filesystem::path& path, const AdjacencySeries& series, const NodeIndex& nodes,
                     const EdgeFeatureSeries* features = nullptr,
                     const std::vector<std::vector<std::int8_t>>* labels = nullptr);

Dataset load_dataset_dir(const std::filesystem::path& dir, std::size_t dim = 0, const DatasetOptions& options = {});
void write_dataset_dir(const std::filesystem::path& dir, const Dataset& data);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace barlink
