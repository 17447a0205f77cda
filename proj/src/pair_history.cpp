#include "barlink/pair_history.hpp"

#include <algorithm>

namespace barlink {

namespace {

struct Entry {
  NodeId dst;
  TimeIndex step;
  std::uint32_t slot;
};

}  // namespace

PairHistory::PairHistory(const AdjacencySeries& support) {
  const std::size_t n = support.node_count();
  // Bucket observations by sender, then order each bucket by (receiver, step).
  std::vector<std::size_t> counts(n + 1, 0);
  for (TimeIndex t = 1; t <= support.steps(); ++t) {
    const auto& step = support.at(t);
    for (NodeId i : step.active_senders()) counts[i + 1] += step.out_degree(i);
  }
  for (std::size_t i = 0; i < n; ++i) counts[i + 1] += counts[i];
  std::vector<Entry> entries(counts[n]);
  std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
  for (TimeIndex t = 1; t <= support.steps(); ++t) {
    const auto& step = support.at(t);
    for (NodeId i : step.active_senders()) {
      for (std::size_t slot = step.row_begin(i); slot < step.row_end(i); ++slot) {
        entries[fill[i]++] = {step.target(slot), t, static_cast<std::uint32_t>(slot)};
      }
    }
  }

  pair_offsets_.assign(n + 1, 0);
  observations_.reserve(entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto first = entries.begin() + static_cast<std::ptrdiff_t>(counts[i]);
    auto last = entries.begin() + static_cast<std::ptrdiff_t>(counts[i + 1]);
    // Steps were appended in increasing order, so a stable sort by receiver
    // keeps each pair's observations chronological.
    std::stable_sort(first, last, [](const Entry& a, const Entry& b) { return a.dst < b.dst; });
    for (auto it = first; it != last; ++it) {
      if (it == first || it->dst != (it - 1)->dst) {
        if (!receivers_.empty()) obs_offsets_.push_back(observations_.size());
        receivers_.push_back(it->dst);
      }
      observations_.push_back({it->step, it->slot});
    }
    pair_offsets_[i + 1] = receivers_.size();
  }
  if (!receivers_.empty()) obs_offsets_.push_back(observations_.size());
}

std::optional<std::size_t> PairHistory::find(NodeId i, NodeId j) const {
  if (i >= sender_count()) return std::nullopt;
  auto first = receivers_.begin() + static_cast<std::ptrdiff_t>(pair_offsets_[i]);
  auto last = receivers_.begin() + static_cast<std::ptrdiff_t>(pair_offsets_[i + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return std::nullopt;
  return static_cast<std::size_t>(it - receivers_.begin());
}

}  // namespace barlink
