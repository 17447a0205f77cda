#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "barlink/temporal_graph.hpp"

namespace barlink {

// Where one pair was observed in the support series.
struct Observation {
  TimeIndex step = 0;
  std::uint32_t slot = 0;  // CSR slot of the pair inside that step
};

// Every ordered pair that appears at least once in a support series, grouped
// by sender with receivers ascending, together with its observation steps.
// Pairs of sender i occupy indices [pair_begin(i), pair_end(i)).
class PairHistory {
 public:
  PairHistory() = default;
  explicit PairHistory(const AdjacencySeries& support);

  std::size_t sender_count() const { return pair_offsets_.size() - 1; }
  std::size_t pair_count() const { return receivers_.size(); }
  std::size_t pair_begin(NodeId i) const { return pair_offsets_[i]; }
  std::size_t pair_end(NodeId i) const { return pair_offsets_[i + 1]; }
  NodeId receiver(std::size_t pair) const { return receivers_[pair]; }

  std::span<const Observation> observations(std::size_t pair) const {
    return {observations_.data() + obs_offsets_[pair], obs_offsets_[pair + 1] - obs_offsets_[pair]};
  }
  TimeIndex first_step(std::size_t pair) const { return observations_[obs_offsets_[pair]].step; }
  // Index of the pair's first observation in the flat observation order.
  std::size_t observation_offset(std::size_t pair) const { return obs_offsets_[pair]; }
  std::size_t observation_count() const { return observations_.size(); }

  std::optional<std::size_t> find(NodeId i, NodeId j) const;

 private:
  std::vector<std::size_t> pair_offsets_{0};
  std::vector<NodeId> receivers_;
  std::vector<std::size_t> obs_offsets_{0};
  std::vector<Observation> observations_;
};

}  // namespace barlink
