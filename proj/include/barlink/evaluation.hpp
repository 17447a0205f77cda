#pragma once

// Test-set construction and ranking metrics.
//
// The evaluated universe is the set of ordered main-universe pairs i != j.
// A node is a "main user" when it sends or receives a main edge before the
// test step; zero pairs are segmented by the membership of both ends.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "barlink/temporal_graph.hpp"

namespace barlink {

enum class Segment { ones_existed, ones_new, main2main, aux2aux, main2aux, aux2main };
inline constexpr std::array<Segment, 4> kZeroSegments{Segment::main2main, Segment::aux2aux, Segment::main2aux,
                                                      Segment::aux2main};

std::string_view segment_name(Segment s);
Segment parse_segment(std::string_view name);

// Membership facts shared by the split and the zero sampler.
class PairClassifier {
 public:
  PairClassifier(const Dataset& data, TimeIndex test_time);

  std::size_t universe() const { return n_; }
  TimeIndex test_time() const { return test_time_; }
  bool main_user(NodeId v) const { return main_user_[v]; }
  bool is_test_edge(NodeId i, NodeId j) const { return test_->contains(i, j); }
  // True when (i, j) is a main edge at some step before the test step.
  bool existed(NodeId i, NodeId j) const;
  Segment zero_segment(NodeId i, NodeId j) const;
  // Number of zero pairs in a segment.
  std::size_t segment_size(Segment s) const;
  std::span<const NodeId> members(bool main) const { return main ? main_users_ : aux_users_; }

 private:
  const Dataset* data_;
  TimeIndex test_time_;
  std::size_t n_;
  const EdgeStep* test_;
  std::vector<bool> main_user_;
  std::vector<NodeId> main_users_;
  std::vector<NodeId> aux_users_;
  std::vector<std::uint64_t> past_pairs_;  // sorted keys of train-period main edges
  std::array<std::size_t, 4> test_edges_in_segment_{};
};

struct EvaluationSplit {
  TimeIndex test_time = 0;
  std::vector<Edge> ones_existed;
  std::vector<Edge> ones_new;
  std::array<std::vector<Edge>, 4> zeros;  // indexed like kZeroSegments
  std::array<std::size_t, 4> zero_population{};
  bool sampled = false;

  const std::vector<Edge>& zero_segment(Segment s) const;
  // Fraction of the segment's population present in the split.
  double sampling_rate(Segment s) const;
};

struct SplitOptions {
  // Zero segments are enumerated exactly up to this main-universe size.
  std::size_t exact_limit = 2000;
  // Pairs drawn per zero segment above the limit (capped at the population).
  std::size_t zeros_per_segment = 50000;
  std::uint64_t seed = 1;
};

EvaluationSplit build_split(const Dataset& data, TimeIndex test_time, const SplitOptions& options = {});

struct ZeroRequest {
  std::optional<double> rate;  // in (0, 1]
  std::size_t count = 0;       // used when rate is unset
};

// Uniform sample without replacement from one zero segment, drawn by
// rejection over node pairs. Sorted.
std::vector<Edge> sample_zeros(const PairClassifier& classifier, Segment segment, const ZeroRequest& request,
                               std::uint64_t seed);

// Mann-Whitney statistic with ties counted 1/2.
double auc_roc(std::span<const double> positive_scores, std::span<const double> negative_scores);

struct Candidate {
  Edge pair;
  double score = 0.0;
  bool positive = false;
};

// Candidates are ranked by (score descending, pair ascending). The
// denominator is `total_positives`, which may exceed the positives present
// among the candidates.
double recall_at_n(std::vector<Candidate> candidates, std::size_t total_positives, std::size_t top_n);
std::vector<double> recall_curve(std::vector<Candidate> candidates, std::size_t total_positives,
                                 std::span<const std::size_t> top_ns);

struct MetricRow {
  std::string metric;
  std::string segment;
  double value = 0.0;
};

struct RecallPoint {
  std::size_t n = 0;
  double recall = 0.0;
  std::string model;
};

void write_metric_csv(const std::filesystem::path& path, std::span<const MetricRow> rows);
std::string format_metric_table(std::span<const MetricRow> rows);
void write_recall_csv(const std::filesystem::path& path, std::span<const RecallPoint> points);

}  // namespace barlink
