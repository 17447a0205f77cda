#include "barlink/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <unordered_set>

#include "barlink/bar_model.hpp"
#include "barlink/edge_list_io.hpp"
#include "barlink/errors.hpp"

namespace barlink {

namespace {

std::uint64_t pair_key(NodeId i, NodeId j) { return (std::uint64_t{i} << 32) | j; }

std::size_t zero_index(Segment s) {
  switch (s) {
    case Segment::main2main: return 0;
    case Segment::aux2aux: return 1;
    case Segment::main2aux: return 2;
    case Segment::aux2main: return 3;
    default: throw RangeError("not a zero segment: " + std::string(segment_name(s)));
  }
}

// (sender is a main user, receiver is a main user) for a zero segment.
std::pair<bool, bool> segment_ends(Segment s) {
  switch (s) {
    case Segment::main2main: return {true, true};
    case Segment::aux2aux: return {false, false};
    case Segment::main2aux: return {true, false};
    case Segment::aux2main: return {false, true};
    default: throw RangeError("not a zero segment: " + std::string(segment_name(s)));
  }
}

void rank_candidates(std::vector<Candidate>& candidates) {
  for (const auto& c : candidates) {
    if (std::isnan(c.score)) throw NumericError("candidate score is NaN");
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.pair < b.pair;
  });
}

}  // namespace

std::string_view segment_name(Segment s) {
  switch (s) {
    case Segment::ones_existed: return "ones_existed";
    case Segment::ones_new: return "ones_new";
    case Segment::main2main: return "zeros_main2main";
    case Segment::aux2aux: return "zeros_aux2aux";
    case Segment::main2aux: return "zeros_main2aux";
    case Segment::aux2main: return "zeros_aux2main";
  }
  return "unknown";
}

Segment parse_segment(std::string_view name) {
  for (Segment s : {Segment::ones_existed, Segment::ones_new, Segment::main2main, Segment::aux2aux,
                    Segment::main2aux, Segment::aux2main}) {
    auto full = segment_name(s);
    if (name == full || (full.starts_with("zeros_") && name == full.substr(6))) return s;
  }
  throw ParseError("unknown segment '" + std::string(name) + "'");
}

PairClassifier::PairClassifier(const Dataset& data, TimeIndex test_time)
    : data_(&data), test_time_(test_time), n_(data.main_nodes) {
  if (data.mode != SequenceMode::dual) throw Error("test splits need a dual-sequence dataset");
  if (test_time < 1 || test_time > data.steps()) {
    throw RangeError("test step " + std::to_string(test_time) + " outside 1.." + std::to_string(data.steps()));
  }
  test_ = &data.main.at(test_time);
  main_user_.assign(n_, false);
  for (TimeIndex t = 1; t < test_time; ++t) {
    const auto& step = data.main.at(t);
    for (NodeId i : step.active_senders()) {
      for (NodeId j : step.out_neighbors(i)) {
        if (i == j) continue;
        main_user_[i] = true;
        main_user_[j] = true;
        past_pairs_.push_back(pair_key(i, j));
      }
    }
  }
  std::sort(past_pairs_.begin(), past_pairs_.end());
  past_pairs_.erase(std::unique(past_pairs_.begin(), past_pairs_.end()), past_pairs_.end());
  for (NodeId v = 0; v < n_; ++v) (main_user_[v] ? main_users_ : aux_users_).push_back(v);
  for (NodeId i : test_->active_senders()) {
    for (NodeId j : test_->out_neighbors(i)) {
      if (i != j) ++test_edges_in_segment_[zero_index(zero_segment(i, j))];
    }
  }
}

bool PairClassifier::existed(NodeId i, NodeId j) const {
  return std::binary_search(past_pairs_.begin(), past_pairs_.end(), pair_key(i, j));
}

Segment PairClassifier::zero_segment(NodeId i, NodeId j) const {
  bool si = main_user_[i];
  bool sj = main_user_[j];
  if (si && sj) return Segment::main2main;
  if (!si && !sj) return Segment::aux2aux;
  return si ? Segment::main2aux : Segment::aux2main;
}

std::size_t PairClassifier::segment_size(Segment s) const {
  auto [from_main, to_main] = segment_ends(s);
  std::size_t senders = members(from_main).size();
  std::size_t receivers = members(to_main).size();
  std::size_t pairs = from_main == to_main ? senders * (senders ? senders - 1 : 0) : senders * receivers;
  return pairs - test_edges_in_segment_[zero_index(s)];
}

const std::vector<Edge>& EvaluationSplit::zero_segment(Segment s) const { return zeros[zero_index(s)]; }

double EvaluationSplit::sampling_rate(Segment s) const {
  auto idx = zero_index(s);
  if (zero_population[idx] == 0) return 1.0;
  return static_cast<double>(zeros[idx].size()) / static_cast<double>(zero_population[idx]);
}

EvaluationSplit build_split(const Dataset& data, TimeIndex test_time, const SplitOptions& options) {
  PairClassifier classifier(data, test_time);
  EvaluationSplit split;
  split.test_time = test_time;
  const auto& test = data.main.at(test_time);
  for (NodeId i : test.active_senders()) {
    for (NodeId j : test.out_neighbors(i)) {
      if (i == j) continue;
      (classifier.existed(i, j) ? split.ones_existed : split.ones_new).push_back({i, j});
    }
  }
  if (split.ones_existed.empty() && split.ones_new.empty()) {
    throw Error("test step " + std::to_string(test_time) + " has no main edges");
  }
  for (std::size_t k = 0; k < kZeroSegments.size(); ++k) {
    split.zero_population[k] = classifier.segment_size(kZeroSegments[k]);
  }
  const std::size_t n = classifier.universe();
  if (n <= options.exact_limit) {
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = 0; j < n; ++j) {
        if (i == j || test.contains(i, j)) continue;
        split.zeros[zero_index(classifier.zero_segment(i, j))].push_back({i, j});
      }
    }
    return split;
  }
  split.sampled = true;
  for (std::size_t k = 0; k < kZeroSegments.size(); ++k) {
    std::size_t count = std::min(options.zeros_per_segment, split.zero_population[k]);
    if (count == 0) continue;
    split.zeros[k] = sample_zeros(classifier, kZeroSegments[k], {std::nullopt, count},
                                  options.seed + 0x9e3779b97f4a7c15ULL * (k + 1));
  }
  return split;
}

std::vector<Edge> sample_zeros(const PairClassifier& classifier, Segment segment, const ZeroRequest& request,
                               std::uint64_t seed) {
  const std::size_t population = classifier.segment_size(segment);
  std::size_t count = request.count;
  if (request.rate) {
    if (!(*request.rate > 0.0 && *request.rate <= 1.0)) throw RangeError("sampling rate must lie in (0, 1]");
    count = static_cast<std::size_t>(std::ceil(*request.rate * static_cast<double>(population)));
  } else if (count == 0) {
    throw RangeError("zero sample count must be at least 1");
  }
  if (count > population) {
    throw RangeError("requested " + std::to_string(count) + " zeros from a segment of " + std::to_string(population));
  }
  auto [from_main, to_main] = segment_ends(segment);
  auto senders = classifier.members(from_main);
  auto receivers = classifier.members(to_main);
  Rng rng(seed);
  std::vector<Edge> out;
  out.reserve(count);

  if (2 * count > population) {
    // Dense request: enumerate the segment and keep a uniform subset.
    for (NodeId i : senders) {
      for (NodeId j : receivers) {
        if (i != j && !classifier.is_test_edge(i, j)) out.push_back({i, j});
      }
    }
    for (std::size_t k = 0; k < count; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, out.size() - 1);
      std::swap(out[k], out[pick(rng)]);
    }
    out.resize(count);
  } else {
    std::uniform_int_distribution<std::size_t> pick_sender(0, senders.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_receiver(0, receivers.size() - 1);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(2 * count);
    while (out.size() < count) {
      NodeId i = senders[pick_sender(rng)];
      NodeId j = receivers[pick_receiver(rng)];
      if (i == j || classifier.is_test_edge(i, j)) continue;
      if (seen.insert(pair_key(i, j)).second) out.push_back({i, j});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double auc_roc(std::span<const double> positive_scores, std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) {
    throw NumericError("AUC is undefined without both positive and negative examples");
  }
  std::vector<double> negatives(negative_scores.begin(), negative_scores.end());
  for (double v : negatives) {
    if (std::isnan(v)) throw NumericError("score is NaN");
  }
  std::sort(negatives.begin(), negatives.end());
  // Twice the Mann-Whitney U, accumulated exactly in integers.
  unsigned __int128 twice_u = 0;
  for (double s : positive_scores) {
    if (std::isnan(s)) throw NumericError("score is NaN");
    auto lo = std::lower_bound(negatives.begin(), negatives.end(), s);
    auto hi = std::upper_bound(lo, negatives.end(), s);
    twice_u += 2 * static_cast<unsigned __int128>(lo - negatives.begin()) + static_cast<unsigned __int128>(hi - lo);
  }
  long double denom = 2.0L * static_cast<long double>(positive_scores.size()) *
                      static_cast<long double>(negatives.size());
  return static_cast<double>(static_cast<long double>(twice_u) / denom);
}

double recall_at_n(std::vector<Candidate> candidates, std::size_t total_positives, std::size_t top_n) {
  std::size_t ns[] = {top_n};
  return recall_curve(std::move(candidates), total_positives, ns).front();
}

std::vector<double> recall_curve(std::vector<Candidate> candidates, std::size_t total_positives,
                                 std::span<const std::size_t> top_ns) {
  if (total_positives == 0) throw NumericError("recall is undefined without positives");
  for (std::size_t n : top_ns) {
    if (n < 1) throw RangeError("top-N cutoff must be at least 1");
  }
  rank_candidates(candidates);
  std::vector<std::size_t> hits(candidates.size() + 1, 0);
  for (std::size_t k = 0; k < candidates.size(); ++k) hits[k + 1] = hits[k] + (candidates[k].positive ? 1 : 0);
  std::vector<double> out;
  out.reserve(top_ns.size());
  for (std::size_t n : top_ns) {
    out.push_back(static_cast<double>(hits[std::min(n, candidates.size())]) / static_cast<double>(total_positives));
  }
  return out;
}

void write_metric_csv(const std::filesystem::path& path, std::span<const MetricRow> rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "metric,segment,value\n";
  for (const auto& r : rows) out << r.metric << ',' << r.segment << ',' << format_double(r.value) << '\n';
}

std::string format_metric_table(std::span<const MetricRow> rows) {
  std::size_t wm = 6;
  std::size_t ws = 7;
  for (const auto& r : rows) {
    wm = std::max(wm, r.metric.size());
    ws = std::max(ws, r.segment.size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(wm)) << "metric" << "  " << std::setw(static_cast<int>(ws))
      << "segment" << "  value\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(wm)) << r.metric << "  " << std::setw(static_cast<int>(ws))
        << r.segment << "  " << std::fixed << std::setprecision(4) << r.value << '\n';
    out.unsetf(std::ios::floatfield);
  }
  return out.str();
}

void write_recall_csv(const std::filesystem::path& path, std::span<const RecallPoint> points) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "N,recall,model\n";
  for (const auto& p : points) out << p.n << ',' << format_double(p.recall) << ',' << p.model << '\n';
}

}  // namespace barlink
