#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "barlink/errors.hpp"
#include "barlink/evaluation.hpp"
#include "barlink/experiment.hpp"
#include "support/instances.hpp"
#include "support/temp_dir.hpp"

using namespace barlink;
using barlink::testing::InstanceShape;
using barlink::testing::random_dual_dataset;
using barlink::testing::TempDir;

namespace {

double brute_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos) {
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

Dataset main_only(std::size_t n, std::vector<std::vector<Edge>> main) {
  std::vector<std::vector<Edge>> aux(main.size());
  std::vector<std::vector<double>> feats(main.size());
  auto a = build_series(n, NetworkRole::auxiliary, aux, 1, feats);
  auto m = build_series(n, NetworkRole::main, std::move(main));
  DatasetOptions opts;
  opts.warn = false;
  return make_dual_dataset(NodeIndex::identity(n), n, m.adjacency, a.adjacency, a.features, opts);
}

}  // namespace

TEST(Auc, PerfectSeparation) {
  std::vector<double> pos{0.9, 0.8};
  std::vector<double> neg{0.1, 0.2, 0.3};
  EXPECT_EQ(auc_roc(pos, neg), 1.0);
}

TEST(Auc, AllTiesIsHalf) {
  std::vector<double> pos(5, 0.4);
  std::vector<double> neg(7, 0.4);
  EXPECT_EQ(auc_roc(pos, neg), 0.5);
}

TEST(Auc, MatchesBruteForceOnThousandScores) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> pos, neg;
    for (int k = 0; k < 1000; ++k) {
      // Coarse grid so that ties occur.
      double s = std::floor(std::uniform_real_distribution<double>(0, 50)(rng)) / 50.0;
      (rng() % 3 == 0 ? pos : neg).push_back(s);
    }
    EXPECT_NEAR(auc_roc(pos, neg), brute_auc(pos, neg), 1e-12);
  }
}

TEST(Auc, InvariantUnderIncreasingTransform) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::vector<double> pos, neg;
  for (int k = 0; k < 300; ++k) (k % 4 ? neg : pos).push_back(normal(rng));
  double base = auc_roc(pos, neg);
  auto tf = [](std::vector<double> v) {
    for (double& x : v) x = std::exp(3 * x) + 7;
    return v;
  };
  EXPECT_EQ(auc_roc(tf(pos), tf(neg)), base);
}

TEST(Auc, SingleClassOrNanRejected) {
  std::vector<double> some{0.1, 0.2};
  std::vector<double> none;
  EXPECT_THROW(auc_roc(some, none), NumericError);
  EXPECT_THROW(auc_roc(none, some), NumericError);
  std::vector<double> nan{std::nan("")};
  EXPECT_THROW(auc_roc(nan, some), NumericError);
}

TEST(Recall, SinglePositiveRankedFirst) {
  std::vector<Candidate> c{{{0, 1}, 0.9, true}, {{0, 2}, 0.5, false}, {{1, 2}, 0.1, false}};
  EXPECT_EQ(recall_at_n(c, 1, 1), 1.0);
}

TEST(Recall, SaturatesAtReachableShare) {
  std::vector<Candidate> c{{{0, 1}, 0.2, true}, {{0, 2}, 0.5, false}, {{1, 2}, 0.1, true}};
  // Five positives overall, two among the candidates.
  EXPECT_DOUBLE_EQ(recall_at_n(c, 5, 3), 0.4);
  EXPECT_DOUBLE_EQ(recall_at_n(c, 5, 100), 0.4);
}

TEST(Recall, ZeroCutoffRejected) {
  std::vector<Candidate> c{{{0, 1}, 0.2, true}};
  EXPECT_THROW(recall_at_n(c, 1, 0), RangeError);
}

TEST(Recall, TieBreakByPairId) {
  std::vector<Candidate> c{{{3, 0}, 0.5, true}, {{1, 2}, 0.5, false}, {{2, 9}, 0.5, true}};
  // Order: (1,2), (2,9), (3,0).
  EXPECT_EQ(recall_at_n(c, 2, 1), 0.0);
  EXPECT_EQ(recall_at_n(c, 2, 2), 0.5);
  EXPECT_EQ(recall_at_n(c, 2, 3), 1.0);
}

TEST(Recall, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Candidate> c;
    for (NodeId k = 0; k < 20; ++k) {
      c.push_back({{k / 5, k % 5}, static_cast<double>(rng() % 6), rng() % 3 == 0});
    }
    std::size_t total = 0;
    for (const auto& x : c) total += x.positive;
    total += rng() % 3;
    if (total == 0) continue;
    // Enumerate: a candidate is in the top N iff fewer than N candidates
    // precede it in (score desc, pair asc).
    for (std::size_t n = 1; n <= 22; ++n) {
      std::size_t hits = 0;
      for (const auto& x : c) {
        std::size_t ahead = 0;
        for (const auto& y : c) {
          if (y.score > x.score || (y.score == x.score && y.pair < x.pair)) ++ahead;
        }
        if (ahead < n && x.positive) ++hits;
      }
      EXPECT_DOUBLE_EQ(recall_at_n(c, total, n), static_cast<double>(hits) / static_cast<double>(total));
    }
  }
}

TEST(Recall, CurveIsMonotoneAndPlateaus) {
  std::mt19937_64 rng(6);
  std::vector<Candidate> c;
  std::size_t reachable = 0;
  for (NodeId k = 0; k < 200; ++k) {
    bool pos = rng() % 10 == 0;
    reachable += pos;
    c.push_back({{k, k + 1}, std::uniform_real_distribution<double>(0, 1)(rng), pos});
  }
  const std::size_t total = reachable + 7;
  std::vector<std::size_t> ns;
  for (std::size_t n = 1; n <= 250; n += 3) ns.push_back(n);
  auto curve = recall_curve(c, total, ns);
  ASSERT_EQ(curve.size(), ns.size());
  for (std::size_t k = 1; k < curve.size(); ++k) EXPECT_GE(curve[k], curve[k - 1]);
  EXPECT_DOUBLE_EQ(curve.back(), static_cast<double>(reachable) / total);
}

TEST(Split, OnesPartitionedByHistory) {
  // Step 1: 0->1. Step 2 (test): 0->1 again and 2->3 new.
  auto data = main_only(5, {{{0, 1}}, {{0, 1}, {2, 3}}});
  auto split = build_split(data, 2);
  EXPECT_EQ(split.ones_existed, (std::vector<Edge>{{0, 1}}));
  EXPECT_EQ(split.ones_new, (std::vector<Edge>{{2, 3}}));
}

TEST(Split, ZeroSegmentsFollowDirection) {
  // Train-period main users: 0 and 1. Others are auxiliary-only.
  auto data = main_only(4, {{{0, 1}}, {{2, 3}}});
  PairClassifier cls(data, 2);
  EXPECT_EQ(cls.zero_segment(1, 0), Segment::main2main);
  EXPECT_EQ(cls.zero_segment(0, 2), Segment::main2aux);
  EXPECT_EQ(cls.zero_segment(3, 1), Segment::aux2main);
  EXPECT_EQ(cls.zero_segment(3, 2), Segment::aux2aux);
}

TEST(Split, ExactSegmentsPartitionUniverse) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    InstanceShape shape;
    shape.N = 25;
    shape.n = 20;
    shape.T = 3;
    shape.main_background = 0.02;
    auto data = random_dual_dataset(shape, seed);
    if (data.main.at(3).edge_count() == 0) continue;
    auto split = build_split(data, 3);
    EXPECT_FALSE(split.sampled);
    std::set<Edge> seen;
    std::size_t total = 0;
    auto take = [&](const std::vector<Edge>& v) {
      for (const auto& e : v) {
        EXPECT_TRUE(seen.insert(e).second);
        EXPECT_NE(e.src, e.dst);
        EXPECT_LT(e.src, shape.n);
        EXPECT_LT(e.dst, shape.n);
      }
      total += v.size();
    };
    take(split.ones_existed);
    take(split.ones_new);
    EXPECT_EQ(split.ones_existed.size() + split.ones_new.size(), data.main.at(3).edge_count());
    PairClassifier cls(data, 3);
    for (std::size_t s = 0; s < 4; ++s) {
      take(split.zeros[s]);
      EXPECT_EQ(split.zeros[s].size(), split.zero_population[s]);
      EXPECT_EQ(split.sampling_rate(kZeroSegments[s]), 1.0);
      for (const auto& e : split.zeros[s]) {
        EXPECT_FALSE(data.main.contains(3, e.src, e.dst));
        EXPECT_EQ(cls.zero_segment(e.src, e.dst), kZeroSegments[s]);
      }
    }
    EXPECT_EQ(total, shape.n * (shape.n - 1));
  }
}

TEST(Split, EmptyTestStepRejected) {
  auto data = main_only(4, {{{0, 1}}, {}});
  EXPECT_THROW(build_split(data, 2), Error);
}

TEST(SampleZeros, FullRateIsExactSegment) {
  InstanceShape shape;
  shape.N = 15;
  shape.n = 15;
  shape.T = 2;
  auto data = random_dual_dataset(shape, 3);
  auto split = build_split(data, 2);
  PairClassifier cls(data, 2);
  for (std::size_t s = 0; s < 4; ++s) {
    if (split.zero_population[s] == 0) continue;
    ZeroRequest req;
    req.rate = 1.0;
    EXPECT_EQ(sample_zeros(cls, kZeroSegments[s], req, 9), split.zeros[s]);
  }
}

TEST(SampleZeros, DeterministicAndWithoutReplacement) {
  InstanceShape shape;
  shape.N = 60;
  shape.n = 60;
  shape.T = 2;
  shape.aux_density = 0.05;
  auto data = random_dual_dataset(shape, 4);
  PairClassifier cls(data, 2);
  ZeroRequest req;
  req.count = 100;
  auto a = sample_zeros(cls, Segment::main2main, req, 5);
  auto b = sample_zeros(cls, Segment::main2main, req, 5);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 100u);
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  for (const auto& e : a) EXPECT_EQ(cls.zero_segment(e.src, e.dst), Segment::main2main);
  req.count = cls.segment_size(Segment::main2main) + 1;
  EXPECT_THROW(sample_zeros(cls, Segment::main2main, req, 5), RangeError);
}

TEST(SampleZeros, SampledAucTracksExactAuc) {
  InstanceShape shape;
  shape.N = 500;
  shape.n = 500;
  shape.T = 2;
  shape.d = 2;
  shape.aux_density = 0.01;
  shape.main_background = 0.002;
  auto data = random_dual_dataset(shape, 7);
  // A noisy score: supported pairs score higher on average.
  auto score = [&](const Edge& e) {
    std::uint64_t h = (static_cast<std::uint64_t>(e.src) * 1000003u) ^ (e.dst * 7919u);
    double jitter = static_cast<double>(h % 1000) / 1000.0;
    return jitter + (data.aux->contains(2, e.src, e.dst) ? 0.8 : 0.0);
  };
  auto exact = build_split(data, 2);
  std::vector<double> pos;
  for (const auto& e : exact.ones_existed) pos.push_back(score(e));
  for (const auto& e : exact.ones_new) pos.push_back(score(e));
  std::vector<double> neg;
  for (const auto& seg : exact.zeros) {
    for (const auto& e : seg) neg.push_back(score(e));
  }
  const double full = auc_roc(pos, neg);
  PairClassifier cls(data, 2);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<double> sampled;
    for (Segment s : kZeroSegments) {
      if (cls.segment_size(s) == 0) continue;
      ZeroRequest req;
      req.rate = 0.02;
      for (const auto& e : sample_zeros(cls, s, req, seed)) sampled.push_back(score(e));
    }
    EXPECT_NEAR(auc_roc(pos, sampled), full, 0.02);
  }
}

TEST(Reports, CsvFormats) {
  TempDir dir;
  std::vector<MetricRow> rows{{"auc", "all", 0.75}, {"recall@10", "ones_new", 0.5}};
  write_metric_csv(dir / "m.csv", rows);
  std::ifstream in(dir / "m.csv");
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), "metric,segment,value\nauc,all,0.75\nrecall@10,ones_new,0.5\n");
  std::vector<RecallPoint> pts{{1, 0.25, "bar"}, {5, 0.5, "bar"}};
  write_recall_csv(dir / "r.csv", pts);
  std::ifstream rin(dir / "r.csv");
  std::stringstream rtext;
  rtext << rin.rdbuf();
  EXPECT_EQ(rtext.str(), "N,recall,model\n1,0.25,bar\n5,0.5,bar\n");
  EXPECT_NE(format_metric_table(rows).find("recall@10"), std::string::npos);
}

TEST(Segments, NamesRoundTrip) {
  for (Segment s : {Segment::ones_existed, Segment::ones_new, Segment::main2main, Segment::aux2aux,
                    Segment::main2aux, Segment::aux2main}) {
    EXPECT_EQ(parse_segment(segment_name(s)), s);
  }
  EXPECT_THROW(parse_segment("zeros_sideways"), ParseError);
}

TEST(TestPairs, SampledNegativesAvoidPositives) {
  InstanceShape shape;
  shape.N = 40;
  shape.n = 40;
  shape.T = 2;
  auto data = random_dual_dataset(shape, 2);
  auto exact = collect_test_pairs(data, 2, 2000);
  EXPECT_EQ(exact.positives.size() + exact.negatives.size(), 40u * 39u);
  auto sampled = collect_test_pairs(data, 2, 10, 200, 3);
  EXPECT_TRUE(sampled.sampled);
  EXPECT_EQ(sampled.negatives.size(), 200u);
  for (const auto& e : sampled.negatives) EXPECT_FALSE(data.main.contains(2, e.src, e.dst));
}
