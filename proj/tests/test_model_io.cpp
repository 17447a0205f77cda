#include <gtest/gtest.h>

#include "barlink/errors.hpp"
#include "barlink/model_io.hpp"
#include "barlink/simulator.hpp"
#include "support/temp_dir.hpp"

using namespace barlink;
using barlink::testing::TempDir;

TEST(ModelArtifact, BarRoundTripIsExact) {
  TempDir dir;
  ModelArtifact m;
  m.kind = ModelKind::bar;
  m.lambda = 0.3;
  m.alpha = 1e-3;
  m.q0 = 0.1234567890123456789;
  m.beta = {0.1, -2.5e-17, 3.14159265358979};
  write_model(dir / "m.txt", m);
  auto back = read_model(dir / "m.txt");
  EXPECT_EQ(back.kind, ModelKind::bar);
  EXPECT_EQ(back.lambda, m.lambda);
  EXPECT_EQ(back.alpha, m.alpha);
  EXPECT_EQ(back.q0, m.q0);
  EXPECT_EQ(back.beta, m.beta);
}

TEST(ModelArtifact, LogisticAndGftRoundTrip) {
  TempDir dir;
  ModelArtifact m;
  m.kind = ModelKind::logistic_raw;
  m.beta = {1.0, 2.0};
  write_model(dir / "l.txt", m);
  auto l = read_model(dir / "l.txt");
  EXPECT_EQ(l.kind, ModelKind::logistic_raw);
  EXPECT_EQ(l.beta, m.beta);
  ModelArtifact g;
  g.kind = ModelKind::gft;
  g.gft.k = 7;
  g.gft.tau = 0.25;
  write_model(dir / "g.txt", g);
  auto gb = read_model(dir / "g.txt");
  EXPECT_EQ(gb.kind, ModelKind::gft);
  EXPECT_EQ(gb.gft.k, 7u);
  EXPECT_EQ(gb.gft.tau, 0.25);
}

TEST(ModelArtifact, MalformedFilesRejected) {
  TempDir dir;
  EXPECT_THROW(read_model(dir.write("a.txt", "something 1\n")), ParseError);
  EXPECT_THROW(read_model(dir.write("b.txt", "barlink-model 2\nkind bar\n")), ParseError);
  EXPECT_THROW(read_model(dir.write("c.txt", "barlink-model 1\nkind bar\nlambda x\n")), ParseError);
  EXPECT_THROW(read_model(dir.write("d.txt", "barlink-model 1\nkind logistic\ndim 3\nbeta 1 2\n")), DimensionError);
  EXPECT_THROW(read_model(dir.write("e.txt", "barlink-model 1\nkind nonsense\n")), ParseError);
  try {
    read_model(dir.write("f.txt", "barlink-model 1\nkind logistic\ndim 1\nbeta 1\nbeta 2\n"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(TruthSidecar, RoundTrip) {
  TempDir dir;
  ScenarioConfig c;
  c.N = c.n = 50;
  c.p = 0.05;
  c.T = 4;
  c.d = 3;
  auto sc = simulate(c);
  write_truth(dir / "truth.txt", sc.truth);
  auto back = read_truth(dir / "truth.txt");
  EXPECT_EQ(back.beta, sc.truth.beta);
  EXPECT_EQ(back.lambda, sc.truth.lambda);
  EXPECT_EQ(back.q0, sc.truth.q0);
  EXPECT_EQ(back.mu_series, sc.truth.mu_series);
  EXPECT_EQ(back.background_edges, sc.truth.background_edges);
}
