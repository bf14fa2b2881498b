#include "flowmotion/sequence.hpp"

#include <gtest/gtest.h>

#include <random>

#include "flowmotion/error.hpp"
#include "flowmotion/synth.hpp"

namespace flowmotion {
namespace {

FlowField constant(int w, int h, FlowVec f) {
  FlowField out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.set(x, y, f);
  }
  return out;
}

TEST(ComposeFlows, TranslationsAdd) {
  const auto c = compose_flows(constant(40, 30, {2.0, -1.0}), constant(40, 30, {0.5, 3.0}));
  EXPECT_EQ(c.at(10, 10), (FlowVec{2.5, 2.0}));
  EXPECT_EQ(c.at(39, 0), (FlowVec{2.5, 2.0}));
}

TEST(ComposeFlows, LooksUpOlderFieldAtDisplacedPosition) {
  FlowField older(10, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) older.set(x, y, {double(x), double(y)});
  }
  const auto c = compose_flows(constant(10, 10, {1.5, 2.0}), older);
  // p=(3,4) -> (4.5, 6); older there is bilinear (4.5, 6).
  EXPECT_NEAR(c.at(3, 4).u, 1.5 + 4.5, 1e-6);
  EXPECT_NEAR(c.at(3, 4).v, 2.0 + 6.0, 1e-6);
  // Clamped at the border: (9,9) -> (10.5, 11) -> (9, 9).
  EXPECT_NEAR(c.at(9, 9).u, 1.5 + 9.0, 1e-6);
}

TEST(ComposeFlows, ParallelMatchesSerialReference) {
  std::mt19937_64 rng(1);
  std::normal_distribution<float> d(0.f, 8.f);
  FlowField a(300, 200), b(300, 200);
  for (auto* f : {&a, &b}) {
    for (auto& x : f->u()) x = d(rng);
    for (auto& x : f->v()) x = d(rng);
  }
  EXPECT_EQ(compose_flows(a, b), reference::compose_flows_serial(a, b));
  EXPECT_THROW(compose_flows(a, FlowField(10, 10)), Error);
}

TEST(FrameSeed, DistinctPerFrameAndStable) {
  EXPECT_EQ(frame_seed(7, 3), frame_seed(7, 3));
  EXPECT_NE(frame_seed(7, 3), frame_seed(7, 4));
  EXPECT_NE(frame_seed(7, 3), frame_seed(8, 3));
}

TEST(SequenceDetector, IntervalGrowsUntilComposedFlowReachesTarget) {
  DetectorConfig cfg;
  SequenceDetector det(cfg, 1);
  // 12.5 px/frame translation: k=1 measures 12.5 -> asks for 2; composing two
  // frames measures 25 -> stays at 2.
  std::vector<int> ks;
  for (int i = 1; i <= 5; ++i) {
    const auto rec = det.process(i, constant(400, 300, {12.5, 0.0}));
    ks.push_back(rec.k_used);
    EXPECT_FALSE(rec.fallback);
    EXPECT_EQ(rec.result.mask.count(), 0u);
  }
  EXPECT_EQ(ks, (std::vector<int>{1, 2, 2, 2, 2}));
}

TEST(SequenceDetector, HistoryLimitsInterval) {
  DetectorConfig cfg;
  SequenceDetector det(cfg, 1);
  const auto first = det.process(1, FlowField(600, 400));
  EXPECT_EQ(first.result.next_k, 5);
  const auto second = det.process(2, FlowField(600, 400));
  EXPECT_EQ(second.k_requested, 5);
  EXPECT_EQ(second.k_used, 2);
  EXPECT_TRUE(second.composed);
}

TEST(SequenceDetector, FitFailureWithoutHistoryGivesEmptyMask) {
  DetectorConfig sparse;
  sparse.grid.piece_edge = 200;  // 2x2 pieces, 2 samples
  SequenceDetector det(sparse, 3);
  const auto rec = det.process(1, constant(400, 300, {10.0, 0.0}));
  EXPECT_TRUE(rec.fallback);
  EXPECT_EQ(rec.result.mask.count(), 0u);
  EXPECT_NE(rec.fallback_reason.find("InsufficientSamples"), std::string::npos);
  EXPECT_NE(rec.fallback_reason.find("no previous model"), std::string::npos);
  EXPECT_EQ(rec.result.next_k, 1);
}

TEST(SequenceDetector, RejectsDimensionChange) {
  SequenceDetector det(DetectorConfig{}, 3);
  ASSERT_FALSE(det.process(1, constant(400, 300, {10.0, 0.0})).fallback);
  EXPECT_THROW(det.process(2, constant(300, 400, {10.0, 0.0})), Error);
}

TEST(SequenceDetector, DeterministicAcrossRuns) {
  synth::PresetOptions opt;
  opt.frames = 4;
  const auto seq = synth::benchmark_suite("single-blob", opt).front();
  auto run = [&] {
    SequenceDetector det(DetectorConfig{}, 11);
    std::vector<ForegroundMask> masks;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      masks.push_back(det.process(int(i) + 1, synth::generate(seq[i]).field).result.mask);
    }
    return masks;
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace flowmotion
