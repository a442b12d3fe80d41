#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hiershap/errors.hpp"
#include "hiershap/masked_game.hpp"
#include "hiershap/metrics.hpp"
#include "hiershap/models.hpp"

using namespace hiershap;
using namespace hiershap::metrics;

namespace {

Mask block_mask(int w, int h, int x0, int y0, int x1, int y1) {
  Mask m(w, h, 0);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) m(x, y) = 1;
  }
  return m;
}

GrayImage as_attr(const Mask& m) {
  GrayImage a(m.width(), m.height());
  for (std::size_t p = 0; p < m.size(); ++p) a[p] = m[p];
  return a;
}

GrayImage random_attr(int w, int h, std::mt19937_64& rng) {
  GrayImage a(w, h);
  std::normal_distribution<double> n(0, 1);
  for (auto& v : a.data()) v = n(rng);
  return a;
}

// Closed form of AOPC for a linear game with zero baseline: removing the
// top-k pixels drops the score by the sum of their contributions.
double additive_aopc(const std::vector<double>& contrib, const AopcOptions& o) {
  std::vector<double> sorted = contrib;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double total = 0.0;
  for (int k = 1; k <= o.steps; ++k) {
    const auto count = std::llround(static_cast<double>(k) / o.steps * o.max_fraction * contrib.size());
    total += std::accumulate(sorted.begin(), sorted.begin() + count, 0.0);
  }
  return total / o.steps;
}

}  // namespace

TEST(Ebpg, AllEnergyInside) {
  const auto m = block_mask(8, 8, 2, 2, 5, 5);
  EXPECT_DOUBLE_EQ(ebpg(as_attr(m), m), 1.0);
}

TEST(Ebpg, UniformGivesAreaFraction) {
  const auto m = block_mask(8, 8, 0, 0, 3, 3);
  EXPECT_NEAR(ebpg(GrayImage(8, 8, 0.7), m), 0.25, 1e-12);
}

TEST(Ebpg, NoPositiveEnergyIsZero) {
  const auto m = block_mask(4, 4, 0, 0, 1, 1);
  EXPECT_DOUBLE_EQ(ebpg(GrayImage(4, 4, -1.0), m), 0.0);
}

TEST(Ebpg, ShapeMismatch) {
  EXPECT_THROW(ebpg(GrayImage(4, 4), Mask(4, 5)), InvalidInput);
}

TEST(Miou, Identity) {
  const auto m = block_mask(8, 8, 1, 1, 3, 6);
  EXPECT_DOUBLE_EQ(miou(as_attr(m), m), 1.0);
}

TEST(Miou, Disjoint) {
  const auto m = block_mask(8, 8, 0, 0, 3, 3);
  const auto other = block_mask(8, 8, 4, 4, 7, 7);
  EXPECT_DOUBLE_EQ(miou(as_attr(other), m), 0.0);
}

TEST(Miou, HalfOverlap) {
  const auto m = block_mask(8, 8, 0, 0, 3, 3);
  const auto shifted = block_mask(8, 8, 2, 0, 5, 3);
  EXPECT_DOUBLE_EQ(miou(as_attr(shifted), m), 1.0 / 3.0);
}

TEST(Miou, EmptyMaskRejected) {
  EXPECT_THROW(miou(GrayImage(3, 3), Mask(3, 3)), InvalidInput);
}

TEST(Miou, TiesBrokenInScanOrder) {
  const auto m = block_mask(4, 1, 2, 0, 3, 0);
  // All equal: the first two pixels in scan order are chosen.
  EXPECT_DOUBLE_EQ(miou(GrayImage(4, 1, 1.0), m), 0.0);
}

TEST(Bbox, AllInside) {
  const auto m = block_mask(8, 8, 2, 2, 4, 4);
  EXPECT_DOUBLE_EQ(bbox_score(as_attr(m), {2, 2, 4, 4}), 1.0);
}

TEST(Bbox, UniformGivesAreaRatio) {
  EXPECT_DOUBLE_EQ(bbox_score(GrayImage(10, 10, 1.0), {0, 0, 4, 4}), 0.25);
}

TEST(Bbox, HalfInside) {
  GrayImage a(8, 8);
  // bbox is the 2x4 block x=0..1, y=0..3 (area 8). Hot pixels: 4 inside, 4 outside.
  for (int y = 0; y < 4; ++y) {
    a(0, y) = 5.0;
    a(7, y) = 5.0;
  }
  EXPECT_DOUBLE_EQ(bbox_score(a, {0, 0, 1, 3}), 0.5);
}

TEST(Bbox, DegenerateRejected) {
  EXPECT_THROW(bbox_score(GrayImage(4, 4), {2, 2, 1, 3}), InvalidInput);
  EXPECT_THROW(bbox_score(GrayImage(4, 4), {0, 0, 4, 3}), InvalidInput);
}

TEST(F1Auc, Identity) {
  const auto m = block_mask(6, 6, 1, 1, 2, 4);
  const auto r = f1_and_auc(as_attr(m), m);
  EXPECT_DOUBLE_EQ(r.f1, 1.0);
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
}

TEST(F1Auc, InvertedRanking) {
  const auto m = block_mask(6, 6, 1, 1, 2, 4);
  GrayImage a = as_attr(m);
  for (auto& v : a.data()) v = -v;
  EXPECT_DOUBLE_EQ(f1_and_auc(a, m).auc, 0.0);
}

TEST(F1Auc, RandomAttributionNearHalf) {
  std::mt19937_64 rng(2024);
  const auto m = block_mask(100, 100, 10, 10, 59, 49);
  const auto r = f1_and_auc(random_attr(100, 100, rng), m);
  EXPECT_NEAR(r.auc, 0.5, 0.02);
}

TEST(F1Auc, TiesCountHalf) {
  const auto m = block_mask(4, 1, 0, 0, 1, 0);
  EXPECT_DOUBLE_EQ(f1_and_auc(GrayImage(4, 1, 2.0), m).auc, 0.5);
}

TEST(F1Auc, SingleClassRejected) {
  EXPECT_THROW(f1_and_auc(GrayImage(2, 2), Mask(2, 2, 1)), InvalidInput);
  EXPECT_THROW(f1_and_auc(GrayImage(2, 2), Mask(2, 2, 0)), InvalidInput);
}

TEST(Metrics, BoundedOnRandomInputs) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const int w = 3 + static_cast<int>(rng() % 10);
    const int h = 3 + static_cast<int>(rng() % 10);
    Mask m(w, h);
    for (auto& v : m.data()) v = rng() % 3 == 0;
    m[0] = 1;
    m[1] = 0;
    const auto a = random_attr(w, h, rng);
    const auto r = evaluate(a, m);
    for (double v : {r.ebpg, r.miou, *r.bbox, r.f1, r.auc}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Metrics, InvariantUnderIncreasingTransforms) {
  std::mt19937_64 rng(6);
  const auto m = block_mask(12, 12, 3, 2, 8, 9);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_attr(12, 12, rng);
    GrayImage e = a;
    GrayImage affine = a;
    for (auto& v : e.data()) v = std::exp(v);
    for (auto& v : affine.data()) v = 3.0 * v + 0.0;
    const auto r0 = evaluate(a, m);
    for (const auto& b : {e, affine}) {
      const auto r1 = evaluate(b, m);
      EXPECT_DOUBLE_EQ(r0.miou, r1.miou);
      EXPECT_DOUBLE_EQ(r0.f1, r1.f1);
      EXPECT_DOUBLE_EQ(r0.auc, r1.auc);
      EXPECT_DOUBLE_EQ(*r0.bbox, *r1.bbox);
    }
    // Positive scaling keeps the positive-energy ratio.
    EXPECT_NEAR(r0.ebpg, evaluate(affine, m).ebpg, 1e-12);
  }
}

TEST(Metrics, EbpgInvariantUnderPositiveIncreasingMaps) {
  std::mt19937_64 rng(8);
  const auto m = block_mask(10, 10, 0, 0, 4, 9);
  GrayImage a(10, 10);
  for (auto& v : a.data()) v = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
  GrayImage b = a;
  for (auto& v : b.data()) v = 4.0 * v;
  EXPECT_NEAR(ebpg(a, m), ebpg(b, m), 1e-12);
}

TEST(Aopc, ConstantScorerZero) {
  Image img(6, 6, 1, 10.0);
  ValueFunction vf(36, [](const CoalitionMask&) { return 4.0; });
  std::mt19937_64 rng(1);
  EXPECT_DOUBLE_EQ(aopc(vf, random_attr(6, 6, rng)), 0.0);
}

TEST(Aopc, AdditiveClosedFormAndBeatsRandomOrderings) {
  std::mt19937_64 rng(11);
  const int w = 10;
  const int h = 10;
  Image img(w, h, 1);
  std::vector<double> weights(w * h);
  for (auto& v : img.samples()) v = std::uniform_real_distribution<double>(0, 255)(rng);
  for (auto& v : weights) v = std::uniform_real_distribution<double>(0, 1)(rng);
  auto vf = make_masked_image_game(img, BaselineMode::kZero, models::pixel_sum_scorer(weights));
  GrayImage attr(w, h);
  std::vector<double> contrib(w * h);
  for (int p = 0; p < w * h; ++p) attr[p] = contrib[p] = weights[p] * img.sample(p);
  AopcOptions opts;
  opts.max_fraction = 0.3;
  const double best = aopc(vf, attr, opts);
  EXPECT_NEAR(best, additive_aopc(contrib, opts), 1e-9);
  for (int t = 0; t < 100; ++t) {
    const auto other = random_attr(w, h, rng);
    EXPECT_LE(aopc(vf, other, opts), best + 1e-9);
  }
  GrayImage reversed = attr;
  for (auto& v : reversed.data()) v = -v;
  EXPECT_LT(aopc(vf, reversed, opts), best);
}

TEST(Aopc, BadOptionsRejected) {
  ValueFunction vf(4, [](const CoalitionMask&) { return 0.0; });
  EXPECT_THROW(aopc(vf, GrayImage(2, 2), {0.1, 0}), InvalidInput);
  EXPECT_THROW(aopc(vf, GrayImage(2, 2), {1.5, 3}), InvalidInput);
}

TEST(MetricsReport, JsonAndCsvEchoParameters) {
  const auto m = block_mask(6, 6, 1, 1, 3, 3);
  ValueFunction vf(36, [](const CoalitionMask& s) { return static_cast<double>(s.count()); });
  const auto r = evaluate(as_attr(m), m, std::nullopt, &vf, {0.2, 4});
  const auto j = r.to_json();
  EXPECT_EQ(j["parameters"]["binarization"], "area-matched");
  EXPECT_EQ(j["parameters"]["aopc_steps"], 4);
  EXPECT_EQ(j["parameters"]["bbox"], nlohmann::json({1, 1, 3, 3}));
  EXPECT_EQ(j["miou"], 1.0);
  const std::string header = MetricsReport::csv_header();
  const std::string row = r.csv_row();
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
}
