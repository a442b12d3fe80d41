#include <gtest/gtest.h>

#include <thread>

#include "hiershap/errors.hpp"
#include "hiershap/game.hpp"
#include "hiershap/masked_game.hpp"
#include "hiershap/models.hpp"
#include "test_util.hpp"

using namespace hiershap;

TEST(CoalitionMask, SetTestCount) {
  CoalitionMask m(130);
  m.set(0);
  m.set(64);
  m.set(129);
  EXPECT_EQ(m.count(), 3u);
  EXPECT_TRUE(m.test(64));
  EXPECT_FALSE(m.test(63));
  m.reset(64);
  EXPECT_EQ(m.indices(), (std::vector<int>{0, 129}));
}

TEST(CoalitionMask, ComplementStaysWithinLength) {
  const auto m = CoalitionMask::from_indices(70, {1, 69});
  const auto c = m.complement();
  EXPECT_EQ(c.count(), 68u);
  EXPECT_EQ((m | c), CoalitionMask::full(70));
  EXPECT_TRUE((m & c).empty());
}

TEST(CoalitionMask, FromIndicesRejectsOutOfRange) {
  EXPECT_THROW(CoalitionMask::from_indices(4, {4}), InvalidInput);
  EXPECT_THROW(CoalitionMask::from_indices(4, {-1}), InvalidInput);
}

TEST(CoalitionMask, SubsetAndSubtract) {
  auto a = CoalitionMask::from_indices(8, {1, 2});
  const auto b = CoalitionMask::from_indices(8, {1, 2, 5});
  EXPECT_TRUE(a.is_subset_of(b));
  EXPECT_FALSE(b.is_subset_of(a));
  auto c = b;
  c.subtract(a);
  EXPECT_EQ(c.indices(), std::vector<int>{5});
}

TEST(ValueFunction, ArityMismatchThrows) {
  ValueFunction vf(3, [](const CoalitionMask& s) { return static_cast<double>(s.count()); });
  EXPECT_THROW(vf(CoalitionMask(4)), InvalidInput);
  EXPECT_THROW(ValueFunction(0, [](const CoalitionMask&) { return 0.0; }), InvalidInput);
}

TEST(MaskedImageGame, ZeroBaselineSum) {
  Image img(2, 2, 1, 255.0);
  auto vf = make_masked_image_game(img, BaselineMode::kZero, models::pixel_sum_scorer());
  EXPECT_EQ(vf.arity(), 4u);
  EXPECT_DOUBLE_EQ(vf(CoalitionMask::full(4)), 4 * 255.0);
  EXPECT_DOUBLE_EQ(vf(CoalitionMask(4)), 0.0);
}

TEST(MaskedImageGame, MeanBaselineHandComputed) {
  Image img(2, 2, 1, std::vector<double>{10, 20, 30, 40});
  auto vf = make_masked_image_game(img, BaselineMode::kMean, models::pixel_sum_scorer());
  EXPECT_DOUBLE_EQ(vf(CoalitionMask::from_indices(4, {0})), 85.0);
}

TEST(MaskedImageGame, EmptyImageRejected) {
  EXPECT_THROW(make_masked_image_game(Image(), BaselineMode::kZero, models::pixel_sum_scorer()),
               InvalidInput);
}

TEST(MaskedImageGame, RgbMeanBaselinePerChannel) {
  Image img(2, 1, 3, std::vector<double>{0, 10, 100, 20, 30, 200});
  const auto base = baseline_values(img, BaselineMode::kMean);
  EXPECT_EQ(base, (std::vector<double>{10, 20, 150}));
  const Image masked = apply_mask(img, CoalitionMask::from_indices(2, {1}), base);
  EXPECT_DOUBLE_EQ(masked.at(0, 0, 2), 150.0);
  EXPECT_DOUBLE_EQ(masked.at(1, 0, 2), 200.0);
}

TEST(MaskedImageGame, MonotoneForNonnegativeLinearScorer) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  Image img(3, 3, 1);
  for (auto& v : img.samples()) v = u(rng);
  std::vector<double> w(9);
  for (auto& v : w) v = u(rng) / 255.0;
  auto vf = make_masked_image_game(img, BaselineMode::kZero, models::pixel_sum_scorer(w));
  for (std::uint64_t t = 0; t < 512; ++t) {
    const auto T = CoalitionMask::from_bits(9, t);
    for (std::uint64_t s = t;; s = (s - 1) & t) {
      EXPECT_LE(vf(CoalitionMask::from_bits(9, s)), vf(T) + 1e-12);
      if (s == 0) break;
    }
  }
}

TEST(EvalCache, SameMaskTwice) {
  auto vf = fixtures::dense_random_game(4, 1);
  EvalCache cache;
  const auto s = CoalitionMask::from_indices(4, {1, 3});
  cached_evaluate(vf, cache, s);
  cached_evaluate(vf, cache, s);
  EXPECT_EQ(cache.stats().distinct_calls, 1u);
  EXPECT_EQ(cache.stats().total_requests, 2u);
}

TEST(EvalCache, MaskAndComplement) {
  auto vf = fixtures::dense_random_game(4, 1);
  EvalCache cache;
  const auto s = CoalitionMask::from_indices(4, {1, 3});
  cached_evaluate(vf, cache, s);
  cached_evaluate(vf, cache, s.complement());
  EXPECT_EQ(cache.stats().distinct_calls, 2u);
}

TEST(EvalCache, ExhaustiveThreeFeatures) {
  auto vf = fixtures::dense_random_game(3, 2);
  EvalCache cache;
  for (std::uint64_t b = 0; b < 8; ++b) cached_evaluate(vf, cache, CoalitionMask::from_bits(3, b));
  EXPECT_EQ(cache.stats().distinct_calls, 8u);
}

TEST(EvalCache, ArityMismatchThrows) {
  auto vf = fixtures::dense_random_game(3, 2);
  EvalCache cache;
  EXPECT_THROW(cached_evaluate(vf, cache, CoalitionMask(5)), InvalidInput);
}

TEST(EvalCache, TransparentOverAllMasksOfTwelve) {
  auto vf = fixtures::dense_random_game(12, 9);
  EvalCache cache;
  for (std::uint64_t b = 0; b < 4096; ++b) {
    const auto s = CoalitionMask::from_bits(12, b);
    ASSERT_EQ(cached_evaluate(vf, cache, s), vf(s));
  }
  for (std::uint64_t b = 0; b < 4096; ++b) {
    const auto s = CoalitionMask::from_bits(12, b);
    ASSERT_EQ(cached_evaluate(vf, cache, s), vf(s));
  }
  EXPECT_EQ(cache.stats().distinct_calls, 4096u);
  EXPECT_EQ(cache.stats().total_requests, 8192u);
}

TEST(EvalCache, ConcurrentInsertsCountedOnce) {
  auto vf = fixtures::dense_random_game(10, 4);
  EvalCache cache;
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&] {
      for (std::uint64_t b = 0; b < 1024; ++b) cached_evaluate(vf, cache, CoalitionMask::from_bits(10, b));
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(cache.stats().distinct_calls, 1024u);
  EXPECT_EQ(cache.stats().total_requests, 4096u);
  EXPECT_LE(cache.stats().distinct_calls, cache.stats().total_requests);
}

TEST(ValueFunction, RepeatedCallsBitIdentical) {
  Image img(4, 4, 1);
  for (std::size_t i = 0; i < img.samples().size(); ++i) img.samples()[i] = 3.7 * i;
  auto vf = make_masked_image_game(img, BaselineMode::kMean, models::template_mean_scorer(1, 1, 2, 2));
  const auto s = CoalitionMask::from_indices(16, {0, 5, 6, 15});
  const double a = vf(s);
  const double b = vf(s);
  EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
}
