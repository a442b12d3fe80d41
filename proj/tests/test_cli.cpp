#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "hiershap/hierarchy.hpp"
#include "hiershap/hierarchy_tools.hpp"
#include "hiershap/image_io.hpp"
#include "hiershap/models.hpp"
#include "hiershap/segmentation.hpp"

using namespace hiershap;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("hiershap_cli_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "hiershap");
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  std::string write_image(const std::string& name, const Image& img) {
    const auto path = dir_ / name;
    io::write_pgm(path, img.to_gray());
    return path.string();
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

Image random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(0, 255);
  Image img(w, h, 1);
  for (auto& v : img.samples()) v = d(rng);
  return img;
}

}  // namespace

TEST_F(CliTest, SegmentGoldenSquare) {
  const auto in = write_image("sq.pgm", cli::square_image(32));
  ASSERT_EQ(run({"segment", "--input", in, "--out", (dir_ / "seg").string()}), 0) << err_.str();
  const auto doc = json::parse(slurp(dir_ / "seg" / "hierarchy.json"));
  const auto h = hierarchy_from_json(doc);
  EXPECT_EQ(h.node(0).children.size(), 2u);
  EXPECT_DOUBLE_EQ(doc["metadata"]["pct_lower"].get<double>(), 75.0);
  EXPECT_DOUBLE_EQ(doc["metadata"]["pct_upper"].get<double>(), 90.0);
  EXPECT_EQ(doc["metadata"]["dilate_ksize"].get<int>(), 2);
  EXPECT_TRUE(fs::exists(dir_ / "seg" / "labels_level1.pgm"));
  const auto labels = io::read_image(dir_ / "seg" / "labels_level1.pgm");
  EXPECT_EQ(labels.width(), 32);
}

TEST_F(CliTest, SegmentEdgeFreeIsDegenerate) {
  const auto in = write_image("flat.pgm", Image(8, 8, 1, 90.0));
  ASSERT_EQ(run({"segment", "--input", in, "--out", (dir_ / "seg").string()}), 0) << err_.str();
  const auto h = load_hierarchy(dir_ / "seg" / "hierarchy.json");
  EXPECT_EQ(h.depth(), 1);
  EXPECT_EQ(h.node(0).children.size(), 64u);
}

TEST_F(CliTest, SegmentBadPercentileOrder) {
  const auto in = write_image("sq.pgm", cli::square_image(16));
  EXPECT_EQ(run({"segment", "--input", in, "--pct-lower", "90", "--pct-upper", "75", "--out",
                 dir_.string()}),
            2);
  EXPECT_NE(err_.str().find("pct-lower"), std::string::npos);
}

TEST_F(CliTest, SegmentHierarchyRoundTrips) {
  const Image img = cli::square_image(16);
  const auto in = write_image("sq.pgm", img);
  ASSERT_EQ(run({"segment", "--input", in, "--out", dir_.string()}), 0);
  const auto loaded = load_hierarchy(dir_ / "hierarchy.json");
  const auto game = make_masked_image_game(img, BaselineMode::kMean, models::retained_mean_scorer());
  const auto built = seg::build_hierarchy(img, game);
  EXPECT_TRUE(loaded == built.hierarchy);
}

TEST_F(CliTest, ExplainOwenMatchesShapleyForAdditiveScorer) {
  const auto in = write_image("toy.pgm", random_image(4, 4, 3));
  ASSERT_EQ(run({"explain", "--input", in, "--scorer", "sum", "--method", "owen", "--out",
                 (dir_ / "o").string()}),
            0)
      << err_.str();
  ASSERT_EQ(run({"explain", "--input", in, "--scorer", "sum", "--method", "shapley", "--out",
                 (dir_ / "s").string()}),
            0)
      << err_.str();
  const auto o = cli::read_attribution_csv(dir_ / "o" / "attribution.csv");
  const auto s = cli::read_attribution_csv(dir_ / "s" / "attribution.csv");
  ASSERT_EQ(o.width(), 4);
  ASSERT_EQ(o.height(), 4);
  for (std::size_t i = 0; i < o.size(); ++i) EXPECT_NEAR(o[i], s[i], 1e-9);
}

TEST_F(CliTest, ExplainHeatmapExtremes) {
  const auto in = write_image("toy.pgm", random_image(4, 4, 5));
  ASSERT_EQ(run({"explain", "--input", in, "--scorer", "sum", "--out", dir_.string()}), 0);
  const auto hm = io::read_image(dir_ / "heatmap.pgm");
  const auto [lo, hi] = std::minmax_element(hm.samples().begin(), hm.samples().end());
  EXPECT_EQ(*lo, 0.0);
  EXPECT_EQ(*hi, 255.0);
}

TEST_F(CliTest, ExplainStatsRespectBounds) {
  const auto in = write_image("sq.pgm", cli::square_image(16));
  ASSERT_EQ(run({"explain", "--input", in, "--out", dir_.string()}), 0);
  const auto stats = json::parse(slurp(dir_ / "stats.json"));
  for (const char* key : {"distinct_evals", "total_requests", "wall_time_s",
                          "predicted_eval_count", "predicted_total_requests"}) {
    EXPECT_TRUE(stats.contains(key)) << key;
  }
  EXPECT_LE(stats["distinct_evals"].get<double>(), stats["predicted_total_requests"].get<double>());
  EXPECT_EQ(stats["total_requests"].get<double>(), stats["predicted_total_requests"].get<double>());
}

TEST_F(CliTest, ExplainIsByteReproducible) {
  const auto in = write_image("sq.pgm", cli::square_image(16));
  ASSERT_EQ(run({"explain", "--input", in, "--out", (dir_ / "a").string()}), 0);
  ASSERT_EQ(run({"explain", "--input", in, "--out", (dir_ / "b").string(), "--threads", "3"}), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "attribution.csv"), slurp(dir_ / "b" / "attribution.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "heatmap.pgm"), slurp(dir_ / "b" / "heatmap.pgm"));
}

TEST_F(CliTest, ExplainShapleyTooWideNeedsMonteCarlo) {
  const auto in = write_image("toy.pgm", random_image(5, 5, 1));
  EXPECT_EQ(run({"explain", "--input", in, "--method", "shapley", "--out", dir_.string()}), 2);
  ASSERT_EQ(run({"explain", "--input", in, "--method", "shapley", "--mc", "20", "--seed", "4",
                 "--out", (dir_ / "a").string()}),
            0);
  ASSERT_EQ(run({"explain", "--input", in, "--method", "shapley", "--mc", "20", "--seed", "4",
                 "--out", (dir_ / "b").string()}),
            0);
  EXPECT_EQ(slurp(dir_ / "a" / "attribution.csv"), slurp(dir_ / "b" / "attribution.csv"));
}

TEST_F(CliTest, ExplainTabularGameWithHierarchy) {
  const auto game_path = dir_ / "majority.json";
  std::ofstream(game_path) << R"({"kind": "majority", "n_features": 3})";
  const auto h_path = dir_ / "h.json";
  save_hierarchy(h_path, PartitionHierarchy::from_groups(3, {{0, 1}, {2}}));
  ASSERT_EQ(run({"explain", "--game", game_path.string(), "--hierarchy", h_path.string(),
                 "--out", dir_.string()}),
            0)
      << err_.str();
  const auto a = cli::read_attribution_csv(dir_ / "attribution.csv");
  ASSERT_EQ(a.size(), 3u);
  EXPECT_NEAR(a[0], 0.5, 1e-12);
  EXPECT_NEAR(a[1], 0.5, 1e-12);
  EXPECT_NEAR(a[2], 0.0, 1e-12);
}

TEST_F(CliTest, ExplainRejectsMismatchedHierarchy) {
  const auto game_path = dir_ / "majority.json";
  std::ofstream(game_path) << R"({"kind": "majority", "n_features": 3})";
  const auto h_path = dir_ / "h.json";
  save_hierarchy(h_path, PartitionHierarchy::all_singletons(4));
  EXPECT_EQ(run({"explain", "--game", game_path.string(), "--hierarchy", h_path.string(),
                 "--out", dir_.string()}),
            2);
}

TEST_F(CliTest, AttributionCsvRoundTrip) {
  const std::vector<double> v = {0.1, -1.0 / 3.0, 1e-300, 12345.678901234567, -0.0, 2.0};
  cli::write_attribution_csv(dir_ / "a.csv", v, 3);
  const auto back = cli::read_attribution_csv(dir_ / "a.csv");
  EXPECT_EQ(back.width(), 3);
  EXPECT_EQ(back.height(), 2);
  EXPECT_EQ(back.data(), v);
}

TEST_F(CliTest, HeatmapConstantIsZero) {
  const auto hm = cli::heatmap(GrayImage(3, 3, 4.0));
  for (auto v : hm.data()) EXPECT_EQ(v, 0);
}

TEST_F(CliTest, CheckTDichotomyOnCounterexample) {
  const auto ce = t_property_counterexample();
  const auto in = write_image("ce.pgm", ce.image);
  EXPECT_EQ(run({"check-t", "--input", in, "--tau", "100"}), 0) << out_.str();
  EXPECT_TRUE(json::parse(out_.str())["pass"].get<bool>());
  EXPECT_EQ(run({"check-t", "--input", in, "--tau", "100", "--grid", "2,2,2,2,2"}), 3);
  EXPECT_FALSE(json::parse(out_.str())["violations"].empty());
}

TEST_F(CliTest, CheckTNegativeInfinityPasses) {
  const auto ce = t_property_counterexample();
  const auto in = write_image("ce.pgm", ce.image);
  EXPECT_EQ(run({"check-t", "--input", in, "--tau", "-inf", "--grid", "2,2,2,2,2"}), 0);
  EXPECT_EQ(json::parse(out_.str())["tau"], "-inf");
}

TEST_F(CliTest, CheckTRejectsNaN) {
  const auto in = write_image("sq.pgm", cli::square_image(8));
  EXPECT_EQ(run({"check-t", "--input", in, "--tau", "nan"}), 2);
}

TEST_F(CliTest, MetricsPerfectAttribution) {
  GrayImage mask(8, 8, 0.0);
  for (int y = 2; y < 5; ++y)
    for (int x = 3; x < 7; ++x) mask(x, y) = 255.0;
  io::write_pgm(dir_ / "mask.pgm", mask);
  cli::write_attribution_csv(dir_ / "attr.csv", mask.data(), 8);
  ASSERT_EQ(run({"metrics", "--attr", (dir_ / "attr.csv").string(), "--mask",
                 (dir_ / "mask.pgm").string(), "--out", dir_.string()}),
            0)
      << err_.str();
  const auto doc = json::parse(out_.str());
  EXPECT_DOUBLE_EQ(doc["miou"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(doc["f1"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(doc["auc"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(doc["ebpg"].get<double>(), 1.0);
  EXPECT_TRUE(fs::exists(dir_ / "metrics.csv"));
}

TEST_F(CliTest, MetricsUniformQuarterMask) {
  GrayImage mask(8, 8, 0.0);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) mask(x, y) = 1.0;
  io::write_pgm(dir_ / "mask.pgm", mask);
  cli::write_attribution_csv(dir_ / "attr.csv", std::vector<double>(64, 0.5), 8);
  const auto in = write_image("img.pgm", random_image(8, 8, 2));
  ASSERT_EQ(run({"metrics", "--attr", (dir_ / "attr.csv").string(), "--mask",
                 (dir_ / "mask.pgm").string(), "--input", in, "--aopc-steps", "4", "--bbox",
                 "0,0,3,3"}),
            0)
      << err_.str();
  const auto doc = json::parse(out_.str());
  EXPECT_NEAR(doc["ebpg"].get<double>(), 0.25, 1e-12);
  EXPECT_TRUE(doc.contains("aopc"));
  EXPECT_EQ(doc["parameters"]["aopc_steps"].get<int>(), 4);
}

TEST_F(CliTest, MetricsShapeMismatch) {
  io::write_pgm(dir_ / "mask.pgm", GrayImage(4, 4, 1.0));
  cli::write_attribution_csv(dir_ / "attr.csv", std::vector<double>(9, 1.0), 3);
  EXPECT_EQ(run({"metrics", "--attr", (dir_ / "attr.csv").string(), "--mask",
                 (dir_ / "mask.pgm").string()}),
            2);
}

TEST_F(CliTest, CompareCostTwoFiveFive) {
  ASSERT_EQ(run({"compare-cost", "--levels", "2,5,5"}), 0);
  const std::string s = out_.str();
  EXPECT_NE(s.find("owen,50,4096,51200,9724,51200"), std::string::npos) << s;
  EXPECT_NE(s.find("shapley,50,1125899906842624"), std::string::npos) << s;
}

TEST_F(CliTest, CompareCostAllSingletonsEqual) {
  ASSERT_EQ(run({"compare-cost", "--levels", "6"}), 0);
  const std::string s = out_.str();
  EXPECT_NE(s.find("owen,6,64,384,64,384"), std::string::npos) << s;
  EXPECT_NE(s.find("shapley,6,64,64,64,"), std::string::npos) << s;
}

TEST_F(CliTest, BenchCountsRepeat) {
  auto counts = [&] {
    EXPECT_EQ(run({"bench", "--sizes", "4,16"}), 0);
    std::vector<std::string> rows;
    std::stringstream ss(out_.str());
    std::string line;
    while (std::getline(ss, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 's') continue;
      std::stringstream ls(line);
      std::string cell, kept;
      for (int col = 0; std::getline(ls, cell, ','); ++col) {
        if (col != 7 && col != 9) kept += cell + ",";
      }
      rows.push_back(kept);
    }
    return rows;
  };
  const auto a = counts();
  EXPECT_NE(out_.str().find("infeasible"), std::string::npos);
  const auto b = counts();
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[0].find("infeasible"), std::string::npos);
}

TEST_F(CliTest, ParseErrorsExitTwo) {
  EXPECT_EQ(run({"explain", "--no-such-flag"}), 2);
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"explain", "--method", "banzhaf"}), 2);
  EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(CliTest, ExplainDegenerateHierarchyOverCapacity) {
  const auto in = write_image("flat.pgm", Image(8, 8, 1, 50.0));
  EXPECT_EQ(run({"explain", "--input", in, "--out", dir_.string()}), 2);
  EXPECT_NE(err_.str().find("limit"), std::string::npos);
  EXPECT_EQ(run({"explain", "--input", in, "--grid", "2,2", "--out", dir_.string()}), 0);
}

TEST_F(CliTest, MissingInputExitTwo) {
  EXPECT_EQ(run({"explain", "--input", (dir_ / "nope.pgm").string()}), 2);
}
