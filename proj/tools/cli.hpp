#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hiershap/image.hpp"

namespace hiershap::cli {

enum ExitCode { kOk = 0, kValidationFailure = 2, kTPropertyFailure = 3 };

struct RunConfig {
  std::string input;      // image (PGM/PPM/PNG)
  std::string game;       // synthetic game fixture JSON, instead of an image
  std::string hierarchy;  // hierarchy JSON, instead of segmenting
  std::vector<int> grid;  // axis-aligned hierarchy, instead of segmenting
  std::string scorer = "retained-mean";
  std::string baseline = "mean";
  double pct_lower = 75.0;
  double pct_upper = 90.0;
  int dilate = 2;
  int fanout = 5;
  int max_depth = 6;
  std::string epsilon = "median";
  std::string leaf_expansion = "binary";
  std::string threshold_basis = "gradient";
  std::string tau = "0";
  std::string method = "owen";
  std::uint64_t mc = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::filesystem::path out = ".";
};

struct MetricsConfig {
  std::string attr;
  std::string mask;
  std::string bbox;  // "x0,y0,x1,y1"; empty: the mask's bounding box
  std::string input;
  std::string scorer = "retained-mean";
  std::string baseline = "mean";
  double aopc_fraction = 0.1;
  int aopc_steps = 10;
  std::filesystem::path out;
};

struct CompareCostConfig {
  std::vector<int> levels = {2, 5, 5};
  bool measure = true;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct BenchConfig {
  std::vector<int> sizes = {16, 24, 32};
  std::string scorer = "retained-mean";
  std::string baseline = "mean";
  int fanout = 5;
  int max_depth = 6;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Each command writes its files under the configured directory and a
// summary to `out`. Library exceptions propagate; run() maps them.
int cmd_segment(const RunConfig& config, std::ostream& out);
int cmd_explain(const RunConfig& config, std::ostream& out);
int cmd_check_t(const RunConfig& config, std::ostream& out);
int cmd_metrics(const MetricsConfig& config, std::ostream& out);
int cmd_compare_cost(const CompareCostConfig& config, std::ostream& out);
int cmd_bench(const BenchConfig& config, std::ostream& out);

// Full command line, argv[0] included.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// One row per image row, %.17g.
void write_attribution_csv(const std::filesystem::path& path, const std::vector<double>& scores,
                           int width);
GrayImage read_attribution_csv(const std::filesystem::path& path);

// Min-max to 0..255; a constant map is all zeros.
Grid<std::uint8_t> heatmap(const GrayImage& attr);

// Synthetic test image: background 20 with a centred square of 200 whose
// side is a quarter of `size` (at least one pixel).
Image square_image(int size);

}  // namespace hiershap::cli
