#pragma once

#include <vector>

#include <json.hpp>

#include "hiershap/game.hpp"
#include "hiershap/hierarchy.hpp"
#include "hiershap/image.hpp"
#include "hiershap/masked_game.hpp"

namespace hiershap {

struct TViolation {
  int child = -1;   // node id
  int parent = -1;  // node id
  double child_score = 0.0;
  double parent_score = 0.0;
};

struct TPropertyReport {
  double tau = 0.0;
  std::vector<TViolation> violations;
  std::size_t pairs_checked = 0;
  bool pass = true;
};

nlohmann::json to_json(const TPropertyReport& report);

// A group is "positive" when vf(group retained alone) >= tau. Every child
// whose parent is not the root is checked: a positive child needs a positive
// parent. The root is the whole input and is not part of any level.
TPropertyReport check_t_property(const PartitionHierarchy& h, const ValueFunction& vf,
                                 double tau, EvalCache* cache = nullptr);

// Rectangular tiles: level l cuts every cell of level l-1 into
// grids[l] x grids[l] parts; remainders go to the last row and column and
// empty parts are dropped. Cells still wider than one pixel after the last
// level get single-pixel leaves. Row-major pixel indices.
PartitionHierarchy axis_aligned_hierarchy(int width, int height, const std::vector<int>& grids);

struct TPropertyCounterexample {
  Image image;
  ImageScorer scorer;
  ValueFunction game;
  double tau = 0.0;
  PartitionHierarchy axis_hierarchy;
  TPropertyReport axis_report;
  int diluted_parent = -1;  // node id of the background-dominated tile
  PartitionHierarchy semantic_hierarchy;
  TPropertyReport semantic_report;
};

// 32x32 image, background 20, an 8x8 object of intensity 200 at rows and
// columns 12..19; retained-mean scorer; tau = 100. The 8x8 grid tile
// covering rows/cols 8..15 holds a quarter of the object and averages 65,
// while its 4x4 child inside the object averages 200.
TPropertyCounterexample t_property_counterexample();

}  // namespace hiershap
