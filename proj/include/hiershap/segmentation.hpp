#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hiershap/canny.hpp"
#include "hiershap/game.hpp"
#include "hiershap/hierarchy.hpp"
#include "hiershap/image.hpp"

namespace hiershap::seg {

struct Segment {
  int id = 0;
  std::vector<int> pixels;    // sorted row-major pixel indices
  double score = 0.0;         // game value with only these pixels retained
  std::vector<int> children;  // ids of the finer-level segments it contains
};

struct SegmentEdge {
  int a = 0;  // a < b
  int b = 0;
  double weight = 0.0;
};

struct SegmentGraph {
  int width = 0;
  int height = 0;
  std::vector<Segment> nodes;  // nodes[i].id == i
  std::vector<SegmentEdge> edges;
};

// One segment per label, ids equal to labels.
std::vector<Segment> segments_from_labels(const SegmentLabels& labels);

// Label grid with each pixel set to the index of its segment.
Grid<int> label_map(const std::vector<Segment>& segments, int width, int height);

CoalitionMask segment_mask(const Segment& segment, std::size_t n_pixels);

// score = vf(mask retaining exactly the segment's pixels).
void score_segments(std::vector<Segment>& segments, const ValueFunction& vf, EvalCache& cache);

// Segments are adjacent when any of their pixels touch in the 8-neighbourhood.
// Throws InvalidInput if the segments do not cover the grid disjointly.
SegmentGraph build_adjacency_graph(std::vector<Segment> segments, int width, int height);

struct MergeOptions {
  double epsilon = 0.0;  // merge only edges with weight <= epsilon
  int target_count = 1;  // stop once this many segments remain
  int max_children = 0;  // cap on finer segments per merged group; 0 = none
  bool rescore_on_merge = true;
};

struct MergeStep {
  int a = 0;  // surviving group id (the smaller)
  int b = 0;  // absorbed group id
  double weight = 0.0;
  double merged_score = 0.0;
};

struct MergeResult {
  // Renumbered by first pixel; children hold graph node ids.
  std::vector<Segment> segments;
  std::vector<MergeStep> trace;
};

// Greedy agglomeration: repeatedly merges the lightest edge (ties by
// (min id, max id)) while it weighs <= epsilon and more than target_count
// segments remain. With rescore_on_merge the merged group is scored by `vf`
// through `cache`; otherwise, or when vf is null, it gets the pixel-weighted
// mean of its parts.
MergeResult merge_level(const SegmentGraph& graph, const MergeOptions& options,
                        const ValueFunction* vf = nullptr, EvalCache* cache = nullptr);

enum class LeafExpansion {
  kBinary,  // recursive halving of the pixel list in scan order
  kFlat,    // segment -> pixels directly
};

LeafExpansion parse_leaf_expansion(const std::string& name);
std::string to_string(LeafExpansion mode);

struct SegmentationConfig {
  CannyConfig canny;
  int fanout = 5;
  int max_depth = 6;
  std::optional<double> epsilon;  // unset: median edge weight per level
  bool rescore_on_merge = true;
  LeafExpansion leaf_expansion = LeafExpansion::kBinary;
};

struct SegmentationResult {
  PartitionHierarchy hierarchy;
  // Segment levels from coarsest to the Canny level. The root is not listed.
  std::vector<std::vector<Segment>> levels;
  std::vector<Grid<int>> label_maps;  // one per entry of `levels`
  std::vector<std::vector<MergeStep>> traces;  // merges producing levels[i] from levels[i+1]
  std::vector<double> epsilons;                // threshold used for each trace
  InitialSegmentation initial;
  nlohmann::json metadata;
  EvalStats eval_stats;
};

// Canny segmentation, then merge_level rounds until at most `fanout`
// segments remain, max_depth levels exist, or a round merges nothing. The
// remaining segments become the root's children and every Canny segment is
// expanded down to single pixels. The result is depth-normalized and valid.
SegmentationResult build_hierarchy(const Image& image, const ValueFunction& vf,
                                   const SegmentationConfig& config = {},
                                   EvalCache* cache = nullptr);

}  // namespace hiershap::seg
