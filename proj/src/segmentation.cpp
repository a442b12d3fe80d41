#include "hiershap/segmentation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <tuple>

#include "hiershap/errors.hpp"

namespace hiershap::seg {
namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

GroupSpec expand_pixels(const std::vector<int>& pixels, LeafExpansion mode) {
  GroupSpec spec{pixels, {}};
  if (pixels.size() <= 1) return spec;
  if (mode == LeafExpansion::kFlat) {
    for (int p : pixels) spec.children.push_back({{p}, {}});
    return spec;
  }
  const auto mid = pixels.begin() + static_cast<std::ptrdiff_t>((pixels.size() + 1) / 2);
  spec.children.push_back(expand_pixels({pixels.begin(), mid}, mode));
  spec.children.push_back(expand_pixels({mid, pixels.end()}, mode));
  return spec;
}

// levels: coarsest first; levels.back() is the Canny level.
GroupSpec segment_spec(const std::vector<std::vector<Segment>>& levels, std::size_t level,
                       const Segment& s, LeafExpansion mode) {
  if (level + 1 == levels.size()) return expand_pixels(s.pixels, mode);
  GroupSpec spec{s.pixels, {}};
  if (s.children.size() == 1) return segment_spec(levels, level + 1, levels[level + 1][s.children[0]], mode);
  for (int c : s.children) spec.children.push_back(segment_spec(levels, level + 1, levels[level + 1][c], mode));
  return spec;
}

}  // namespace

std::vector<Segment> segments_from_labels(const SegmentLabels& labels) {
  std::vector<Segment> out(labels.count);
  for (int i = 0; i < labels.count; ++i) out[i].id = i;
  for (std::size_t p = 0; p < labels.labels.size(); ++p) {
    const int l = labels.labels[p];
    if (l < 0 || l >= labels.count) throw InvalidInput("label out of range");
    out[l].pixels.push_back(static_cast<int>(p));
  }
  return out;
}

Grid<int> label_map(const std::vector<Segment>& segments, int width, int height) {
  Grid<int> out(width, height, -1);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (int p : segments[i].pixels) {
      if (p < 0 || static_cast<std::size_t>(p) >= out.size()) {
        throw InvalidInput("segment pixel outside the image");
      }
      if (out[p] >= 0) throw InvalidInput("segments overlap");
      out[p] = static_cast<int>(i);
    }
  }
  if (std::find(out.data().begin(), out.data().end(), -1) != out.data().end()) {
    throw InvalidInput("segments do not cover the image");
  }
  return out;
}

CoalitionMask segment_mask(const Segment& segment, std::size_t n_pixels) {
  CoalitionMask m(n_pixels);
  for (int p : segment.pixels) m.set(static_cast<std::size_t>(p));
  return m;
}

void score_segments(std::vector<Segment>& segments, const ValueFunction& vf, EvalCache& cache) {
  for (auto& s : segments) s.score = cache.evaluate(vf, segment_mask(s, vf.arity()));
}

SegmentGraph build_adjacency_graph(std::vector<Segment> segments, int width, int height) {
  const Grid<int> labels = label_map(segments, width, height);
  std::set<std::pair<int, int>> pairs;
  constexpr int kDx[4] = {1, -1, 0, 1};
  constexpr int kDy[4] = {0, 1, 1, 1};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int a = labels(x, y);
      for (int k = 0; k < 4; ++k) {
        const int nx = x + kDx[k];
        const int ny = y + kDy[k];
        if (!labels.in_bounds(nx, ny)) continue;
        const int b = labels(nx, ny);
        if (a != b) pairs.emplace(std::min(a, b), std::max(a, b));
      }
    }
  }
  SegmentGraph g{width, height, std::move(segments), {}};
  for (std::size_t i = 0; i < g.nodes.size(); ++i) g.nodes[i].id = static_cast<int>(i);
  for (const auto& [a, b] : pairs) {
    g.edges.push_back({a, b, std::abs(g.nodes[a].score - g.nodes[b].score)});
  }
  return g;
}

MergeResult merge_level(const SegmentGraph& graph, const MergeOptions& options,
                        const ValueFunction* vf, EvalCache* cache) {
  if (std::isnan(options.epsilon)) throw InvalidInput("epsilon is NaN");
  if (options.target_count < 1) throw InvalidInput("target_count must be >= 1");
  const std::size_t n = graph.nodes.size();
  const std::size_t n_pixels = static_cast<std::size_t>(graph.width) * graph.height;
  const bool rescore = options.rescore_on_merge && vf != nullptr;
  EvalCache local;
  EvalCache& memo = cache ? *cache : local;

  struct Group {
    std::vector<int> members;
    std::vector<int> pixels;
    double score = 0.0;
    bool alive = true;
  };
  std::vector<Group> groups(n);
  std::vector<std::set<int>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    groups[i].members = {static_cast<int>(i)};
    groups[i].pixels = graph.nodes[i].pixels;
    groups[i].score = graph.nodes[i].score;
  }
  for (const auto& e : graph.edges) {
    adj[e.a].insert(e.b);
    adj[e.b].insert(e.a);
  }

  MergeResult result;
  std::size_t alive = n;
  while (alive > static_cast<std::size_t>(options.target_count)) {
    std::tuple<double, int, int> best{0.0, -1, -1};
    for (std::size_t a = 0; a < n; ++a) {
      if (!groups[a].alive) continue;
      for (int b : adj[a]) {
        if (b <= static_cast<int>(a)) continue;
        if (options.max_children > 0 &&
            groups[a].members.size() + groups[b].members.size() >
                static_cast<std::size_t>(options.max_children)) {
          continue;
        }
        const std::tuple<double, int, int> cand{std::abs(groups[a].score - groups[b].score),
                                                static_cast<int>(a), b};
        if (std::get<1>(best) < 0 || cand < best) best = cand;
      }
    }
    const auto [w, a, b] = best;
    if (a < 0 || !(w <= options.epsilon)) break;

    Group& ga = groups[a];
    Group& gb = groups[b];
    const double size_a = static_cast<double>(ga.pixels.size());
    const double size_b = static_cast<double>(gb.pixels.size());
    ga.members.insert(ga.members.end(), gb.members.begin(), gb.members.end());
    std::sort(ga.members.begin(), ga.members.end());
    std::vector<int> merged;
    std::merge(ga.pixels.begin(), ga.pixels.end(), gb.pixels.begin(), gb.pixels.end(),
               std::back_inserter(merged));
    ga.pixels = std::move(merged);
    if (rescore) {
      CoalitionMask m(n_pixels);
      for (int p : ga.pixels) m.set(static_cast<std::size_t>(p));
      ga.score = memo.evaluate(*vf, m);
    } else {
      ga.score = (ga.score * size_a + gb.score * size_b) / (size_a + size_b);
    }
    gb.alive = false;
    for (int c : adj[b]) {
      adj[c].erase(b);
      if (c != a) {
        adj[c].insert(a);
        adj[a].insert(c);
      }
    }
    adj[a].erase(b);
    adj[b].clear();
    --alive;
    result.trace.push_back({a, b, w, ga.score});
  }

  for (auto& g : groups) {
    if (!g.alive) continue;
    Segment s;
    s.pixels = std::move(g.pixels);
    s.score = g.score;
    s.children = std::move(g.members);
    result.segments.push_back(std::move(s));
  }
  std::sort(result.segments.begin(), result.segments.end(),
            [](const Segment& x, const Segment& y) { return x.pixels.front() < y.pixels.front(); });
  for (std::size_t i = 0; i < result.segments.size(); ++i) result.segments[i].id = static_cast<int>(i);
  return result;
}

LeafExpansion parse_leaf_expansion(const std::string& name) {
  if (name == "binary") return LeafExpansion::kBinary;
  if (name == "flat") return LeafExpansion::kFlat;
  throw InvalidInput("unknown leaf expansion '" + name + "' (expected binary or flat)");
}

std::string to_string(LeafExpansion mode) {
  return mode == LeafExpansion::kBinary ? "binary" : "flat";
}

SegmentationResult build_hierarchy(const Image& image, const ValueFunction& vf,
                                   const SegmentationConfig& config, EvalCache* cache) {
  if (config.fanout < 2) throw InvalidInput("fanout must be >= 2");
  if (config.max_depth < 1) throw InvalidInput("max_depth must be >= 1");
  if (config.epsilon && !(*config.epsilon >= 0.0)) throw InvalidInput("epsilon must be >= 0");
  if (vf.arity() != image.pixel_count()) {
    throw InvalidInput("game arity differs from the image pixel count");
  }
  EvalCache local;
  EvalCache& memo = cache ? *cache : local;
  const EvalStats before = memo.stats();
  const int w = image.width();
  const int h = image.height();

  SegmentationResult out;
  out.initial = canny_segments(image, config.canny);
  std::vector<std::vector<Segment>> fine_first{segments_from_labels(out.initial.segments)};
  score_segments(fine_first.back(), vf, memo);

  std::vector<std::vector<MergeStep>> traces;
  std::vector<double> epsilons;
  while (fine_first.back().size() > static_cast<std::size_t>(config.fanout) &&
         fine_first.size() < static_cast<std::size_t>(config.max_depth)) {
    const auto& current = fine_first.back();
    SegmentGraph graph = build_adjacency_graph(current, w, h);
    if (graph.edges.empty()) break;
    double eps = 0.0;
    if (config.epsilon) {
      eps = *config.epsilon;
    } else {
      std::vector<double> weights;
      for (const auto& e : graph.edges) weights.push_back(e.weight);
      eps = median(std::move(weights));
    }
    MergeOptions opts;
    opts.epsilon = eps;
    opts.target_count = static_cast<int>((current.size() + config.fanout - 1) / config.fanout);
    opts.max_children = config.fanout;
    opts.rescore_on_merge = config.rescore_on_merge;
    MergeResult merged = merge_level(graph, opts, &vf, &memo);
    if (merged.segments.size() == current.size()) break;
    fine_first.push_back(std::move(merged.segments));
    traces.push_back(std::move(merged.trace));
    epsilons.push_back(eps);
  }

  out.levels.assign(fine_first.rbegin(), fine_first.rend());
  out.traces.assign(traces.rbegin(), traces.rend());
  out.epsilons.assign(epsilons.rbegin(), epsilons.rend());

  const auto n = static_cast<int>(image.pixel_count());
  GroupSpec root;
  if (out.levels.size() == 1 && out.levels[0].size() == 1) {
    // Nothing to split: root -> pixels.
    root = expand_pixels(out.levels[0][0].pixels, LeafExpansion::kFlat);
  } else if (out.levels[0].size() == 1) {
    root = segment_spec(out.levels, 0, out.levels[0][0], config.leaf_expansion);
    out.levels.erase(out.levels.begin());
    out.traces.erase(out.traces.begin());
    out.epsilons.erase(out.epsilons.begin());
  } else {
    root.members.resize(n);
    for (int p = 0; p < n; ++p) root.members[p] = p;
    for (const auto& s : out.levels[0]) {
      root.children.push_back(segment_spec(out.levels, 0, s, config.leaf_expansion));
    }
  }
  out.hierarchy = normalize_depth(PartitionHierarchy(n, root));
  require_valid(out.hierarchy);

  for (const auto& level : out.levels) out.label_maps.push_back(label_map(level, w, h));

  std::vector<std::size_t> counts;
  for (const auto& level : out.levels) counts.push_back(level.size());
  const auto& cc = config.canny;
  out.metadata = {
      {"pct_lower", cc.pct_lower},
      {"pct_upper", cc.pct_upper},
      {"threshold_basis", to_string(cc.threshold_basis)},
      {"t_lower", out.initial.edges.t_lower},
      {"t_upper", out.initial.edges.t_upper},
      {"sigma", cc.sigma},
      {"gaussian_ksize", cc.gaussian_ksize},
      {"dilate_ksize", cc.dilate_ksize},
      {"min_segment_size", cc.min_segment_size},
      {"fanout", config.fanout},
      {"max_depth", config.max_depth},
      {"epsilon_policy", config.epsilon ? "fixed" : "median"},
      {"epsilons", out.epsilons},
      {"rescore_on_merge", config.rescore_on_merge},
      {"leaf_expansion", to_string(config.leaf_expansion)},
      {"segment_counts", counts},
      {"canny_segments", out.initial.segments.count},
      {"width", w},
      {"height", h},
  };
  const EvalStats after = memo.stats();
  out.eval_stats = {after.distinct_calls - before.distinct_calls,
                    after.total_requests - before.total_requests};
  return out;
}

}  // namespace hiershap::seg
