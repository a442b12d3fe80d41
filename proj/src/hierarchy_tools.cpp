#include "hiershap/hierarchy_tools.hpp"

#include <cmath>

#include "hiershap/errors.hpp"
#include "hiershap/models.hpp"
#include "hiershap/segmentation.hpp"

namespace hiershap {
namespace {

struct Rect {
  int x0, y0, x1, y1;  // half-open
  int area() const { return (x1 - x0) * (y1 - y0); }
};

std::vector<int> rect_pixels(const Rect& r, int width) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(r.area()));
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) out.push_back(y * width + x);
  }
  return out;
}

// Cut points of [lo, hi) into g parts, the last absorbing the remainder.
std::vector<int> cuts(int lo, int hi, int g) {
  const int step = (hi - lo) / g;
  std::vector<int> c{lo};
  for (int i = 1; i < g; ++i) c.push_back(lo + i * step);
  c.push_back(hi);
  return c;
}

GroupSpec tile_spec(const Rect& r, int width, const std::vector<int>& grids, std::size_t level) {
  GroupSpec spec{rect_pixels(r, width), {}};
  if (r.area() == 1) return spec;
  if (level == grids.size()) {
    for (int p : spec.members) spec.children.push_back({{p}, {}});
    return spec;
  }
  const auto xs = cuts(r.x0, r.x1, grids[level]);
  const auto ys = cuts(r.y0, r.y1, grids[level]);
  for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const Rect sub{xs[i], ys[j], xs[i + 1], ys[j + 1]};
      if (sub.area() > 0) spec.children.push_back(tile_spec(sub, width, grids, level + 1));
    }
  }
  if (spec.children.size() == 1) return spec.children.front();
  return spec;
}

}  // namespace

nlohmann::json to_json(const TPropertyReport& report) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : report.violations) {
    v.push_back({{"child", x.child},
                 {"parent", x.parent},
                 {"child_score", x.child_score},
                 {"parent_score", x.parent_score}});
  }
  nlohmann::json tau = report.tau;
  if (std::isinf(report.tau)) tau = report.tau > 0 ? "inf" : "-inf";
  return {{"tau", tau},
          {"pass", report.pass},
          {"pairs_checked", report.pairs_checked},
          {"violations", v}};
}

TPropertyReport check_t_property(const PartitionHierarchy& h, const ValueFunction& vf,
                                 double tau, EvalCache* cache) {
  if (std::isnan(tau)) throw InvalidInput("tau is NaN");
  require_valid(h);
  if (vf.arity() != static_cast<std::size_t>(h.n_features())) {
    throw InvalidInput("game arity differs from the hierarchy's feature count");
  }
  EvalCache local;
  EvalCache& memo = cache ? *cache : local;
  const auto& nodes = h.nodes();
  std::vector<double> score(nodes.size(), 0.0);
  std::vector<bool> scored(nodes.size(), false);
  auto score_of = [&](int id) {
    if (!scored[id]) {
      score[id] = memo.evaluate(vf, CoalitionMask::from_indices(vf.arity(), nodes[id].members));
      scored[id] = true;
    }
    return score[id];
  };

  TPropertyReport report;
  report.tau = tau;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const int parent = nodes[id].parent;
    if (parent <= PartitionHierarchy::root()) continue;
    ++report.pairs_checked;
    const double c = score_of(static_cast<int>(id));
    if (c < tau) continue;
    const double p = score_of(parent);
    if (p < tau) report.violations.push_back({static_cast<int>(id), parent, c, p});
  }
  report.pass = report.violations.empty();
  return report;
}

PartitionHierarchy axis_aligned_hierarchy(int width, int height, const std::vector<int>& grids) {
  if (grids.empty()) throw InvalidInput("axis-aligned hierarchy needs at least one grid level");
  if (width < 1 || height < 1) throw InvalidInput("image dimensions must be positive");
  for (int g : grids) {
    if (g < 1) throw InvalidInput("grid sizes must be >= 1");
  }
  GroupSpec root = tile_spec({0, 0, width, height}, width, grids, 0);
  if (root.children.empty()) root.children.push_back({root.members, {}});
  return normalize_depth(PartitionHierarchy(width * height, root));
}

TPropertyCounterexample t_property_counterexample() {
  constexpr int kSize = 32;
  TPropertyCounterexample out;
  out.image = Image(kSize, kSize, 1, 20.0);
  for (int y = 12; y < 20; ++y) {
    for (int x = 12; x < 20; ++x) out.image.at(x, y) = 200.0;
  }
  out.scorer = models::retained_mean_scorer();
  out.game = make_masked_image_game(out.image, BaselineMode::kMean, out.scorer);
  out.tau = 100.0;

  out.axis_hierarchy = axis_aligned_hierarchy(kSize, kSize, {2, 2, 2, 2, 2});
  out.axis_report = check_t_property(out.axis_hierarchy, out.game, out.tau);
  const std::vector<int> tile = rect_pixels({8, 8, 16, 16}, kSize);
  for (std::size_t id = 0; id < out.axis_hierarchy.nodes().size(); ++id) {
    if (out.axis_hierarchy.node(static_cast<int>(id)).members == tile) {
      out.diluted_parent = static_cast<int>(id);
      break;
    }
  }

  out.semantic_hierarchy = seg::build_hierarchy(out.image, out.game).hierarchy;
  out.semantic_report = check_t_property(out.semantic_hierarchy, out.game, out.tau);
  return out;
}

}  // namespace hiershap
