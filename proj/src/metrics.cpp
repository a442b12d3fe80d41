#include "hiershap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "hiershap/errors.hpp"

namespace hiershap::metrics {
namespace {

void require_same_shape(const GrayImage& attr, const Mask& mask) {
  if (attr.width() != mask.width() || attr.height() != mask.height()) {
    throw InvalidInput("attribution and mask shapes differ");
  }
  if (attr.size() == 0) throw InvalidInput("empty attribution map");
}

std::size_t positives(const Mask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.data().begin(), mask.data().end(), [](std::uint8_t v) { return v != 0; }));
}

// Pixel indices by descending attribution, scan order among equals.
std::vector<std::size_t> descending_order(const GrayImage& attr) {
  std::vector<std::size_t> order(attr.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return attr[a] > attr[b]; });
  return order;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::optional<BoundingBox> mask_bbox(const Mask& mask) {
  std::optional<BoundingBox> box;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      if (!box) {
        box = BoundingBox{x, y, x, y};
      } else {
        box->x0 = std::min(box->x0, x);
        box->y0 = std::min(box->y0, y);
        box->x1 = std::max(box->x1, x);
        box->y1 = std::max(box->y1, y);
      }
    }
  }
  return box;
}

double ebpg(const GrayImage& attr, const Mask& mask) {
  require_same_shape(attr, mask);
  double inside = 0.0;
  double total = 0.0;
  for (std::size_t p = 0; p < attr.size(); ++p) {
    const double e = std::max(attr[p], 0.0);
    total += e;
    if (mask[p]) inside += e;
  }
  return total > 0.0 ? inside / total : 0.0;
}

Mask area_matched_binarization(const GrayImage& attr, std::size_t k) {
  Mask out(attr.width(), attr.height(), 0);
  const auto order = descending_order(attr);
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) out[order[i]] = 1;
  return out;
}

double miou(const GrayImage& attr, const Mask& mask) {
  require_same_shape(attr, mask);
  const std::size_t k = positives(mask);
  if (k == 0) throw InvalidInput("mIoU needs a nonempty mask");
  const Mask pred = area_matched_binarization(attr, k);
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    inter += pred[p] && mask[p];
    uni += pred[p] || mask[p];
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double bbox_score(const GrayImage& attr, const BoundingBox& box) {
  if (box.x0 > box.x1 || box.y0 > box.y1) throw InvalidInput("degenerate bounding box");
  if (box.x0 < 0 || box.y0 < 0 || box.x1 >= attr.width() || box.y1 >= attr.height()) {
    throw InvalidInput("bounding box outside the image");
  }
  const auto n = static_cast<std::size_t>(box.area());
  const auto order = descending_order(attr);
  const double cut = attr[order[n - 1]];
  double inside = 0.0;
  std::size_t above = 0;
  std::size_t tied = 0;
  std::size_t tied_inside = 0;
  for (std::size_t p = 0; p < attr.size(); ++p) {
    const int x = static_cast<int>(p % attr.width());
    const int y = static_cast<int>(p / attr.width());
    if (attr[p] > cut) {
      ++above;
      inside += box.contains(x, y);
    } else if (attr[p] == cut) {
      ++tied;
      tied_inside += box.contains(x, y);
    }
  }
  const double slots = static_cast<double>(n - above);
  inside += slots * static_cast<double>(tied_inside) / static_cast<double>(tied);
  return inside / static_cast<double>(n);
}

double aopc(const ValueFunction& game, const GrayImage& attr, const AopcOptions& options) {
  if (options.steps < 1) throw InvalidInput("AOPC steps must be >= 1");
  if (!(options.max_fraction >= 0.0 && options.max_fraction <= 1.0)) {
    throw InvalidInput("AOPC max_fraction must lie in [0, 1]");
  }
  if (game.arity() != attr.size()) throw InvalidInput("game arity differs from attribution size");
  const auto order = descending_order(attr);
  const CoalitionMask full = CoalitionMask::full(attr.size());
  const double f_full = game(full);
  double total = 0.0;
  for (int k = 1; k <= options.steps; ++k) {
    const auto count = static_cast<std::size_t>(std::llround(
        static_cast<double>(k) / options.steps * options.max_fraction * static_cast<double>(attr.size())));
    CoalitionMask kept = full;
    for (std::size_t i = 0; i < std::min(count, order.size()); ++i) kept.reset(order[i]);
    total += f_full - game(kept);
  }
  return total / options.steps;
}

F1Auc f1_and_auc(const GrayImage& attr, const Mask& mask) {
  require_same_shape(attr, mask);
  const std::size_t k = positives(mask);
  if (k == 0 || k == mask.size()) throw InvalidInput("F1/AUC need a mask with both classes");
  const Mask pred = area_matched_binarization(attr, k);
  std::size_t inter = 0;
  for (std::size_t p = 0; p < pred.size(); ++p) inter += pred[p] && mask[p];
  F1Auc out;
  // Precision and recall share the denominator k, so F1 = |pred ∩ mask| / k.
  out.f1 = static_cast<double>(inter) / static_cast<double>(k);

  // Mann-Whitney U over average ranks.
  std::vector<std::size_t> order(attr.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return attr[a] < attr[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && attr[order[j]] == attr[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (mask[order[t]]) rank_sum += avg_rank;
    }
    i = j;
  }
  const double pos = static_cast<double>(k);
  const double neg = static_cast<double>(mask.size() - k);
  out.auc = (rank_sum - pos * (pos + 1) / 2) / (pos * neg);
  return out;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j = {{"ebpg", ebpg}, {"miou", miou}, {"f1", f1}, {"auc", auc}};
  j["bbox"] = bbox ? nlohmann::json(*bbox) : nlohmann::json(nullptr);
  j["aopc"] = aopc ? nlohmann::json(*aopc) : nlohmann::json(nullptr);
  nlohmann::json params = {{"binarization", binarization},
                           {"aopc_max_fraction", aopc_options.max_fraction},
                           {"aopc_steps", aopc_options.steps}};
  if (box) params["bbox"] = {box->x0, box->y0, box->x1, box->y1};
  j["parameters"] = params;
  return j;
}

std::string MetricsReport::csv_header() {
  return "ebpg,miou,bbox,f1,auc,aopc,binarization,aopc_max_fraction,aopc_steps";
}

std::string MetricsReport::csv_row() const {
  std::ostringstream os;
  os << fmt(ebpg) << ',' << fmt(miou) << ',' << (bbox ? fmt(*bbox) : "") << ',' << fmt(f1) << ','
     << fmt(auc) << ',' << (aopc ? fmt(*aopc) : "") << ',' << binarization << ','
     << fmt(aopc_options.max_fraction) << ',' << aopc_options.steps;
  return os.str();
}

MetricsReport evaluate(const GrayImage& attr, const Mask& mask, std::optional<BoundingBox> box,
                       const ValueFunction* game, const AopcOptions& aopc_options) {
  MetricsReport r;
  r.ebpg = ebpg(attr, mask);
  r.miou = miou(attr, mask);
  const F1Auc fa = f1_and_auc(attr, mask);
  r.f1 = fa.f1;
  r.auc = fa.auc;
  r.box = box ? box : mask_bbox(mask);
  if (r.box) r.bbox = bbox_score(attr, *r.box);
  r.aopc_options = aopc_options;
  if (game) r.aopc = aopc(*game, attr, aopc_options);
  return r;
}

}  // namespace hiershap::metrics
