#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "hiershap/game.hpp"
#include "hiershap/image.hpp"

namespace hiershap::metrics {

using Mask = Grid<std::uint8_t>;  // nonzero = object

// Inclusive pixel coordinates.
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  int area() const { return (x1 - x0 + 1) * (y1 - y0 + 1); }
  bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

// Tightest box around the positive pixels; nullopt for an empty mask.
std::optional<BoundingBox> mask_bbox(const Mask& mask);

// Positive attribution mass inside the mask over total positive mass.
double ebpg(const GrayImage& attr, const Mask& mask);

// Top-k pixels by attribution, k = number of mask pixels; ties at the cut
// go to the earlier pixel in scan order.
Mask area_matched_binarization(const GrayImage& attr, std::size_t k);

double miou(const GrayImage& attr, const Mask& mask);

// Share of the top-n pixels (n = bbox area) lying inside the box. Pixels
// tied with the n-th value share the remaining slots evenly.
double bbox_score(const GrayImage& attr, const BoundingBox& box);

struct AopcOptions {
  double max_fraction = 0.1;
  int steps = 10;
};

// Most-relevant-first perturbation: step k removes the top
// round(k / steps * max_fraction * P) pixels; returns the mean of
// game(all) - game(kept) over the steps. `game` must be the masked-image
// game over attr's pixels so removals use its baseline.
double aopc(const ValueFunction& game, const GrayImage& attr, const AopcOptions& options = {});

struct F1Auc {
  double f1 = 0.0;
  double auc = 0.0;
};

// F1 on the area-matched binarization; AUC by Mann-Whitney with ties as 1/2.
F1Auc f1_and_auc(const GrayImage& attr, const Mask& mask);

struct MetricsReport {
  double ebpg = 0.0;
  double miou = 0.0;
  std::optional<double> bbox;
  double f1 = 0.0;
  double auc = 0.0;
  std::optional<double> aopc;
  std::optional<BoundingBox> box;
  AopcOptions aopc_options;
  std::string binarization = "area-matched";

  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

// Every metric the inputs allow. The bbox defaults to the mask's bounding
// box; AOPC needs a game.
MetricsReport evaluate(const GrayImage& attr, const Mask& mask,
                       std::optional<BoundingBox> box = std::nullopt,
                       const ValueFunction* game = nullptr, const AopcOptions& aopc_options = {});

}  // namespace hiershap::metrics
