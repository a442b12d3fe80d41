#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hiershap/coalition.hpp"
#include "hiershap/game.hpp"
#include "hiershap/image.hpp"

namespace hiershap {

enum class BaselineMode { kMean, kZero };

BaselineMode parse_baseline_mode(const std::string& name);
std::string to_string(BaselineMode mode);

// A model stand-in: maps a (masked) image to a real score. The retained
// mask is passed alongside so toy scorers that reason about which pixels
// survived (group-AND, retained-mean) share the same interface; image
// models simply ignore it.
struct ImageScorer {
  std::string name;
  std::function<double(const Image& masked, const CoalitionMask& retained)> fn;
  // False for scorers that read only retained pixels; they then receive the
  // unmasked image and the masking copy is skipped.
  bool needs_image = true;
};

// Per-channel baseline used to replace non-retained pixels.
std::vector<double> baseline_values(const Image& image, BaselineMode mode);

// Copy of `image` with every pixel outside `retained` set to `baseline`.
Image apply_mask(const Image& image, const CoalitionMask& retained,
                 const std::vector<double>& baseline);
// Same, writing into `out` (reuses its storage).
void apply_mask_into(const Image& image, const CoalitionMask& retained,
                     const std::vector<double>& baseline, Image& out);

// Game over the H*W pixels of `image` (row-major feature order):
// evaluate(S) = scorer(image with pixels outside S replaced by baseline).
// Throws InvalidInput for an empty image.
ValueFunction make_masked_image_game(const Image& image, BaselineMode mode,
                                     ImageScorer scorer);

}  // namespace hiershap
