#include "hiershap/masked_game.hpp"

#include "hiershap/errors.hpp"

namespace hiershap {

BaselineMode parse_baseline_mode(const std::string& name) {
  if (name == "mean") return BaselineMode::kMean;
  if (name == "zero") return BaselineMode::kZero;
  throw InvalidInput("unknown baseline mode '" + name + "' (expected mean|zero)");
}

std::string to_string(BaselineMode mode) {
  return mode == BaselineMode::kMean ? "mean" : "zero";
}

std::vector<double> baseline_values(const Image& image, BaselineMode mode) {
  if (mode == BaselineMode::kZero) {
    return std::vector<double>(image.channels(), 0.0);
  }
  return image.channel_means();
}

void apply_mask_into(const Image& image, const CoalitionMask& retained,
                     const std::vector<double>& baseline, Image& out) {
  if (retained.size() != image.pixel_count()) {
    throw InvalidInput("mask length differs from the pixel count");
  }
  out = image;
  const int channels = image.channels();
  const auto words = retained.words();
  const std::size_t n = image.pixel_count();
  for (std::size_t k = 0; k < words.size(); ++k) {
    std::uint64_t dropped = ~words[k];
    if (k + 1 == words.size() && n % 64 != 0) dropped &= (std::uint64_t{1} << (n % 64)) - 1;
    for (; dropped != 0; dropped &= dropped - 1) {
      const std::size_t p = k * 64 + static_cast<std::size_t>(std::countr_zero(dropped));
      for (int c = 0; c < channels; ++c) out.sample(p, c) = baseline[c];
    }
  }
}

Image apply_mask(const Image& image, const CoalitionMask& retained,
                 const std::vector<double>& baseline) {
  Image out;
  apply_mask_into(image, retained, baseline, out);
  return out;
}

ValueFunction make_masked_image_game(const Image& image, BaselineMode mode,
                                     ImageScorer scorer) {
  if (image.empty()) throw InvalidInput("masked image game needs a non-empty image");
  if (!scorer.fn) throw InvalidInput("scorer '" + scorer.name + "' has no callable");
  auto shared_image = std::make_shared<const Image>(image);
  auto baseline = baseline_values(image, mode);
  if (!scorer.needs_image) {
    return ValueFunction(image.pixel_count(),
                         [shared_image, fn = std::move(scorer.fn)](const CoalitionMask& retained) {
                           return fn(*shared_image, retained);
                         });
  }
  return ValueFunction(
      image.pixel_count(),
      [shared_image, baseline = std::move(baseline),
       fn = std::move(scorer.fn)](const CoalitionMask& retained) {
        thread_local Image masked;
        apply_mask_into(*shared_image, retained, baseline, masked);
        return fn(masked, retained);
      });
}

}  // namespace hiershap
