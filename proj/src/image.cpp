#include "hiershap/image.hpp"

#include "hiershap/errors.hpp"

namespace hiershap {

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0) throw InvalidInput("negative image dimensions");
  if (channels != 1 && channels != 3) {
    throw InvalidInput("images must have 1 or 3 channels");
  }
  data_.assign(pixel_count() * channels_, fill);
}

Image::Image(int width, int height, int channels, std::vector<double> samples)
    : Image(width, height, channels) {
  if (samples.size() != data_.size()) {
    throw InvalidInput("sample count does not match image dimensions");
  }
  data_ = std::move(samples);
}

Image Image::from_gray(const GrayImage& gray) {
  return Image(gray.width(), gray.height(), 1, gray.data());
}

GrayImage Image::to_gray() const {
  GrayImage out(width_, height_);
  for (std::size_t p = 0; p < pixel_count(); ++p) {
    out[p] = channels_ == 3 ? 0.299 * sample(p, 0) + 0.587 * sample(p, 1) +
                                  0.114 * sample(p, 2)
                            : sample(p, 0);
  }
  return out;
}

std::vector<double> Image::channel_means() const {
  std::vector<double> means(channels_, 0.0);
  if (empty()) return means;
  for (std::size_t p = 0; p < pixel_count(); ++p) {
    for (int c = 0; c < channels_; ++c) means[c] += sample(p, c);
  }
  for (auto& m : means) m /= static_cast<double>(pixel_count());
  return means;
}

}  // namespace hiershap
