#pragma once

#include <cstddef>
#include <vector>

namespace hiershap {

// Row-major single-channel grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using GrayImage = Grid<double>;

// Interleaved multi-channel image with real-valued samples in [0, 255].
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, double fill = 0.0);
  Image(int width, int height, int channels, std::vector<double> samples);
  static Image from_gray(const GrayImage& gray);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const { return pixel_count() == 0; }

  double& at(int x, int y, int c = 0) { return data_[offset(x, y, c)]; }
  double at(int x, int y, int c = 0) const { return data_[offset(x, y, c)]; }
  // Sample `c` of the pixel with row-major index `p`.
  double& sample(std::size_t p, int c = 0) { return data_[p * channels_ + c]; }
  double sample(std::size_t p, int c = 0) const {
    return data_[p * channels_ + c];
  }

  const std::vector<double>& samples() const { return data_; }
  std::vector<double>& samples() { return data_; }

  // Luma (0.299 R + 0.587 G + 0.114 B) for 3 channels, copy otherwise.
  GrayImage to_gray() const;
  std::vector<double> channel_means() const;

  bool operator==(const Image&) const = default;

 private:
  std::size_t offset(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<double> data_;
};

}  // namespace hiershap
