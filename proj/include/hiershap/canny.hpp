#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hiershap/image.hpp"

namespace hiershap::seg {

// Which magnitudes the hysteresis percentiles are taken over. Both skip
// zeros. kThinned uses the NMS output only; on clean synthetic images that
// population is the contour itself, so the 75th percentile discards most of
// it.
enum class ThresholdBasis { kGradient, kThinned };

ThresholdBasis parse_threshold_basis(const std::string& name);
std::string to_string(ThresholdBasis basis);

struct CannyConfig {
  double sigma = 1.0;
  int gaussian_ksize = 5;
  double pct_lower = 75.0;  // T_lower as a percentile of the nonzero basis magnitudes
  double pct_upper = 90.0;  // T_upper likewise
  int dilate_ksize = 2;
  int min_segment_size = 16;
  ThresholdBasis threshold_basis = ThresholdBasis::kGradient;
};

struct Gradients {
  GrayImage gx;
  GrayImage gy;
  GrayImage magnitude;
  GrayImage direction;  // radians in [0, pi)
};

struct EdgeMap {
  Grid<std::uint8_t> edges;  // 1 = edge pixel
  double t_lower = 0.0;
  double t_upper = 0.0;
  double pct_lower = 0.0;
  double pct_upper = 0.0;

  std::size_t edge_count() const;
};

// Normalized 1-D Gaussian; ksize must be odd and sigma positive.
std::vector<double> gaussian_kernel(double sigma, int ksize);

// Separable Gaussian blur with edge-replicate padding.
GrayImage gaussian_smooth(const GrayImage& img, double sigma, int ksize);
Image gaussian_smooth(const Image& img, double sigma, int ksize);

// 3x3 Sobel with edge-replicate padding; y grows downwards.
Gradients sobel_gradients(const GrayImage& gray);

// Quantizes directions to 0/45/90/135 degrees and zeroes pixels that are not
// a maximum along their gradient. Plateaus two pixels wide keep the first
// pixel so ridges stay one pixel thick.
GrayImage non_max_suppression(const GrayImage& magnitude, const GrayImage& direction);

// Linear-interpolated percentile (0..100) of `values`, which must be sorted.
double percentile(const std::vector<double>& sorted, double pct);

// Thresholds are percentiles of the nonzero values of `basis` (the thinned
// grid itself when null). Strong pixels (>= T_upper) are kept; weak pixels
// (>= T_lower) survive when 8-connected to a strong pixel through weak or
// strong pixels.
EdgeMap double_threshold_hysteresis(const GrayImage& thinned, double pct_lower = 75.0,
                                    double pct_upper = 90.0, const GrayImage* basis = nullptr);

// Dilation with a ksize x ksize structuring element anchored at its top-left
// cell: out(x, y) = OR of in over [x, x+k) x [y, y+k).
EdgeMap dilate_edges(const EdgeMap& edges, int ksize = 2);

struct SegmentLabels {
  Grid<int> labels;  // segment id per pixel
  int count = 0;
};

// 4-connected components of the non-edge pixels, labelled in scan order.
// Edge pixels are then absorbed by a priority flood that always grows the
// segment whose mean intensity is closest to the claimed pixel, and segments smaller than
// `min_size` are merged into the neighbour sharing the longest boundary.
// Labels are finally renumbered by first pixel in scan order.
SegmentLabels connected_components(const EdgeMap& edges, const GrayImage& gray,
                                   int min_size = 16);

struct InitialSegmentation {
  EdgeMap edges;    // after hysteresis
  EdgeMap dilated;  // after dilation
  SegmentLabels segments;
};

// Full Canny pipeline followed by connected_components.
InitialSegmentation canny_segments(const Image& image, const CannyConfig& config = {});

}  // namespace hiershap::seg
