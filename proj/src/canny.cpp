#include "hiershap/canny.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>
#include <tuple>

#include "hiershap/errors.hpp"

namespace hiershap::seg {
namespace {

// Magnitudes below this are numerical noise from flat regions.
constexpr double kZeroMagnitude = 1e-9;

int clamp_coord(int v, int hi) { return std::clamp(v, 0, hi - 1); }

constexpr int kDx4[4] = {1, -1, 0, 0};
constexpr int kDy4[4] = {0, 0, 1, -1};

}  // namespace

std::size_t EdgeMap::edge_count() const {
  return static_cast<std::size_t>(std::count(edges.data().begin(), edges.data().end(), 1));
}

std::vector<double> gaussian_kernel(double sigma, int ksize) {
  if (ksize < 1 || ksize % 2 == 0) throw InvalidInput("Gaussian ksize must be odd and positive");
  if (!(sigma > 0.0)) throw InvalidInput("Gaussian sigma must be positive");
  std::vector<double> k(ksize);
  const int c = ksize / 2;
  for (int i = 0; i < ksize; ++i) {
    const double d = i - c;
    k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  const double total = std::accumulate(k.begin(), k.end(), 0.0);
  for (auto& v : k) v /= total;
  return k;
}

GrayImage gaussian_smooth(const GrayImage& img, double sigma, int ksize) {
  const auto k = gaussian_kernel(sigma, ksize);
  const int c = ksize / 2;
  const int w = img.width();
  const int h = img.height();
  GrayImage tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = 0; i < ksize; ++i) s += k[i] * img(clamp_coord(x + i - c, w), y);
      tmp(x, y) = s;
    }
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = 0; i < ksize; ++i) s += k[i] * tmp(x, clamp_coord(y + i - c, h));
      out(x, y) = s;
    }
  }
  return out;
}

Image gaussian_smooth(const Image& img, double sigma, int ksize) {
  Image out(img.width(), img.height(), img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    GrayImage plane(img.width(), img.height());
    for (std::size_t p = 0; p < img.pixel_count(); ++p) plane[p] = img.sample(p, c);
    const GrayImage blurred = gaussian_smooth(plane, sigma, ksize);
    for (std::size_t p = 0; p < img.pixel_count(); ++p) out.sample(p, c) = blurred[p];
  }
  return out;
}

Gradients sobel_gradients(const GrayImage& gray) {
  const int w = gray.width();
  const int h = gray.height();
  Gradients g{GrayImage(w, h), GrayImage(w, h), GrayImage(w, h), GrayImage(w, h)};
  auto at = [&](int x, int y) { return gray(clamp_coord(x, w), clamp_coord(y, h)); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
      g.gx(x, y) = gx;
      g.gy(x, y) = gy;
      g.magnitude(x, y) = std::sqrt(gx * gx + gy * gy);
      double theta = std::atan2(gy, gx);
      if (theta < 0) theta += std::numbers::pi;
      if (theta >= std::numbers::pi) theta -= std::numbers::pi;
      g.direction(x, y) = theta;
    }
  }
  return g;
}

GrayImage non_max_suppression(const GrayImage& magnitude, const GrayImage& direction) {
  if (magnitude.width() != direction.width() || magnitude.height() != direction.height()) {
    throw InvalidInput("magnitude and direction grids differ in shape");
  }
  const int w = magnitude.width();
  const int h = magnitude.height();
  // Step along the gradient for bins 0, 45, 90, 135 degrees.
  constexpr int kStep[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  GrayImage out(w, h);
  auto mag = [&](int x, int y) { return magnitude.in_bounds(x, y) ? magnitude(x, y) : 0.0; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = magnitude(x, y);
      if (m <= kZeroMagnitude) continue;
      const int bin = static_cast<int>(std::floor((direction(x, y) + std::numbers::pi / 8) /
                                                  (std::numbers::pi / 4))) % 4;
      const int dx = kStep[bin][0];
      const int dy = kStep[bin][1];
      if (m >= mag(x + dx, y + dy) && m > mag(x - dx, y - dy)) out(x, y) = m;
    }
  }
  return out;
}

double percentile(const std::vector<double>& sorted, double pct) {
  if (sorted.empty()) return 0.0;
  const double rank = pct / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (rank - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ThresholdBasis parse_threshold_basis(const std::string& name) {
  if (name == "gradient") return ThresholdBasis::kGradient;
  if (name == "thinned") return ThresholdBasis::kThinned;
  throw InvalidInput("unknown threshold basis '" + name + "' (expected gradient or thinned)");
}

std::string to_string(ThresholdBasis basis) {
  return basis == ThresholdBasis::kGradient ? "gradient" : "thinned";
}

EdgeMap double_threshold_hysteresis(const GrayImage& thinned, double pct_lower, double pct_upper,
                                    const GrayImage* basis) {
  if (!(pct_lower >= 0.0 && pct_lower < pct_upper && pct_upper <= 100.0)) {
    throw InvalidInput("hysteresis percentiles need 0 <= lower < upper <= 100");
  }
  const int w = thinned.width();
  const int h = thinned.height();
  EdgeMap out{Grid<std::uint8_t>(w, h, 0), 0.0, 0.0, pct_lower, pct_upper};

  if (basis && (basis->width() != w || basis->height() != h)) {
    throw InvalidInput("threshold basis and thinned grid differ in shape");
  }
  std::vector<double> nonzero;
  for (double v : (basis ? *basis : thinned).data()) {
    if (v > kZeroMagnitude) nonzero.push_back(v);
  }
  if (nonzero.empty()) return out;
  std::sort(nonzero.begin(), nonzero.end());
  out.t_lower = percentile(nonzero, pct_lower);
  out.t_upper = percentile(nonzero, pct_upper);

  std::deque<std::pair<int, int>> frontier;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (thinned(x, y) > kZeroMagnitude && thinned(x, y) >= out.t_upper) {
        out.edges(x, y) = 1;
        frontier.emplace_back(x, y);
      }
    }
  }
  while (!frontier.empty()) {
    const auto [x, y] = frontier.front();
    frontier.pop_front();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (!thinned.in_bounds(nx, ny) || out.edges(nx, ny)) continue;
        const double v = thinned(nx, ny);
        if (v > kZeroMagnitude && v >= out.t_lower) {
          out.edges(nx, ny) = 1;
          frontier.emplace_back(nx, ny);
        }
      }
    }
  }
  return out;
}

EdgeMap dilate_edges(const EdgeMap& edges, int ksize) {
  if (ksize < 1) throw InvalidInput("dilation ksize must be >= 1");
  EdgeMap out = edges;
  const int w = edges.edges.width();
  const int h = edges.edges.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = 0;
      for (int dy = 0; dy < ksize && !v; ++dy) {
        for (int dx = 0; dx < ksize && !v; ++dx) {
          if (edges.edges.in_bounds(x + dx, y + dy)) v = edges.edges(x + dx, y + dy);
        }
      }
      out.edges(x, y) = v;
    }
  }
  return out;
}

SegmentLabels connected_components(const EdgeMap& edge_map, const GrayImage& gray, int min_size) {
  const auto& edges = edge_map.edges;
  const int w = edges.width();
  const int h = edges.height();
  if (gray.width() != w || gray.height() != h) {
    throw InvalidInput("edge map and intensity image differ in shape");
  }
  Grid<int> labels(w, h, -1);
  int count = 0;

  // Components of non-edge pixels.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (edges(x, y) || labels(x, y) >= 0) continue;
      std::deque<std::pair<int, int>> queue{{x, y}};
      labels(x, y) = count;
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        for (int k = 0; k < 4; ++k) {
          const int nx = cx + kDx4[k];
          const int ny = cy + kDy4[k];
          if (labels.in_bounds(nx, ny) && !edges(nx, ny) && labels(nx, ny) < 0) {
            labels(nx, ny) = count;
            queue.emplace_back(nx, ny);
          }
        }
      }
      ++count;
    }
  }
  if (count == 0) {
    std::fill(labels.data().begin(), labels.data().end(), 0);
    return {std::move(labels), 1};
  }

  // Absorb edge pixels. Means come from the pre-absorption components.
  std::vector<double> sum(count, 0.0);
  std::vector<int> size(count, 0);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (labels[p] >= 0) {
      sum[labels[p]] += gray[p];
      ++size[labels[p]];
    }
  }
  std::vector<double> mean(count);
  for (int s = 0; s < count; ++s) mean[s] = sum[s] / size[s];

  // Priority flood: an unlabeled pixel next to segment s is offered to s at
  // cost |gray - mean(s)|; the cheapest offer wins (then lower label, then
  // scan order).
  using Offer = std::tuple<double, int, std::size_t>;
  std::priority_queue<Offer, std::vector<Offer>, std::greater<>> offers;
  auto offer_neighbours = [&](int x, int y, int l) {
    for (int k = 0; k < 4; ++k) {
      const int nx = x + kDx4[k];
      const int ny = y + kDy4[k];
      if (labels.in_bounds(nx, ny) && labels(nx, ny) < 0) {
        offers.emplace(std::abs(gray(nx, ny) - mean[l]), l, labels.index(nx, ny));
      }
    }
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (labels(x, y) >= 0) offer_neighbours(x, y, labels(x, y));
    }
  }
  while (!offers.empty()) {
    const auto [cost, l, p] = offers.top();
    offers.pop();
    if (labels[p] >= 0) continue;
    labels[p] = l;
    offer_neighbours(static_cast<int>(p % w), static_cast<int>(p / w), l);
  }

  // Fold undersized segments into the neighbour with the longest shared boundary.
  std::vector<int> seg_size(count, 0);
  for (int l : labels.data()) ++seg_size[l];
  int alive = count;
  while (alive > 1) {
    int smallest = -1;
    for (int s = 0; s < count; ++s) {
      if (seg_size[s] > 0 && seg_size[s] < min_size &&
          (smallest < 0 || seg_size[s] < seg_size[smallest])) {
        smallest = s;
      }
    }
    if (smallest < 0) break;
    std::map<int, int> shared;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (labels(x, y) != smallest) continue;
        for (int k = 0; k < 4; ++k) {
          const int nx = x + kDx4[k];
          const int ny = y + kDy4[k];
          if (labels.in_bounds(nx, ny) && labels(nx, ny) != smallest) ++shared[labels(nx, ny)];
        }
      }
    }
    int target = -1;
    int best = 0;
    for (const auto& [l, n] : shared) {
      if (n > best) {
        best = n;
        target = l;
      }
    }
    if (target < 0) break;
    for (auto& l : labels.data()) {
      if (l == smallest) l = target;
    }
    seg_size[target] += seg_size[smallest];
    seg_size[smallest] = 0;
    --alive;
  }

  // Renumber by first pixel in scan order.
  std::vector<int> remap(count, -1);
  int next = 0;
  for (auto& l : labels.data()) {
    if (remap[l] < 0) remap[l] = next++;
    l = remap[l];
  }
  return {std::move(labels), next};
}

InitialSegmentation canny_segments(const Image& image, const CannyConfig& config) {
  if (image.empty()) throw InvalidInput("cannot segment an empty image");
  const GrayImage gray = image.to_gray();
  const GrayImage smooth = gaussian_smooth(gray, config.sigma, config.gaussian_ksize);
  const Gradients grad = sobel_gradients(smooth);
  const GrayImage thin = non_max_suppression(grad.magnitude, grad.direction);
  InitialSegmentation out;
  const GrayImage* basis = config.threshold_basis == ThresholdBasis::kGradient ? &grad.magnitude : nullptr;
  out.edges = double_threshold_hysteresis(thin, config.pct_lower, config.pct_upper, basis);
  out.dilated = dilate_edges(out.edges, config.dilate_ksize);
  out.segments = connected_components(out.dilated, gray, config.min_segment_size);
  return out;
}

}  // namespace hiershap::seg
