#include "hiershap/coalition.hpp"

#include <algorithm>

#include "hiershap/errors.hpp"

namespace hiershap {

CoalitionMask CoalitionMask::full(std::size_t n_features) {
  CoalitionMask m(n_features);
  std::fill(m.words_.begin(), m.words_.end(), ~std::uint64_t{0});
  if (const std::size_t tail = n_features & 63; tail != 0) {
    m.words_.back() = (std::uint64_t{1} << tail) - 1;
  }
  return m;
}

CoalitionMask CoalitionMask::from_indices(std::size_t n_features,
                                          std::span<const int> indices) {
  CoalitionMask m(n_features);
  for (int i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= n_features) {
      throw InvalidInput("feature index " + std::to_string(i) +
                         " outside [0, " + std::to_string(n_features) + ")");
    }
    m.set(static_cast<std::size_t>(i));
  }
  return m;
}

CoalitionMask CoalitionMask::from_bits(std::size_t n_features,
                                       std::uint64_t bits) {
  if (n_features > 64) {
    throw InvalidInput("from_bits supports at most 64 features");
  }
  CoalitionMask m(n_features);
  if (n_features > 0) {
    m.words_[0] = n_features == 64 ? bits
                                   : bits & ((std::uint64_t{1} << n_features) - 1);
  }
  return m;
}

std::size_t CoalitionMask::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool CoalitionMask::empty() const {
  return std::all_of(words_.begin(), words_.end(),
                     [](std::uint64_t w) { return w == 0; });
}

bool CoalitionMask::is_subset_of(const CoalitionMask& other) const {
  for (std::size_t k = 0; k < words_.size(); ++k) {
    if (words_[k] & ~other.words_[k]) return false;
  }
  return true;
}

std::vector<int> CoalitionMask::indices() const {
  std::vector<int> out;
  out.reserve(count());
  for (std::size_t k = 0; k < words_.size(); ++k) {
    std::uint64_t w = words_[k];
    while (w != 0) {
      out.push_back(static_cast<int>(k * 64 + std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

CoalitionMask& CoalitionMask::operator|=(const CoalitionMask& other) {
  for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
  return *this;
}

CoalitionMask& CoalitionMask::operator&=(const CoalitionMask& other) {
  for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= other.words_[k];
  return *this;
}

CoalitionMask& CoalitionMask::subtract(const CoalitionMask& other) {
  for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~other.words_[k];
  return *this;
}

CoalitionMask CoalitionMask::complement() const {
  CoalitionMask out = full(size_);
  out.subtract(*this);
  return out;
}

std::size_t CoalitionMask::hash() const {
  // splitmix64 finalizer folded over the words.
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ size_;
  for (auto w : words_) {
    std::uint64_t z = w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    h ^= z ^ (z >> 31);
  }
  return static_cast<std::size_t>(h);
}

}  // namespace hiershap
