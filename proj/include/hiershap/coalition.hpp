#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace hiershap {

// Fixed-length bit vector over the feature set of a game. Bit i set means
// feature i is retained in the coalition.
class CoalitionMask {
 public:
  CoalitionMask() = default;
  explicit CoalitionMask(std::size_t n_features)
      : size_(n_features), words_((n_features + 63) / 64, 0) {}

  static CoalitionMask full(std::size_t n_features);
  static CoalitionMask from_indices(std::size_t n_features,
                                    std::span<const int> indices);
  static CoalitionMask from_indices(std::size_t n_features,
                                    std::initializer_list<int> indices) {
    return from_indices(n_features, std::span<const int>(indices.begin(), indices.size()));
  }
  // Low `n_features` bits of `bits` (n_features <= 64).
  static CoalitionMask from_bits(std::size_t n_features, std::uint64_t bits);

  std::size_t size() const { return size_; }
  std::span<const std::uint64_t> words() const { return words_; }

  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) {
    words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }

  std::size_t count() const;
  bool empty() const;
  bool is_subset_of(const CoalitionMask& other) const;
  std::vector<int> indices() const;
  // Calls f(i) for every set bit, in increasing order.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      for (std::uint64_t w = words_[k]; w != 0; w &= w - 1) {
        f(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
      }
    }
  }
  // First word, for masks of at most 64 features.
  std::uint64_t low_bits() const { return words_.empty() ? 0 : words_[0]; }

  CoalitionMask& operator|=(const CoalitionMask& other);
  CoalitionMask& operator&=(const CoalitionMask& other);
  // Clears every bit set in `other`.
  CoalitionMask& subtract(const CoalitionMask& other);
  CoalitionMask complement() const;

  friend CoalitionMask operator|(CoalitionMask a, const CoalitionMask& b) {
    return a |= b;
  }
  friend CoalitionMask operator&(CoalitionMask a, const CoalitionMask& b) {
    return a &= b;
  }
  bool operator==(const CoalitionMask& other) const = default;

  std::size_t hash() const;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct CoalitionMaskHash {
  std::size_t operator()(const CoalitionMask& m) const { return m.hash(); }
};

}  // namespace hiershap
