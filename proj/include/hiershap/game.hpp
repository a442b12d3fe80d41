#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "hiershap/coalition.hpp"

namespace hiershap {

// A cooperative game: a deterministic mapping from coalitions of `arity`
// features to a real payoff.
//
// The wrapped callable must be pure. It is invoked concurrently from worker
// threads and is expected to return bit-identical values for equal masks;
// stochastic scorers are not detected and produce meaningless attributions.
class ValueFunction {
 public:
  using Fn = std::function<double(const CoalitionMask&)>;

  ValueFunction() = default;
  ValueFunction(std::size_t arity, Fn fn);

  std::size_t arity() const { return arity_; }

  // Throws InvalidInput if the mask length differs from the arity.
  double operator()(const CoalitionMask& coalition) const;

  // Skips the arity check; for inner loops that construct masks themselves.
  double evaluate_unchecked(const CoalitionMask& coalition) const {
    return (*fn_)(coalition);
  }

 private:
  std::size_t arity_ = 0;
  std::shared_ptr<const Fn> fn_;
};

struct EvalStats {
  std::uint64_t distinct_calls = 0;
  std::uint64_t total_requests = 0;
};

// Memo table over coalition masks with call accounting.
//
// Safe for concurrent use. Two threads racing on the same uncached mask may
// both run the value function, but only one insertion wins and
// `distinct_calls` counts each mask exactly once.
class EvalCache {
 public:
  EvalCache() = default;
  EvalCache(const EvalCache&) = delete;
  EvalCache& operator=(const EvalCache&) = delete;

  double evaluate(const ValueFunction& vf, const CoalitionMask& coalition);

  EvalStats stats() const;
  std::size_t size() const;
  void clear();

 private:
  static constexpr std::size_t kShards = 16;

  struct Shard {
    mutable std::mutex mu;
    std::unordered_map<CoalitionMask, double, CoalitionMaskHash> values;
  };

  std::array<Shard, kShards> shards_;
  std::atomic<std::uint64_t> distinct_{0};
  std::atomic<std::uint64_t> requests_{0};
};

// vf(coalition) through `cache`; see EvalCache for the counting rules.
double cached_evaluate(const ValueFunction& vf, EvalCache& cache,
                       const CoalitionMask& coalition);

}  // namespace hiershap
