#include "hiershap/game.hpp"

#include <string>

#include "hiershap/errors.hpp"

namespace hiershap {

ValueFunction::ValueFunction(std::size_t arity, Fn fn)
    : arity_(arity), fn_(std::make_shared<const Fn>(std::move(fn))) {
  if (arity_ == 0) throw InvalidInput("value function needs at least one feature");
  if (!*fn_) throw InvalidInput("value function callable is empty");
}

double ValueFunction::operator()(const CoalitionMask& coalition) const {
  if (coalition.size() != arity_) {
    throw InvalidInput("mask length " + std::to_string(coalition.size()) +
                       " does not match game arity " + std::to_string(arity_));
  }
  return (*fn_)(coalition);
}

double EvalCache::evaluate(const ValueFunction& vf,
                           const CoalitionMask& coalition) {
  if (coalition.size() != vf.arity()) {
    throw InvalidInput("mask length " + std::to_string(coalition.size()) +
                       " does not match game arity " +
                       std::to_string(vf.arity()));
  }
  requests_.fetch_add(1, std::memory_order_relaxed);
  const std::size_t h = coalition.hash();
  Shard& shard = shards_[(h >> 7) % kShards];
  {
    std::lock_guard lock(shard.mu);
    if (auto it = shard.values.find(coalition); it != shard.values.end()) {
      return it->second;
    }
  }
  const double value = vf.evaluate_unchecked(coalition);
  std::lock_guard lock(shard.mu);
  auto [it, inserted] = shard.values.try_emplace(coalition, value);
  if (inserted) distinct_.fetch_add(1, std::memory_order_relaxed);
  return it->second;
}

EvalStats EvalCache::stats() const {
  return {distinct_.load(), requests_.load()};
}

std::size_t EvalCache::size() const {
  std::size_t n = 0;
  for (const auto& s : shards_) {
    std::lock_guard lock(s.mu);
    n += s.values.size();
  }
  return n;
}

void EvalCache::clear() {
  for (auto& s : shards_) {
    std::lock_guard lock(s.mu);
    s.values.clear();
  }
  distinct_ = 0;
  requests_ = 0;
}

double cached_evaluate(const ValueFunction& vf, EvalCache& cache,
                       const CoalitionMask& coalition) {
  return cache.evaluate(vf, coalition);
}

}  // namespace hiershap
