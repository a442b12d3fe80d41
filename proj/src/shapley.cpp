#include "hiershap/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hiershap/errors.hpp"
#include "parallel.hpp"

namespace hiershap {

Attribution exact_shapley(const ValueFunction& vf, const ShapleyOptions& options) {
  const int n = static_cast<int>(vf.arity());
  const int limit = std::min(options.max_features, 30);
  if (n > limit) {
    throw CapacityError("exact Shapley over " + std::to_string(n) +
                            " features needs 2^" + std::to_string(n) +
                            " value-function evaluations (limit 2^" +
                            std::to_string(limit) + ")",
                        std::ldexp(1.0, n), std::ldexp(1.0, limit));
  }
  const std::uint64_t n_masks = std::uint64_t{1} << n;

  std::vector<double> table(n_masks);
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t n_chunks = (n_masks + kChunk - 1) / kChunk;
  detail::parallel_for(n_chunks, options.threads, [&](std::size_t chunk) {
    const std::uint64_t end = std::min(n_masks, (chunk + 1) * kChunk);
    for (std::uint64_t bits = chunk * kChunk; bits < end; ++bits) {
      table[bits] = vf.evaluate_unchecked(CoalitionMask::from_bits(n, bits));
    }
  });

  std::vector<double> weight(n);
  for (int s = 0; s < n; ++s) weight[s] = shapley_weight(n, s);

  Attribution out;
  out.method = Method::kShapleyExact;
  out.scores.assign(n, 0.0);
  detail::parallel_for(n, options.threads, [&](std::size_t i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double phi = 0.0;
    for (std::uint64_t s = 0; s < n_masks; ++s) {
      if (s & bit) continue;
      phi += weight[std::popcount(s)] * (table[s | bit] - table[s]);
    }
    out.scores[i] = phi;
  });
  // Each feature consumes 2^(n-1) marginal pairs from the dense memo.
  out.eval_stats = {n_masks, static_cast<std::uint64_t>(n) * n_masks};
  return out;
}

Attribution permutation_shapley(const ValueFunction& vf, std::uint64_t samples,
                                std::uint64_t seed) {
  if (samples == 0) throw InvalidInput("permutation_shapley needs samples >= 1");
  const std::size_t n = vf.arity();
  std::mt19937_64 rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  EvalCache cache;
  std::vector<double> sums(n, 0.0);
  for (std::uint64_t k = 0; k < samples; ++k) {
    std::shuffle(order.begin(), order.end(), rng);
    CoalitionMask coalition(n);
    double previous = cache.evaluate(vf, coalition);
    for (int feature : order) {
      coalition.set(feature);
      const double current = cache.evaluate(vf, coalition);
      sums[feature] += current - previous;
      previous = current;
    }
  }
  Attribution out;
  out.method = Method::kShapleyMonteCarlo;
  out.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.scores[i] = sums[i] / static_cast<double>(samples);
  out.eval_stats = cache.stats();
  return out;
}

Attribution permutation_oracle_shapley(const ValueFunction& vf) {
  const std::size_t n = vf.arity();
  if (n > 8) {
    throw CapacityError("permutation oracle enumerates n! orderings; limited to 8 features, got " +
                            std::to_string(n),
                        std::tgamma(static_cast<double>(n) + 1.0), 40320.0);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sums(n, 0.0);
  std::uint64_t permutations = 0;
  std::uint64_t requests = 0;
  do {
    CoalitionMask coalition(n);
    double previous = vf(coalition);
    for (int feature : order) {
      coalition.set(feature);
      const double current = vf(coalition);
      sums[feature] += current - previous;
      previous = current;
    }
    ++permutations;
    requests += n + 1;
  } while (std::next_permutation(order.begin(), order.end()));

  Attribution out;
  out.method = Method::kShapleyExact;
  out.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.scores[i] = sums[i] / static_cast<double>(permutations);
  out.eval_stats = {requests, requests};
  return out;
}

}  // namespace hiershap
