#pragma once

#include <cstdint>

#include "hiershap/attribution.hpp"
#include "hiershap/game.hpp"

namespace hiershap {

struct ShapleyOptions {
  // Exact enumeration visits 2^n masks; 24 features is 16.7M evaluations.
  int max_features = 24;
  int threads = 1;
};

// Exact Shapley values by full subset enumeration. Every mask is evaluated
// once into a dense table, so eval_stats.distinct_calls == 2^n.
Attribution exact_shapley(const ValueFunction& vf, const ShapleyOptions& options = {});

// Monte Carlo estimate averaging marginals over `samples` uniformly random
// permutations drawn from a seeded mt19937_64. Efficiency holds exactly.
Attribution permutation_shapley(const ValueFunction& vf, std::uint64_t samples,
                                std::uint64_t seed);

// Mean marginal over all n! orderings. Independent of exact_shapley's
// subset enumeration; limited to n <= 8.
Attribution permutation_oracle_shapley(const ValueFunction& vf);

}  // namespace hiershap
