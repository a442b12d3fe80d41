#pragma once

#include <cstdint>
#include <vector>

#include "hiershap/attribution.hpp"
#include "hiershap/game.hpp"
#include "hiershap/hierarchy.hpp"

namespace hiershap {

struct OwenOptions {
  // Upper bound on subset combinations enumerated for any single feature
  // (the product over levels of 2^(siblings - 1)).
  double max_combinations_per_feature = 1 << 20;
  int threads = 1;
};

// For one feature: at each level, its ancestor and the ancestor's sibling
// set under the level-(l-1) parent.
struct SiblingContext {
  struct Level {
    int ancestor = -1;
    std::vector<int> siblings;  // excludes the ancestor
    int set_size = 0;           // siblings + ancestor
  };
  int feature = -1;
  std::vector<Level> levels;    // level 1 first, leaf level last
};

SiblingContext sibling_context(const PartitionHierarchy& h, int feature);

// Single-level Owen value for a root -> groups -> singletons hierarchy:
//   phi_i = sum_{T subset of other groups} w(K, |T|)
//           sum_{S subset of G_k \ {i}} w(|G_k|, |S|) [f(T u S u i) - f(T u S)]
// with w the Shapley kernel. Throws ValidationError unless h is valid with
// depth 2.
Attribution owen_single_level(const ValueFunction& vf, const PartitionHierarchy& h,
                              EvalCache* cache = nullptr);

// Multi-level Owen value. For each feature, enumerates one subset of the
// ancestor's siblings per level, weights each choice by the product of
// per-level Shapley kernels, and evaluates the marginal of the feature on
// the union of the selected coalitions. Non-uniform depth is normalized
// first. Evaluations go through `cache` when given (a private cache
// otherwise); eval_stats reports that cache's counters for this call.
Attribution owen_multilevel(const ValueFunction& vf, const PartitionHierarchy& h,
                            const OwenOptions& options = {}, EvalCache* cache = nullptr);

// Per-feature subset-combination count prod_l 2^(sibling set size at l),
// maximised over features (saturates at UINT64_MAX). A 2x5x5 balanced
// hierarchy gives 2^12 = 4096.
std::uint64_t predicted_eval_count(const PartitionHierarchy& h);

struct OwenCost {
  std::uint64_t predicted_per_feature = 0;  // predicted_eval_count
  double max_enumerated_per_feature = 0;    // max_i prod_l 2^(k_l - 1)
  double total_requests = 0;                // sum_i 2 * prod_l 2^(k_l - 1)
};

OwenCost owen_cost(const PartitionHierarchy& h);

// Mean marginal over every ordering in which, at every node, the features
// of each child appear contiguously. Throws CapacityError when the number
// of such orderings exceeds `max_permutations`.
Attribution nested_permutation_oracle(const ValueFunction& vf, const PartitionHierarchy& h,
                                      double max_permutations = 1e6);

// Number of orderings nested_permutation_oracle would enumerate.
double consistent_permutation_count(const PartitionHierarchy& h);

}  // namespace hiershap
