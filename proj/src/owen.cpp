#include "hiershap/owen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hiershap/errors.hpp"
#include "parallel.hpp"

namespace hiershap {
namespace {

void require_arity(const ValueFunction& vf, const PartitionHierarchy& h) {
  if (vf.arity() != static_cast<std::size_t>(h.n_features())) {
    throw InvalidInput("game arity " + std::to_string(vf.arity()) +
                       " does not match hierarchy over " + std::to_string(h.n_features()) +
                       " features");
  }
}

PartitionHierarchy prepared(const PartitionHierarchy& h) {
  PartitionHierarchy out = normalize_depth(h);
  require_valid(out);
  return out;
}

// Shapley kernel per set size, indexed [k][s].
class KernelTable {
 public:
  double operator()(int k, int s) {
    if (k >= static_cast<int>(rows_.size())) rows_.resize(k + 1);
    auto& row = rows_[k];
    if (row.empty()) {
      row.resize(k);
      for (int j = 0; j < k; ++j) row[j] = shapley_weight(k, j);
    }
    return row[s];
  }

 private:
  std::vector<std::vector<double>> rows_;
};

}  // namespace

SiblingContext sibling_context(const PartitionHierarchy& h, int feature) {
  SiblingContext ctx;
  ctx.feature = feature;
  for (int id : h.ancestor_chain(feature)) {
    const auto& parent = h.node(h.node(id).parent);
    SiblingContext::Level level;
    level.ancestor = id;
    level.set_size = static_cast<int>(parent.children.size());
    for (int c : parent.children) {
      if (c != id) level.siblings.push_back(c);
    }
    ctx.levels.push_back(std::move(level));
  }
  return ctx;
}

Attribution owen_single_level(const ValueFunction& vf, const PartitionHierarchy& h,
                              EvalCache* cache) {
  require_valid(h);
  require_arity(vf, h);
  if (h.depth() != 2) {
    throw ValidationError("single-level Owen needs a root -> groups -> singletons hierarchy, got depth " +
                          std::to_string(h.depth()));
  }
  EvalCache local;
  EvalCache& memo = cache ? *cache : local;
  const EvalStats before = memo.stats();

  const int n = h.n_features();
  const auto& groups = h.node(PartitionHierarchy::root()).children;
  const int K = static_cast<int>(groups.size());
  std::vector<CoalitionMask> group_masks;
  for (int g : groups) {
    group_masks.push_back(CoalitionMask::from_indices(n, h.node(g).members));
  }

  Attribution out;
  out.method = Method::kOwenSingle;
  out.scores.assign(n, 0.0);
  for (int k = 0; k < K; ++k) {
    const auto& members = h.node(groups[k]).members;
    const int m = static_cast<int>(members.size());
    if (K - 1 + m - 1 > 40) {
      throw CapacityError("single-level Owen enumeration too large",
                          std::ldexp(1.0, K - 1 + m - 1), std::ldexp(1.0, 40));
    }
    std::vector<int> others;
    for (int j = 0; j < K; ++j) {
      if (j != k) others.push_back(j);
    }
    for (int i : members) {
      std::vector<int> inner;
      for (int f : members) {
        if (f != i) inner.push_back(f);
      }
      double phi = 0.0;
      for (std::uint64_t t = 0; t < (std::uint64_t{1} << others.size()); ++t) {
        CoalitionMask outer(n);
        for (std::size_t j = 0; j < others.size(); ++j) {
          if (t >> j & 1) outer |= group_masks[others[j]];
        }
        const double w_outer = shapley_weight(K, std::popcount(t));
        double inner_sum = 0.0;
        for (std::uint64_t s = 0; s < (std::uint64_t{1} << inner.size()); ++s) {
          CoalitionMask coalition = outer;
          for (std::size_t j = 0; j < inner.size(); ++j) {
            if (s >> j & 1) coalition.set(inner[j]);
          }
          const double without = memo.evaluate(vf, coalition);
          coalition.set(i);
          const double with = memo.evaluate(vf, coalition);
          inner_sum += shapley_weight(m, std::popcount(s)) * (with - without);
        }
        phi += w_outer * inner_sum;
      }
      out.scores[i] = phi;
    }
  }
  const EvalStats after = memo.stats();
  out.eval_stats = {after.distinct_calls - before.distinct_calls,
                    after.total_requests - before.total_requests};
  return out;
}

Attribution owen_multilevel(const ValueFunction& vf, const PartitionHierarchy& input,
                            const OwenOptions& options, EvalCache* cache) {
  const PartitionHierarchy h = prepared(input);
  require_arity(vf, h);
  const int n = h.n_features();

  std::vector<SiblingContext> contexts(n);
  for (int i = 0; i < n; ++i) {
    contexts[i] = sibling_context(h, i);
    double combos = 1.0;
    for (const auto& level : contexts[i].levels) combos *= std::ldexp(1.0, level.set_size - 1);
    if (combos > options.max_combinations_per_feature) {
      throw CapacityError("Owen enumeration for feature " + std::to_string(i) + " needs " +
                              std::to_string(static_cast<long double>(combos)) +
                              " subset combinations (limit " +
                              std::to_string(static_cast<long double>(
                                  options.max_combinations_per_feature)) +
                              "); predicted_eval_count = " +
                              std::to_string(predicted_eval_count(h)),
                          combos, options.max_combinations_per_feature);
    }
  }

  std::vector<CoalitionMask> node_masks;
  node_masks.reserve(h.nodes().size());
  for (const auto& node : h.nodes()) node_masks.push_back(CoalitionMask::from_indices(n, node.members));

  EvalCache local;
  EvalCache& memo = cache ? *cache : local;
  const EvalStats before = memo.stats();

  Attribution out;
  out.method = Method::kOwenMulti;
  out.scores.assign(n, 0.0);

  detail::parallel_for(n, options.threads, [&](std::size_t feature) {
    const auto& levels = contexts[feature].levels;
    KernelTable kernel;
    CoalitionMask coalition(n);
    double phi = 0.0;

    // Walk level by level; within a level, decide include/exclude for each
    // sibling in turn, then fold the level's kernel weight in.
    auto visit = [&](auto&& self, std::size_t level, std::size_t sibling, int chosen,
                     double weight) -> void {
      if (level == levels.size()) {
        const double without = memo.evaluate(vf, coalition);
        coalition.set(feature);
        const double with = memo.evaluate(vf, coalition);
        coalition.reset(feature);
        phi += weight * (with - without);
        return;
      }
      const auto& lv = levels[level];
      if (sibling == lv.siblings.size()) {
        self(self, level + 1, 0, 0, weight * kernel(lv.set_size, chosen));
        return;
      }
      self(self, level, sibling + 1, chosen, weight);
      const CoalitionMask& block = node_masks[lv.siblings[sibling]];
      coalition |= block;
      self(self, level, sibling + 1, chosen + 1, weight);
      coalition.subtract(block);
    };
    visit(visit, 0, 0, 0, 1.0);
    out.scores[feature] = phi;
  });

  const EvalStats after = memo.stats();
  out.eval_stats = {after.distinct_calls - before.distinct_calls,
                    after.total_requests - before.total_requests};
  return out;
}

std::uint64_t predicted_eval_count(const PartitionHierarchy& input) {
  const PartitionHierarchy h = normalize_depth(input);
  std::uint64_t best = 0;
  for (int i = 0; i < h.n_features(); ++i) {
    int exponent = 0;
    for (const auto& level : sibling_context(h, i).levels) exponent += level.set_size;
    const std::uint64_t count = exponent >= 64 ? std::numeric_limits<std::uint64_t>::max()
                                               : std::uint64_t{1} << exponent;
    best = std::max(best, count);
  }
  return best;
}

OwenCost owen_cost(const PartitionHierarchy& input) {
  const PartitionHierarchy h = normalize_depth(input);
  OwenCost cost;
  cost.predicted_per_feature = predicted_eval_count(h);
  for (int i = 0; i < h.n_features(); ++i) {
    double combos = 1.0;
    for (const auto& level : sibling_context(h, i).levels) combos *= std::ldexp(1.0, level.set_size - 1);
    cost.max_enumerated_per_feature = std::max(cost.max_enumerated_per_feature, combos);
    cost.total_requests += 2.0 * combos;
  }
  return cost;
}

double consistent_permutation_count(const PartitionHierarchy& h) {
  double count = 1.0;
  for (const auto& node : h.nodes()) count *= std::tgamma(node.children.size() + 1.0);
  return count;
}

Attribution nested_permutation_oracle(const ValueFunction& vf, const PartitionHierarchy& h,
                                      double max_permutations) {
  require_valid(h);
  require_arity(vf, h);
  const double count = consistent_permutation_count(h);
  if (count > max_permutations) {
    throw CapacityError("nested permutation oracle needs " +
                            std::to_string(static_cast<long double>(count)) + " orderings",
                        count, max_permutations);
  }

  // All orderings of a node's features consistent with its subtree.
  auto orderings = [&](auto&& self, int id) -> std::vector<std::vector<int>> {
    const auto& node = h.node(id);
    if (node.children.empty()) return {node.members};
    std::vector<std::vector<std::vector<int>>> per_child;
    for (int c : node.children) per_child.push_back(self(self, c));
    std::vector<int> order(node.children.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<int>> result;
    do {
      std::vector<std::vector<int>> partial{{}};
      for (int idx : order) {
        std::vector<std::vector<int>> next;
        next.reserve(partial.size() * per_child[idx].size());
        for (const auto& prefix : partial) {
          for (const auto& tail : per_child[idx]) {
            auto joined = prefix;
            joined.insert(joined.end(), tail.begin(), tail.end());
            next.push_back(std::move(joined));
          }
        }
        partial = std::move(next);
      }
      result.insert(result.end(), std::make_move_iterator(partial.begin()),
                    std::make_move_iterator(partial.end()));
    } while (std::next_permutation(order.begin(), order.end()));
    return result;
  };

  const int n = h.n_features();
  std::vector<double> sums(n, 0.0);
  std::uint64_t requests = 0;
  const auto all = orderings(orderings, PartitionHierarchy::root());
  for (const auto& perm : all) {
    CoalitionMask coalition(n);
    double previous = vf(coalition);
    for (int f : perm) {
      coalition.set(f);
      const double current = vf(coalition);
      sums[f] += current - previous;
      previous = current;
    }
    requests += perm.size() + 1;
  }
  Attribution out;
  out.method = Method::kOwenMulti;
  out.scores.resize(n);
  for (int i = 0; i < n; ++i) out.scores[i] = sums[i] / static_cast<double>(all.size());
  out.eval_stats = {requests, requests};
  return out;
}

}  // namespace hiershap
