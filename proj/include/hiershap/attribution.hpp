#pragma once

#include <string>
#include <vector>

#include "hiershap/game.hpp"

namespace hiershap {

enum class Method { kShapleyExact, kShapleyMonteCarlo, kOwenSingle, kOwenMulti };

std::string to_string(Method method);

// Per-feature attribution scores plus the evaluation counters of the run
// that produced them.
struct Attribution {
  std::vector<double> scores;
  EvalStats eval_stats;
  Method method = Method::kShapleyExact;

  double sum() const;
};

// Classical Shapley kernel |S|!(n-|S|-1)!/n! = 1 / (n * C(n-1, |S|)).
// Exact integer binomials up to n = 20, log-factorials beyond.
double shapley_weight(int n, int coalition_size);

// Binomial coefficient in 64-bit integers; throws CapacityError on overflow.
unsigned long long binomial(int n, int k);

}  // namespace hiershap
