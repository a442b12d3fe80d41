#include "hiershap/attribution.hpp"

#include <cmath>
#include <numeric>

#include "hiershap/errors.hpp"

namespace hiershap {

std::string to_string(Method method) {
  switch (method) {
    case Method::kShapleyExact: return "shapley_exact";
    case Method::kShapleyMonteCarlo: return "shapley_mc";
    case Method::kOwenSingle: return "owen_single";
    case Method::kOwenMulti: return "owen_multi";
  }
  return "unknown";
}

double Attribution::sum() const {
  return std::accumulate(scores.begin(), scores.end(), 0.0);
}

unsigned long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned long long result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is always integral.
    const unsigned long long num = static_cast<unsigned long long>(n - k + i);
    if (result > ~0ull / num) throw CapacityError("binomial overflow", n, 64);
    result = result * num / static_cast<unsigned long long>(i);
  }
  return result;
}

double shapley_weight(int n, int coalition_size) {
  if (n <= 0 || coalition_size < 0 || coalition_size >= n) {
    throw InvalidInput("shapley_weight needs 0 <= |S| < n");
  }
  if (n <= 20) {
    return 1.0 / (static_cast<double>(n) *
                  static_cast<double>(binomial(n - 1, coalition_size)));
  }
  const double log_w = std::lgamma(coalition_size + 1.0) +
                       std::lgamma(static_cast<double>(n - coalition_size)) -
                       std::lgamma(n + 1.0);
  return std::exp(log_w);
}

}  // namespace hiershap
