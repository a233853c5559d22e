#include "qpol/randomized.hpp"

#include <cmath>
#include <numeric>

namespace qpol {

RandomizedPolicySpec from_finite_mixture(const std::vector<double>& weights,
                                         const std::vector<DeterministicMap>& components) {
  if (weights.empty() || weights.size() != components.size()) {
    throw std::invalid_argument("from_finite_mixture: weights and components must match and be nonempty");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("from_finite_mixture: weights must be nonnegative");
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("from_finite_mixture: weights must sum to 1 (got " +
                                std::to_string(total) + ")");
  }

  std::vector<double> cum(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cum.begin());
  auto comps = components;

  RandomizedPolicySpec spec;
  spec.description = "mixture(" + std::to_string(weights.size()) + ")";
  spec.selector = [cum, comps](const StateVec& x, double z) {
    // Left-closed right-open intervals; z >= cum.back() goes to the last
    // component, which also closes the final interval at z = 1.
    for (std::size_t i = 0; i + 1 < cum.size(); ++i) {
      if (z < cum[i]) return comps[i](x);
    }
    return comps.back()(x);
  };
  return spec;
}

RandomizedPolicySpec quantize_randomized(const RandomizedPolicySpec& spec,
                                         std::shared_ptr<const Codebook> cb) {
  if (!cb) throw std::invalid_argument("quantize_randomized: null codebook");
  RandomizedPolicySpec out;
  out.description = spec.description + " quantized to " + std::to_string(cb->size()) + " levels";
  auto base = spec.selector;
  out.selector = [base, cb](const StateVec& x, double z) {
    return nearest_level(*cb, base(x, z)).level;
  };
  return out;
}

Policy as_policy(const RandomizedPolicySpec& spec) {
  return RandomizedPolicy{spec.selector, spec.description};
}

}  // namespace qpol
