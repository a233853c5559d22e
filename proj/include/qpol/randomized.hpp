#pragma once

#include "qpol/codebook.hpp"
#include "qpol/mdp.hpp"

namespace qpol {

// Randomized stationary policy in selector form: a total map (x, z) -> a
// whose pushforward of uniform z reproduces the action kernel it represents.
// The representable subclass is piecewise-constant in z over finitely many
// intervals (finite mixtures of deterministic policies).
struct RandomizedPolicySpec {
  SelectorMap selector;
  std::string description;
};

// Mixture with the stated weights: f(x, z) = components[i](x) where z falls
// in the i-th cumulative-weight interval, left-closed right-open (the final
// interval is closed). Weights must sum to 1 within 1e-12.
RandomizedPolicySpec from_finite_mixture(const std::vector<double>& weights,
                                         const std::vector<DeterministicMap>& components);

// Per-z nearest-neighbor quantization: (x, z) -> nearest level to f(x, z).
RandomizedPolicySpec quantize_randomized(const RandomizedPolicySpec& spec,
                                         std::shared_ptr<const Codebook> cb);

Policy as_policy(const RandomizedPolicySpec& spec);

}  // namespace qpol
