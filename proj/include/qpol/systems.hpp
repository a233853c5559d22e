#pragma once

#include "qpol/mdp.hpp"

namespace qpol {

// Additive noise distribution: a per-call sampler plus an optional density
// (declared continuous, bounded, strictly positive; not verified).
struct NoiseSpec {
  int dim = 1;
  std::function<void(Rng&, StateVec&)> sample;        // fills a dim-vector
  std::function<double(const StateVec&)> density;     // optional
};

NoiseSpec gaussian_noise(int dim, double sigma);

// Linear system x' = A x + B a + v with v ~ N(0, sigma^2 I), tracking cost
// c(x, a) = min(||x - a||, cost_cap) and initial distribution equal to the
// noise law. The optimal stationary policy for this cost is f(x) = x, with
// cost identically zero.
//
// A and B are d x d row-major.
MdpModel make_linear_tracking(int d, const std::vector<double>& A,
                              const std::vector<double>& B, double sigma,
                              double cost_cap, double beta,
                              std::optional<Box> action_box = std::nullopt);

using DriftFn = std::function<double(double x, const ActionVec& a)>;

struct BoundedDriftOptions {
  double x0 = 0.0;                    // initial state (point mass)
  double beta = 0.9;
  std::optional<Box> state_test_box;  // default [-10 max(L,1), 10 max(L,1)]
  long n_check = 100000;              // drift-bound sampling budget
  std::uint64_t check_seed = 20240801;
};

// Scalar additive-Gaussian-noise chain x' = F(x, a) + v with drift range
// declared inside [-l_drift, l_drift]. The declaration is falsified (never
// proved) by sampling n_check points over state_test_box x action_box; a
// violation throws and names the offending (x, a).
MdpModel make_bounded_drift(double l_drift, double sigma, DriftFn drift,
                            Box action_box, CostFn cost, double cost_bound,
                            BoundedDriftOptions opts = {});

// General additive-noise system x' = F(x, a) + v.
MdpModel make_additive_noise(int state_dim, int action_dim,
                             std::function<StateVec(const StateVec&, const ActionVec&)> drift,
                             NoiseSpec noise, std::optional<Box> action_box,
                             CostFn cost, double cost_bound, double beta,
                             InitFn initial);

// Named cost functions shared by the config-driven systems.
CostFn tracking_cost(double cap);   // min(||x - a||, cap), K1 = 1
CostFn state_abs_cost(double cap);  // min(||x||, cap),     K1 = 0

}  // namespace qpol
