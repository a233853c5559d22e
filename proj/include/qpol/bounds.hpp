#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpol/mdp.hpp"

namespace qpol {

// Constants parameterizing the closed-form approximation-loss bounds:
//   alpha  covering constant of the uniform net on the action box
//   beta   discount factor
//   K1     Lipschitz constant of the cost in the action
//   K2     total-variation Lipschitz constant of the kernel in the action
//   M      sup of the one-stage cost
//   C, kappa  geometric-ergodicity constants (needed for average cost only)
//   action_dim  d, the exponent in (1/k)^(1/d)
struct SystemConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double M = 0.0;
  std::optional<double> C;
  std::optional<double> kappa;
  int action_dim = 1;
};

enum class BoundKind { DiscountedUpper, AverageUpper, SlbLower };

struct BoundReport {
  BoundKind kind;
  long k = 0;
  double value = 0.0;
  // Constituent terms by name (K, K_n, n_star, L, ...), for reports.
  std::vector<std::pair<std::string, double>> details;
  // Set when the leading constant is <= 0; the bound is reported as-is.
  bool degenerate = false;

  std::string to_json() const;
};

// Discounted-cost loss bound K * (1/k)^(1/d) with
// K = alpha/(1-beta) * (K1 - beta*K2*M + 2*beta*M*K2/(1-beta)).
BoundReport discounted_gap_bound(const SystemConstants& c, long k);

// Average-cost loss bound 2*M*C*kappa^n + K_n * (1/k)^(1/d) with
// K_n = (2n-1)*K2*alpha*M + K1*alpha. n < 0 selects the n minimizing the
// bound by scan (cap 10^4, early exit once the kappa^n term is negligible).
BoundReport average_gap_bound(const SystemConstants& c, long k, long n = -1);

struct ErgodicityConstants {
  double C = 2.0;
  double kappa = 0.0;
  double epsilon = 0.0;
};

// Geometric-ergodicity constants of a scalar additive-Gaussian-noise chain
// whose drift has range inside [-L, L]: C = 2 and kappa = 1 - epsilon*L with
// epsilon = exp(-(2L)^2 / (2 sigma^2)) / (sigma sqrt(2 pi)).
ErgodicityConstants ergodicity_constants_bounded_gaussian(double l_drift,
                                                          double sigma);

// TV-Lipschitz constant of an additive Gaussian kernel whose mean moves at
// most lipschitz_f_in_a per unit action distance: K2 = 2 L_F / (sigma sqrt(2 pi)),
// in the factor-2 TV convention (range [0,2]).
double gaussian_kernel_tv_lipschitz(double lipschitz_f_in_a, double sigma);

enum class SlbCriterion { PerStage, Discounted, Average };
enum class EntropyUnit { Bits, Nats };

// Shannon-lower-bound distortion floor for a k-level quantized policy:
// L = (d/2) * (2^h / (d V_d Gamma(d)))^(1/d) with V_d the unit-ball volume;
// per-stage and average bounds are L * (1/k)^(1/d), the discounted bound
// divides by (1 - beta).
BoundReport slb_lower_bound(int d, double entropy, SlbCriterion criterion,
                            long k, double beta = 0.0,
                            EntropyUnit unit = EntropyUnit::Bits);

// Covering constant alpha = sqrt(d) * max side length, valid for uniform
// nets: covering_radius(k) <= alpha * (1/k)^(1/d) for every k >= 1.
double covering_alpha_for_box(const Box& box);

// Volume of the unit Euclidean ball in R^d.
double unit_ball_volume(int d);

// Differential entropy in bits of an isotropic Gaussian on R^d.
double gaussian_entropy_bits(int d, double sigma);

}  // namespace qpol
