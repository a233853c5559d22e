#pragma once

#include <cstdint>
#include <string>

#include "qpol/mdp.hpp"

namespace qpol {

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci95_halfwidth = 0.0;  // 1.96 * std_error
  long n_rollouts = 0;
  long horizon_used = 0;
  double truncation_bias_bound = 0.0;  // M beta^(N+1)/(1-beta) for discounted

  std::string to_json() const;
};

enum class Criterion { Discounted, Average, Total };

Criterion criterion_from_string(const std::string& s);
std::string to_string(Criterion c);

// One trajectory of horizon+1 stages. Rollout i of a run uses the stream
// derived from (root_seed, i); here the caller passes the stream index 0
// seed directly. Draw order per stage: z (randomized policies only), then
// the transition noise; the initial state, when sampled, is drawn first.
Trajectory rollout(const MdpModel& model, const Policy& policy,
                   const std::optional<StateVec>& x0, long horizon,
                   std::uint64_t stream_seed);

// Smallest N >= 0 with M beta^(N+1) / (1-beta) <= tol.
long horizon_for_tolerance(double M, double beta, double tol);

struct McOptions {
  int n_threads = 1;
  std::optional<StateVec> x0;            // nullopt: sample the model's initial law
  std::vector<double>* per_rollout = nullptr;  // when set, receives one value per rollout
};

// Sample mean of truncated discounted sums over independent rollouts; the
// horizon comes from horizon_for_tolerance and the geometric tail bound at
// that horizon is reported as truncation_bias_bound.
CostEstimate estimate_discounted_cost(const MdpModel& model, const Policy& policy,
                                      long n_rollouts, double tol,
                                      std::uint64_t root_seed, McOptions opts = {});

// Mean over rollouts of the time average of the stage cost over n_steps
// stages after burn_in.
CostEstimate estimate_average_cost(const MdpModel& model, const Policy& policy,
                                   const std::optional<StateVec>& x0, long burn_in,
                                   long n_steps, long n_rollouts,
                                   std::uint64_t root_seed, McOptions opts = {});

// Finite-horizon total cost under the model's per-stage cost schedule.
CostEstimate estimate_total_cost(const MdpModel& model, const Policy& policy,
                                 long horizon, long n_rollouts,
                                 std::uint64_t root_seed, McOptions opts = {});

struct PairedParams {
  double tol = 1e-3;    // discounted truncation tolerance
  long burn_in = 1000;  // average criterion
  long n_steps = 10000;
  long horizon = 0;     // total criterion
};

// Common-random-numbers estimate of cost(policy_a) - cost(policy_b): each
// rollout index replays the identical noise stream through both policies, so
// identical policies give a gap of exactly zero.
CostEstimate paired_cost_gap(const MdpModel& model, const Policy& policy_a,
                             const Policy& policy_b, Criterion criterion,
                             long n_rollouts, std::uint64_t root_seed,
                             const PairedParams& params, McOptions opts = {});

}  // namespace qpol
