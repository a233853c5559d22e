#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qpol/rng.hpp"

namespace qpol {

// States and actions are plain coordinate vectors; dimensions are fixed per
// model and checked at the model boundary.
using StateVec = std::vector<double>;
using ActionVec = std::vector<double>;

// Axis-aligned box [lo_i, hi_i]^d.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const std::vector<double>& p) const;
  double side(int i) const { return hi[i] - lo[i]; }
  double max_side() const;
  void validate() const;  // throws unless lo/hi finite and lo <= hi per axis

  static Box cube(double lo, double hi, int d);
};

class Codebook;

using DeterministicMap = std::function<ActionVec(const StateVec&)>;
// Selector form of a randomized policy: (x, z) -> a with z uniform on [0,1].
using SelectorMap = std::function<ActionVec(const StateVec&, double)>;

struct DeterministicPolicy {
  DeterministicMap f;
};

// Nearest-neighbor quantization of a deterministic map onto a codebook; the
// action is always a member of the codebook's level set.
struct QuantizedPolicy {
  DeterministicMap base;
  std::shared_ptr<const Codebook> codebook;
};

struct RandomizedPolicy {
  SelectorMap f;
  std::string description;
};

using Policy = std::variant<DeterministicPolicy, QuantizedPolicy, RandomizedPolicy>;

bool is_randomized(const Policy& policy);

// Action of `policy` at x. z must be supplied iff the policy is randomized.
ActionVec policy_action(const Policy& policy, const StateVec& x,
                        std::optional<double> z = std::nullopt);

// Convenience for simulation loops: draws z from `rng` only when the policy
// is randomized. Draw order is part of the reproducibility contract.
ActionVec policy_action(const Policy& policy, const StateVec& x, Rng& rng);

using CostFn = std::function<double(const StateVec&, const ActionVec&)>;
using TransitionFn = std::function<StateVec(const StateVec&, const ActionVec&, Rng&)>;
using InitFn = std::function<StateVec(Rng&)>;

// Per-stage cost functions: c_n = head[n] for n < head.size(), and c_n equals
// the model's one-stage cost for every later stage.
struct CostSchedule {
  std::vector<CostFn> head;
};

// Discrete-time MDP on R^n states and R^d actions. Costs take values in
// [0, cost_bound]; the transition sampler must be a pure function of
// (state, action, engine state) so that trajectories are seed-deterministic.
struct MdpModel {
  int state_dim = 1;
  int action_dim = 1;
  std::optional<Box> action_box;  // nullopt = unbounded action space
  TransitionFn transition;
  CostFn cost;
  std::optional<CostSchedule> cost_schedule;
  double discount = 0.9;
  InitFn initial;
  double cost_bound = 1.0;  // M = sup |c|, recorded at construction
};

double stage_cost(const MdpModel& model, const StateVec& x, const ActionVec& a);
double stage_cost(const MdpModel& model, const StateVec& x, const ActionVec& a,
                  long n);

struct Trajectory {
  std::vector<StateVec> states;    // x_0 .. x_N
  std::vector<ActionVec> actions;  // a_0 .. a_N (a_N only feeds the stage-N cost)
  std::vector<double> costs;       // costs[t] = c(x_t, a_t)
};

double l2_distance(const std::vector<double>& a, const std::vector<double>& b);

void check_dim(const std::vector<double>& v, int dim, const char* what);

}  // namespace qpol
