#include "qpol/mdp.hpp"

#include <cmath>

#include "qpol/codebook.hpp"

namespace qpol {

bool Box::contains(const std::vector<double>& p) const {
  if (static_cast<int>(p.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  }
  return true;
}

double Box::max_side() const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s = std::max(s, hi[i] - lo[i]);
  return s;
}

void Box::validate() const {
  if (lo.size() != hi.size() || lo.empty()) {
    throw std::invalid_argument("box: lo/hi must be nonempty and of equal dimension");
  }
  for (int i = 0; i < dim(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) {
      throw std::invalid_argument("box: bounds must be finite");
    }
    if (lo[i] > hi[i]) throw std::invalid_argument("box: lo > hi on axis " + std::to_string(i));
  }
}

Box Box::cube(double lo, double hi, int d) {
  Box b;
  b.lo.assign(d, lo);
  b.hi.assign(d, hi);
  return b;
}

void check_dim(const std::vector<double>& v, int dim, const char* what) {
  if (static_cast<int>(v.size()) != dim) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(dim) + ", got " +
                                std::to_string(v.size()));
  }
}

double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

bool is_randomized(const Policy& policy) {
  return std::holds_alternative<RandomizedPolicy>(policy);
}

ActionVec policy_action(const Policy& policy, const StateVec& x,
                        std::optional<double> z) {
  if (const auto* det = std::get_if<DeterministicPolicy>(&policy)) {
    if (z) throw std::invalid_argument("policy_action: z supplied to a deterministic policy");
    return det->f(x);
  }
  if (const auto* q = std::get_if<QuantizedPolicy>(&policy)) {
    if (z) throw std::invalid_argument("policy_action: z supplied to a quantized policy");
    return nearest_level(*q->codebook, q->base(x)).level;
  }
  const auto& r = std::get<RandomizedPolicy>(policy);
  if (!z) throw std::invalid_argument("policy_action: randomized policy requires z");
  return r.f(x, *z);
}

ActionVec policy_action(const Policy& policy, const StateVec& x, Rng& rng) {
  if (const auto* r = std::get_if<RandomizedPolicy>(&policy)) {
    double z = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return r->f(x, z);
  }
  return policy_action(policy, x, std::nullopt);
}

double stage_cost(const MdpModel& model, const StateVec& x, const ActionVec& a) {
  check_dim(x, model.state_dim, "stage_cost: state");
  check_dim(a, model.action_dim, "stage_cost: action");
  return model.cost(x, a);
}

double stage_cost(const MdpModel& model, const StateVec& x, const ActionVec& a,
                  long n) {
  check_dim(x, model.state_dim, "stage_cost: state");
  check_dim(a, model.action_dim, "stage_cost: action");
  if (n < 0) throw std::invalid_argument("stage_cost: negative stage index");
  if (model.cost_schedule) {
    const auto& head = model.cost_schedule->head;
    if (n < static_cast<long>(head.size())) return head[n](x, a);
  }
  return model.cost(x, a);
}

}  // namespace qpol
