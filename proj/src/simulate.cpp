#include "qpol/simulate.hpp"

#include <cmath>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace qpol {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

StateVec initial_state(const MdpModel& model, const std::optional<StateVec>& x0,
                       Rng& rng) {
  if (x0) {
    check_dim(*x0, model.state_dim, "rollout: initial state");
    return *x0;
  }
  return model.initial(rng);
}

// Per-rollout evaluators. Each runs one trajectory forward and folds the
// stage costs; states/actions are not retained.

double discounted_sum(const MdpModel& model, const Policy& policy,
                      const std::optional<StateVec>& x0, long horizon, Rng& rng) {
  StateVec x = initial_state(model, x0, rng);
  double total = 0.0, w = 1.0;
  for (long t = 0; t <= horizon; ++t) {
    ActionVec a = policy_action(policy, x, rng);
    check_dim(a, model.action_dim, "rollout: action");
    total += w * model.cost(x, a);
    w *= model.discount;
    if (t < horizon) x = model.transition(x, a, rng);
  }
  return total;
}

double time_average(const MdpModel& model, const Policy& policy,
                    const std::optional<StateVec>& x0, long burn_in, long n_steps,
                    Rng& rng) {
  StateVec x = initial_state(model, x0, rng);
  for (long t = 0; t < burn_in; ++t) {
    ActionVec a = policy_action(policy, x, rng);
    x = model.transition(x, a, rng);
  }
  double total = 0.0;
  for (long t = 0; t < n_steps; ++t) {
    ActionVec a = policy_action(policy, x, rng);
    check_dim(a, model.action_dim, "rollout: action");
    total += model.cost(x, a);
    x = model.transition(x, a, rng);
  }
  return total / static_cast<double>(n_steps);
}

double total_sum(const MdpModel& model, const Policy& policy,
                 const std::optional<StateVec>& x0, long horizon, Rng& rng) {
  StateVec x = initial_state(model, x0, rng);
  double total = 0.0;
  for (long t = 0; t <= horizon; ++t) {
    ActionVec a = policy_action(policy, x, rng);
    total += stage_cost(model, x, a, t);
    if (t < horizon) x = model.transition(x, a, rng);
  }
  return total;
}

// Static chunking over rollout indices; every rollout derives its own stream
// from (root, i), so the partition does not affect the values.
template <class F>
void parallel_rollouts(long n, int n_threads, F&& body) {
  if (n_threads <= 1 || n < 2) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers = static_cast<int>(std::min<long>(n_threads, n));
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      const long lo = n * w / workers;
      const long hi = n * (w + 1) / workers;
      try {
        for (long i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Pairwise sum over [lo, hi): deterministic in index order (thread-count
// independent) and exact for power-of-two counts of identical values, so
// constant costs produce zero statistical noise bit-for-bit.
template <class F>
double pairwise_sum(long lo, long hi, F&& at) {
  if (hi - lo == 1) return at(lo);
  if (hi - lo == 2) return at(lo) + at(lo + 1);
  const long mid = lo + (hi - lo) / 2;
  return pairwise_sum(lo, mid, at) + pairwise_sum(mid, hi, at);
}

CostEstimate summarize(const std::vector<double>& values, long horizon,
                       double bias_bound) {
  CostEstimate est;
  const long n = static_cast<long>(values.size());
  est.n_rollouts = n;
  est.horizon_used = horizon;
  est.truncation_bias_bound = bias_bound;
  est.mean = pairwise_sum(0, n, [&](long i) { return values[i]; }) /
             static_cast<double>(n);
  if (n > 1) {
    const double mean = est.mean;
    const double ss = pairwise_sum(0, n, [&](long i) {
      const double d = values[i] - mean;
      return d * d;
    });
    const double var = ss / static_cast<double>(n - 1);
    est.std_error = std::sqrt(var / static_cast<double>(n));
  }
  est.ci95_halfwidth = 1.96 * est.std_error;
  return est;
}

}  // namespace

std::string CostEstimate::to_json() const {
  nlohmann::ordered_json j;
  j["mean"] = mean;
  j["std_error"] = std_error;
  j["ci95"] = ci95_halfwidth;
  j["n_rollouts"] = n_rollouts;
  j["horizon"] = horizon_used;
  j["bias_bound"] = truncation_bias_bound;
  return j.dump();
}

Criterion criterion_from_string(const std::string& s) {
  if (s == "discounted") return Criterion::Discounted;
  if (s == "average") return Criterion::Average;
  if (s == "total") return Criterion::Total;
  throw std::invalid_argument("unknown criterion '" + s +
                              "' (expected discounted, average, or total)");
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::Discounted: return "discounted";
    case Criterion::Average: return "average";
    case Criterion::Total: return "total";
  }
  return "?";
}

Trajectory rollout(const MdpModel& model, const Policy& policy,
                   const std::optional<StateVec>& x0, long horizon,
                   std::uint64_t stream_seed) {
  require(horizon >= 0, "rollout: horizon must be >= 0");
  Rng rng(stream_seed);
  Trajectory traj;
  traj.states.reserve(horizon + 1);
  traj.actions.reserve(horizon + 1);
  traj.costs.reserve(horizon + 1);
  StateVec x = initial_state(model, x0, rng);
  for (long t = 0; t <= horizon; ++t) {
    ActionVec a = policy_action(policy, x, rng);
    check_dim(a, model.action_dim, "rollout: action");
    traj.costs.push_back(model.cost(x, a));
    traj.states.push_back(x);
    if (t < horizon) x = model.transition(x, a, rng);
    traj.actions.push_back(std::move(a));
  }
  return traj;
}

long horizon_for_tolerance(double M, double beta, double tol) {
  require(M > 0.0, "horizon_for_tolerance: M must be positive");
  require(beta > 0.0 && beta < 1.0, "horizon_for_tolerance: beta must lie in (0,1)");
  require(tol > 0.0, "horizon_for_tolerance: tol must be positive");
  auto tail = [&](long N) { return M * std::pow(beta, N + 1) / (1.0 - beta); };
  if (tail(0) <= tol) return 0;
  long N = static_cast<long>(std::ceil(std::log(tol * (1.0 - beta) / M) / std::log(beta))) - 1;
  if (N < 0) N = 0;
  while (tail(N) > tol) ++N;
  while (N > 0 && tail(N - 1) <= tol) --N;
  return N;
}

CostEstimate estimate_discounted_cost(const MdpModel& model, const Policy& policy,
                                      long n_rollouts, double tol,
                                      std::uint64_t root_seed, McOptions opts) {
  require(n_rollouts >= 2, "estimate_discounted_cost: need at least 2 rollouts");
  const long N = horizon_for_tolerance(model.cost_bound, model.discount, tol);
  std::vector<double> values(n_rollouts);
  parallel_rollouts(n_rollouts, opts.n_threads, [&](long i) {
    Rng rng = make_stream(root_seed, static_cast<std::uint64_t>(i));
    values[i] = discounted_sum(model, policy, opts.x0, N, rng);
  });
  if (opts.per_rollout) *opts.per_rollout = values;
  const double bias = model.cost_bound * std::pow(model.discount, N + 1) /
                      (1.0 - model.discount);
  return summarize(values, N, bias);
}

CostEstimate estimate_average_cost(const MdpModel& model, const Policy& policy,
                                   const std::optional<StateVec>& x0, long burn_in,
                                   long n_steps, long n_rollouts,
                                   std::uint64_t root_seed, McOptions opts) {
  require(n_steps >= 1, "estimate_average_cost: n_steps must be >= 1");
  require(burn_in >= 0, "estimate_average_cost: burn_in must be >= 0");
  require(n_rollouts >= 2, "estimate_average_cost: need at least 2 rollouts");
  std::vector<double> values(n_rollouts);
  parallel_rollouts(n_rollouts, opts.n_threads, [&](long i) {
    Rng rng = make_stream(root_seed, static_cast<std::uint64_t>(i));
    values[i] = time_average(model, policy, x0, burn_in, n_steps, rng);
  });
  if (opts.per_rollout) *opts.per_rollout = values;
  return summarize(values, n_steps, 0.0);
}

CostEstimate estimate_total_cost(const MdpModel& model, const Policy& policy,
                                 long horizon, long n_rollouts,
                                 std::uint64_t root_seed, McOptions opts) {
  require(horizon >= 0, "estimate_total_cost: horizon must be >= 0");
  require(n_rollouts >= 2, "estimate_total_cost: need at least 2 rollouts");
  if (!model.cost_schedule) {
    throw std::invalid_argument("estimate_total_cost: model has no per-stage cost schedule");
  }
  std::vector<double> values(n_rollouts);
  parallel_rollouts(n_rollouts, opts.n_threads, [&](long i) {
    Rng rng = make_stream(root_seed, static_cast<std::uint64_t>(i));
    values[i] = total_sum(model, policy, opts.x0, horizon, rng);
  });
  if (opts.per_rollout) *opts.per_rollout = values;
  return summarize(values, horizon, 0.0);
}

CostEstimate paired_cost_gap(const MdpModel& model, const Policy& policy_a,
                             const Policy& policy_b, Criterion criterion,
                             long n_rollouts, std::uint64_t root_seed,
                             const PairedParams& params, McOptions opts) {
  require(n_rollouts >= 2, "paired_cost_gap: need at least 2 rollouts");
  long horizon = 0;
  double bias = 0.0;
  if (criterion == Criterion::Discounted) {
    horizon = horizon_for_tolerance(model.cost_bound, model.discount, params.tol);
    bias = model.cost_bound * std::pow(model.discount, horizon + 1) /
           (1.0 - model.discount);
  } else if (criterion == Criterion::Average) {
    horizon = params.n_steps;
  } else {
    horizon = params.horizon;
    if (!model.cost_schedule) {
      throw std::invalid_argument("paired_cost_gap: total criterion needs a cost schedule");
    }
  }

  std::vector<double> values(n_rollouts);
  parallel_rollouts(n_rollouts, opts.n_threads, [&](long i) {
    const std::uint64_t seed = stream_seed(root_seed, static_cast<std::uint64_t>(i));
    auto run_one = [&](const Policy& p) {
      Rng rng(seed);  // both policies replay the identical stream
      switch (criterion) {
        case Criterion::Discounted:
          return discounted_sum(model, p, opts.x0, horizon, rng);
        case Criterion::Average:
          return time_average(model, p, opts.x0, params.burn_in, params.n_steps, rng);
        case Criterion::Total:
          return total_sum(model, p, opts.x0, params.horizon, rng);
      }
      return 0.0;
    };
    values[i] = run_one(policy_a) - run_one(policy_b);
  });
  if (opts.per_rollout) *opts.per_rollout = values;
  // The gap bias is at most the sum of the two truncation biases.
  return summarize(values, horizon, 2.0 * bias);
}

}  // namespace qpol
