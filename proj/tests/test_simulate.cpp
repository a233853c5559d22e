#include <doctest.h>

#include <cmath>

#include "qpol/codebook.hpp"
#include "qpol/simulate.hpp"
#include "qpol/systems.hpp"

using namespace qpol;

namespace {

Policy identity_policy() {
  return DeterministicPolicy{[](const StateVec& x) { return ActionVec(x); }};
}

// Model with a constant stage cost, useful for exact estimator checks.
MdpModel constant_cost_model(double c, double beta) {
  MdpModel m;
  m.state_dim = 1;
  m.action_dim = 1;
  m.discount = beta;
  m.cost_bound = std::max(c, 1e-9);
  m.cost = [c](const StateVec&, const ActionVec&) { return c; };
  m.transition = [](const StateVec& x, const ActionVec&, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return StateVec{x[0] * 0.0 + n(rng)};
  };
  m.initial = [](Rng&) { return StateVec{0.0}; };
  return m;
}

MdpModel tracking_1d() { return make_linear_tracking(1, {1.0}, {-1.0}, 1.0, 20.0, 0.9); }

}  // namespace

TEST_SUITE_BEGIN("simulate");

TEST_CASE("horizon_for_tolerance: closed form equals a brute-force scan") {
  auto brute = [](double M, double beta, double tol) {
    long N = 0;
    while (M * std::pow(beta, N + 1) / (1.0 - beta) > tol) ++N;
    return N;
  };
  // Frozen values from the scan oracle.
  CHECK(horizon_for_tolerance(1.0, 0.9, 2e-3) == 80);
  CHECK(horizon_for_tolerance(1.0, 0.9, 1e-3) == 87);
  CHECK(horizon_for_tolerance(1.0, 0.5, 1.0) == 0);
  // tol >= M/(1-beta): the whole sum fits inside the tolerance.
  CHECK(horizon_for_tolerance(1.0, 0.9, 10.0) == 0);
  CHECK(horizon_for_tolerance(1.0, 0.9, 11.0) == 0);
  for (double M : {0.5, 1.0, 20.0}) {
    for (double beta : {0.3, 0.9, 0.99}) {
      for (double tol : {1e-1, 1e-3, 1e-6}) {
        CHECK(horizon_for_tolerance(M, beta, tol) == brute(M, beta, tol));
      }
    }
  }
  CHECK_THROWS_AS(horizon_for_tolerance(1.0, 1.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(horizon_for_tolerance(1.0, 0.9, 0.0), std::invalid_argument);
}

TEST_CASE("rollout: horizon zero gives a single stage") {
  MdpModel m = tracking_1d();
  const Trajectory traj = rollout(m, identity_policy(), StateVec{0.3}, 0, 1);
  REQUIRE(traj.states.size() == 1);
  REQUIRE(traj.actions.size() == 1);
  REQUIRE(traj.costs.size() == 1);
  CHECK(traj.states[0] == StateVec{0.3});
  CHECK(traj.actions[0] == ActionVec{0.3});
  CHECK(traj.costs[0] == 0.0);
}

TEST_CASE("rollout: dimension mismatch is an error") {
  MdpModel m = tracking_1d();
  Policy bad = DeterministicPolicy{[](const StateVec&) { return ActionVec{0.0, 0.0}; }};
  CHECK_THROWS_AS(rollout(m, bad, std::nullopt, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(rollout(m, identity_policy(), StateVec{0.0, 0.0}, 3, 1),
                  std::invalid_argument);
}

TEST_CASE("discounted estimate: constant costs have no Monte Carlo noise") {
  {
    const CostEstimate est =
        estimate_discounted_cost(constant_cost_model(0.0, 0.9), identity_policy(), 16,
                                 1e-3, 5);
    CHECK(est.mean == 0.0);
    CHECK(est.std_error == 0.0);
  }
  {
    const CostEstimate est =
        estimate_discounted_cost(constant_cost_model(1.0, 0.9), identity_policy(), 16,
                                 1e-3, 5);
    // Horizon 87, so the mean is exactly the truncated geometric series
    // (summed the same way the estimator folds stage costs).
    CHECK(est.horizon_used == 87);
    double expected = 0.0, w = 1.0;
    for (int n = 0; n <= 87; ++n) {
      expected += w;
      w *= 0.9;
    }
    CHECK(est.mean == expected);
    CHECK(std::abs(est.mean - (1.0 - std::pow(0.9, 88)) / 0.1) < 1e-12);
    CHECK(est.std_error == 0.0);
    CHECK(std::abs(est.mean - 10.0) <= 1e-3);
    CHECK(est.truncation_bias_bound <= 1e-3);
    CHECK(est.ci95_halfwidth == 0.0);
  }
}

TEST_CASE("discounted estimate: exact tracking costs nothing") {
  const CostEstimate est =
      estimate_discounted_cost(tracking_1d(), identity_policy(), 32, 1e-3, 7);
  CHECK(est.mean == 0.0);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("average estimate: exact cases") {
  const CostEstimate one =
      estimate_average_cost(constant_cost_model(1.0, 0.9), identity_policy(),
                            std::nullopt, 10, 500, 8, 3);
  CHECK(one.mean == 1.0);
  CHECK(one.std_error == 0.0);
  const CostEstimate zero = estimate_average_cost(tracking_1d(), identity_policy(),
                                                  std::nullopt, 10, 500, 8, 3);
  CHECK(zero.mean == 0.0);
}

TEST_CASE("average estimate: indicator cost of a memoryless Gaussian chain is 1/2") {
  auto drift = [](double, const ActionVec&) { return 0.0; };
  MdpModel m = make_bounded_drift(1.0, 1.0, drift, Box::cube(-1.0, 1.0, 1),
                                  [](const StateVec& x, const ActionVec&) {
                                    return x[0] > 0.0 ? 1.0 : 0.0;
                                  },
                                  1.0);
  Policy zero_action = DeterministicPolicy{[](const StateVec&) { return ActionVec{0.0}; }};
  const CostEstimate est =
      estimate_average_cost(m, zero_action, std::nullopt, 100, 2000, 64, 17);
  CHECK(std::abs(est.mean - 0.5) <= 3.0 * est.ci95_halfwidth + 1e-3);
}

TEST_CASE("total estimate: schedule semantics") {
  MdpModel m = constant_cost_model(1.0, 0.9);
  CHECK_THROWS_AS(estimate_total_cost(m, identity_policy(), 4, 8, 1),
                  std::invalid_argument);  // no schedule

  CostSchedule zero_sched;
  for (int i = 0; i < 5; ++i) {
    zero_sched.head.push_back([](const StateVec&, const ActionVec&) { return 0.0; });
  }
  MdpModel zeros = m;
  zeros.cost_schedule = zero_sched;
  CHECK(estimate_total_cost(zeros, identity_policy(), 4, 8, 1).mean == 0.0);

  MdpModel ones = m;
  ones.cost_schedule = CostSchedule{};  // c_n = c = 1
  const CostEstimate est = estimate_total_cost(ones, identity_policy(), 4, 8, 1);
  CHECK(est.mean == 5.0);
  CHECK(est.truncation_bias_bound == 0.0);
}

TEST_CASE("total estimate: geometric schedule reproduces the discounted estimator") {
  // c_n = beta^n * c on a noisy-cost model; cross-check within CI.
  const double beta = 0.9;
  MdpModel m = tracking_1d();
  // Quantized identity gives a nonzero, noisy cost sequence.
  auto cb = std::make_shared<const Codebook>(build_uniform_net(Box::cube(-8.0, 8.0, 1), 16));
  Policy q = quantize_policy(identity_policy(), cb);

  const long N = horizon_for_tolerance(m.cost_bound, beta, 1e-3);
  CostSchedule sched;
  for (long n = 0; n <= N; ++n) {
    const double w = std::pow(beta, n);
    const CostFn base = m.cost;
    sched.head.push_back([w, base](const StateVec& x, const ActionVec& a) {
      return w * base(x, a);
    });
  }
  MdpModel scheduled = m;
  scheduled.cost_schedule = sched;

  const CostEstimate total = estimate_total_cost(scheduled, q, N, 2000, 123);
  const CostEstimate disc = estimate_discounted_cost(m, q, 2000, 1e-3, 123);
  CHECK(std::abs(total.mean - disc.mean) <=
        2.0 * (total.ci95_halfwidth + disc.ci95_halfwidth) + 1e-12);
}

TEST_CASE("paired gap: identical policies cancel exactly") {
  const CostEstimate gap =
      paired_cost_gap(tracking_1d(), identity_policy(), identity_policy(),
                      Criterion::Discounted, 32, 9, PairedParams{});
  CHECK(gap.mean == 0.0);
  CHECK(gap.std_error == 0.0);
}

TEST_CASE("paired gap: coarse quantization hurts and refinement helps") {
  MdpModel m = tracking_1d();
  Policy base = identity_policy();
  const Box box = Box::cube(-8.0, 8.0, 1);

  auto gap_at = [&](long k) {
    auto cb = std::make_shared<const Codebook>(build_uniform_net(box, k));
    return paired_cost_gap(m, quantize_policy(base, cb), base, Criterion::Discounted,
                           4000, 9, PairedParams{});
  };

  const CostEstimate coarse = gap_at(2);
  CHECK(coarse.mean > 3.0 * coarse.ci95_halfwidth);  // quantized strictly worse

  double prev = std::numeric_limits<double>::infinity();
  double prev_ci = 0.0;
  for (long k : {4L, 8L, 16L, 32L, 64L, 128L, 256L}) {
    const CostEstimate est = gap_at(k);
    CHECK(est.mean <= prev + 3.0 * std::sqrt(est.ci95_halfwidth * est.ci95_halfwidth +
                                             prev_ci * prev_ci));
    prev = est.mean;
    prev_ci = est.ci95_halfwidth;
  }
  CHECK(prev < 0.5);
}

TEST_CASE("estimates are reproducible and thread-count independent") {
  MdpModel m = tracking_1d();
  auto cb = std::make_shared<const Codebook>(build_uniform_net(Box::cube(-8.0, 8.0, 1), 8));
  Policy q = quantize_policy(identity_policy(), cb);

  McOptions serial;
  serial.n_threads = 1;
  McOptions parallel;
  parallel.n_threads = 4;

  const CostEstimate a = estimate_discounted_cost(m, q, 500, 1e-3, 42, serial);
  const CostEstimate b = estimate_discounted_cost(m, q, 500, 1e-3, 42, serial);
  const CostEstimate c = estimate_discounted_cost(m, q, 500, 1e-3, 42, parallel);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.mean == c.mean);
  CHECK(a.std_error == c.std_error);

  const CostEstimate ga =
      paired_cost_gap(m, q, identity_policy(), Criterion::Average, 64, 7,
                      PairedParams{1e-3, 50, 200, 0}, serial);
  const CostEstimate gb =
      paired_cost_gap(m, q, identity_policy(), Criterion::Average, 64, 7,
                      PairedParams{1e-3, 50, 200, 0}, parallel);
  CHECK(ga.mean == gb.mean);
  CHECK(ga.std_error == gb.std_error);
}

TEST_CASE("truncation correctness: loosening tol moves the estimate by at most tol") {
  MdpModel m = tracking_1d();
  auto cb = std::make_shared<const Codebook>(build_uniform_net(Box::cube(-8.0, 8.0, 1), 8));
  Policy q = quantize_policy(identity_policy(), cb);

  // High-precision reference at a very tight tolerance, same streams.
  const CostEstimate ref = estimate_discounted_cost(m, q, 2000, 1e-8, 31);
  for (double tol : {1e-3, 1e-2, 1e-1}) {
    const CostEstimate est = estimate_discounted_cost(m, q, 2000, tol, 31);
    CHECK(std::abs(est.mean - ref.mean) <=
          tol + 2.0 * (est.ci95_halfwidth + ref.ci95_halfwidth));
  }
}

TEST_CASE("randomized policies draw a fresh z per stage") {
  // A two-point mixture over constant actions: with per-stage z the stage
  // costs alternate within a rollout; with frozen z they could not.
  MdpModel m = constant_cost_model(1.0, 0.9);
  m.cost = [](const StateVec&, const ActionVec& a) { return a[0]; };
  m.cost_bound = 1.0;
  Policy r = RandomizedPolicy{[](const StateVec&, double z) {
                                return z < 0.5 ? ActionVec{0.0} : ActionVec{1.0};
                              },
                              "coin"};
  const Trajectory traj = rollout(m, r, StateVec{0.0}, 200, 77);
  bool saw_zero = false, saw_one = false;
  for (double c : traj.costs) {
    if (c == 0.0) saw_zero = true;
    if (c == 1.0) saw_one = true;
  }
  CHECK(saw_zero);
  CHECK(saw_one);
}

TEST_CASE("cost estimate serializes with the documented fields") {
  const CostEstimate est =
      estimate_discounted_cost(constant_cost_model(1.0, 0.5), identity_policy(), 4,
                               1e-2, 1);
  const std::string j = est.to_json();
  for (const char* field : {"\"mean\"", "\"std_error\"", "\"ci95\"", "\"n_rollouts\"",
                            "\"horizon\"", "\"bias_bound\""}) {
    CHECK(j.find(field) != std::string::npos);
  }
}

TEST_SUITE_END();
