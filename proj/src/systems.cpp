#include "qpol/systems.hpp"

#include <cmath>
#include <cstdio>

namespace qpol {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// y = M x for row-major square M.
void matvec(const std::vector<double>& M, const std::vector<double>& x,
            std::vector<double>& y) {
  const std::size_t d = x.size();
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += M[i * d + j] * x[j];
    y[i] = s;
  }
}

}  // namespace

NoiseSpec gaussian_noise(int dim, double sigma) {
  require(dim >= 1 && sigma > 0.0, "gaussian_noise: bad arguments");
  NoiseSpec spec;
  spec.dim = dim;
  spec.sample = [dim, sigma](Rng& rng, StateVec& out) {
    std::normal_distribution<double> n(0.0, sigma);
    out.resize(dim);
    for (int i = 0; i < dim; ++i) out[i] = n(rng);
  };
  const double norm = 1.0 / std::pow(sigma * std::sqrt(2.0 * M_PI), dim);
  spec.density = [dim, sigma, norm](const StateVec& x) {
    double q = 0.0;
    for (int i = 0; i < dim; ++i) q += x[i] * x[i];
    return norm * std::exp(-q / (2.0 * sigma * sigma));
  };
  return spec;
}

CostFn tracking_cost(double cap) {
  return [cap](const StateVec& x, const ActionVec& a) {
    return std::min(l2_distance(x, a), cap);
  };
}

CostFn state_abs_cost(double cap) {
  return [cap](const StateVec& x, const ActionVec&) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return std::min(std::sqrt(s), cap);
  };
}

MdpModel make_linear_tracking(int d, const std::vector<double>& A,
                              const std::vector<double>& B, double sigma,
                              double cost_cap, double beta,
                              std::optional<Box> action_box) {
  require(d >= 1, "make_linear_tracking: dimension must be >= 1");
  require(sigma > 0.0, "make_linear_tracking: sigma must be positive");
  require(cost_cap > 0.0, "make_linear_tracking: cost cap must be positive");
  require(beta > 0.0 && beta < 1.0, "make_linear_tracking: beta must lie in (0,1)");
  require(A.size() == static_cast<std::size_t>(d) * d &&
              B.size() == static_cast<std::size_t>(d) * d,
          "make_linear_tracking: A and B must be d x d");
  if (action_box) {
    action_box->validate();
    require(action_box->dim() == d, "make_linear_tracking: action box dimension mismatch");
  }

  MdpModel model;
  model.state_dim = d;
  model.action_dim = d;
  model.action_box = action_box;
  model.discount = beta;
  model.cost_bound = cost_cap;
  model.cost = tracking_cost(cost_cap);
  model.transition = [d, A, B, sigma](const StateVec& x, const ActionVec& a, Rng& rng) {
    check_dim(x, d, "linear_tracking: state");
    check_dim(a, d, "linear_tracking: action");
    StateVec ax(d), ba(d);
    matvec(A, x, ax);
    matvec(B, a, ba);
    std::normal_distribution<double> noise(0.0, sigma);
    StateVec next(d);
    for (int i = 0; i < d; ++i) next[i] = ax[i] + ba[i] + noise(rng);
    return next;
  };
  // Initial distribution has the same law as the noise.
  model.initial = [d, sigma](Rng& rng) {
    std::normal_distribution<double> noise(0.0, sigma);
    StateVec x(d);
    for (int i = 0; i < d; ++i) x[i] = noise(rng);
    return x;
  };
  return model;
}

MdpModel make_bounded_drift(double l_drift, double sigma, DriftFn drift,
                            Box action_box, CostFn cost, double cost_bound,
                            BoundedDriftOptions opts) {
  require(l_drift > 0.0, "make_bounded_drift: drift bound must be positive");
  require(sigma > 0.0, "make_bounded_drift: sigma must be positive");
  require(cost_bound > 0.0, "make_bounded_drift: cost bound must be positive");
  action_box.validate();
  require(action_box.dim() >= 1, "make_bounded_drift: action box required");

  Box test_box = opts.state_test_box.value_or(
      Box::cube(-10.0 * std::max(l_drift, 1.0), 10.0 * std::max(l_drift, 1.0), 1));
  test_box.validate();
  require(test_box.dim() == 1, "make_bounded_drift: state test box must be scalar");

  // Falsification pass: the bound is a user contract we can only disprove.
  Rng rng(opts.check_seed);
  std::uniform_real_distribution<double> ux(test_box.lo[0], test_box.hi[0]);
  const int ad = action_box.dim();
  ActionVec a(ad);
  for (long i = 0; i < opts.n_check; ++i) {
    const double x = ux(rng);
    for (int c = 0; c < ad; ++c) {
      a[c] = std::uniform_real_distribution<double>(action_box.lo[c], action_box.hi[c])(rng);
    }
    const double f = drift(x, a);
    if (!(std::abs(f) <= l_drift)) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "make_bounded_drift: |F(%g, a)| = %g exceeds declared bound %g "
                    "(first action coordinate %g)",
                    x, f, l_drift, a[0]);
      throw std::invalid_argument(buf);
    }
  }

  MdpModel model;
  model.state_dim = 1;
  model.action_dim = ad;
  model.action_box = std::move(action_box);
  model.discount = opts.beta;
  model.cost_bound = cost_bound;
  model.cost = std::move(cost);
  model.transition = [drift, sigma](const StateVec& x, const ActionVec& act, Rng& rng2) {
    std::normal_distribution<double> noise(0.0, sigma);
    return StateVec{drift(x[0], act) + noise(rng2)};
  };
  const double x0 = opts.x0;
  model.initial = [x0](Rng&) { return StateVec{x0}; };
  return model;
}

MdpModel make_additive_noise(int state_dim, int action_dim,
                             std::function<StateVec(const StateVec&, const ActionVec&)> drift,
                             NoiseSpec noise, std::optional<Box> action_box,
                             CostFn cost, double cost_bound, double beta,
                             InitFn initial) {
  require(state_dim >= 1 && action_dim >= 1, "make_additive_noise: bad dimensions");
  require(noise.dim == state_dim, "make_additive_noise: noise dimension mismatch");
  require(cost_bound > 0.0, "make_additive_noise: cost bound must be positive");
  require(beta > 0.0 && beta < 1.0, "make_additive_noise: beta must lie in (0,1)");
  if (action_box) {
    action_box->validate();
    require(action_box->dim() == action_dim, "make_additive_noise: action box dimension mismatch");
  }

  MdpModel model;
  model.state_dim = state_dim;
  model.action_dim = action_dim;
  model.action_box = std::move(action_box);
  model.discount = beta;
  model.cost_bound = cost_bound;
  model.cost = std::move(cost);
  auto sample = noise.sample;
  model.transition = [drift, sample, state_dim](const StateVec& x, const ActionVec& a,
                                                Rng& rng) {
    StateVec next = drift(x, a);
    check_dim(next, state_dim, "additive_noise: drift output");
    StateVec v;
    sample(rng, v);
    for (int i = 0; i < state_dim; ++i) next[i] += v[i];
    return next;
  };
  model.initial = std::move(initial);
  return model;
}

}  // namespace qpol
