#include "qpol/bounds.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

namespace qpol {

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * M_PI);

double inv_k_pow(long k, int d) {
  return std::pow(1.0 / static_cast<double>(k), 1.0 / static_cast<double>(d));
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

std::string BoundReport::to_json() const {
  nlohmann::ordered_json j;
  switch (kind) {
    case BoundKind::DiscountedUpper: j["kind"] = "discounted_upper"; break;
    case BoundKind::AverageUpper: j["kind"] = "average_upper"; break;
    case BoundKind::SlbLower: j["kind"] = "slb_lower"; break;
  }
  j["k"] = k;
  j["value"] = value;
  nlohmann::ordered_json det;
  for (const auto& [name, v] : details) det[name] = v;
  j["details"] = det;
  if (degenerate) j["degenerate"] = true;
  return j.dump();
}

BoundReport discounted_gap_bound(const SystemConstants& c, long k) {
  require(c.beta > 0.0 && c.beta < 1.0, "discounted_gap_bound: beta must lie in (0,1)");
  require(k >= 1, "discounted_gap_bound: k must be >= 1");
  require(c.action_dim >= 1, "discounted_gap_bound: action dimension must be >= 1");
  const double K = c.alpha / (1.0 - c.beta) *
                   (c.K1 - c.beta * c.K2 * c.M +
                    2.0 * c.beta * c.M * c.K2 / (1.0 - c.beta));
  BoundReport r;
  r.kind = BoundKind::DiscountedUpper;
  r.k = k;
  r.value = K * inv_k_pow(k, c.action_dim);
  r.details = {{"K", K}};
  r.degenerate = K <= 0.0;
  return r;
}

BoundReport average_gap_bound(const SystemConstants& c, long k, long n) {
  require(k >= 1, "average_gap_bound: k must be >= 1");
  require(c.action_dim >= 1, "average_gap_bound: action dimension must be >= 1");
  if (!c.C || !c.kappa) {
    throw std::invalid_argument("average_gap_bound: missing ergodicity constants C/kappa");
  }
  const double C = *c.C, kappa = *c.kappa;
  require(C > 0.0, "average_gap_bound: C must be positive");
  require(kappa > 0.0 && kappa < 1.0, "average_gap_bound: kappa must lie in (0,1)");

  const double ik = inv_k_pow(k, c.action_dim);
  auto value_at = [&](long m) {
    const double K_n = (2.0 * m - 1.0) * c.K2 * c.alpha * c.M + c.K1 * c.alpha;
    return std::pair<double, double>{2.0 * c.M * C * std::pow(kappa, m) + K_n * ik, K_n};
  };

  long n_star = n;
  if (n < 0) {
    // Scan for the minimizer: the mixing term decays, the K_n term grows.
    constexpr long kNCap = 10000;
    double best = std::numeric_limits<double>::infinity();
    n_star = 0;
    for (long m = 0; m <= kNCap; ++m) {
      const auto [v, kn] = value_at(m);
      (void)kn;
      if (v < best) {
        best = v;
        n_star = m;
      }
      if (2.0 * c.M * C * std::pow(kappa, m) <
          std::numeric_limits<double>::epsilon() * std::max(1.0, best)) {
        break;
      }
    }
  }

  const auto [v, kn] = value_at(n_star);
  BoundReport r;
  r.kind = BoundKind::AverageUpper;
  r.k = k;
  r.value = v;
  r.details = {{"n", static_cast<double>(n_star)},
               {"K_n", kn},
               {"mixing_term", 2.0 * c.M * C * std::pow(kappa, n_star)},
               {"net_term", kn * ik}};
  return r;
}

ErgodicityConstants ergodicity_constants_bounded_gaussian(double l_drift,
                                                          double sigma) {
  require(l_drift > 0.0, "ergodicity constants: drift bound must be positive");
  require(sigma > 0.0, "ergodicity constants: sigma must be positive");
  ErgodicityConstants out;
  out.C = 2.0;
  out.epsilon = std::exp(-(2.0 * l_drift) * (2.0 * l_drift) / (2.0 * sigma * sigma)) /
                (sigma * kSqrt2Pi);
  out.kappa = 1.0 - out.epsilon * l_drift;
  if (!(out.kappa > 0.0 && out.kappa < 1.0)) {
    throw std::invalid_argument("ergodicity constants: kappa outside (0,1)");
  }
  return out;
}

double gaussian_kernel_tv_lipschitz(double lipschitz_f_in_a, double sigma) {
  require(lipschitz_f_in_a >= 0.0, "gaussian_kernel_tv_lipschitz: negative Lipschitz constant");
  require(sigma > 0.0, "gaussian_kernel_tv_lipschitz: sigma must be positive");
  return 2.0 * lipschitz_f_in_a / (sigma * kSqrt2Pi);
}

double unit_ball_volume(int d) {
  require(d >= 1, "unit_ball_volume: dimension must be >= 1");
  return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double gaussian_entropy_bits(int d, double sigma) {
  require(d >= 1 && sigma > 0.0, "gaussian_entropy_bits: bad arguments");
  return 0.5 * d * std::log2(2.0 * M_PI * M_E * sigma * sigma);
}

BoundReport slb_lower_bound(int d, double entropy, SlbCriterion criterion,
                            long k, double beta, EntropyUnit unit) {
  require(d >= 1, "slb_lower_bound: dimension must be >= 1");
  require(k >= 1, "slb_lower_bound: k must be >= 1");
  require(std::isfinite(entropy), "slb_lower_bound: entropy must be finite");
  const double h_bits = unit == EntropyUnit::Bits ? entropy : entropy / std::log(2.0);
  const double vd = unit_ball_volume(d);
  const double L = d / 2.0 *
                   std::pow(std::exp2(h_bits) / (d * vd * std::tgamma(static_cast<double>(d))),
                            1.0 / static_cast<double>(d));
  double value = L * inv_k_pow(k, d);
  if (criterion == SlbCriterion::Discounted) {
    require(beta > 0.0 && beta < 1.0, "slb_lower_bound: discounted criterion needs beta in (0,1)");
    value /= 1.0 - beta;
  }
  BoundReport r;
  r.kind = BoundKind::SlbLower;
  r.k = k;
  r.value = value;
  r.details = {{"L", L}, {"V_d", vd}, {"entropy_bits", h_bits}};
  return r;
}

double covering_alpha_for_box(const Box& box) {
  box.validate();
  return std::sqrt(static_cast<double>(box.dim())) * box.max_side();
}

}  // namespace qpol
