#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpol/mdp.hpp"
#include "qpol/simulate.hpp"

namespace qpol {

// Configuration or validation failure; the message carries origin and line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SystemConfig {
  std::string kind = "linear_tracking";  // linear_tracking | bounded_drift | additive_noise
  int dim = 1;
  std::vector<double> A;  // d x d row-major; scalar config values become c*I
  std::vector<double> B;
  double sigma = 1.0;
  std::string cost = "tracking";  // tracking | state_abs
  double cost_cap = 0.0;          // resolved default: 20 sigma sqrt(d)
  double beta = 0.9;
  Box action_box;                 // resolved default: [-8 sigma, 8 sigma]^d
  std::string drift = "tanh";     // bounded_drift: tanh | zero; additive_noise: linear | tanh
  double l_drift = 1.0;
  double x0 = 0.0;
};

struct NamedPolicy {
  std::string kind = "linear";  // a(x) = gain * x + offset (per coordinate)
  double gain = 1.0;
  double offset = 0.0;
};

struct PolicyConfig {
  std::string name = "identity";
  std::vector<double> mixture_weights;           // nonempty selects a mixture
  std::vector<std::string> mixture_components;   // names of deterministic policies
  std::map<std::string, NamedPolicy> named;      // [policies.NAME] definitions
};

struct ExperimentConfig {
  SystemConfig system;
  PolicyConfig policy;

  std::vector<long> codebook_schedule{4, 8, 16, 32, 64, 128, 256};
  Criterion criterion = Criterion::Discounted;
  std::uint64_t seed = 1;
  int replications = 1;
  long n_rollouts = 10000;
  double tol = 0.0;  // resolved default: 1e-3 * M / (1 - beta)
  long burn_in = 1000;
  long n_steps = 10000;
  int n_threads = 1;

  Box bin_box;  // resolved default: [-8 sigma, 8 sigma]^state_dim
  int bins = 50;

  std::vector<long> tv_n_list{1, 2, 3};
  long tv_samples = 100000;

  long erg_n_max = 40;
  long erg_samples = 100000;
  double erg_x0 = 2.0;

  std::optional<double> entropy_bits;  // default: Gaussian entropy of the noise

  std::optional<double> ovr_alpha, ovr_K1, ovr_K2, ovr_M, ovr_C, ovr_kappa;

  std::string out_dir = ".";
  std::string format = "csv";  // csv | json
  bool dump_rollouts = false;

  // Metadata echoed into reports.
  std::string origin = "<string>";
  std::uint64_t config_hash = 0;
  std::vector<std::string> defaults_applied;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin = "<string>");

}  // namespace qpol
