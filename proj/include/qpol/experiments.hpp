#pragma once

#include "qpol/bounds.hpp"
#include "qpol/config.hpp"
#include "qpol/measures.hpp"
#include "qpol/randomized.hpp"
#include "qpol/simulate.hpp"
#include "qpol/systems.hpp"

namespace qpol {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

// Model, base policy and whatever closed-form constants the configured
// system supports.
struct BuiltExperiment {
  MdpModel model;
  Policy base_policy;
  std::optional<RandomizedPolicySpec> base_spec;  // present for mixtures
  SystemConstants constants;
  bool have_discounted_constants = false;
  bool have_ergodicity_constants = false;
  std::string missing_constant;
  bool slb_applies = false;  // zero-cost identity base policy, tracking cost
  double entropy_bits = 0.0;
  // Constants table with provenance (closed form / derived / override).
  std::vector<std::string> constant_notes;
};

BuiltExperiment build_experiment(const ExperimentConfig& cfg);

struct ReportRow {
  long k = 0;
  double rate_bits = 0.0;
  double radius = 0.0;
  double gap = 0.0;
  double gap_ci95 = 0.0;
  std::optional<double> upper_bound;
  std::optional<double> lower_bound;
  std::string verdict = "PASS";
};

struct ErgRow {
  long n = 0;
  double tv = 0.0;
  double bound = 0.0;
};

struct TvRow {
  long k = 0;
  long n = 0;
  double tv = 0.0;
  double bound = 0.0;
  double noise_floor = 0.0;
  std::string verdict = "PASS";
};

struct SlbRow {
  long k = 0;
  double L = 0.0;
  double bound = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  std::string criterion;
  std::vector<ReportRow> rows;
  std::vector<ErgRow> erg_rows;
  std::vector<TvRow> tv_rows;
  std::vector<SlbRow> slb_rows;
  std::optional<double> slope;
  std::string slope_note;
  bool all_pass = true;
  std::vector<std::string> notes;

  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<std::string> defaults_applied;
  double noise_floor = 0.0;  // ergodicity runs

  // Per-rollout gap values by k, kept only under dump_rollouts.
  std::vector<std::pair<long, std::vector<double>>> rollout_dump;

  std::string csv() const;
  std::string json() const;
  std::string rollout_csv() const;
  std::string summary() const;
};

// Experiment drivers. Reports are deterministic byte-for-byte in
// (config, seed), regardless of thread count.
ExperimentReport run_convergence(const ExperimentConfig& cfg);
ExperimentReport run_bounds_check(const ExperimentConfig& cfg);
ExperimentReport run_ergodicity(const ExperimentConfig& cfg);
ExperimentReport run_tvcheck(const ExperimentConfig& cfg);
ExperimentReport run_slb(const ExperimentConfig& cfg);

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& name);

}  // namespace qpol
