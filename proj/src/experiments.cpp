#include "qpol/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace qpol {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Spectral norm of a row-major d x d matrix by power iteration on M^T M.
double operator_norm(const std::vector<double>& M, int d) {
  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d))), mv(d), mtmv(d);
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += M[i * d + j] * v[j];
      mv[i] = s;
    }
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += M[i * d + j] * mv[i];
      mtmv[j] = s;
    }
    double norm = 0.0;
    for (double x : mtmv) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    lambda = norm;
    for (int j = 0; j < d; ++j) v[j] = mtmv[j] / norm;
  }
  return std::sqrt(lambda);
}

DeterministicMap resolve_named_map(const ExperimentConfig& cfg, const std::string& name) {
  NamedPolicy np;
  if (auto it = cfg.policy.named.find(name); it != cfg.policy.named.end()) {
    np = it->second;
  } else if (name == "identity") {
    np = NamedPolicy{"linear", 1.0, 0.0};
  } else if (name == "zero") {
    np = NamedPolicy{"linear", 0.0, 0.0};
  } else {
    std::string available = "identity, zero";
    for (const auto& [k, v] : cfg.policy.named) available += ", " + k;
    throw ConfigError("unknown policy '" + name + "'; available policies: " + available);
  }
  const double gain = np.gain, offset = np.offset;
  return [gain, offset](const StateVec& x) {
    ActionVec a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = gain * x[i] + offset;
    return a;
  };
}

bool policy_is_identity(const ExperimentConfig& cfg) {
  if (!cfg.policy.mixture_weights.empty()) return false;
  const std::string& name = cfg.policy.name;
  if (auto it = cfg.policy.named.find(name); it != cfg.policy.named.end()) {
    return it->second.gain == 1.0 && it->second.offset == 0.0;
  }
  return name == "identity";
}

MdpModel build_model(const SystemConfig& s) {
  const int d = s.dim;
  CostFn cost = s.cost == "tracking" ? tracking_cost(s.cost_cap) : state_abs_cost(s.cost_cap);

  MdpModel model;
  if (s.kind == "linear_tracking" && s.cost == "tracking") {
    model = make_linear_tracking(d, s.A, s.B, s.sigma, s.cost_cap, s.beta, s.action_box);
  } else if (s.kind == "linear_tracking" || s.kind == "additive_noise") {
    std::function<StateVec(const StateVec&, const ActionVec&)> drift;
    if (s.kind == "additive_noise" && s.drift == "tanh") {
      drift = [d](const StateVec& x, const ActionVec&) {
        StateVec out(d);
        for (int i = 0; i < d; ++i) out[i] = std::tanh(x[i]);
        return out;
      };
    } else {
      auto A = s.A;
      auto B = s.B;
      drift = [d, A, B](const StateVec& x, const ActionVec& a) {
        StateVec out(d, 0.0);
        for (int i = 0; i < d; ++i) {
          double v = 0.0;
          for (int j = 0; j < d; ++j) v += A[i * d + j] * x[j] + B[i * d + j] * a[j];
          out[i] = v;
        }
        return out;
      };
    }
    const double sigma = s.sigma;
    InitFn initial = [d, sigma](Rng& rng) {
      std::normal_distribution<double> n(0.0, sigma);
      StateVec x(d);
      for (int i = 0; i < d; ++i) x[i] = n(rng);
      return x;
    };
    model = make_additive_noise(d, d, drift, gaussian_noise(d, s.sigma), s.action_box,
                                cost, s.cost_cap, s.beta, initial);
  } else {  // bounded_drift
    DriftFn drift;
    if (s.drift == "tanh") {
      drift = [](double x, const ActionVec&) { return std::tanh(x); };
    } else {
      drift = [](double, const ActionVec&) { return 0.0; };
    }
    BoundedDriftOptions opts;
    opts.x0 = s.x0;
    opts.beta = s.beta;
    model = make_bounded_drift(s.l_drift, s.sigma, drift, s.action_box, cost,
                               s.cost_cap, opts);
  }
  // Config-driven models carry the trivial schedule c_n = c, which makes the
  // total criterion a plain finite-horizon sum.
  model.cost_schedule = CostSchedule{};
  return model;
}

}  // namespace

BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
  const SystemConfig& s = cfg.system;
  BuiltExperiment built;
  built.model = build_model(s);

  if (cfg.policy.mixture_weights.empty()) {
    built.base_policy = DeterministicPolicy{resolve_named_map(cfg, cfg.policy.name)};
  } else {
    std::vector<DeterministicMap> comps;
    for (const auto& name : cfg.policy.mixture_components) {
      comps.push_back(resolve_named_map(cfg, name));
    }
    built.base_spec = from_finite_mixture(cfg.policy.mixture_weights, comps);
    built.base_policy = as_policy(*built.base_spec);
  }

  // Closed-form constants; explicit [constants] overrides win. Each entry is
  // recorded with its provenance for the report's constants table.
  SystemConstants& c = built.constants;
  auto note = [&](const char* name, double value, const char* provenance) {
    built.constant_notes.push_back(std::string(name) + " = " + fmt_g(value) + " [" +
                                   provenance + "]");
  };
  c.beta = s.beta;
  c.action_dim = built.model.action_dim;
  c.alpha = cfg.ovr_alpha.value_or(covering_alpha_for_box(s.action_box));
  note("alpha", c.alpha,
       cfg.ovr_alpha ? "override" : "derived: sqrt(d) * max side of the action box");
  c.K1 = cfg.ovr_K1.value_or(s.cost == "tracking" ? 1.0 : 0.0);
  note("K1", c.K1,
       cfg.ovr_K1 ? "override"
                  : (s.cost == "tracking" ? "closed form: clipped tracking cost is 1-Lipschitz"
                                          : "closed form: cost ignores the action"));
  double lipschitz_in_a = 0.0;
  if (s.kind == "bounded_drift" || (s.kind == "additive_noise" && s.drift == "tanh")) {
    lipschitz_in_a = 0.0;  // kernel ignores the action
  } else {
    lipschitz_in_a = operator_norm(s.B, s.dim);
  }
  c.K2 = cfg.ovr_K2.value_or(gaussian_kernel_tv_lipschitz(lipschitz_in_a, s.sigma));
  note("K2", c.K2,
       cfg.ovr_K2 ? "override"
                  : (lipschitz_in_a == 0.0
                         ? "closed form: kernel ignores the action"
                         : "derived: Gaussian kernel, 2 L_F / (sigma sqrt(2 pi))"));
  c.M = cfg.ovr_M.value_or(s.cost_cap);
  note("M", c.M, cfg.ovr_M ? "override" : "declared cost cap");
  note("beta", c.beta, "config");
  built.have_discounted_constants = true;
  if (s.kind == "bounded_drift") {
    const auto erg = ergodicity_constants_bounded_gaussian(s.l_drift, s.sigma);
    c.C = cfg.ovr_C.value_or(erg.C);
    c.kappa = cfg.ovr_kappa.value_or(erg.kappa);
  } else {
    c.C = cfg.ovr_C;
    c.kappa = cfg.ovr_kappa;
  }
  if (c.C) {
    note("C", *c.C,
         cfg.ovr_C ? "override" : "closed form: bounded-drift Gaussian chain");
  }
  if (c.kappa) {
    note("kappa", *c.kappa,
         cfg.ovr_kappa ? "override" : "closed form: 1 - epsilon L");
  }
  built.have_ergodicity_constants = c.C && c.kappa;
  if (!c.C) built.missing_constant = "C";
  else if (!c.kappa) built.missing_constant = "kappa";

  built.slb_applies = s.cost == "tracking" && policy_is_identity(cfg);
  built.entropy_bits =
      cfg.entropy_bits.value_or(gaussian_entropy_bits(built.model.state_dim, s.sigma));
  return built;
}

namespace {

void fit_slope(ExperimentReport& report) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : report.rows) {
    if (row.gap > 3.0 * row.gap_ci95 && row.gap > 0.0) {
      pts.emplace_back(std::log(static_cast<double>(row.k)), std::log(row.gap));
    }
  }
  if (pts.size() < 2) {
    report.slope_note = "insufficient points";
    return;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  report.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  report.slope_note = std::to_string(pts.size()) + " points";
}

SlbCriterion slb_criterion(Criterion c) {
  switch (c) {
    case Criterion::Discounted: return SlbCriterion::Discounted;
    case Criterion::Average: return SlbCriterion::Average;
    case Criterion::Total: return SlbCriterion::PerStage;
  }
  return SlbCriterion::PerStage;
}

ExperimentReport base_report(const ExperimentConfig& cfg, const std::string& name) {
  ExperimentReport report;
  report.experiment = name;
  report.criterion = to_string(cfg.criterion);
  report.seed = cfg.seed;
  report.config_hash = cfg.config_hash;
  report.defaults_applied = cfg.defaults_applied;
  return report;
}

// Shared per-k paired-gap loop for convergence and bounds-check runs.
void run_gap_rows(const ExperimentConfig& cfg, const BuiltExperiment& built,
                  bool require_bounds, ExperimentReport& report) {
  if (require_bounds) {
    if (cfg.criterion == Criterion::Total) {
      throw ConfigError("bounds are defined for the discounted and average criteria only");
    }
    if (cfg.criterion == Criterion::Average && !built.have_ergodicity_constants) {
      throw ConfigError(
          "constants unavailable for the average criterion: missing " +
          built.missing_constant +
          " (use a bounded_drift system or set it under [constants])");
    }
  }

  PairedParams params;
  params.tol = cfg.tol;
  params.burn_in = cfg.burn_in;
  params.n_steps = cfg.n_steps;
  params.horizon = cfg.n_steps;
  const long total_rollouts = cfg.n_rollouts * cfg.replications;

  for (std::size_t i = 0; i < cfg.codebook_schedule.size(); ++i) {
    const long k = cfg.codebook_schedule[i];
    auto cb = std::make_shared<const Codebook>(build_uniform_net(cfg.system.action_box, k));

    Policy quantized = built.base_spec
                           ? as_policy(quantize_randomized(*built.base_spec, cb))
                           : quantize_policy(built.base_policy, cb);

    McOptions opts;
    opts.n_threads = cfg.n_threads;
    std::vector<double> per_rollout;
    if (cfg.dump_rollouts) opts.per_rollout = &per_rollout;

    const std::uint64_t root = stream_seed(cfg.seed, 1000 + i);
    const CostEstimate est =
        paired_cost_gap(built.model, quantized, built.base_policy, cfg.criterion,
                        total_rollouts, root, params, opts);

    ReportRow row;
    row.k = k;
    row.rate_bits = cb->rate_bits();
    row.radius = cb->covering_radius();
    row.gap = est.mean;
    row.gap_ci95 = est.ci95_halfwidth;

    if (cfg.criterion == Criterion::Discounted && built.have_discounted_constants) {
      row.upper_bound = discounted_gap_bound(built.constants, k).value;
    } else if (cfg.criterion == Criterion::Average && built.have_ergodicity_constants) {
      row.upper_bound = average_gap_bound(built.constants, k).value;
    }
    if (built.slb_applies && cfg.criterion != Criterion::Total) {
      row.lower_bound = slb_lower_bound(built.model.action_dim, built.entropy_bits,
                                        slb_criterion(cfg.criterion), k,
                                        cfg.system.beta)
                            .value;
    }

    bool fail = false;
    if (row.upper_bound && row.gap > *row.upper_bound + 3.0 * row.gap_ci95) fail = true;
    if (row.lower_bound && row.gap < *row.lower_bound - 3.0 * row.gap_ci95) fail = true;
    row.verdict = fail ? "FAIL" : "PASS";
    if (fail) report.all_pass = false;

    if (cfg.dump_rollouts) report.rollout_dump.emplace_back(k, std::move(per_rollout));
    report.rows.push_back(std::move(row));
  }
  fit_slope(report);
}

}  // namespace

ExperimentReport run_convergence(const ExperimentConfig& cfg) {
  BuiltExperiment built = build_experiment(cfg);
  ExperimentReport report = base_report(cfg, "convergence");
  run_gap_rows(cfg, built, /*require_bounds=*/false, report);
  return report;
}

ExperimentReport run_bounds_check(const ExperimentConfig& cfg) {
  BuiltExperiment built = build_experiment(cfg);
  ExperimentReport report = base_report(cfg, "bounds");
  report.notes = built.constant_notes;
  run_gap_rows(cfg, built, /*require_bounds=*/true, report);
  return report;
}

ExperimentReport run_ergodicity(const ExperimentConfig& cfg) {
  if (cfg.system.kind != "bounded_drift") {
    throw ConfigError("ergodicity experiment requires a scalar bounded_drift system");
  }
  BuiltExperiment built = build_experiment(cfg);
  ExperimentReport report = base_report(cfg, "ergodicity");

  const double C = *built.constants.C;
  const double kappa = *built.constants.kappa;
  const StateVec x0{cfg.erg_x0};
  ErgodicityProfile prof = ergodicity_profile(
      built.model, built.base_policy, x0, cfg.erg_n_max, cfg.erg_samples, cfg.bin_box,
      cfg.bins, stream_seed(cfg.seed, 2000));

  report.noise_floor = prof.noise_floor;
  for (std::size_t i = 0; i < prof.tv_by_n.size(); ++i) {
    ErgRow row;
    row.n = static_cast<long>(i) + 1;
    row.tv = prof.tv_by_n[i];
    row.bound = C * std::pow(kappa, row.n);
    if (row.tv > row.bound + prof.noise_floor) report.all_pass = false;
    report.erg_rows.push_back(row);
  }
  if (prof.fitted_kappa) {
    report.notes.push_back("fitted kappa = " + fmt_g(*prof.fitted_kappa) +
                           ", fitted C = " + fmt_g(*prof.fitted_C));
  } else {
    report.notes.push_back("geometric fit unresolved: profile at the binning noise floor");
  }
  report.notes.push_back("closed-form C = " + fmt_g(C) + ", kappa = " + fmt_g(kappa));
  return report;
}

ExperimentReport run_tvcheck(const ExperimentConfig& cfg) {
  BuiltExperiment built = build_experiment(cfg);
  if (built.base_spec) {
    throw ConfigError("tvcheck requires a deterministic policy");
  }
  ExperimentReport report = base_report(cfg, "tvcheck");

  for (std::size_t i = 0; i < cfg.codebook_schedule.size(); ++i) {
    const long k = cfg.codebook_schedule[i];
    auto cb = std::make_shared<const Codebook>(build_uniform_net(cfg.system.action_box, k));
    const auto rows = check_marginal_tv_bound(
        built.model, built.base_policy, cb, cfg.tv_n_list, cfg.tv_samples, cfg.bin_box,
        cfg.bins, built.constants.alpha, built.constants.K2, k,
        built.model.action_dim, stream_seed(cfg.seed, 3000 + i));
    for (const auto& r : rows) {
      TvRow row;
      row.k = k;
      row.n = r.n;
      row.tv = r.tv;
      row.bound = r.bound;
      row.noise_floor = r.noise_floor;
      row.verdict = r.pass ? "PASS" : "FAIL";
      if (!r.pass) report.all_pass = false;
      report.tv_rows.push_back(row);
    }
  }
  return report;
}

ExperimentReport run_slb(const ExperimentConfig& cfg) {
  BuiltExperiment built = build_experiment(cfg);
  ExperimentReport report = base_report(cfg, "slb");
  for (long k : cfg.codebook_schedule) {
    const BoundReport b =
        slb_lower_bound(built.model.action_dim, built.entropy_bits,
                        slb_criterion(cfg.criterion), k, cfg.system.beta);
    SlbRow row;
    row.k = k;
    row.L = b.details.front().second;
    row.bound = b.value;
    report.slb_rows.push_back(row);
  }
  report.notes.push_back("entropy_bits = " + fmt_g(built.entropy_bits));
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& name) {
  if (name == "convergence") return run_convergence(cfg);
  if (name == "bounds") return run_bounds_check(cfg);
  if (name == "ergodicity") return run_ergodicity(cfg);
  if (name == "tvcheck") return run_tvcheck(cfg);
  if (name == "slb") return run_slb(cfg);
  throw ConfigError("unknown experiment '" + name +
                    "'; available: bounds, convergence, ergodicity, slb, tvcheck");
}

// ---------------------------------------------------------------------------
// Serialization. All numbers print as %.17g so outputs are byte-stable and
// round-trip exactly.

std::string ExperimentReport::csv() const {
  std::string out;
  if (experiment == "ergodicity") {
    out = "n,tv,bound\n";
    for (const auto& r : erg_rows) {
      out += std::to_string(r.n) + "," + fmt_g(r.tv) + "," + fmt_g(r.bound) + "\n";
    }
    return out;
  }
  if (experiment == "tvcheck") {
    out = "k,n,tv,bound,noise_floor,verdict\n";
    for (const auto& r : tv_rows) {
      out += std::to_string(r.k) + "," + std::to_string(r.n) + "," + fmt_g(r.tv) + "," +
             fmt_g(r.bound) + "," + fmt_g(r.noise_floor) + "," + r.verdict + "\n";
    }
    return out;
  }
  if (experiment == "slb") {
    out = "k,L,bound\n";
    for (const auto& r : slb_rows) {
      out += std::to_string(r.k) + "," + fmt_g(r.L) + "," + fmt_g(r.bound) + "\n";
    }
    return out;
  }
  out = "k,rate_bits,radius,gap,gap_ci95,upper_bound,lower_bound,verdict\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + fmt_g(r.rate_bits) + "," + fmt_g(r.radius) + "," +
           fmt_g(r.gap) + "," + fmt_g(r.gap_ci95) + ",";
    if (r.upper_bound) out += fmt_g(*r.upper_bound);
    out += ",";
    if (r.lower_bound) out += fmt_g(*r.lower_bound);
    out += "," + r.verdict + "\n";
  }
  return out;
}

std::string ExperimentReport::json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["version"] = kVersion;
  j["experiment"] = experiment;
  j["criterion"] = criterion;
  j["seed"] = seed;
  j["config_hash"] = fmt_hex(config_hash);
  j["defaults_applied"] = defaults_applied;
  j["all_pass"] = all_pass;

  auto rows_json = nlohmann::ordered_json::array();
  if (experiment == "ergodicity") {
    for (const auto& r : erg_rows) {
      rows_json.push_back({{"n", r.n}, {"tv", r.tv}, {"bound", r.bound}});
    }
    j["noise_floor"] = noise_floor;
  } else if (experiment == "tvcheck") {
    for (const auto& r : tv_rows) {
      rows_json.push_back({{"k", r.k},
                           {"n", r.n},
                           {"tv", r.tv},
                           {"bound", r.bound},
                           {"noise_floor", r.noise_floor},
                           {"verdict", r.verdict}});
    }
  } else if (experiment == "slb") {
    for (const auto& r : slb_rows) {
      rows_json.push_back({{"k", r.k}, {"L", r.L}, {"bound", r.bound}});
    }
  } else {
    for (const auto& r : rows) {
      nlohmann::ordered_json row;
      row["k"] = r.k;
      row["rate_bits"] = r.rate_bits;
      row["radius"] = r.radius;
      row["gap"] = r.gap;
      row["gap_ci95"] = r.gap_ci95;
      if (r.upper_bound) row["upper_bound"] = *r.upper_bound;
      else row["upper_bound"] = nullptr;
      if (r.lower_bound) row["lower_bound"] = *r.lower_bound;
      else row["lower_bound"] = nullptr;
      row["verdict"] = r.verdict;
      rows_json.push_back(row);
    }
    if (slope) j["slope"] = *slope;
    else j["slope"] = nullptr;
    j["slope_note"] = slope_note;
  }
  j["rows"] = rows_json;
  if (!notes.empty()) j["notes"] = notes;
  return j.dump(2) + "\n";
}

std::string ExperimentReport::rollout_csv() const {
  std::string out = "k,rollout,value\n";
  for (const auto& [k, values] : rollout_dump) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out += std::to_string(k) + "," + std::to_string(i) + "," + fmt_g(values[i]) + "\n";
    }
  }
  return out;
}

std::string ExperimentReport::summary() const {
  std::string out;
  char buf[256];
  if (experiment == "ergodicity") {
    for (const auto& r : erg_rows) {
      std::snprintf(buf, sizeof(buf), "n=%-3ld tv=%-10.4g bound=%-10.4g %s\n", r.n, r.tv,
                    r.bound, r.tv <= r.bound + noise_floor ? "PASS" : "FAIL");
      out += buf;
    }
  } else if (experiment == "tvcheck") {
    for (const auto& r : tv_rows) {
      std::snprintf(buf, sizeof(buf), "k=%-5ld n=%-3ld tv=%-10.4g bound=%-10.4g %s\n",
                    r.k, r.n, r.tv, r.bound, r.verdict.c_str());
      out += buf;
    }
  } else if (experiment == "slb") {
    for (const auto& r : slb_rows) {
      std::snprintf(buf, sizeof(buf), "k=%-5ld L=%-10.6g bound=%-10.6g\n", r.k, r.L, r.bound);
      out += buf;
    }
  } else {
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "k=%-5ld gap=%-12.6g ci95=%-10.3g", r.k, r.gap,
                    r.gap_ci95);
      out += buf;
      if (r.upper_bound) {
        std::snprintf(buf, sizeof(buf), " upper=%-12.6g", *r.upper_bound);
        out += buf;
      }
      if (r.lower_bound) {
        std::snprintf(buf, sizeof(buf), " lower=%-12.6g", *r.lower_bound);
        out += buf;
      }
      out += " " + r.verdict + "\n";
    }
    if (slope) {
      std::snprintf(buf, sizeof(buf), "log-log slope of gap vs k: %.4f (%s)\n", *slope,
                    slope_note.c_str());
      out += buf;
    } else if (!slope_note.empty()) {
      out += "slope: " + slope_note + "\n";
    }
  }
  for (const auto& n : notes) out += n + "\n";
  out += "RESULT: ";
  out += all_pass ? "PASS" : "FAIL";
  out += "\n";
  return out;
}

}  // namespace qpol
