#include <doctest.h>

#include <cmath>

#include "qpol/experiments.hpp"

using namespace qpol;

namespace {

// Small tracking-system config: fast enough for unit tests, noisy enough to
// exercise the whole path.
const char* kSmallTracking = R"(
[system]
kind = "linear_tracking"
a = 1.0
b = -1.0
sigma = 1.0
beta = 0.9

[experiment]
codebook_schedule = [4, 8, 16]
n_rollouts = 400
seed = 5
)";

const char* kBoundedDrift = R"(
[system]
kind = "bounded_drift"
drift = "tanh"
l_drift = 1.0
sigma = 1.0
action_box = [-6.0, 6.0]

[experiment]
criterion = "average"
codebook_schedule = [16, 64]
n_rollouts = 16
burn_in = 200
n_steps = 2000
seed = 11

[binning]
box = [-6.0, 6.0]

[ergodicity]
n_max = 8
per_n_samples = 5000
x0 = 2.0

[tvcheck]
n_list = [1, 2]
samples = 4000
)";

ExperimentConfig small_tracking() { return parse_config_text(kSmallTracking, "small.cfg"); }

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("convergence: complete rows, sandwich verdicts, slope") {
  ExperimentConfig cfg = small_tracking();
  const ExperimentReport report = run_convergence(cfg);
  REQUIRE(report.rows.size() == 3);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const ReportRow& row = report.rows[i];
    CHECK(row.k == cfg.codebook_schedule[i]);
    CHECK(row.rate_bits == doctest::Approx(std::log2(static_cast<double>(row.k))));
    CHECK(row.radius == doctest::Approx(8.0 / row.k));  // box [-8,8]
    CHECK(row.gap > 0.0);
    CHECK(row.upper_bound.has_value());
    CHECK(row.lower_bound.has_value());  // identity policy, tracking cost
    CHECK(row.verdict == "PASS");
  }
  CHECK(report.all_pass);
  REQUIRE(report.slope.has_value());
  CHECK(*report.slope < -0.5);
  CHECK(*report.slope > -1.6);
}

TEST_CASE("convergence: a single k cannot support a slope fit") {
  ExperimentConfig cfg = small_tracking();
  cfg.codebook_schedule = {8};
  const ExperimentReport report = run_convergence(cfg);
  CHECK(report.rows.size() == 1);
  CHECK_FALSE(report.slope.has_value());
  CHECK(report.slope_note == "insufficient points");
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  ExperimentConfig cfg = small_tracking();
  const ExperimentReport a = run_convergence(cfg);
  const ExperimentReport b = run_convergence(cfg);
  CHECK(a.csv() == b.csv());
  CHECK(a.json() == b.json());

  ExperimentConfig threaded = cfg;
  threaded.n_threads = 4;
  const ExperimentReport c = run_convergence(threaded);
  CHECK(a.csv() == c.csv());
  CHECK(a.json() == c.json());

  ExperimentConfig reseeded = cfg;
  reseeded.seed = 6;
  CHECK(run_convergence(reseeded).csv() != a.csv());
}

TEST_CASE("rollout dump reproduces the reported gaps exactly") {
  ExperimentConfig cfg = small_tracking();
  cfg.dump_rollouts = true;
  const ExperimentReport report = run_convergence(cfg);
  REQUIRE(report.rollout_dump.size() == report.rows.size());
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& [k, values] = report.rollout_dump[i];
    CHECK(k == report.rows[i].k);
    REQUIRE(static_cast<long>(values.size()) == cfg.n_rollouts);
    double sum = 0.0;
    for (double v : values) sum += v;
    CHECK(std::abs(sum / values.size() - report.rows[i].gap) <= 1e-12);
  }
  const std::string dump = report.rollout_csv();
  CHECK(dump.rfind("k,rollout,value\n", 0) == 0);
}

TEST_CASE("csv carries the documented column head") {
  const ExperimentReport report = run_convergence(small_tracking());
  CHECK(report.csv().rfind("k,rate_bits,radius,gap,gap_ci95,upper_bound,lower_bound,verdict\n",
                           0) == 0);
  const std::string json = report.json();
  for (const char* field :
       {"\"schema_version\"", "\"config_hash\"", "\"seed\"", "\"slope\"", "\"rows\""}) {
    CHECK(json.find(field) != std::string::npos);
  }
}

TEST_CASE("bounds check passes with honest constants on the tracking system") {
  const ExperimentReport report = run_bounds_check(small_tracking());
  CHECK(report.all_pass);
  for (const auto& row : report.rows) {
    CHECK(row.upper_bound.has_value());
    CHECK(row.gap <= *row.upper_bound + 3.0 * row.gap_ci95);
  }
}

TEST_CASE("bounds check: corrupting K2 on an action-dependent system fails rows") {
  // State-only cost makes K1 = 0; with K2 forced to zero the upper bound
  // collapses to 0 while the true gap stays positive.
  ExperimentConfig cfg = parse_config_text(R"(
[system]
kind = "additive_noise"
drift = "linear"
a = 1.0
b = -1.0
sigma = 1.0
beta = 0.9
cost = "state_abs"

[experiment]
codebook_schedule = [16]
n_rollouts = 2000
seed = 3

[constants]
K2 = 0.0
)",
                                           "corrupt.cfg");
  const ExperimentReport corrupted = run_bounds_check(cfg);
  CHECK_FALSE(corrupted.all_pass);
  bool some_fail = false;
  for (const auto& row : corrupted.rows) some_fail |= row.verdict == "FAIL";
  CHECK(some_fail);

  ExperimentConfig honest = cfg;
  honest.ovr_K2.reset();
  CHECK(run_bounds_check(honest).all_pass);
}

TEST_CASE("bounds check: average criterion needs ergodicity constants") {
  ExperimentConfig cfg = small_tracking();
  cfg.criterion = Criterion::Average;
  try {
    run_bounds_check(cfg);
    FAIL("expected a missing-constant error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("missing C") != std::string::npos);
  }
  // Supplying the constants unblocks the run.
  cfg.ovr_C = 2.0;
  cfg.ovr_kappa = 0.95;
  cfg.n_rollouts = 8;
  cfg.n_steps = 500;
  cfg.burn_in = 100;
  const ExperimentReport report = run_bounds_check(cfg);
  CHECK(report.rows.size() == 3);
}

TEST_CASE("bounded-drift average bounds check passes") {
  const ExperimentConfig cfg = parse_config_text(kBoundedDrift, "bd.cfg");
  const ExperimentReport report = run_bounds_check(cfg);
  CHECK(report.all_pass);
  for (const auto& row : report.rows) {
    CHECK(row.upper_bound.has_value());
    CHECK(row.lower_bound.has_value());  // additive noise + tracking + identity
  }
}

TEST_CASE("ergodicity run: tanh chain passes, non-scalar systems are rejected") {
  const ExperimentConfig cfg = parse_config_text(kBoundedDrift, "bd.cfg");
  const ExperimentReport report = run_ergodicity(cfg);
  REQUIRE(report.erg_rows.size() == 8);
  CHECK(report.all_pass);
  CHECK(report.csv().rfind("n,tv,bound\n", 0) == 0);
  const double kappa = 0.94600903348681195;
  for (const auto& row : report.erg_rows) {
    CHECK(row.bound == doctest::Approx(2.0 * std::pow(kappa, row.n)));
  }

  ExperimentConfig wrong = small_tracking();
  CHECK_THROWS_AS(run_ergodicity(wrong), ConfigError);
}

TEST_CASE("tvcheck run: rows per (k, n) and a deterministic-policy requirement") {
  const ExperimentConfig cfg = parse_config_text(kBoundedDrift, "bd.cfg");
  const ExperimentReport report = run_tvcheck(cfg);
  REQUIRE(report.tv_rows.size() == 4);  // two k, two n
  CHECK(report.all_pass);
  CHECK(report.csv().rfind("k,n,tv,bound,noise_floor,verdict\n", 0) == 0);

  ExperimentConfig mixture = parse_config_text(R"(
[system]
kind = "linear_tracking"
[policy]
mixture = { weights = [0.5, 0.5], components = ["identity", "identity"] }
[experiment]
codebook_schedule = [4]
)",
                                               "mix.cfg");
  CHECK_THROWS_AS(run_tvcheck(mixture), ConfigError);
}

TEST_CASE("slb run tabulates the closed-form floor") {
  ExperimentConfig cfg = small_tracking();
  const ExperimentReport report = run_slb(cfg);
  REQUIRE(report.slb_rows.size() == 3);
  const double L = 1.0331828385306232;
  for (const auto& row : report.slb_rows) {
    CHECK(row.L == doctest::Approx(L).epsilon(1e-12));
    CHECK(row.bound == doctest::Approx(L / 0.1 / row.k).epsilon(1e-12));
  }
  CHECK(report.csv().rfind("k,L,bound\n", 0) == 0);
}

TEST_CASE("mixture policies run end to end through convergence") {
  ExperimentConfig cfg = parse_config_text(R"(
[system]
kind = "linear_tracking"
a = 1.0
b = -1.0
sigma = 0.1
beta = 0.5
action_box = [-1.0, 1.0]

[policies.push]
kind = "linear"
gain = 1.0
offset = 0.2

[policy]
mixture = { weights = [0.5, 0.5], components = ["identity", "push"] }

[experiment]
codebook_schedule = [8, 32]
n_rollouts = 400
seed = 9
)",
                                           "mix2.cfg");
  const ExperimentReport report = run_convergence(cfg);
  REQUIRE(report.rows.size() == 2);
  for (const auto& row : report.rows) {
    CHECK(row.gap > 0.0);
    CHECK(row.upper_bound.has_value());
    CHECK_FALSE(row.lower_bound.has_value());  // mixture base cost is nonzero
    CHECK(row.verdict == "PASS");
  }
  CHECK(report.rows[1].gap < report.rows[0].gap + 3.0 * report.rows[0].gap_ci95);
}

TEST_CASE("randomized policies satisfy the same bounds as deterministic ones") {
  // Mixture base policy on the bounded-drift chain: the average-criterion
  // bound applies with unchanged constants and must still hold.
  ExperimentConfig cfg = parse_config_text(R"(
[system]
kind = "bounded_drift"
drift = "tanh"
l_drift = 1.0
sigma = 1.0
action_box = [-6.0, 6.0]

[policies.push]
kind = "linear"
gain = 1.0
offset = 0.2

[policy]
mixture = { weights = [0.5, 0.5], components = ["identity", "push"] }

[experiment]
criterion = "average"
codebook_schedule = [16, 64]
n_rollouts = 16
burn_in = 200
n_steps = 4000
seed = 21
)",
                                           "mix-avg.cfg");
  const ExperimentReport avg = run_bounds_check(cfg);
  CHECK(avg.all_pass);
  cfg.criterion = Criterion::Discounted;
  const ExperimentReport disc = run_bounds_check(cfg);
  CHECK(disc.all_pass);
}

TEST_CASE("bounds reports carry a constants table with provenance") {
  const ExperimentReport report = run_bounds_check(small_tracking());
  bool alpha_note = false, k2_note = false;
  for (const auto& n : report.notes) {
    if (n.rfind("alpha = ", 0) == 0 && n.find("derived") != std::string::npos) {
      alpha_note = true;
    }
    if (n.rfind("K2 = ", 0) == 0 && n.find("Gaussian kernel") != std::string::npos) {
      k2_note = true;
    }
  }
  CHECK(alpha_note);
  CHECK(k2_note);

  ExperimentConfig overridden = small_tracking();
  overridden.ovr_K2 = 0.5;
  const ExperimentReport report2 = run_bounds_check(overridden);
  bool override_note = false;
  for (const auto& n : report2.notes) {
    if (n.rfind("K2 = ", 0) == 0 && n.find("[override]") != std::string::npos) {
      override_note = true;
    }
  }
  CHECK(override_note);
}

TEST_CASE("replications pool extra rollouts into the same rows") {
  ExperimentConfig cfg = small_tracking();
  cfg.codebook_schedule = {8};
  cfg.n_rollouts = 200;
  const ExperimentReport once = run_convergence(cfg);
  cfg.replications = 3;
  const ExperimentReport pooled = run_convergence(cfg);
  REQUIRE(pooled.rows.size() == 1);
  // More rollouts shrink the confidence interval.
  CHECK(pooled.rows[0].gap_ci95 < once.rows[0].gap_ci95);
}

TEST_CASE("unknown policy names list what is available") {
  ExperimentConfig cfg = small_tracking();
  cfg.policy.name = "identty";
  try {
    run_convergence(cfg);
    FAIL("expected an unknown-policy error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("unknown policy 'identty'") != std::string::npos);
    CHECK(msg.find("identity") != std::string::npos);
  }
}

TEST_CASE("run_experiment dispatches by name") {
  ExperimentConfig cfg = small_tracking();
  cfg.codebook_schedule = {4};
  cfg.n_rollouts = 50;
  CHECK(run_experiment(cfg, "slb").experiment == "slb");
  CHECK_THROWS_AS(run_experiment(cfg, "nonsense"), ConfigError);
}

TEST_SUITE_END();
