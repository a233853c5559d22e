#include <doctest.h>

#include "qpol/config.hpp"

using namespace qpol;

namespace {

const char* kMinimal = R"(
[system]
kind = "linear_tracking"

[experiment]
codebook_schedule = [4, 16]
)";

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "test.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("minimal config fills and echoes documented defaults") {
  const ExperimentConfig cfg = parse_config_text(kMinimal, "test.cfg");
  CHECK(cfg.system.kind == "linear_tracking");
  CHECK(cfg.system.dim == 1);
  CHECK(cfg.system.sigma == 1.0);
  CHECK(cfg.system.beta == 0.9);
  CHECK(cfg.system.cost_cap == 20.0);  // 20 sigma sqrt(d)
  CHECK(cfg.system.action_box.lo == std::vector<double>{-8.0});
  CHECK(cfg.system.action_box.hi == std::vector<double>{8.0});
  CHECK(cfg.codebook_schedule == std::vector<long>{4, 16});
  CHECK(cfg.criterion == Criterion::Discounted);
  CHECK(cfg.n_rollouts == 10000);
  CHECK(cfg.tol == doctest::Approx(1e-3 * 20.0 / 0.1));
  CHECK(cfg.bins == 50);
  CHECK(cfg.seed == 1);
  CHECK(cfg.policy.name == "identity");
  CHECK(cfg.format == "csv");
  CHECK_FALSE(cfg.defaults_applied.empty());
  bool echoed = false;
  for (const auto& line : cfg.defaults_applied) {
    if (line.find("system.cost_cap") != std::string::npos) echoed = true;
  }
  CHECK(echoed);
  CHECK(cfg.config_hash != 0);
}

TEST_CASE("full config round-trips every section") {
  const char* text = R"(
# experiment config
[system]
kind = "bounded_drift"
drift = "tanh"
l_drift = 1.0
sigma = 1.0
beta = 0.9
cost = "tracking"
cost_cap = 20.0
action_box = [-6.0, 6.0]
x0 = 0.5

[policies.track]
kind = "linear"
gain = 1.0
offset = 0.0

[policies.push]
kind = "linear"
gain = 1.0
offset = 0.2

[policy]
mixture = { weights = [0.25, 0.75], components = ["track", "push"] }

[experiment]
criterion = "average"
codebook_schedule = [16, 64, 256]
seed = 7
n_rollouts = 50
burn_in = 500
n_steps = 4000
threads = 2

[binning]
box = [-6.0, 6.0]
bins = 40

[tvcheck]
n_list = [1, 2]
samples = 5000

[ergodicity]
n_max = 20
per_n_samples = 4000
x0 = 2.0

[slb]
entropy_bits = 2.047

[constants]
K2 = 0.0

[output]
dir = "out"
format = "json"
dump_rollouts = true
)";
  const ExperimentConfig cfg = parse_config_text(text, "full.cfg");
  CHECK(cfg.system.kind == "bounded_drift");
  CHECK(cfg.system.x0 == 0.5);
  CHECK(cfg.criterion == Criterion::Average);
  CHECK(cfg.policy.mixture_weights == std::vector<double>{0.25, 0.75});
  CHECK(cfg.policy.mixture_components == std::vector<std::string>{"track", "push"});
  CHECK(cfg.policy.named.at("push").offset == 0.2);
  CHECK(cfg.seed == 7);
  CHECK(cfg.n_threads == 2);
  CHECK(cfg.bins == 40);
  CHECK(cfg.tv_n_list == std::vector<long>{1, 2});
  CHECK(cfg.erg_n_max == 20);
  CHECK(cfg.entropy_bits == 2.047);
  CHECK(cfg.ovr_K2 == 0.0);
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.format == "json");
  CHECK(cfg.dump_rollouts);
}

TEST_CASE("non-increasing schedules are rejected with the documented message") {
  const std::string err = error_of(R"(
[system]
kind = "linear_tracking"
[experiment]
codebook_schedule = [4, 4, 8]
)");
  CHECK(err.find("codebook_schedule must be strictly increasing") != std::string::npos);
  CHECK(error_of(R"(
[system]
kind = "linear_tracking"
[experiment]
codebook_schedule = [16, 8]
)").find("strictly increasing") != std::string::npos);
}

TEST_CASE("unknown system names list the available systems") {
  const std::string err = error_of(R"(
[system]
kind = "cartpole"
)");
  CHECK(err.find("unknown system 'cartpole'") != std::string::npos);
  CHECK(err.find("linear_tracking") != std::string::npos);
  CHECK(err.find("bounded_drift") != std::string::npos);
  CHECK(err.find("additive_noise") != std::string::npos);
}

TEST_CASE("syntax errors carry the line number") {
  const std::string err = error_of("[system]\nkind = \"linear_tracking\"\nsigma 2.0\n");
  CHECK(err.find("test.cfg:3") != std::string::npos);
  CHECK(err.find("expected '='") != std::string::npos);
  const std::string unterminated = error_of("[system]\nkind = \"linear\n");
  CHECK(unterminated.find(":2") != std::string::npos);
}

TEST_CASE("unknown keys come with a suggestion") {
  const std::string err = error_of(R"(
[system]
kind = "linear_tracking"
sigm = 2.0
)");
  CHECK(err.find("unknown key 'sigm'") != std::string::npos);
  CHECK(err.find("did you mean 'sigma'?") != std::string::npos);
  const std::string section = error_of(R"(
[system]
kind = "linear_tracking"
[experimnt]
seed = 3
)");
  CHECK(section.find("unknown section 'experimnt'") != std::string::npos);
  CHECK(section.find("did you mean 'experiment'?") != std::string::npos);
}

TEST_CASE("validation failures name the constraint") {
  CHECK(error_of("[system]\nkind = \"linear_tracking\"\nsigma = -1.0\n")
            .find("sigma must be positive") != std::string::npos);
  CHECK(error_of("[system]\nkind = \"linear_tracking\"\nbeta = 1.5\n")
            .find("beta must lie in (0,1)") != std::string::npos);
  CHECK(error_of("[system]\nkind = \"bounded_drift\"\ndim = 2\n")
            .find("scalar") != std::string::npos);
  CHECK(error_of("[system]\nkind = \"linear_tracking\"\ncost = \"huber\"\n")
            .find("unknown cost") != std::string::npos);
  CHECK(error_of("[system]\nkind = \"linear_tracking\"\n[experiment]\nn_rollouts = 1\n")
            .find("n_rollouts must be >= 2") != std::string::npos);
  CHECK(error_of("[system]\nkind = \"linear_tracking\"\n[output]\nformat = \"xml\"\n")
            .find("format must be 'csv' or 'json'") != std::string::npos);
}

TEST_CASE("duplicate keys are rejected") {
  const std::string err = error_of("[system]\nkind = \"linear_tracking\"\nsigma = 1.0\nsigma = 2.0\n");
  CHECK(err.find("duplicate key 'sigma'") != std::string::npos);
}

TEST_CASE("matrix keys accept scalars and row-major arrays") {
  const ExperimentConfig scalar = parse_config_text(R"(
[system]
kind = "linear_tracking"
dim = 2
a = 1.0
b = -1.0
)");
  CHECK(scalar.system.A == std::vector<double>{1.0, 0.0, 0.0, 1.0});
  CHECK(scalar.system.B == std::vector<double>{-1.0, 0.0, 0.0, -1.0});
  const ExperimentConfig full = parse_config_text(R"(
[system]
kind = "linear_tracking"
dim = 2
a = [1.0, 0.5, 0.0, 1.0]
)");
  CHECK(full.system.A == std::vector<double>{1.0, 0.5, 0.0, 1.0});
  CHECK(error_of(R"(
[system]
kind = "linear_tracking"
dim = 2
a = [1.0, 0.5]
)").find("dim*dim") != std::string::npos);
}

TEST_CASE("config file loading reports missing files") {
  CHECK_THROWS_AS(parse_config("/nonexistent/path.cfg"), ConfigError);
}

TEST_SUITE_END();
