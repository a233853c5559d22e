// Command-line front end. Links the C API only.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpol.h"

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  std::string format;
  bool dump_rollouts = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")->required();
  cmd->add_option("--seed", args.seed, "override the config's root seed")
      ->each([&](const std::string&) { args.seed_set = true; });
  cmd->add_option("--out", args.out_dir, "output directory (default from config)");
  cmd->add_option("--format", args.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--dump-rollouts", args.dump_rollouts,
                "also write per-rollout gap values");
  cmd->add_option("--threads", args.threads, "worker threads (default from config)")
      ->check(CLI::PositiveNumber);
}

int config_exit(qpol_status status) {
  std::fprintf(stderr, "error: %s\n", qpol_last_error());
  return status == QPOL_ERR_CONFIG ? 2 : 2;
}

bool write_file(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "error: cannot write '%s'\n", path.c_str());
    return false;
  }
  out << text;
  return out.good();
}

int run_experiment_command(const std::string& name, const CommonArgs& args) {
  qpol_config* cfg = nullptr;
  qpol_status status = qpol_config_load(args.config_path.c_str(), &cfg);
  if (status != QPOL_OK) return config_exit(status);

  if (args.seed_set) qpol_config_set_seed(cfg, args.seed);
  if (args.threads > 0) qpol_config_set_threads(cfg, args.threads);
  if (args.dump_rollouts) qpol_config_set_dump_rollouts(cfg, 1);
  if (!args.format.empty() &&
      qpol_config_set_format(cfg, args.format.c_str()) != QPOL_OK) {
    qpol_config_free(cfg);
    return config_exit(QPOL_ERR_CONFIG);
  }
  if (!args.out_dir.empty()) qpol_config_set_out_dir(cfg, args.out_dir.c_str());

  qpol_report* report = nullptr;
  status = qpol_run(cfg, name.c_str(), &report);
  if (status != QPOL_OK) {
    int rc = config_exit(status);
    qpol_config_free(cfg);
    return rc;
  }

  const std::string dir = qpol_config_out_dir(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create output directory '%s': %s\n",
                 dir.c_str(), ec.message().c_str());
    qpol_report_free(report);
    qpol_config_free(cfg);
    return 2;
  }

  const std::string format = qpol_config_format(cfg);
  const std::string path = dir + "/" + name + "." + format;
  const char* payload =
      format == "json" ? qpol_report_json(report) : qpol_report_csv(report);
  bool ok = write_file(path, payload);
  if (ok && qpol_config_dump_rollouts(cfg)) {
    const char* dump = qpol_report_rollout_csv(report);
    if (dump) ok = write_file(dir + "/" + name + "_rollouts.csv", dump);
  }

  std::fputs(qpol_report_summary(report), stdout);
  std::printf("wrote %s\n", path.c_str());

  const int rc = !ok ? 2 : (qpol_report_passed(report) ? 0 : 1);
  qpol_report_free(report);
  qpol_config_free(cfg);
  return rc;
}

int run_codebook_command(const std::string& config_path, long k) {
  qpol_config* cfg = nullptr;
  qpol_status status = qpol_config_load(config_path.c_str(), &cfg);
  if (status != QPOL_OK) return config_exit(status);

  if (k < 1) k = qpol_config_first_k(cfg);
  const int dim = qpol_config_action_dim(cfg);
  std::vector<double> lo(dim), hi(dim);
  qpol_config_action_box(cfg, lo.data(), hi.data());

  qpol_codebook* cb = nullptr;
  status = qpol_codebook_build(lo.data(), hi.data(), dim, k, &cb);
  if (status != QPOL_OK) {
    int rc = config_exit(status);
    qpol_config_free(cfg);
    return rc;
  }

  std::fprintf(stderr, "levels=%ld rate_bits=%.6g covering_radius=%.6g\n",
               qpol_codebook_size(cb), qpol_codebook_rate_bits(cb),
               qpol_codebook_covering_radius(cb));
  std::fputs(qpol_codebook_text(cb), stdout);

  qpol_codebook_free(cb);
  qpol_config_free(cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("qpol ") + qpol_version() +
               " - quantized-policy simulation and bound checks"};
  app.require_subcommand(1);

  const std::vector<std::string> experiments = {"convergence", "bounds", "ergodicity",
                                                "tvcheck", "slb"};
  std::vector<CommonArgs> args(experiments.size());
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(experiments[i]);
    add_common(cmd, args[i]);
  }
  app.get_subcommand("convergence")->description("paired quantization-gap curve over k");
  app.get_subcommand("bounds")->description("measured gaps against closed-form bounds");
  app.get_subcommand("ergodicity")->description("TV mixing profile against C*kappa^n");
  app.get_subcommand("tvcheck")->description("marginal TV against the per-stage bound");
  app.get_subcommand("slb")->description("distortion lower-bound table");

  std::string cb_config;
  long cb_k = 0;
  CLI::App* codebook = app.add_subcommand("codebook", "print a uniform action net");
  codebook->add_option("--config", cb_config, "experiment config file")->required();
  codebook->add_option("--k", cb_k, "target level count (default: first schedule entry)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (codebook->parsed()) return run_codebook_command(cb_config, cb_k);
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    if (app.get_subcommand(experiments[i])->parsed()) {
      return run_experiment_command(experiments[i], args[i]);
    }
  }
  return 2;
}
