#include "qpol.h"

#include <cstring>
#include <string>

#include "qpol/codebook.hpp"
#include "qpol/config.hpp"
#include "qpol/experiments.hpp"

namespace {

thread_local std::string g_last_error;

qpol_status fail(qpol_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Runs `body`, translating exceptions into status codes. Config problems map
// to QPOL_ERR_CONFIG so the CLI can exit 2 on them.
template <class F>
qpol_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return QPOL_OK;
  } catch (const qpol::ConfigError& e) {
    return fail(QPOL_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(QPOL_ERR_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(QPOL_ERR_RUNTIME, e.what());
  }
}

}  // namespace

struct qpol_config {
  qpol::ExperimentConfig cfg;
};

struct qpol_report {
  qpol::ExperimentReport report;
  std::string csv, json, summary, rollout_csv;
};

struct qpol_codebook {
  qpol::Codebook cb;
  std::string text;
};

extern "C" {

const char* qpol_version(void) { return qpol::kVersion; }

const char* qpol_last_error(void) { return g_last_error.c_str(); }

qpol_status qpol_config_load(const char* path, qpol_config** out) {
  if (!path || !out) return fail(QPOL_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new qpol_config{qpol::parse_config(path)}; });
}

qpol_status qpol_config_loads(const char* text, qpol_config** out) {
  if (!text || !out) return fail(QPOL_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new qpol_config{qpol::parse_config_text(text)}; });
}

void qpol_config_free(qpol_config* cfg) { delete cfg; }

qpol_status qpol_config_set_seed(qpol_config* cfg, uint64_t seed) {
  if (!cfg) return fail(QPOL_ERR_ARGUMENT, "null config");
  cfg->cfg.seed = seed;
  return QPOL_OK;
}

qpol_status qpol_config_set_threads(qpol_config* cfg, int n_threads) {
  if (!cfg) return fail(QPOL_ERR_ARGUMENT, "null config");
  if (n_threads < 1) return fail(QPOL_ERR_ARGUMENT, "threads must be >= 1");
  cfg->cfg.n_threads = n_threads;
  return QPOL_OK;
}

qpol_status qpol_config_set_dump_rollouts(qpol_config* cfg, int enable) {
  if (!cfg) return fail(QPOL_ERR_ARGUMENT, "null config");
  cfg->cfg.dump_rollouts = enable != 0;
  return QPOL_OK;
}

qpol_status qpol_config_set_format(qpol_config* cfg, const char* format) {
  if (!cfg || !format) return fail(QPOL_ERR_ARGUMENT, "null argument");
  const std::string f = format;
  if (f != "csv" && f != "json") {
    return fail(QPOL_ERR_CONFIG, "output format must be 'csv' or 'json'");
  }
  cfg->cfg.format = f;
  return QPOL_OK;
}

qpol_status qpol_config_set_out_dir(qpol_config* cfg, const char* dir) {
  if (!cfg || !dir) return fail(QPOL_ERR_ARGUMENT, "null argument");
  cfg->cfg.out_dir = dir;
  return QPOL_OK;
}

const char* qpol_config_format(const qpol_config* cfg) {
  return cfg ? cfg->cfg.format.c_str() : "";
}

const char* qpol_config_out_dir(const qpol_config* cfg) {
  return cfg ? cfg->cfg.out_dir.c_str() : "";
}

int qpol_config_dump_rollouts(const qpol_config* cfg) {
  return cfg && cfg->cfg.dump_rollouts ? 1 : 0;
}

int qpol_config_action_dim(const qpol_config* cfg) {
  return cfg ? cfg->cfg.system.action_box.dim() : 0;
}

qpol_status qpol_config_action_box(const qpol_config* cfg, double* lo, double* hi) {
  if (!cfg || !lo || !hi) return fail(QPOL_ERR_ARGUMENT, "null argument");
  const qpol::Box& box = cfg->cfg.system.action_box;
  for (int i = 0; i < box.dim(); ++i) {
    lo[i] = box.lo[i];
    hi[i] = box.hi[i];
  }
  return QPOL_OK;
}

long qpol_config_first_k(const qpol_config* cfg) {
  return cfg && !cfg->cfg.codebook_schedule.empty() ? cfg->cfg.codebook_schedule.front() : 1;
}

qpol_status qpol_run(const qpol_config* cfg, const char* experiment,
                     qpol_report** out) {
  if (!cfg || !experiment || !out) return fail(QPOL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto* r = new qpol_report{qpol::run_experiment(cfg->cfg, experiment), {}, {}, {}, {}};
    r->csv = r->report.csv();
    r->json = r->report.json();
    r->summary = r->report.summary();
    if (cfg->cfg.dump_rollouts) r->rollout_csv = r->report.rollout_csv();
    *out = r;
  });
}

void qpol_report_free(qpol_report* report) { delete report; }

int qpol_report_passed(const qpol_report* report) {
  return report && report->report.all_pass ? 1 : 0;
}

const char* qpol_report_csv(const qpol_report* report) {
  return report ? report->csv.c_str() : "";
}

const char* qpol_report_json(const qpol_report* report) {
  return report ? report->json.c_str() : "";
}

const char* qpol_report_summary(const qpol_report* report) {
  return report ? report->summary.c_str() : "";
}

const char* qpol_report_rollout_csv(const qpol_report* report) {
  if (!report || report->rollout_csv.empty()) return nullptr;
  return report->rollout_csv.c_str();
}

qpol_status qpol_codebook_build(const double* lo, const double* hi, int dim,
                                long k, qpol_codebook** out) {
  if (!lo || !hi || !out) return fail(QPOL_ERR_ARGUMENT, "null argument");
  if (dim < 1) return fail(QPOL_ERR_ARGUMENT, "dimension must be >= 1");
  return guarded([&] {
    qpol::Box box;
    box.lo.assign(lo, lo + dim);
    box.hi.assign(hi, hi + dim);
    auto cb = qpol::build_uniform_net(box, k);
    auto text = qpol::codebook_to_text(cb);
    *out = new qpol_codebook{std::move(cb), std::move(text)};
  });
}

void qpol_codebook_free(qpol_codebook* cb) { delete cb; }

long qpol_codebook_size(const qpol_codebook* cb) { return cb ? cb->cb.size() : 0; }

double qpol_codebook_rate_bits(const qpol_codebook* cb) {
  return cb ? cb->cb.rate_bits() : 0.0;
}

double qpol_codebook_covering_radius(const qpol_codebook* cb) {
  return cb ? cb->cb.covering_radius() : 0.0;
}

qpol_status qpol_codebook_levels(const qpol_codebook* cb, double* buf, long buf_len) {
  if (!cb || !buf) return fail(QPOL_ERR_ARGUMENT, "null argument");
  const long need = cb->cb.size() * cb->cb.dim();
  if (buf_len < need) return fail(QPOL_ERR_ARGUMENT, "buffer too small");
  long at = 0;
  for (const auto& level : cb->cb.levels()) {
    for (double c : level) buf[at++] = c;
  }
  return QPOL_OK;
}

const char* qpol_codebook_text(const qpol_codebook* cb) {
  return cb ? cb->text.c_str() : "";
}

qpol_status qpol_codebook_nearest(const qpol_codebook* cb, const double* action,
                                  int dim, long* index) {
  if (!cb || !action || !index) return fail(QPOL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    qpol::ActionVec a(action, action + dim);
    *index = static_cast<long>(qpol::nearest_level_index(cb->cb, a));
  });
}

namespace {

qpol::SystemConstants to_constants(const qpol_constants& c) {
  qpol::SystemConstants out;
  out.alpha = c.alpha;
  out.beta = c.beta;
  out.K1 = c.K1;
  out.K2 = c.K2;
  out.M = c.M;
  out.action_dim = c.d;
  if (c.has_ergodicity) {
    out.C = c.C;
    out.kappa = c.kappa;
  }
  return out;
}

}  // namespace

qpol_status qpol_discounted_gap_bound(const qpol_constants* c, long k,
                                      double* value, double* K_out) {
  if (!c || !value) return fail(QPOL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto r = qpol::discounted_gap_bound(to_constants(*c), k);
    *value = r.value;
    if (K_out) *K_out = r.details.front().second;
  });
}

qpol_status qpol_average_gap_bound(const qpol_constants* c, long k, long n,
                                   double* value, long* n_used) {
  if (!c || !value) return fail(QPOL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto r = qpol::average_gap_bound(to_constants(*c), k, n);
    *value = r.value;
    if (n_used) *n_used = static_cast<long>(r.details.front().second);
  });
}

qpol_status qpol_ergodicity_constants(double l_drift, double sigma, double* C,
                                      double* kappa, double* epsilon) {
  if (!C || !kappa || !epsilon) return fail(QPOL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto r = qpol::ergodicity_constants_bounded_gaussian(l_drift, sigma);
    *C = r.C;
    *kappa = r.kappa;
    *epsilon = r.epsilon;
  });
}

qpol_status qpol_gaussian_tv_lipschitz(double lipschitz_f_in_a, double sigma,
                                       double* K2) {
  if (!K2) return fail(QPOL_ERR_ARGUMENT, "null argument");
  return guarded([&] { *K2 = qpol::gaussian_kernel_tv_lipschitz(lipschitz_f_in_a, sigma); });
}

qpol_status qpol_slb_bound(int d, double entropy_bits, const char* criterion,
                           double beta, long k, double* value, double* L_out) {
  if (!criterion || !value) return fail(QPOL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string crit = criterion;
    qpol::SlbCriterion sc;
    if (crit == "per_stage") sc = qpol::SlbCriterion::PerStage;
    else if (crit == "discounted") sc = qpol::SlbCriterion::Discounted;
    else if (crit == "average") sc = qpol::SlbCriterion::Average;
    else throw std::invalid_argument("criterion must be per_stage, discounted or average");
    const auto r = qpol::slb_lower_bound(d, entropy_bits, sc, k, beta);
    *value = r.value;
    if (L_out) *L_out = r.details.front().second;
  });
}

}  // extern "C"
