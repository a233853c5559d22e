#include "qpol/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qpol {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

long checked_cells(const Box& box, int bins) {
  box.validate();
  require(bins >= 1, "histogram: bins_per_axis must be >= 1");
  double cells = std::pow(static_cast<double>(bins), box.dim());
  require(cells <= 5e7, "histogram: too many cells");
  return static_cast<long>(cells);
}

void append_csv_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

double BinnedMeasure::total_mass() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

long BinnedMeasure::cell_of(const StateVec& x) const {
  const int d = box.dim();
  const long overflow_index = cell_count() - 1;
  if (static_cast<int>(x.size()) != d) return overflow_index;
  long idx = 0;
  for (int i = 0; i < d; ++i) {
    if (!(x[i] >= box.lo[i] && x[i] <= box.hi[i])) return overflow_index;
    const double w = box.side(i) / bins_per_axis;
    long j = w > 0.0 ? static_cast<long>((x[i] - box.lo[i]) / w) : 0;
    j = std::clamp<long>(j, 0, bins_per_axis - 1);  // x == hi lands in the last bin
    idx = idx * bins_per_axis + j;
  }
  return idx;
}

std::string BinnedMeasure::to_csv() const {
  const int d = box.dim();
  std::string out = "cell";
  for (int i = 0; i < d; ++i) {
    const std::string axis = d == 1 ? "" : std::to_string(i);
    out += ",lo" + axis + ",hi" + axis;
  }
  out += ",mass\n";
  for (long c = 0; c + 1 < cell_count(); ++c) {
    out += std::to_string(c);
    // Per-axis ranges, innermost axis varying fastest.
    long rem = c;
    std::vector<long> idx(d);
    for (int i = d - 1; i >= 0; --i) {
      idx[i] = rem % bins_per_axis;
      rem /= bins_per_axis;
    }
    for (int i = 0; i < d; ++i) {
      const double w = box.side(i) / bins_per_axis;
      out += ',';
      append_csv_double(out, box.lo[i] + idx[i] * w);
      out += ',';
      append_csv_double(out, box.lo[i] + (idx[i] + 1) * w);
    }
    out += ',';
    append_csv_double(out, mass[c]);
    out += '\n';
  }
  out += "overflow";
  for (int i = 0; i < 2 * d; ++i) out += ",";
  out += ',';
  append_csv_double(out, mass.back());
  out += '\n';
  return out;
}

BinnedMeasure make_histogram(const Box& box, int bins_per_axis) {
  BinnedMeasure h;
  h.box = box;
  h.bins_per_axis = bins_per_axis;
  h.mass.assign(checked_cells(box, bins_per_axis) + 1, 0.0);
  return h;
}

namespace {

void add_sample(BinnedMeasure& h, const StateVec& x, double weight) {
  h.mass[h.cell_of(x)] += weight;
}

StateVec marginal_start(const MdpModel& model, const std::optional<StateVec>& init,
                        Rng& rng) {
  if (init) {
    check_dim(*init, model.state_dim, "marginal: initial state");
    return *init;
  }
  return model.initial(rng);
}

void step(const MdpModel& model, const Policy& policy, StateVec& x, Rng& rng) {
  ActionVec a = policy_action(policy, x, rng);
  x = model.transition(x, a, rng);
}

}  // namespace

BinnedMeasure empirical_marginal(const MdpModel& model, const Policy& policy,
                                 const std::optional<StateVec>& init, long n,
                                 long n_samples, const Box& box, int bins,
                                 std::uint64_t seed) {
  require(n >= 0, "empirical_marginal: n must be >= 0");
  require(n_samples >= 1, "empirical_marginal: n_samples must be >= 1");
  BinnedMeasure h = make_histogram(box, bins);
  const double w = 1.0 / static_cast<double>(n_samples);
  for (long j = 0; j < n_samples; ++j) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(j));
    StateVec x = marginal_start(model, init, rng);
    for (long t = 0; t < n; ++t) step(model, policy, x, rng);
    add_sample(h, x, w);
  }
  return h;
}

double tv_distance(const BinnedMeasure& p, const BinnedMeasure& q) {
  if (p.bins_per_axis != q.bins_per_axis || p.box.lo != q.box.lo ||
      p.box.hi != q.box.hi) {
    throw std::invalid_argument("tv_distance: histograms live on different grids");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.mass.size(); ++i) s += std::abs(p.mass[i] - q.mass[i]);
  return s;
}

BinnedMeasure estimate_invariant_measure(const MdpModel& model, const Policy& policy,
                                         const std::optional<StateVec>& x0,
                                         long burn_in, long n_samples, long thinning,
                                         const Box& box, int bins, std::uint64_t seed) {
  require(burn_in >= 0, "estimate_invariant_measure: burn_in must be >= 0");
  require(thinning >= 1, "estimate_invariant_measure: thinning must be >= 1");
  require(n_samples >= 1, "estimate_invariant_measure: n_samples must be >= 1");
  BinnedMeasure h = make_histogram(box, bins);
  const double w = 1.0 / static_cast<double>(n_samples);
  Rng rng = make_stream(seed, 0);
  StateVec x = marginal_start(model, x0, rng);
  for (long t = 0; t < burn_in; ++t) step(model, policy, x, rng);
  for (long s = 0; s < n_samples; ++s) {
    for (long t = 0; t < thinning; ++t) step(model, policy, x, rng);
    add_sample(h, x, w);
  }
  return h;
}

double tv_noise_floor(int bins, long n_samples) {
  return 3.0 * std::sqrt(static_cast<double>(bins) / static_cast<double>(n_samples));
}

std::string ErgodicityProfile::to_csv(double bound_C, double bound_kappa) const {
  std::string out = "n,tv,bound\n";
  for (std::size_t i = 0; i < tv_by_n.size(); ++i) {
    const long n = static_cast<long>(i) + 1;
    out += std::to_string(n);
    out += ',';
    append_csv_double(out, tv_by_n[i]);
    out += ',';
    append_csv_double(out, bound_C * std::pow(bound_kappa, n));
    out += '\n';
  }
  return out;
}

ErgodicityProfile ergodicity_profile(const MdpModel& model, const Policy& policy,
                                     const std::optional<StateVec>& x0, long n_max,
                                     long per_n_samples, const Box& box, int bins,
                                     std::uint64_t seed, ErgodicityOptions opts) {
  require(n_max >= 2, "ergodicity_profile: n_max must be >= 2");
  require(per_n_samples >= 1, "ergodicity_profile: per_n_samples must be >= 1");

  // One pass per sample records the state at every stage 1..n_max.
  std::vector<BinnedMeasure> marginals;
  marginals.reserve(n_max);
  for (long n = 0; n < n_max; ++n) marginals.push_back(make_histogram(box, bins));
  const double w = 1.0 / static_cast<double>(per_n_samples);
  for (long j = 0; j < per_n_samples; ++j) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(j));
    StateVec x = marginal_start(model, x0, rng);
    for (long n = 1; n <= n_max; ++n) {
      step(model, policy, x, rng);
      add_sample(marginals[n - 1], x, w);
    }
  }

  // The reference chain uses a disjoint stream tag.
  BinnedMeasure nu = estimate_invariant_measure(
      model, policy, x0, opts.invariant_burn_in, per_n_samples,
      opts.invariant_thinning, box, bins, stream_seed(seed, 0x696e76ull));

  ErgodicityProfile prof;
  prof.noise_floor = tv_noise_floor(bins, per_n_samples);
  prof.tv_by_n.reserve(n_max);
  for (long n = 1; n <= n_max; ++n) prof.tv_by_n.push_back(tv_distance(marginals[n - 1], nu));

  // Geometric fit on the entries the binning can actually resolve.
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < prof.tv_by_n.size(); ++i) {
    if (prof.tv_by_n[i] > prof.noise_floor) {
      pts.emplace_back(static_cast<double>(i + 1), std::log(prof.tv_by_n[i]));
    }
  }
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [px, py] : pts) {
      sx += px;
      sy += py;
      sxx += px * px;
      sxy += px * py;
    }
    const double m = static_cast<double>(pts.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;
    prof.fitted_kappa = std::exp(slope);
    prof.fitted_C = std::exp(intercept);
  }
  return prof;
}

std::vector<TvBoundRow> check_marginal_tv_bound(
    const MdpModel& model, const Policy& policy, std::shared_ptr<const Codebook> cb,
    const std::vector<long>& n_list, long per_n_samples, const Box& box, int bins,
    double alpha, double K2, long k, int d, std::uint64_t seed) {
  require(!n_list.empty(), "check_marginal_tv_bound: empty n list");
  require(std::holds_alternative<DeterministicPolicy>(policy),
          "check_marginal_tv_bound: policy must be deterministic");
  for (long n : n_list) require(n >= 1, "check_marginal_tv_bound: stages must be >= 1");
  require(d >= 1, "check_marginal_tv_bound: action dimension must be >= 1");
  require(k >= 1, "check_marginal_tv_bound: k must be >= 1");

  const Policy quantized = quantize_policy(policy, std::move(cb));
  const long n_top = *std::max_element(n_list.begin(), n_list.end());

  std::vector<BinnedMeasure> base_h, quant_h;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    base_h.push_back(make_histogram(box, bins));
    quant_h.push_back(make_histogram(box, bins));
  }
  const double w = 1.0 / static_cast<double>(per_n_samples);

  // Both chains replay the identical stream (common random numbers), so the
  // k -> infinity limit gives exactly coincident histograms.
  for (long j = 0; j < per_n_samples; ++j) {
    const std::uint64_t sj = stream_seed(seed, static_cast<std::uint64_t>(j));
    for (int which = 0; which < 2; ++which) {
      Rng rng(sj);
      const Policy& p = which == 0 ? policy : quantized;
      auto& hists = which == 0 ? base_h : quant_h;
      StateVec x = marginal_start(model, std::nullopt, rng);
      for (long t = 1; t <= n_top; ++t) {
        step(model, p, x, rng);
        for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
          if (n_list[ni] == t) add_sample(hists[ni], x, w);
        }
      }
    }
  }

  const double floor = tv_noise_floor(bins, per_n_samples);
  const double ik = std::pow(1.0 / static_cast<double>(k), 1.0 / static_cast<double>(d));
  std::vector<TvBoundRow> rows;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    TvBoundRow row;
    row.n = n_list[ni];
    row.tv = tv_distance(base_h[ni], quant_h[ni]);
    row.bound = alpha * K2 * (2.0 * row.n - 1.0) * ik;
    row.noise_floor = floor;
    row.pass = row.tv <= row.bound + floor;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qpol
