#pragma once

#include <cstdint>
#include <string>

#include "qpol/codebook.hpp"
#include "qpol/mdp.hpp"

namespace qpol {

// Histogram over a boxed region of state space with bins_per_axis cells per
// axis plus one overflow cell for samples outside the box. Mass sums to 1.
// Binned total variation lower-bounds the true TV, so upper-bound checks
// against it are one-sided and sound.
struct BinnedMeasure {
  Box box;
  int bins_per_axis = 1;
  std::vector<double> mass;  // bins^d cells in lexicographic order, then overflow

  long cell_count() const { return static_cast<long>(mass.size()); }
  double overflow() const { return mass.back(); }
  double total_mass() const;

  // Cell index of a point, or the overflow index when outside the box.
  long cell_of(const StateVec& x) const;

  std::string to_csv() const;  // cell index, per-axis range, mass
};

BinnedMeasure make_histogram(const Box& box, int bins_per_axis);

// Law of x_n under (model, policy) started from `init` (point mass) or from
// the model's initial distribution, estimated from n_samples independent
// trajectories.
BinnedMeasure empirical_marginal(const MdpModel& model, const Policy& policy,
                                 const std::optional<StateVec>& init, long n,
                                 long n_samples, const Box& box, int bins,
                                 std::uint64_t seed);

// Total variation in the factor-2 convention: sum of |p - q| over all cells
// including overflow, range [0, 2]. Grids must match exactly.
double tv_distance(const BinnedMeasure& p, const BinnedMeasure& q);

// Invariant-law estimate from one long chain: burn_in steps, then n_samples
// states recorded every `thinning` steps.
BinnedMeasure estimate_invariant_measure(const MdpModel& model, const Policy& policy,
                                         const std::optional<StateVec>& x0,
                                         long burn_in, long n_samples, long thinning,
                                         const Box& box, int bins, std::uint64_t seed);

// Multinomial sampling-noise scale for binned TV estimates.
double tv_noise_floor(int bins, long n_samples);

struct ErgodicityProfile {
  std::vector<double> tv_by_n;  // tv_by_n[i] = TV(marginal at n=i+1, invariant estimate)
  double noise_floor = 0.0;
  // Least-squares fit of log TV ~ log C + n log kappa over entries above the
  // noise floor; absent ("unresolved") when fewer than two entries qualify.
  std::optional<double> fitted_kappa;
  std::optional<double> fitted_C;

  std::string to_csv(double bound_C, double bound_kappa) const;  // n,tv,bound
};

struct ErgodicityOptions {
  long invariant_burn_in = 1000;
  long invariant_thinning = 2;
};

ErgodicityProfile ergodicity_profile(const MdpModel& model, const Policy& policy,
                                     const std::optional<StateVec>& x0, long n_max,
                                     long per_n_samples, const Box& box, int bins,
                                     std::uint64_t seed, ErgodicityOptions opts = {});

struct TvBoundRow {
  long n = 0;
  double tv = 0.0;
  double bound = 0.0;
  double noise_floor = 0.0;
  bool pass = true;
};

// Per-n comparison of the binned TV between the marginals of a deterministic
// policy and its quantized approximation against the closed-form bound
// alpha * K2 * (2n-1) * (1/k)^(1/d). Pass at bound + noise floor.
std::vector<TvBoundRow> check_marginal_tv_bound(
    const MdpModel& model, const Policy& policy, std::shared_ptr<const Codebook> cb,
    const std::vector<long>& n_list, long per_n_samples, const Box& box, int bins,
    double alpha, double K2, long k, int d, std::uint64_t seed);

}  // namespace qpol
