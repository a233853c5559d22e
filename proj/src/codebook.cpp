#include "qpol/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace qpol {

namespace {

// Largest m >= 1 with m^d <= k, computed in integer arithmetic so that exact
// powers (k = m^d) are never lost to floating-point floor.
long cells_per_axis(long k, int d) {
  auto pow_leq = [&](long m) {
    long p = 1;
    for (int i = 0; i < d; ++i) {
      if (m != 0 && p > k / m) return false;  // would exceed k
      p *= m;
    }
    return p <= k;
  };
  long m = std::max<long>(1, static_cast<long>(std::floor(std::pow(static_cast<double>(k), 1.0 / d))));
  while (pow_leq(m + 1)) ++m;
  while (m > 1 && !pow_leq(m)) --m;
  return m;
}

double axis_center(double lo, double cell, long j) { return lo + (j + 0.5) * cell; }

}  // namespace

Codebook::Codebook(std::vector<ActionVec> levels, Box box, double covering_radius,
                   std::optional<Grid> grid)
    : levels_(std::move(levels)),
      box_(std::move(box)),
      covering_radius_(covering_radius),
      grid_(std::move(grid)) {
  if (levels_.empty()) throw std::invalid_argument("codebook: empty level set");
  rate_bits_ = std::log2(static_cast<double>(levels_.size()));
}

Codebook build_uniform_net(const Box& box, long k) {
  box.validate();
  if (k < 1) throw std::invalid_argument("build_uniform_net: k must be >= 1");
  if (k > 50'000'000) throw std::invalid_argument("build_uniform_net: k too large to materialize");
  const int d = box.dim();
  const long m = cells_per_axis(k, d);

  Codebook::Grid grid;
  grid.lo = box.lo;
  grid.cell.resize(d);
  grid.cells.resize(d);
  double diag_sq = 0.0;
  long n_levels = 1;
  for (int i = 0; i < d; ++i) {
    const double side = box.side(i);
    // Degenerate axes get a single cell so levels stay distinct.
    grid.cells[i] = side > 0.0 ? m : 1;
    grid.cell[i] = side > 0.0 ? side / static_cast<double>(m) : 0.0;
    diag_sq += grid.cell[i] * grid.cell[i];
    n_levels *= grid.cells[i];
  }

  std::vector<ActionVec> levels;
  levels.reserve(n_levels);
  std::vector<long> idx(d, 0);
  // Lexicographic order, axis 0 most significant.
  for (long count = 0; count < n_levels; ++count) {
    ActionVec level(d);
    for (int i = 0; i < d; ++i) {
      level[i] = grid.cell[i] > 0.0 ? axis_center(grid.lo[i], grid.cell[i], idx[i])
                                    : grid.lo[i];
    }
    levels.push_back(std::move(level));
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < grid.cells[i]) break;
      idx[i] = 0;
    }
  }

  const double radius = 0.5 * std::sqrt(diag_sq);
  return Codebook(std::move(levels), box, radius, std::move(grid));
}

Codebook codebook_from_levels(std::vector<ActionVec> levels, Box box) {
  box.validate();
  if (box.dim() != 1) {
    throw std::invalid_argument("codebook_from_levels: only 1-d level lists are supported");
  }
  if (levels.empty()) throw std::invalid_argument("codebook_from_levels: empty level set");
  std::set<double> distinct;
  for (const auto& lv : levels) {
    check_dim(lv, 1, "codebook_from_levels: level");
    if (!box.contains(lv)) {
      throw std::invalid_argument("codebook_from_levels: level outside box");
    }
    if (!distinct.insert(lv[0]).second) {
      throw std::invalid_argument("codebook_from_levels: duplicate level");
    }
  }
  // Worst box point is an endpoint or a midpoint between adjacent levels.
  std::vector<double> sorted(distinct.begin(), distinct.end());
  double radius = std::max(sorted.front() - box.lo[0], box.hi[0] - sorted.back());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    radius = std::max(radius, 0.5 * (sorted[i + 1] - sorted[i]));
  }
  return Codebook(std::move(levels), std::move(box), radius, std::nullopt);
}

namespace {

std::size_t nearest_by_scan(const Codebook& cb, const ActionVec& a) {
  const auto& levels = cb.levels();
  std::size_t best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      const double d = a[c] - levels[i][c];
      s += d * d;
    }
    if (s < best_sq) {  // strict: ties keep the smallest index
      best_sq = s;
      best = i;
    }
  }
  return best;
}

// Per-axis nearest cell with lower-index tie-breaking. Squared Euclidean
// distance is separable, so the product of per-axis minimizers is the global
// minimizer set and its lexicographically smallest element matches the scan.
std::size_t nearest_by_grid(const Codebook::Grid& g, const ActionVec& a) {
  std::size_t flat = 0;
  const int d = static_cast<int>(g.lo.size());
  for (int i = 0; i < d; ++i) {
    const long m = g.cells[i];
    long best = 0;
    if (g.cell[i] > 0.0) {
      const double t = (a[i] - g.lo[i]) / g.cell[i];
      long j0 = static_cast<long>(std::floor(t));
      j0 = std::clamp<long>(j0, 0, m - 1);
      double best_d = std::numeric_limits<double>::infinity();
      for (long j = std::max<long>(0, j0 - 1); j <= std::min<long>(m - 1, j0 + 1); ++j) {
        const double dist = std::abs(a[i] - axis_center(g.lo[i], g.cell[i], j));
        if (dist < best_d) {
          best_d = dist;
          best = j;
        }
      }
    }
    flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(best);
  }
  return flat;
}

}  // namespace

std::size_t nearest_level_index(const Codebook& cb, const ActionVec& a) {
  check_dim(a, cb.dim(), "nearest_level: action");
  for (double c : a) {
    if (!std::isfinite(c)) throw std::invalid_argument("nearest_level: non-finite action");
  }
  if (cb.grid()) return nearest_by_grid(*cb.grid(), a);
  return nearest_by_scan(cb, a);
}

NearestLevel nearest_level(const Codebook& cb, const ActionVec& a) {
  const std::size_t i = nearest_level_index(cb, a);
  return NearestLevel{i, cb.levels()[i]};
}

double rate(const Codebook& cb) { return cb.rate_bits(); }

Policy quantize_policy(const Policy& policy, std::shared_ptr<const Codebook> cb) {
  const auto* det = std::get_if<DeterministicPolicy>(&policy);
  if (!det) {
    throw std::invalid_argument(
        "quantize_policy: policy must be deterministic (randomized policies go "
        "through quantize_randomized)");
  }
  if (!cb) throw std::invalid_argument("quantize_policy: null codebook");
  return QuantizedPolicy{det->f, std::move(cb)};
}

std::string codebook_to_text(const Codebook& cb) {
  std::string out;
  char buf[64];
  for (const auto& level : cb.levels()) {
    for (std::size_t i = 0; i < level.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", level[i]);
      if (i) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace qpol
