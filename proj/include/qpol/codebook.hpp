#pragma once

#include <cstddef>
#include <string>

#include "qpol/mdp.hpp"

namespace qpol {

// Finite action set Lambda covering a box. The level order is fixed at
// construction (lexicographic coordinate order for uniform nets) and is the
// tie-breaking order for nearest-level lookups. covering_radius is the exact
// max distance from any point of the box to its nearest level, and
// rate_bits = log2(#levels).
class Codebook {
 public:
  // Grid metadata, present when the codebook is a cell-centered uniform net.
  // Enables O(d) nearest-level lookup that agrees exactly with a linear scan.
  struct Grid {
    std::vector<double> lo;
    std::vector<double> cell;  // per-axis cell width (0 on degenerate axes)
    std::vector<long> cells;   // per-axis cell count
  };

  Codebook(std::vector<ActionVec> levels, Box box, double covering_radius,
           std::optional<Grid> grid);

  const std::vector<ActionVec>& levels() const { return levels_; }
  const Box& box() const { return box_; }
  double covering_radius() const { return covering_radius_; }
  double rate_bits() const { return rate_bits_; }
  int dim() const { return box_.dim(); }
  long size() const { return static_cast<long>(levels_.size()); }
  const std::optional<Grid>& grid() const { return grid_; }

 private:
  std::vector<ActionVec> levels_;
  Box box_;
  double covering_radius_;
  double rate_bits_;
  std::optional<Grid> grid_;
};

// Cell-centered uniform grid over `box` with m = floor(k^(1/d)) cells per
// axis (one on degenerate axes), so the level count is at most k. Levels are
// listed in lexicographic coordinate order and the covering radius is half
// the cell diagonal, which is <= sqrt(d) * max_side * (1/k)^(1/d) for all
// k >= 1.
Codebook build_uniform_net(const Box& box, long k);

// Codebook from an explicit level list (1-d only). Covering radius is
// computed exactly from the level positions and the box endpoints.
Codebook codebook_from_levels(std::vector<ActionVec> levels, Box box);

struct NearestLevel {
  std::size_t index;
  ActionVec level;
};

// Level minimizing Euclidean distance to `a`, ties broken by smallest index
// in the codebook's fixed order. `a` may lie outside the box.
NearestLevel nearest_level(const Codebook& cb, const ActionVec& a);
std::size_t nearest_level_index(const Codebook& cb, const ActionVec& a);

// Rate in bits: log2 of the number of levels.
double rate(const Codebook& cb);

// Nearest-neighbor quantized approximation of a deterministic policy:
// x |-> nearest level to f(x). Throws for randomized input.
Policy quantize_policy(const Policy& policy, std::shared_ptr<const Codebook> cb);

// Plain-text serialization: one level per line, comma-separated coordinates.
std::string codebook_to_text(const Codebook& cb);

}  // namespace qpol
