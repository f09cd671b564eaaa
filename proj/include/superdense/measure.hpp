#pragma once

#include "superdense/geometry.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace superdense {

enum class SampleMode { midpoint, stratified };

// Lattice quadrature over a box or ball. Levels are successive doublings of
// points_per_axis; the reported error is the difference between the last two
// levels. Stratified mode jitters each cell sample deterministically from
// (seed, domain identity, level, cell index), so results are reproducible and
// independent of evaluation order.
struct QuadratureSpec {
  int points_per_axis = 32;
  int refinement_levels = 2;
  SampleMode mode = SampleMode::midpoint;
  std::uint64_t seed = 0;
};

struct MeasureEstimate {
  double value = 0.0;
  double error = 0.0;

  // Below the measurement floor: indistinguishable from zero at this
  // resolution. A true interior reading (value == 0, error == 0) also lands
  // here; callers that care distinguish via value == 0.
  bool below_floor() const { return std::abs(value) <= 2.0 * error; }
};

// Set given by a membership predicate. Invariant: every member lies in bbox;
// the predicate itself remains authoritative and total on R^n.
struct ImplicitRegion {
  int n = 0;
  std::function<bool(const Vec&)> member;
  Box bbox;
  std::string label;
};

// Finite boolean mask over an axis-aligned grid. Cells are closed boxes of
// size spacing; mask is row-major (last axis fastest), one byte per cell in
// memory, bit-packed on disk.
struct GridRegion {
  Vec origin;                        // lower corner of cell (0,...,0)
  Vec spacing;                       // per-axis cell edge
  std::vector<std::int64_t> cells;   // per-axis cell counts
  std::vector<std::uint8_t> mask;

  int dim() const { return static_cast<int>(origin.size()); }

  std::int64_t cell_count() const {
    std::int64_t c = 1;
    for (auto k : cells) c *= k;
    return c;
  }

  double cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dim(); ++d) v *= spacing[d];
    return v;
  }

  void midpoint(std::int64_t linear, Vec& out) const;
  std::int64_t true_count() const;
  bool same_extent(const GridRegion& other) const;
};

// --- quadrature kernels ---

// Integral of fn over the ball: lattice over the bounding box, samples outside
// the ball contribute nothing. Signed integrands are allowed.
MeasureEstimate ball_integral(const Ball& b, const QuadratureSpec& q,
                              const std::function<double(const Vec&)>& fn);

MeasureEstimate box_integral(const Box& domain, const QuadratureSpec& q,
                             const std::function<double(const Vec&)>& fn);

// L^n(B \ E), the residual measure of E in the ball. Value lies in
// [0, unit_ball_volume(n) * r^n] up to quadrature error.
MeasureEstimate residual_measure(const ImplicitRegion& E, const Ball& b,
                                 const QuadratureSpec& q);

// --- grid ops ---

double grid_measure(const GridRegion& g);

// Rasterize membership at cell midpoints over the window. Cell counts per axis
// are round(extent/spacing), clamped to at least 1; the per-axis spacing is
// adjusted to tile the window exactly.
GridRegion rasterize(const ImplicitRegion& E, double spacing, const Box& window);

GridRegion grid_complement(const GridRegion& g);
GridRegion grid_intersect(const GridRegion& a, const GridRegion& b);
GridRegion grid_union(const GridRegion& a, const GridRegion& b);
GridRegion grid_xor(const GridRegion& a, const GridRegion& b);

// Binary mask file, magic "GRIDRGN1", little-endian, bit-packed row-major.
void save_grid(const GridRegion& g, const std::filesystem::path& file);
GridRegion load_grid(const std::filesystem::path& file);

// --- region algebra (pointwise, lazily composed) ---

Box default_universe(int n);  // [-8, 8]^n

ImplicitRegion region_complement(const ImplicitRegion& E);
ImplicitRegion region_complement(const ImplicitRegion& E, const Box& universe);
ImplicitRegion region_intersect(const ImplicitRegion& a, const ImplicitRegion& b);
ImplicitRegion region_union(const ImplicitRegion& a, const ImplicitRegion& b);
ImplicitRegion region_xor(const ImplicitRegion& a, const ImplicitRegion& b);
ImplicitRegion region_translate(const ImplicitRegion& E, const Vec& shift);

// z is a member iff x + r*z is a member of E: the ball B(x, r*rho) maps to
// B(0, rho). Residuals transform by the exact factor r^n on matching lattices.
ImplicitRegion region_dilate(const ImplicitRegion& E, const Vec& x, double r);

// Cartesian product; dimensions add.
ImplicitRegion region_product(const ImplicitRegion& a, const ImplicitRegion& b);

ImplicitRegion region_from_grid(const GridRegion& g, std::string label = "grid");

}  // namespace superdense
