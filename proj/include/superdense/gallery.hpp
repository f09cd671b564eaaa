#pragma once

#include "superdense/measure.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <unordered_set>
#include <vector>

namespace superdense {

// {(x1,x2) : |x2| > |x1|^(m-1)}, n = 2. The origin carries density degree m;
// the residual in B(0,r) approaches (4/m) r^m as r -> 0.
ImplicitRegion make_cusp(double m);

// Open half-space {x : normal . x < offset}.
ImplicitRegion make_half_space(const Vec& normal, double offset);

// Open ball.
ImplicitRegion make_ball_region(const Vec& center, double radius);

// Open ball minus its center; same degree field as the full ball away from the
// deleted point, and degree +infinity at the center itself.
ImplicitRegion make_punctured_ball(const Vec& center, double radius);

// Closed axis-aligned box.
ImplicitRegion make_rectangle(const Box& box);

// --- Swiss cheese: window minus a dense truncated union of open balls ---
//
// Centers follow the Halton sequence (dense, low-discrepancy). Radii are
// assigned by dyadic generation g = ceil(log2(j)/n): r_j = c * 2^(-g*t/n) with
// t = n + 0.25, c calibrated so the total removed volume stays below eps.
// Every retained point then sees removed balls at every scale and the
// residual scales like r^(n+0.25); degree estimates concentrate just above n.
struct SwissCheese {
  Box window;
  double eps = 0.0;
  std::uint64_t seed = 0;
  int generations = 10;
  double exponent_target = 0.0;       // n + 0.25
  double removed_volume_bound = 0.0;  // sum of ball volumes (overlaps only reduce it)
  std::vector<Vec> centers;
  std::vector<double> radii;

  ImplicitRegion region() const;

 private:
  friend SwissCheese make_swiss_cheese(const Box&, double, std::uint64_t, int);
  struct Buckets;
  std::shared_ptr<const Buckets> buckets_;
};

SwissCheese make_swiss_cheese(const Box& window, double eps, std::uint64_t seed,
                              int generations = 10);

// --- graded removal: prescribed density degree t on the retained set ---
//
// Generation k removes balls of radius rho_k = c * h_k^(t/n) centered on the
// dyadic midpoint lattice of spacing h_k = 2^-k, with c = (v0/omega_n)^(1/n)
// so the generation-k removed volume per unit window is v0 * 2^(-k(t-n)).
// Balls whose center already lies near an earlier kept ball are skipped, so
// all removed balls are pairwise disjoint and the removed volume is an exact
// count * omega_n * rho^n ledger.
struct GradedRemoval {
  Box window;
  double t = 0.0;
  int generations = 10;
  double v0 = 0.01;
  double c = 0.0;

  struct Generation {
    double h = 0.0, rho = 0.0;
    std::vector<std::int64_t> counts;  // lattice cells per axis
    std::int64_t kept = 0;
    std::unordered_set<std::int64_t> skipped;  // linear cell ids removed from the lattice
  };
  std::vector<Generation> gens;

  double removed_volume() const;  // exact by disjointness
  bool in_removed_ball(const Vec& x) const;
  ImplicitRegion region() const;
};

GradedRemoval make_graded_removal(const Box& window, double t, int generations = 10,
                                  double v0 = 0.01);

// --- fat Cantor set: middle-open-interval removal with summable fractions ---
struct FatCantor {
  double a = 0.0, b = 1.0;
  std::vector<double> fractions;
  int depth = 0;

  double measure() const;  // exact: (b-a) * prod(1 - delta_k)
  bool member1d(double x) const;
  // Closed surviving interval of the depth-d construction addressed by bits
  // (0 = left child, 1 = right child), path length = depth.
  std::pair<double, double> interval(const std::vector<int>& path) const;
  ImplicitRegion region() const;  // n = 1
};

FatCantor make_fat_cantor(const std::vector<double>& fractions, int depth,
                          double a = 0.0, double b = 1.0);

// The n = 2 cylinder C x [y0, y1].
ImplicitRegion make_fat_cantor_cylinder(const FatCantor& cantor, double y0, double y1);

// --- perimeter helpers for the finite-perimeter threshold m0 = n+1+1/(n-1) ---

double perimeter_polygon(const std::vector<Eigen::Vector2d>& vertices);  // pre: simple
double perimeter_disc(double radius);
double finite_perimeter_degree_threshold(int n);  // n + 1 + 1/(n-1)

// --- catalog: named builders consumed by the CLI and the acceptance runner ---

struct GalleryEntry {
  std::string name;
  std::string parameters;      // echo of defaults, e.g. "m=3"
  std::string expected_class;  // at the listed probe point
  std::string expected_exponent;
  std::string source;  // closed-form | construction-target | empirical
  std::string probe;   // the distinguished point the expectation refers to
};

std::vector<GalleryEntry> gallery_catalog();
std::string gallery_manifest_text();

// Builds a set from a spec string like "cusp:m=3", "disc:r=1",
// "halfplane", "square", "swiss:eps=0.5,seed=7", "graded:t=2.5",
// "cantor:depth=10", "puncture:r=1". Throws ContractViolation on unknown
// names or bad parameters.
ImplicitRegion build_gallery_set(const std::string& spec);

}  // namespace superdense
