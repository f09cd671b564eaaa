#pragma once

#include "superdense/density.hpp"
#include "superdense/gallery.hpp"
#include "superdense/measure.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace superdense {

// --- staged approximation of a degree-valued target by closed sets ---
//
// A target assigns each point a desired density degree in {0} u [n, +inf).
// The pipeline quantizes it from below on dyadic levels, rasterizes each
// level region into disjoint closed dyadic rectangles, and realizes the
// prescribed degree inside every rectangle by removing balls at controlled
// scales. All rectangle coordinates live on the grid of 2^-(k+4) units, so
// the partition ledger is exact integer arithmetic.

struct TargetFunction {
  int n = 0;
  std::function<double(const Vec&)> f;
  Box window;
  std::string name;

  // Values below n (including negatives) collapse to 0; the pipeline only
  // chases degrees that are actually attainable.
  double remapped(const Vec& x) const;
};

TargetFunction constant_target(int n, double value, const Box& window);
TargetFunction indicator_target(double value, const Box& support, const Box& window,
                                std::string name);
// value_a on box_a, value_b on box_b (disjoint), 0 elsewhere.
TargetFunction two_value_target(double value_a, const Box& box_a, double value_b,
                                const Box& box_b, const Box& window);

// Stage-k dyadic quantization s_k: levels n + j * 2^-k capped at n + k,
// floor-quantized, 0 below level n. Nondecreasing in k and <= the remapped
// target everywhere.
struct SimpleStage {
  int n = 0;
  int k = 0;
  struct Term {
    double value;           // n + j * 2^-k
    std::int64_t level;     // j
    ImplicitRegion region;  // preimage of this level
  };
  std::vector<Term> terms;  // realized levels only, ascending, values >= n

  // Pointwise quantizer s_k; the terms' regions are its level sets.
  std::function<double(const Vec&)> value_fn;

  double evaluate(const Vec& x) const;  // s_k(x), 0 below level n
};

// Quantize pointwise: the stage value of a remapped target sample.
double stage_value(double f_tilde, int n, int k);

// Realized levels are discovered on the same 3^n-per-cell lattice the
// rectangle stage samples, so terms and rectangles agree exactly.
SimpleStage simple_stage(const TargetFunction& f, int k);

// Disjoint closed dyadic rectangles with assigned degrees b = value + 1/k.
struct RectanglePartition {
  int n = 0;
  int k = 0;
  Box window;
  double eps = 0.0;   // 1/(2k); every rectangle satisfies value - eps > n
  double unit = 0.0;  // 2^-(k+4); all coordinates are integer multiples

  struct Rect {
    Box box;                       // closed, already shrunk by one unit per side
    double value;                  // b = level value + 1/k
    std::int64_t level;            // quantization level j
    std::vector<std::int64_t> lo;  // integer bounds in units (inclusive)
    std::vector<std::int64_t> hi;  // integer bounds in units (exclusive)
  };
  std::vector<Rect> rects;

  // Exact ledger, all in window measure units.
  double kept_area = 0.0;       // sum of shrunk rectangle volumes (exact dyadic)
  double frame_discard = 0.0;   // area stripped by the disjointness gap (exact)
  double partial_bound = 0.0;   // cell-volume bound on mixed-occupancy cells
  double window_volume = 0.0;

  bool pairwise_disjoint() const;  // integer interval arithmetic
};

// Rasterizes each term onto the absolute dyadic grid of spacing 2^-k,
// keeps cells whose 3^n midpoint sublattice reads the same level, merges
// kept cells greedily into maximal rectangles, and shrinks every rectangle
// by 2^-(k+4) per side so distinct closed rectangles stay 2^-(k+3) apart.
RectanglePartition rectangle_stage(const SimpleStage& s, int k, const Box& window);

// One closed stage set: per-rectangle ball-removal constructions glued into
// an implicit region.
struct SynthesizedStage {
  int k = 0;
  RectanglePartition partition;

  struct RectReport {
    Box box;
    double value = 0.0;        // prescribed degree b
    int kind = 0;              // 0 skipped, 1 graded removal, 2 uniform-degree regime
    bool skipped = false;      // too small for any removal generation
    double budget_target = 0.0;   // 2^-k / N_k
    double removed = 0.0;         // exact ledger of removed measure
    bool budget_met = false;      // removed <= budget_target
    double param = 0.0;           // v0 (graded) or eps (uniform regime)
    int generations = 0;
  };
  std::vector<RectReport> reports;

  ImplicitRegion set;  // the union of retained rectangle parts, closed
  double removal_budget_total = 0.0;
  double removal_achieved = 0.0;

  // True when x must not be scored against this stage: within margin
  // 2^-(k+3) of a rectangle boundary, inside a removed ball, or carrying a
  // positive target value yet not covered by any rectangle.
  bool excludes(const Vec& x, double f_tilde) const;

 private:
  struct Units;
  std::shared_ptr<const Units> units_;
  friend SynthesizedStage synthesize_stage(const RectanglePartition& p, std::uint64_t seed);
};

// Realizes the partition's degrees: graded ball removal targeting t = b for
// b > n + 1/k, the uniform-degree construction otherwise; per-rectangle
// removal budget 2^-k / N_k (readability floors the removal fraction at 1%,
// so the ledger may exceed the target; budget_met records the outcome).
SynthesizedStage synthesize_stage(const RectanglePartition& p, std::uint64_t seed);

// simple_stage -> rectangle_stage -> synthesize_stage for each requested k.
std::vector<SynthesizedStage> build_pipeline(const TargetFunction& f,
                                             const std::vector<int>& ks,
                                             std::uint64_t seed);

// --- convergence scoring ---

struct ConvergenceRow {
  Vec x;
  double f_value = 0.0;  // remapped target at x
  bool excluded = false;
  std::vector<DegreeClass> cls;   // per stage
  std::vector<double> exponent;   // per stage (class finite), else 0/inf
  std::vector<double> deviation;  // per stage; categorical mismatch = +inf
};

struct ConvergenceReport {
  std::vector<int> ks;
  std::vector<ConvergenceRow> rows;
  std::vector<double> medians;  // per stage, retained rows only
  std::map<double, std::vector<double>> medians_by_value;  // target value -> per-stage
  double final_median = 0.0;
  double excluded_fraction = 0.0;
  bool medians_nonincreasing = false;
  bool final_ok = false;  // final_median <= tol
  bool valid = false;     // excluded_fraction <= 0.2
  int retained = 0;
  double tol = 0.0;
};

// Scores sampled points against every stage: |estimated degree - target|
// with classes compared categorically when the target is 0 (class must be
// zero) and deviations +inf on mismatch. Samples in the exclusion set of any
// stage are dropped and counted. fit_rungs widens the slope fit; the synthetic
// stages are in-regime across the whole ladder, so wider fits cut per-sample
// scatter.
ConvergenceReport convergence_report(const TargetFunction& f,
                                     const std::vector<SynthesizedStage>& stages,
                                     int samples, const RadiusLadder& ladder,
                                     const QuadratureSpec& q, double tol,
                                     int fit_rungs = 5);

// --- increasing families of uniformly dense closed subsets ---

struct FamilyRow {
  int l = 0;
  double measure = 0.0;            // grid measure of F_l
  double measure_target = 0.0;     // grid measure of E
  double measure_slack = 0.0;      // 2^-(l-2) acceptance envelope
  int subset_violations = 0;       // F_l not contained in F_{l+1} at a sample
  double exponent_median = 0.0;    // over retained samples of F_l
  int exponent_samples = 0;
};

struct FamilyReport {
  std::vector<FamilyRow> rows;
  std::vector<ImplicitRegion> members;  // F_l per requested l
  bool empty_target = false;
};

// Runs the pipeline on f = n * indicator(E) and forms the truncated
// intersections F_l = intersection of stage sets with k >= l. F_l grows with
// l by construction; the measures climb to the measure of E.
FamilyReport increasing_family(const ImplicitRegion& E, const std::vector<int>& stages,
                               int samples, const RadiusLadder& ladder,
                               const QuadratureSpec& q, std::uint64_t seed);

// --- impossibility narrative ---

struct ImpossibilityReport {
  double requested_m = 0.0;
  std::vector<double> exponents;  // finite-class samples on F
  double observed_max = 0.0;
  double observed_median = 0.0;
  int samples_used = 0;
  bool vacuous = false;           // no sample landed in F
  bool precondition_ok = false;   // requested_m > observed_max
  bool contradiction_shown = false;
  std::string narrative;
};

// No set can carry degree m * indicator(F) when m exceeds every degree F
// itself attains: degree functions are invariant under null-set equivalence,
// so a candidate would have to coincide with F yet outscore it everywhere.
// The report juxtaposes the requested m with F's sampled exponent histogram.
ImpossibilityReport impossibility_demo(double m, const ImplicitRegion& F, int samples,
                                       const RadiusLadder& ladder, const QuadratureSpec& q,
                                       std::uint64_t seed);

}  // namespace superdense
