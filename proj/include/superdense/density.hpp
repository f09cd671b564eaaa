#pragma once

#include "superdense/measure.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace superdense {

// Geometric radius ladder r_i = r0 * ratio^i, i = 0..rungs-1.
struct RadiusLadder {
  double r0 = 0.25;
  double ratio = 0.5;
  int rungs = 8;

  double radius(int i) const { return r0 * std::pow(ratio, i); }
  void validate() const {
    require(r0 > 0.0, "RadiusLadder: r0 must be positive");
    require(ratio > 0.0 && ratio < 1.0, "RadiusLadder: ratio in (0,1)");
    require(rungs >= 4, "RadiusLadder: at least 4 rungs");
  }
};

// Residual measure scaled by r^m; value, error in the same scale.
struct DensityQuotient {
  double r = 0.0;
  double m = 0.0;
  MeasureEstimate residual;
  double value = 0.0;
  double error = 0.0;
  bool below_floor = false;
};

enum class Verdict { holds, fails, inconclusive };
enum class DegreeClass { zero, finite, infinite };

const char* to_string(Verdict v);
const char* to_string(DegreeClass c);

struct RungDiagnostic {
  double r = 0.0;
  MeasureEstimate residual;
  double quotient_n = 0.0;  // residual / r^n
  bool below_floor = false;
};

struct DegreeEstimate {
  DegreeClass cls = DegreeClass::zero;
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double stderr_ = 0.0;
  int rungs_used = 0;
  bool outside_bbox_flag = false;  // everything below floor at a point outside bbox
  std::vector<RungDiagnostic> diagnostics;

  // Degree on the extended scale: 0, the exponent, or +infinity.
  double value() const {
    switch (cls) {
      case DegreeClass::zero: return 0.0;
      case DegreeClass::finite: return exponent;
      default: return std::numeric_limits<double>::infinity();
    }
  }
};

DensityQuotient density_quotient(const ImplicitRegion& E, const Vec& x, double r,
                                 double m, const QuadratureSpec& q);

// Decides whether residuals decay like o(r^m) along the ladder. Verdict logic
// uses the three smallest rungs that sit above the measurement floor:
// - every rung below floor        -> holds (no measurable residual at any scale)
// - fewer than three usable rungs -> inconclusive (the ladder bottomed out)
// - monotone decay, significant beyond error bars -> holds
// - all three bounded away from zero with no significant decay -> fails
// - anything else -> inconclusive
Verdict is_m_density_point(const ImplicitRegion& E, const Vec& x, double m,
                           const RadiusLadder& ladder, const QuadratureSpec& q);

// Classifies the density degree at x and fits the decay exponent of the
// residual over the smallest usable rungs (default: bottom 5).
DegreeEstimate estimate_degree(const ImplicitRegion& E, const Vec& x,
                               const RadiusLadder& ladder, const QuadratureSpec& q,
                               int fit_rungs = 5);

// Continuous compactly supported weight; phi(z) for |z| < support_radius.
struct TestBump {
  std::function<double(const Vec&)> phi;
  double support_radius = 1.0;
  std::string name;
};

// Scalar weight g with a printable name for diagnostics.
struct NamedField {
  std::function<double(const Vec&)> fn;
  std::string name;
};

// integral over B(x, r*R) of g(y) * phi((y-x)/r) over the complement of E.
MeasureEstimate test_function_residual(const ImplicitRegion& E, const Vec& x, double r,
                                       const NamedField& g, const TestBump& phi,
                                       const QuadratureSpec& q);

struct PairCheck {
  std::string g_name, phi_name;
  Verdict pair_verdict = Verdict::inconclusive;
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  bool agrees = true;  // no holds-vs-fails contradiction with the direct verdict
};

struct CharacterizationReport {
  Verdict direct = Verdict::inconclusive;
  std::vector<PairCheck> pairs;
  bool consistent = true;
  int disagreements = 0;
};

// Tests the weighted-integral characterization of m-density against the
// direct residual verdict over a battery of (g, phi) pairs with g(x) != 0.
CharacterizationReport characterization_check(const ImplicitRegion& E, const Vec& x,
                                              double m, const RadiusLadder& ladder,
                                              const QuadratureSpec& q);
std::vector<std::pair<NamedField, TestBump>> default_characterization_battery(int n);

struct LawSampleRow {
  Vec x;
  DegreeEstimate e_first, e_second, e_intersection, e_union;
  bool min_law_ok = true;
  bool sup_law_ok = true;
  bool skipped = false;
};

struct LawSuiteReport {
  std::vector<LawSampleRow> rows;
  int min_violations = 0;
  int sup_violations = 0;
  int skipped = 0;
  double tolerance = 0.0;
};

// Intersection degrees never exceed min of the parts; union degrees never
// fall below max (sup) of the parts, each up to tol on the finite scale and
// categorically for 0 / +infinity.
LawSuiteReport degree_law_suite(const ImplicitRegion& E, const ImplicitRegion& F,
                                const std::vector<Vec>& samples,
                                const RadiusLadder& ladder, const QuadratureSpec& q,
                                double tol = 0.3);

struct InvarianceRow {
  Vec x;
  DegreeEstimate base, perturbed;
  bool agrees = true;
};

struct InvarianceReport {
  std::vector<InvarianceRow> rows;
  int disagreements = 0;
  double null_mass = 0.0;  // rasterized measure of the perturbation
};

// Estimates must not react to modifications by a Lebesgue-null set N:
// compares E against E xor N at each sample.
InvarianceReport equivalence_invariance_check(const ImplicitRegion& E,
                                              const ImplicitRegion& N,
                                              const std::vector<Vec>& samples,
                                              const RadiusLadder& ladder,
                                              const QuadratureSpec& q);

// Simple least-squares line fit on (log r, log v); used by the estimators and
// exposed for diagnostics plotting.
struct SlopeFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double stderr_ = 0.0;
  int points = 0;
};

SlopeFit fit_log_slope(const std::vector<double>& r, const std::vector<double>& v);

// Extended-real comparison a <= b + tol, with +inf and 0 compared exactly.
bool degree_leq(double a, double b, double tol);

}  // namespace superdense
