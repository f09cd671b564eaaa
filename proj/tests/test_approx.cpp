#include "doctest.h"

#include "superdense/approximation.hpp"
#include "superdense/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace superdense;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

QuadratureSpec strat(int k, std::uint64_t seed) {
  QuadratureSpec q;
  q.points_per_axis = k;
  q.mode = SampleMode::stratified;
  q.seed = seed;
  return q;
}

RadiusLadder ladder(double r0, double ratio, int rungs) {
  RadiusLadder l;
  l.r0 = r0;
  l.ratio = ratio;
  l.rungs = rungs;
  return l;
}

std::uint64_t mix(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uni(std::uint64_t& s) { return static_cast<double>(mix(s) >> 11) * 0x1.0p-53; }

TargetFunction three_chi(const Box& window) {
  return indicator_target(3.0, cube_box(2, 0.0, 1.0), window, "3chi");
}

double median_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TEST_CASE("quantization floors onto dyadic levels and caps at n + k") {
  // Hand-checked values.
  CHECK(stage_value(2.7, 2, 4) == 2.6875);                     // j = 11
  CHECK(stage_value(3.14159265358979312, 2, 8) == 3.140625);   // j = 292
  CHECK(stage_value(3.0, 2, 4) == 3.0);                        // exact level
  CHECK(stage_value(50.0, 2, 3) == 5.0);                       // cap n + k
  CHECK(stage_value(kInf, 2, 3) == 5.0);
  CHECK(stage_value(1.9, 2, 4) == 0.0);                        // below level n
  CHECK(stage_value(-3.0, 2, 4) == 0.0);
  CHECK(stage_value(0.0, 2, 4) == 0.0);
  CHECK(stage_value(1.0, 1, 6) == 1.0);                        // n itself survives

  // Monotone in k and never above the value, within 2^-k once below the cap.
  std::uint64_t s = 77;
  for (int trial = 0; trial < 500; ++trial) {
    const double v = 2.0 + 6.0 * uni(s);
    double prev = 0.0;
    for (int k = 1; k <= 10; ++k) {
      const double sk = stage_value(v, 2, k);
      CHECK(sk >= prev);
      CHECK(sk <= v);
      if (v - 2.0 < static_cast<double>(k)) CHECK(v - sk < std::ldexp(1.0, -k) + 1e-12);
      prev = sk;
    }
  }
}

TEST_CASE("targets remap sub-threshold values to zero") {
  const Box window = cube_box(2, -1.0, 2.0);
  TargetFunction t = constant_target(2, 1.5, window);
  CHECK(t.remapped(vec2(0.0, 0.0)) == 0.0);
  t = constant_target(2, -4.0, window);
  CHECK(t.remapped(vec2(0.3, 0.3)) == 0.0);
  t = constant_target(2, 2.0, window);
  CHECK(t.remapped(vec2(0.3, 0.3)) == 2.0);

  TargetFunction ind = three_chi(window);
  CHECK(ind.remapped(vec2(0.5, 0.5)) == 3.0);
  CHECK(ind.remapped(vec2(1.5, 0.5)) == 0.0);

  // Two-value targets must keep their boxes apart.
  const Box a = cube_box(2, -1.25, -0.25), b = cube_box(2, 0.25, 1.25);
  TargetFunction tv = two_value_target(2.5, a, 4.0, b, window);
  CHECK(tv.remapped(vec2(-0.5, -0.5)) == 2.5);
  CHECK(tv.remapped(vec2(0.5, 0.5)) == 4.0);
  CHECK(tv.remapped(vec2(0.0, 0.0)) == 0.0);
  CHECK_THROWS_AS(two_value_target(2.5, a, 4.0, cube_box(2, -0.5, 0.5), window),
                  ContractViolation);
}

TEST_CASE("simple stage realizes exactly the sampled levels") {
  const Box window = cube_box(2, -1.0, 2.0);

  SUBCASE("indicator gives one term at its exact level") {
    const SimpleStage s = simple_stage(three_chi(window), 4);
    REQUIRE(s.terms.size() == 1);
    CHECK(s.terms[0].value == 3.0);
    CHECK(s.terms[0].level == 16);
    CHECK(s.evaluate(vec2(0.5, 0.5)) == 3.0);
    CHECK(s.evaluate(vec2(1.5, 0.5)) == 0.0);
    CHECK(s.terms[0].region.member(vec2(0.5, 0.5)));
    CHECK_FALSE(s.terms[0].region.member(vec2(1.5, 0.5)));
    CHECK(s.terms[0].region.bbox.contains(vec2(0.5, 0.5)));
  }

  SUBCASE("below-threshold constants produce no terms") {
    CHECK(simple_stage(constant_target(2, 1.5, window), 4).terms.empty());
    CHECK(simple_stage(constant_target(2, 0.0, window), 4).terms.empty());
  }

  SUBCASE("non-dyadic constant quantizes from below, sharpening with k") {
    const TargetFunction t = constant_target(2, 2.7, window);
    const SimpleStage s4 = simple_stage(t, 4);
    REQUIRE(s4.terms.size() == 1);
    CHECK(s4.terms[0].value == 2.6875);
    const SimpleStage s8 = simple_stage(t, 8);
    REQUIRE(s8.terms.size() == 1);
    CHECK(s8.terms[0].value == 2.69921875);

    std::uint64_t st = 5;
    for (int i = 0; i < 40; ++i) {
      const Vec x = vec2(-1.0 + 3.0 * uni(st), -1.0 + 3.0 * uni(st));
      CHECK(s4.evaluate(x) <= s8.evaluate(x));
      CHECK(s8.evaluate(x) <= 2.7);
    }
  }
}

TEST_CASE("rectangle stage ledger is exact dyadic arithmetic") {
  const Box window = cube_box(2, -1.0, 2.0);

  SUBCASE("grid-aligned square merges to a single shrunk rectangle") {
    const RectanglePartition p = rectangle_stage(simple_stage(three_chi(window), 4), 4, window);
    REQUIRE(p.rects.size() == 1);
    const auto& r = p.rects[0];
    CHECK(r.value == 3.25);  // 3 + 1/4
    CHECK(r.level == 16);
    CHECK(r.box.lo[0] == 0.00390625);  // 1/256
    CHECK(r.box.hi[0] == 0.99609375);  // 255/256
    CHECK(r.lo[0] == 1);
    CHECK(r.hi[0] == 255);
    CHECK(p.kept_area == 0.98443603515625);       // 254^2 / 256^2
    CHECK(p.frame_discard == 0.01556396484375);   // 1020 / 65536
    CHECK(p.partial_bound == 0.0);
    CHECK(p.eps == 0.125);
    CHECK(p.unit == 0.00390625);
    CHECK(p.pairwise_disjoint());
    CHECK(r.value - p.eps > 2.0);

    const RectanglePartition p6 = rectangle_stage(simple_stage(three_chi(window), 6), 6, window);
    REQUIRE(p6.rects.size() == 1);
    CHECK(p6.kept_area == 0.99609756469726562);
    CHECK(p6.frame_discard == 0.003902435302734375);
    // Total discard stays under the stage allowance 2 * 2^-k * |window|.
    CHECK(p6.frame_discard + p6.partial_bound <= 2.0 * std::ldexp(1.0, -6) * 9.0);
  }

  SUBCASE("two-value target yields two disjoint rectangles with their degrees") {
    const Box big = cube_box(2, -2.0, 2.0);
    const TargetFunction tv = two_value_target(2.5, cube_box(2, -1.25, -0.25), 4.0,
                                               cube_box(2, 0.25, 1.25), big);
    const RectanglePartition p = rectangle_stage(simple_stage(tv, 4), 4, big);
    REQUIRE(p.rects.size() == 2);
    std::vector<double> values = {p.rects[0].value, p.rects[1].value};
    std::sort(values.begin(), values.end());
    CHECK(values[0] == 2.75);
    CHECK(values[1] == 4.25);
    CHECK(p.kept_area == 2.0 * 0.98443603515625);
    CHECK(p.frame_discard == 2.0 * 0.01556396484375);
    CHECK(p.partial_bound == 0.0);
    CHECK(p.pairwise_disjoint());
  }

  SUBCASE("support off the grid books mixed cells into the partial ledger") {
    const TargetFunction g =
        indicator_target(3.0, Box(Vec::Zero(2), Vec::Constant(2, 0.53125)), window, "halfish");
    const RectanglePartition p = rectangle_stage(simple_stage(g, 4), 4, window);
    REQUIRE(p.rects.size() == 1);
    CHECK(p.kept_area == 0.24224853515625);      // 126^2 / 256^2
    CHECK(p.frame_discard == 0.00775146484375);  // 508 / 65536
    CHECK(p.partial_bound == 0.06640625);        // 17 mixed cells / 256
    CHECK(p.partial_bound <= std::ldexp(1.0, -4) * 9.0);
  }

  SUBCASE("greedy merge carves an L-shape into two maximal rectangles") {
    TargetFunction f;
    f.n = 2;
    f.window = window;
    f.name = "L";
    f.f = [](const Vec& x) {
      const bool lower = x[0] >= 0.0 && x[0] <= 1.0 && x[1] >= 0.0 && x[1] <= 0.5;
      const bool upper = x[0] >= 0.0 && x[0] <= 0.5 && x[1] >= 0.5 && x[1] <= 1.0;
      return (lower || upper) ? 3.0 : 0.0;
    };
    const RectanglePartition p = rectangle_stage(simple_stage(f, 3), 3, window);
    REQUIRE(p.rects.size() == 2);
    CHECK(p.kept_area == 0.71142578125);
    CHECK(p.frame_discard == 0.03857421875);
    CHECK(p.partial_bound == 0.0);
    CHECK(p.pairwise_disjoint());
    // First block runs the full left column, second fills the lower right.
    CHECK(p.rects[0].lo == std::vector<std::int64_t>{1, 1});
    CHECK(p.rects[0].hi == std::vector<std::int64_t>{63, 127});
    CHECK(p.rects[1].lo == std::vector<std::int64_t>{65, 1});
    CHECK(p.rects[1].hi == std::vector<std::int64_t>{127, 63});
  }

  SUBCASE("non-dyadic windows are rejected") {
    const Box bad = Box(Vec::Zero(2), Vec::Constant(2, 0.3));
    CHECK_THROWS_AS(rectangle_stage(simple_stage(constant_target(2, 3.0, bad), 4), 4, bad),
                    ContractViolation);
  }

  SUBCASE("empty stage gives an empty partition") {
    const RectanglePartition p =
        rectangle_stage(simple_stage(constant_target(2, 0.0, window), 4), 4, window);
    CHECK(p.rects.empty());
    CHECK(p.kept_area == 0.0);
    CHECK(p.partial_bound == 0.0);
  }
}

TEST_CASE("synthesis realizes each rectangle and tracks its removal budget") {
  const Box window = cube_box(2, -1.0, 2.0);

  SUBCASE("graded regime on the unit square") {
    const SynthesizedStage st =
        synthesize_stage(rectangle_stage(simple_stage(three_chi(window), 4), 4, window), 7);
    REQUIRE(st.reports.size() == 1);
    const auto& rep = st.reports[0];
    CHECK(rep.kind == 1);
    CHECK_FALSE(rep.skipped);
    CHECK(rep.generations == 10);  // cell budget caps the depth
    CHECK(rep.budget_target == 0.0625);
    CHECK(rep.param == doctest::Approx(0.0787752).epsilon(1e-4));
    CHECK(rep.removed == doctest::Approx(0.0243904).epsilon(1e-3));
    CHECK(rep.budget_met);
    CHECK(st.removal_achieved == rep.removed);
    CHECK(st.removal_budget_total == 0.0625);

    // Frozen anchors: the rectangle sits at offset 1/256, so generation 7
    // centers land exactly on coordinates of the form odd/256.
    CHECK(st.set.member(vec2(0.51, 0.437)));
    CHECK_FALSE(st.set.member(vec2(0.5, 0.5)));    // a removed-ball center
    CHECK_FALSE(st.set.member(vec2(0.25, 0.75)));  // another lattice center
    CHECK_FALSE(st.set.member(vec2(-0.5, 0.5)));   // off the rectangle

    CHECK_FALSE(st.excludes(vec2(0.51, 0.437), 3.0));  // retained interior
    CHECK(st.excludes(vec2(0.5, 0.5), 3.0));           // removed interior
    CHECK(st.excludes(vec2(0.002, 0.5), 3.0));         // boundary collar
    CHECK(st.excludes(vec2(0.002, 0.5), 0.0));         // collar binds both ways
    CHECK(st.excludes(vec2(-0.9, -0.9), 3.0));         // prescribed but uncovered
    CHECK_FALSE(st.excludes(vec2(-0.9, -0.9), 0.0));   // background is fine
  }

  SUBCASE("level-n rectangles fall into the uniform-degree regime") {
    const TargetFunction t = indicator_target(2.0, cube_box(2, 0.0, 1.0), window, "2chi");
    const SynthesizedStage st =
        synthesize_stage(rectangle_stage(simple_stage(t, 4), 4, window), 9);
    REQUIRE(st.reports.size() == 1);
    const auto& rep = st.reports[0];
    CHECK(rep.kind == 2);
    CHECK(rep.generations == 10);
    CHECK(rep.param == doctest::Approx(std::min(0.0625, 0.02 * 0.98443603515625)));
    CHECK(rep.removed == doctest::Approx(0.95 * rep.param).epsilon(1e-12));
    CHECK(rep.budget_met);

    // The set keeps most of the rectangle.
    std::uint64_t s = 31;
    int inside = 0, member = 0;
    for (int i = 0; i < 4000; ++i) {
      const Vec x = vec2(0.01 + 0.98 * uni(s), 0.01 + 0.98 * uni(s));
      ++inside;
      if (st.set.member(x)) ++member;
    }
    CHECK(member > 0.85 * inside);
  }

  SUBCASE("empty partitions synthesize the empty set") {
    const SynthesizedStage st = synthesize_stage(
        rectangle_stage(simple_stage(constant_target(2, 0.0, window), 4), 4, window), 3);
    CHECK(st.reports.empty());
    CHECK_FALSE(st.set.member(vec2(0.5, 0.5)));
    CHECK_FALSE(st.excludes(vec2(0.5, 0.5), 0.0));
    CHECK(st.excludes(vec2(0.5, 0.5), 2.0));  // a prescribed degree has nowhere to live
  }
}

TEST_CASE("pipeline stages read back their prescribed exponent") {
  const Box window = cube_box(2, -1.0, 2.0);
  const TargetFunction t = indicator_target(2.5, cube_box(2, 0.0, 1.0), window, "2.5chi");
  const auto stages = build_pipeline(t, {5}, 21);
  REQUIRE(stages.size() == 1);
  const auto& st = stages[0];
  REQUIRE(st.reports.size() == 1);
  CHECK(st.reports[0].kind == 1);
  const double b = st.reports[0].value;  // 2.5 + 1/5
  CHECK(b == doctest::Approx(2.7));

  const RadiusLadder lad = ladder(0.2, 0.6, 9);
  const QuadratureSpec q = strat(40, 77);
  std::uint64_t s = 1234;
  std::vector<double> exps;
  int finite = 0, tried = 0;
  while (static_cast<int>(exps.size()) < 10 && tried < 400) {
    ++tried;
    const Vec x = vec2(0.05 + 0.9 * uni(s), 0.05 + 0.9 * uni(s));
    if (!st.set.member(x) || st.excludes(x, 2.5)) continue;
    const DegreeEstimate de = estimate_degree(st.set, x, lad, q);
    if (de.cls == DegreeClass::finite) ++finite;
    exps.push_back(de.value());
  }
  REQUIRE(exps.size() == 10);
  CHECK(finite >= 7);
  const double med = median_sorted(exps);
  CHECK(med > 2.35);
  CHECK(med < 3.1);
}

TEST_CASE("convergence report scores samples against every stage") {
  const Box window = cube_box(2, 0.0, 1.0);
  const TargetFunction t = three_chi(window);

  CHECK_THROWS_AS(convergence_report(t, build_pipeline(t, {3, 4}, 5), 10,
                                     ladder(0.2, 0.6, 8), strat(24, 3), 0.25),
                  ContractViolation);

  const auto stages = build_pipeline(t, {3, 4, 5}, 5);
  const ConvergenceReport rep =
      convergence_report(t, stages, 20, ladder(0.2, 0.6, 8), strat(32, 11), 0.6);
  CHECK(rep.ks == std::vector<int>{3, 4, 5});
  CHECK(rep.rows.size() == 20);
  CHECK(rep.retained + static_cast<int>(std::lround(rep.excluded_fraction * 20.0)) == 20);
  CHECK(rep.retained >= 15);
  REQUIRE(rep.medians.size() == 3);
  for (double m : rep.medians) CHECK(std::isfinite(m));
  CHECK(rep.final_median <= 0.6);
  CHECK(rep.final_ok);
  REQUIRE(rep.medians_by_value.count(3.0) == 1);
  CHECK(rep.medians_by_value.at(3.0).size() == 3);
  // Inside the support every deviation tracks |fit - 3|, so the value-3
  // medians match the global ones on this window.
  CHECK(rep.medians_by_value.at(3.0).back() == rep.final_median);
}

TEST_CASE("increasing family climbs toward the target measure") {
  SUBCASE("unit square target") {
    const ImplicitRegion E = make_rectangle(cube_box(2, 0.0, 1.0));
    const FamilyReport rep =
        increasing_family(E, {3, 4, 5}, 10, ladder(0.2, 0.6, 8), strat(32, 13), 99);
    CHECK_FALSE(rep.empty_target);
    REQUIRE(rep.rows.size() == 3);
    REQUIRE(rep.members.size() == 3);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& row = rep.rows[i];
      CHECK(row.subset_violations == 0);
      CHECK(row.measure <= row.measure_target + 0.01);
      CHECK(row.measure >= row.measure_target - row.measure_slack);
      CHECK(row.exponent_samples >= 8);
      // Finite reads are clamped at n = 2; occasional zero-class reads near
      // removal boundaries enter the median as 0 and can only drag it down.
      CHECK(row.exponent_median >= 1.9);
      CHECK(row.exponent_median <= 2.75);
    }
    // Measures are nondecreasing along the family.
    CHECK(rep.rows[0].measure <= rep.rows[1].measure + 1e-9);
    CHECK(rep.rows[1].measure <= rep.rows[2].measure + 1e-9);
  }

  SUBCASE("empty target yields empty members") {
    ImplicitRegion E;
    E.n = 2;
    E.member = [](const Vec&) { return false; };
    E.bbox = cube_box(2, 0.0, 1.0);
    E.label = "empty";
    const FamilyReport rep =
        increasing_family(E, {3, 4}, 3, ladder(0.2, 0.6, 6), strat(16, 17), 5);
    CHECK(rep.empty_target);
    for (const auto& row : rep.rows) {
      CHECK(row.measure == 0.0);
      CHECK(row.exponent_samples == 0);
    }
    CHECK_FALSE(rep.members[0].member(vec2(0.5, 0.5)));
  }
}

TEST_CASE("impossibility demo contrasts the request with sampled reality") {
  const ImplicitRegion F = make_graded_removal(cube_box(2, -1.0, 1.0), 2.5, 8, 0.05).region();
  const RadiusLadder lad = ladder(0.2, 0.6, 8);
  const QuadratureSpec q = strat(32, 23);

  SUBCASE("requested degree above everything sampled") {
    const ImpossibilityReport rep = impossibility_demo(4.0, F, 8, lad, q, 41);
    CHECK_FALSE(rep.vacuous);
    CHECK(rep.samples_used == 8);
    CHECK(rep.observed_max < 4.0);
    CHECK(rep.observed_median > 2.0);
    CHECK(rep.observed_median < 3.3);
    CHECK(rep.precondition_ok);
    CHECK(rep.contradiction_shown);
    CHECK(rep.narrative.find("falls short") != std::string::npos);
    CHECK(rep.narrative.find("#") != std::string::npos);  // histogram rows
  }

  SUBCASE("requested degree already attained") {
    const ImpossibilityReport rep = impossibility_demo(2.0, F, 8, lad, q, 41);
    CHECK_FALSE(rep.vacuous);
    CHECK_FALSE(rep.precondition_ok);
    CHECK_FALSE(rep.contradiction_shown);
    CHECK(rep.narrative.find("no contradiction is claimed") != std::string::npos);
  }

  SUBCASE("empty set is vacuous") {
    ImplicitRegion empty;
    empty.n = 2;
    empty.member = [](const Vec&) { return false; };
    empty.bbox = cube_box(2, 0.0, 1.0);
    empty.label = "empty";
    const ImpossibilityReport rep = impossibility_demo(4.0, empty, 4, lad, q, 41);
    CHECK(rep.vacuous);
    CHECK_FALSE(rep.contradiction_shown);
    CHECK(rep.narrative.find("vacuous") != std::string::npos);
  }
}

TEST_CASE("same seed reproduces the synthesized stages bitwise") {
  const Box window = cube_box(2, -1.0, 2.0);
  const TargetFunction t = indicator_target(2.0, cube_box(2, 0.0, 1.0), window, "2chi");
  const auto a = build_pipeline(t, {3, 4}, 2024);
  const auto b = build_pipeline(t, {3, 4}, 2024);
  REQUIRE(a.size() == b.size());
  std::uint64_t s = 8;
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].reports.size() == b[i].reports.size());
    for (std::size_t j = 0; j < a[i].reports.size(); ++j) {
      CHECK(a[i].reports[j].removed == b[i].reports[j].removed);
      CHECK(a[i].reports[j].param == b[i].reports[j].param);
    }
    for (int p = 0; p < 500; ++p) {
      const Vec x = vec2(-1.0 + 3.0 * uni(s), -1.0 + 3.0 * uni(s));
      CHECK(a[i].set.member(x) == b[i].set.member(x));
    }
  }
}
