#include "superdense/forms.hpp"

#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

using namespace superdense;

namespace {

// Independent parity oracle: bubble-sort the concatenation and count swaps.
int bubble_parity(std::vector<int> seq) {
  int sign = 1;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = 0; j + 1 < seq.size(); ++j)
      if (seq[j] > seq[j + 1]) {
        std::swap(seq[j], seq[j + 1]);
        sign = -sign;
      }
  return sign;
}

Vec point2(double x, double y) {
  Vec p(2);
  p << x, y;
  return p;
}

// Deterministic point cloud in [-s, s]^2.
std::vector<Vec> cloud2(int count, double s, std::uint64_t seed) {
  std::vector<Vec> out;
  std::uint64_t h = splitmix64(seed);
  for (int i = 0; i < count; ++i) {
    h = splitmix64(h);
    const double x = -s + 2.0 * s * hash_unit(h);
    h = splitmix64(h);
    out.push_back(point2(x, -s + 2.0 * s * hash_unit(h)));
  }
  return out;
}

}  // namespace

TEST_CASE("increasing multi-indices enumerate the full family in lex order") {
  for (int n = 0; n <= 7; ++n) {
    for (int k = 0; k <= n; ++k) {
      const auto fam = increasing_indices(n, k);
      REQUIRE(static_cast<std::int64_t>(fam.size()) == binomial(n, k));
      for (std::size_t i = 0; i < fam.size(); ++i) {
        CHECK(valid_multi_index(n, fam[i]));
        CHECK(index_rank(n, fam[i]) == static_cast<int>(i));
        if (i > 0) CHECK(fam[i - 1] < fam[i]);  // lexicographic ascent
        const auto bar = complement_index(n, fam[i]);
        CHECK(static_cast<int>(bar.size()) == n - k);
        MultiIndex merged;
        CHECK(merge_sign(fam[i], bar, merged) != 0);
        CHECK(static_cast<int>(merged.size()) == n);
      }
    }
  }
  CHECK(binomial(7, 3) == 35);
  CHECK(binomial(3, 5) == 0);
}

TEST_CASE("merge sign matches the bubble-sort parity oracle exhaustively") {
  // Every disjoint pair over 7 axes: assign each axis to left, right, or
  // neither.
  const int n = 7;
  int checked = 0;
  for (int assign = 0; assign < 2187; ++assign) {
    MultiIndex a, b;
    int code = assign;
    for (int axis = 0; axis < n; ++axis) {
      const int c = code % 3;
      code /= 3;
      if (c == 1) a.push_back(axis);
      if (c == 2) b.push_back(axis);
    }
    std::vector<int> concat = a;
    concat.insert(concat.end(), b.begin(), b.end());
    MultiIndex merged;
    const int got = merge_sign(a, b, merged);
    CHECK(got == bubble_parity(concat));
    std::vector<int> sorted = concat;
    std::sort(sorted.begin(), sorted.end());
    CHECK(merged == sorted);
    ++checked;
  }
  CHECK(checked == 2187);

  // Shared axis kills the product.
  MultiIndex merged;
  CHECK(merge_sign({0, 2}, {2, 4}, merged) == 0);
  // Canonical pair on seven axes, sign frozen from the oracle by hand:
  // concatenation (1,2,4,0,3,5,6) has 4 inversions.
  CHECK(merge_sign({1, 2, 4}, {0, 3, 5, 6}, merged) == 1);
}

TEST_CASE("constant covector algebra: antisymmetry, associativity, duplicates") {
  CHECK(wedge(basis_covector(3, {0}), basis_covector(3, {1})).coeff({0, 1}) == 1.0);
  CHECK(wedge(basis_covector(3, {1}), basis_covector(3, {0})).coeff({0, 1}) == -1.0);
  CHECK(wedge(basis_covector(3, {1}), basis_covector(3, {1})).coeffs.cwiseAbs().maxCoeff() ==
        0.0);

  CHECK(inner_product(basis_covector(4, {0}), basis_covector(4, {0})) == 1.0);
  CHECK(inner_product(basis_covector(4, {0}), basis_covector(4, {1})) == 0.0);
  {
    auto xi = zero_covector(2, 2);
    xi.set({0, 1}, 3.0);
    CHECK(top_coefficient(xi) == 3.0);
  }

  // Random covectors over n = 5.
  const int n = 5;
  std::uint64_t h = splitmix64(77);
  auto random_covector = [&h, n](int k) {
    auto c = zero_covector(n, k);
    for (int i = 0; i < c.coeffs.size(); ++i) {
      h = splitmix64(h);
      c.coeffs[i] = -2.0 + 4.0 * hash_unit(h);
    }
    return c;
  };
  for (int k1 = 0; k1 <= 3; ++k1)
    for (int k2 = 0; k2 <= 3; ++k2) {
      const auto a = random_covector(k1), b = random_covector(k2);
      const auto ab = wedge(a, b), ba = wedge(b, a);
      const double sign = (k1 * k2) % 2 == 0 ? 1.0 : -1.0;
      if (k1 + k2 <= n)
        CHECK((ab.coeffs - sign * ba.coeffs).cwiseAbs().maxCoeff() <= 1e-12);
      else
        CHECK(ab.coeffs.size() == 0);
    }
  for (int trial = 0; trial < 8; ++trial) {
    const auto a = random_covector(1), b = random_covector(1), c = random_covector(2);
    const auto left = wedge(wedge(a, b), c);
    const auto right = wedge(a, wedge(b, c));
    CHECK((left.coeffs - right.coeffs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("complement pairing recovers every coefficient exactly") {
  std::uint64_t h = splitmix64(501);
  for (int n = 1; n <= 7; ++n) {
    for (int k = 0; k <= n; ++k) {
      auto xi = zero_covector(n, k);
      for (int i = 0; i < xi.coeffs.size(); ++i) {
        h = splitmix64(h);
        // Sparse: roughly half the coefficients vanish.
        xi.coeffs[i] = (h & 1) ? (-3.0 + 6.0 * hash_unit(h)) : 0.0;
      }
      const auto rep = complement_pairing_table(xi);
      CHECK(rep.exact);
      CHECK(rep.max_abs_error == 0.0);
      CHECK(static_cast<std::int64_t>(rep.cells.size()) == binomial(n, k));
      for (const auto& cell : rep.cells) CHECK((cell.sign == 1 || cell.sign == -1));
      CHECK(nondegeneracy_check(xi));
    }
  }
  CHECK(nondegeneracy_check(zero_covector(4, 2)));
  // A single basis covector pairs nontrivially against its complement.
  const auto rep = complement_pairing_table(basis_covector(4, {0, 2}));
  bool nonzero_somewhere = false;
  for (const auto& cell : rep.cells) nonzero_somewhere = nonzero_somewhere || cell.recovered != 0.0;
  CHECK(nonzero_somewhere);
}

TEST_CASE("polynomial fields expose exact gradients; differences converge at order 2") {
  const auto X = Polynomial::variable(2, 0);
  const auto Y = Polynomial::variable(2, 1);
  const auto f = field_from(X * X * X * Y * Y, "x^3 y^2");
  for (const auto& p : cloud2(20, 1.5, 42)) {
    Vec g(2);
    f.gradient(p, g);
    CHECK(g[0] == doctest::Approx(3.0 * p[0] * p[0] * p[1] * p[1]).epsilon(1e-13));
    CHECK(g[1] == doctest::Approx(2.0 * p[0] * p[0] * p[0] * p[1]).epsilon(1e-13));
  }

  // Central differences on the stripped field converge at order >= 1.9.
  SmoothFn stripped = f;
  stripped.gradient = nullptr;
  const Vec p = point2(0.7, -0.4);
  const double exact = 3.0 * p[0] * p[0] * p[1] * p[1];
  auto fd_error = [&](double step) {
    auto form = scalar_form(stripped, 2);
    form.fd_step = step;
    return std::abs(evaluate(exterior_derivative(form), p).coeff({0}) - exact);
  };
  const double e1 = fd_error(1e-3), e2 = fd_error(5e-4);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.9);
  CHECK(order <= 2.1);
}

TEST_CASE("bump fields: support, normalization, closed-form gradients") {
  const auto b = product_bump(point2(0.2, -0.3), point2(0.5, 0.7));
  CHECK(b.value(point2(0.2, -0.3)) == 1.0);
  CHECK(b.value(point2(0.71, -0.3)) == 0.0);
  CHECK(b.value(point2(0.2, 0.41)) == 0.0);
  const auto rb = radial_bump(point2(0.0, 0.0), 1.0);
  CHECK(rb.value(point2(0.0, 0.0)) == 1.0);
  CHECK(rb.value(point2(1.0, 0.0)) == 0.0);

  for (const auto& f : {b, rb}) {
    for (const auto& p : cloud2(30, 1.2, 7)) {
      Vec g(2);
      f.gradient(p, g);
      for (int d = 0; d < 2; ++d) {
        Vec pp = p, pm = p;
        pp[d] += 1e-6;
        pm[d] -= 1e-6;
        const double fd = (f.value(pp) - f.value(pm)) / 2e-6;
        CHECK(g[d] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("exterior derivative of monomial forms matches hand derivatives") {
  const auto X = Polynomial::variable(2, 0);
  const auto Y = Polynomial::variable(2, 1);

  // d(x dx_1) = dx_0 ^ dx_1.
  const auto d1 = exterior_derivative(monomial_form(field_from(X, "x"), 2, {1}));
  // d(x dx_0) = 0.
  const auto d0 = exterior_derivative(monomial_form(field_from(X, "x"), 2, {0}));
  // d of a scalar field.
  const auto ds = exterior_derivative(scalar_form(field_from(X * X * Y, "x^2 y"), 2));
  for (const auto& p : cloud2(25, 1.5, 99)) {
    CHECK(top_coefficient(evaluate(d1, p)) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(top_coefficient(evaluate(d0, p)) == 0.0);
    const auto g = evaluate(ds, p);
    CHECK(g.coeff({0}) == doctest::Approx(2.0 * p[0] * p[1]).epsilon(1e-13));
    CHECK(g.coeff({1}) == doctest::Approx(p[0] * p[0]).epsilon(1e-13));
  }

  // Top-degree input yields the empty next-degree form.
  const auto top = monomial_form(field_from(X, "x"), 2, {0, 1});
  const auto dtop = exterior_derivative(top);
  CHECK(dtop.k == 3);
  CHECK(dtop.coeffs.empty());
}

TEST_CASE("repeated exterior derivative annihilates") {
  const auto X = Polynomial::variable(2, 0);
  const auto Y = Polynomial::variable(2, 1);
  // Scalar: the inner layer differentiates analytically, the outer one by
  // central differences.
  const auto dd0 = exterior_derivative(exterior_derivative(scalar_form(
      field_from(X * X * Y, "x^2 y"), 2)));
  for (const auto& p : cloud2(100, 1.5, 11))
    CHECK(std::abs(top_coefficient(evaluate(dd0, p))) <= 1e-8);

  // One-form with polynomial coefficients in three variables.
  const auto X3 = Polynomial::variable(3, 0);
  const auto Y3 = Polynomial::variable(3, 1);
  const auto Z3 = Polynomial::variable(3, 2);
  FormField omega = zero_form(3, 1);
  omega.coeffs[0] = field_from(X3 * Y3, "xy");
  omega.coeffs[1] = field_from(Y3 * Z3 * Z3, "yz^2");
  omega.coeffs[2] = field_from(X3 * X3 * Z3, "x^2 z");
  const auto dd1 = exterior_derivative(exterior_derivative(omega));
  std::uint64_t h = splitmix64(13);
  for (int i = 0; i < 100; ++i) {
    Vec p(3);
    for (int d = 0; d < 3; ++d) {
      h = splitmix64(h);
      p[d] = -1.5 + 3.0 * hash_unit(h);
    }
    CHECK(evaluate(dd1, p).coeffs.cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("Leibniz rule holds for products of polynomial forms") {
  const auto X = Polynomial::variable(2, 0);
  const auto Y = Polynomial::variable(2, 1);

  struct Pair {
    FormField lambda, mu;
  };
  std::vector<Pair> pairs;
  pairs.push_back({scalar_form(field_from(X * X * Y, "x^2 y"), 2),
                   monomial_form(field_from(X * Y, "xy"), 2, {1})});
  pairs.push_back({scalar_form(field_from(X + Y, "x+y"), 2),
                   scalar_form(field_from(X * Y * Y, "x y^2"), 2)});
  {
    FormField lam = zero_form(2, 1);
    lam.coeffs[0] = field_from(Y * Y, "y^2");
    lam.coeffs[1] = field_from(X * X, "x^2");
    pairs.push_back({lam, scalar_form(field_from(X * Y, "xy"), 2)});
  }

  for (const auto& [lambda, mu] : pairs) {
    const auto lhs = exterior_derivative(wedge(lambda, mu));
    const auto r1 = wedge(exterior_derivative(lambda), mu);
    const auto r2 = wedge(lambda, exterior_derivative(mu));
    const double sign = lambda.k % 2 == 0 ? 1.0 : -1.0;
    for (const auto& p : cloud2(100, 1.5, 21)) {
      const auto L = evaluate(lhs, p);
      const auto R1 = evaluate(r1, p);
      const auto R2 = evaluate(r2, p);
      // All gradients analytic here: the identity holds to rounding.
      CHECK((L.coeffs - (R1.coeffs + sign * R2.coeffs)).cwiseAbs().maxCoeff() <= 1e-12);
    }

    // Stripped gradients force the finite-difference path.
    auto lam_fd = lambda;
    auto mu_fd = mu;
    for (auto& c : lam_fd.coeffs) c.gradient = nullptr;
    for (auto& c : mu_fd.coeffs) c.gradient = nullptr;
    const auto lhs_fd = exterior_derivative(wedge(lam_fd, mu_fd));
    const auto r1_fd = wedge(exterior_derivative(lam_fd), mu_fd);
    const auto r2_fd = wedge(lam_fd, exterior_derivative(mu_fd));
    for (const auto& p : cloud2(20, 1.5, 22)) {
      const auto L = evaluate(lhs_fd, p);
      const auto R1 = evaluate(r1_fd, p);
      const auto R2 = evaluate(r2_fd, p);
      CHECK((L.coeffs - (R1.coeffs + sign * R2.coeffs)).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("top-degree integrals: unit square references and the bump closed form") {
  QuadratureSpec q;
  q.points_per_axis = 256;
  q.refinement_levels = 1;
  q.mode = SampleMode::midpoint;

  const auto square = make_rectangle(make_box({0.0, 0.0}, {1.0, 1.0}));
  const auto X = Polynomial::variable(2, 0);

  FormField unit = monomial_form(constant_field(2, 1.0), 2, {0, 1});
  CHECK(integrate_form(unit, square, q).value == doctest::Approx(1.0).epsilon(1e-9));

  FormField linear = monomial_form(field_from(X, "x"), 2, {0, 1});
  CHECK(integrate_form(linear, square, q).value == doctest::Approx(0.5).epsilon(1e-9));

  // Separable bump: the closed form is prod(halfwidth) * (32/35)^2.
  QuadratureSpec q2 = q;
  q2.points_per_axis = 256;
  q2.refinement_levels = 2;
  const Box window = make_box({-2.0, -2.0}, {2.0, 2.0});
  FormField bump = monomial_form(product_bump(point2(0.2, -0.3), point2(0.5, 0.7)), 2, {0, 1});
  const double closed = 256.0 / 875.0;
  const auto est = integrate_form(bump, window, q2);
  CHECK(std::abs(est.value - closed) <= 1e-6);

  // Region overload with full membership agrees with the window overload.
  ImplicitRegion all;
  all.n = 2;
  all.member = [](const Vec&) { return true; };
  all.bbox = window;
  all.label = "window";
  CHECK(integrate_form(bump, all, q2).value == doctest::Approx(est.value).epsilon(1e-15));
}

TEST_CASE("weak pairing identity on the canonical scalar case") {
  // lambda = x (degree 0), omega = bump dx_1. Both sides converge to
  // -integral(bump) = -256/875; the partner carries the advertised sign.
  QuadratureSpec q;
  q.points_per_axis = 256;
  q.refinement_levels = 2;
  q.mode = SampleMode::midpoint;
  const Box window = make_box({-2.0, -2.0}, {2.0, 2.0});

  const auto X = Polynomial::variable(2, 0);
  const auto lambda = scalar_form(field_from(X, "x"), 2);
  const auto omega =
      monomial_form(product_bump(point2(0.2, -0.3), point2(0.5, 0.7)), 2, {1});

  const auto row = weak_pairing_check(lambda, omega, window, q);
  CHECK(std::abs(row.lhs - (-256.0 / 875.0)) <= 1e-5);
  CHECK(std::abs(row.rhs - (-256.0 / 875.0)) <= 1e-5);
  CHECK(row.rel_residual <= 1e-5);
}

TEST_CASE("weak pairing battery passes; a planted perturbation is detected") {
  QuadratureSpec q;
  q.points_per_axis = 128;
  q.refinement_levels = 2;
  q.mode = SampleMode::midpoint;
  const Box window = make_box({-2.0, -2.0}, {2.0, 2.0});

  const auto lambdas = weak_pairing_lambda_battery();
  CHECK(lambdas.size() == 10);
  const auto bumps = bump_battery(4, window, 5);
  CHECK(bumps.size() == 4);

  for (const auto& lambda : lambdas) {
    int variant = 0;
    for (const auto& bump : bumps) {
      const auto omega = matching_omega(lambda, bump, variant++);
      const auto row = weak_pairing_check(lambda, omega, window, q);
      CAPTURE(row.lambda_name);
      CAPTURE(row.omega_name);
      CHECK(row.rel_residual <= 1e-3);
    }
  }

  // Perturb the partner of lambda = x by a bump in the dx_0 coefficient; an
  // omega overlapping that bump sees the full overlap integral
  // (1048576/9018009, about 0.116) as residual.
  const auto X = Polynomial::variable(2, 0);
  const auto lambda = scalar_form(field_from(X, "x"), 2);
  const auto planted = product_bump(point2(0.0, 0.0), point2(0.5, 0.5));
  auto delta = weak_partner(lambda);
  {
    auto base = delta.coeffs[0].value;
    auto extra = planted.value;
    delta.coeffs[0].value = [base, extra](const Vec& x) { return base(x) + extra(x); };
    delta.coeffs[0].gradient = nullptr;
  }
  double worst = 0.0;
  // The battery includes an omega built from the planted bump itself.
  std::vector<SmoothFn> probes = bumps;
  probes.push_back(planted);
  for (const auto& probe : probes) {
    const auto omega = monomial_form(probe, 2, {1});
    const auto row = weak_pairing_residual(lambda, delta, omega, window, q);
    worst = std::max(worst, row.abs_residual);
  }
  CHECK(worst >= 0.1);
}

TEST_CASE("gap weight vanishes on the set and is quadratic inside gaps") {
  const auto cantor = make_fat_cantor({0.25, 0.0625, 0.015625, 0.00390625}, 4);
  const auto w = cantor_gap_weight(cantor);

  // Set members, gap endpoints included: weight and slope both vanish.
  for (double x : {0.0, 1.0, 0.375, 0.625, 0.140625}) {
    CHECK(cantor.member1d(x));
    const Vec p = point2(x, 0.3);
    CHECK(w.value(p) == 0.0);
    Vec g(2);
    w.gradient(p, g);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.0);
  }

  // Stage-1 gap (0.375, 0.625): closed forms at the quarter point.
  {
    const Vec p = point2(0.4375, -0.2);
    CHECK(w.value(p) == doctest::Approx(0.03515625).epsilon(1e-13));
    Vec g(2);
    w.gradient(p, g);
    CHECK(g[0] == doctest::Approx(0.75).epsilon(1e-13));
    // Gap midpoint: slope vanishes, value = L^2 (16 * (1/2)^2 * (1/2)^2).
    const Vec mid = point2(0.5, 0.0);
    CHECK(w.value(mid) == doctest::Approx(0.0625).epsilon(1e-13));
    w.gradient(mid, g);
    CHECK(g[0] == 0.0);
  }

  // Outside the base interval: quadratic distance growth.
  CHECK(w.value(point2(-0.25, 0.0)) == doctest::Approx(1.0).epsilon(1e-13));
  {
    Vec g(2);
    w.gradient(point2(-0.25, 0.0), g);
    CHECK(g[0] == doctest::Approx(-8.0).epsilon(1e-13));
  }

  // The analytic slope matches central differences away from joints.
  std::uint64_t h = splitmix64(31);
  for (int i = 0; i < 40; ++i) {
    h = splitmix64(h);
    const double x = -0.2 + 1.4 * hash_unit(h);
    const Vec p = point2(x, 0.1);
    Vec g(2);
    w.gradient(p, g);
    const double fd =
        (w.value(point2(x + 1e-6, 0.1)) - w.value(point2(x - 1e-6, 0.1))) / 2e-6;
    CHECK(g[0] == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
  }

  // The weight is bounded by 16 * dist(x, set)^2 inside gaps.
  for (int i = 0; i < 200; ++i) {
    h = splitmix64(h);
    const double x = hash_unit(h);
    if (cantor.member1d(x)) continue;
    double lo = x, hi = x;
    while (!cantor.member1d(lo)) lo -= 1e-4;
    while (!cantor.member1d(hi)) hi += 1e-4;
    const double dist = std::min(x - lo, hi - x) + 1e-4;
    CHECK(w.value(point2(x, 0.0)) <= 16.0 * dist * dist + 1e-12);
  }
}

TEST_CASE("stokes control: ball identity for a smooth planar one-form") {
  const auto X = Polynomial::variable(2, 0);
  const auto mu = monomial_form(field_from(X * X, "x^2"), 2, {1});
  QuadratureSpec q;
  q.points_per_axis = 192;
  q.refinement_levels = 2;
  q.mode = SampleMode::midpoint;
  const auto row = stokes_identity_check(mu, point2(0.3, -0.2), 0.8, q);
  CHECK(row.interior != 0.0);
  CHECK(row.residual <= 1e-3);
}

TEST_CASE("coincidence region and the vanishing-derivative experiment") {
  QuadratureSpec q;
  q.points_per_axis = 96;
  q.refinement_levels = 2;
  q.mode = SampleMode::stratified;
  q.seed = 19;
  RadiusLadder ladder;
  ladder.r0 = 0.2;
  ladder.ratio = 0.6;
  ladder.rungs = 8;
  const Box window = make_box({-1.0, -1.0}, {1.0, 1.0});

  SUBCASE("constant disagreement leaves an empty region, flagged vacuous") {
    const auto mu = monomial_form(constant_field(2, 2.0), 2, {1});
    const auto rep = vanishing_derivative_experiment(
        zero_form(2, 1), mu, window, {point2(0.0, 0.0)}, ladder, q, 1e-9, 1e-6, 0.1);
    CHECK(rep.empty_at_resolution);
    // Closed mu: derivative coefficients vanish, so no row can violate.
    CHECK(rep.violations == 0);
  }

  SUBCASE("slab coincidence set: interior point holds, outside point fails") {
    // Coefficient ((x - 0.25)^+)^2 vanishes exactly on the slab x <= 0.25.
    SmoothFn ramp;
    ramp.value = [](const Vec& x) {
      const double t = std::max(0.0, x[0] - 0.25);
      return t * t;
    };
    ramp.gradient = [](const Vec& x, Vec& g) {
      g = Vec::Zero(2);
      g[0] = 2.0 * std::max(0.0, x[0] - 0.25);
    };
    ramp.name = "ramp^2";
    const auto mu = monomial_form(ramp, 2, {1});
    const auto rep = vanishing_derivative_experiment(
        zero_form(2, 1), mu, window, {point2(-0.2, 0.0), point2(0.6, 0.0)}, ladder, q,
        1e-9, 1e-6, 0.1);
    CHECK_FALSE(rep.empty_at_resolution);
    CHECK(rep.violations == 0);
    CHECK(rep.holds_count == 1);
    CHECK(rep.fails_count == 1);
    CHECK(rep.rows[0].dmu_abs == 0.0);
    CHECK(rep.rows[1].dmu_abs == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(rep.rows[0].degree.cls == DegreeClass::infinite);
    CHECK(rep.rows[1].degree.cls == DegreeClass::zero);
    // Planar one-form: the ladder of ball controls ran.
    CHECK(rep.controls.size() == static_cast<std::size_t>(ladder.rungs));
    for (const auto& c : rep.controls) CHECK(c.residual <= 1e-2);
  }
}

TEST_CASE("tangency probes on a shallow fat-Cantor cylinder") {
  const auto cantor = make_fat_cantor(
      {0.25, 0.0625, 0.015625, 0.00390625, 0.0009765625, 0.000244140625}, 6);
  QuadratureSpec q;
  q.points_per_axis = 96;
  q.refinement_levels = 2;
  q.mode = SampleMode::stratified;
  q.seed = 9;
  RadiusLadder ladder;
  ladder.r0 = 0.2;
  ladder.ratio = 0.6;
  ladder.rungs = 8;

  const auto rep = tangency_experiment(cantor, 2, 2, ladder, q, 1e-6);
  CHECK(rep.rows.size() == 4);
  CHECK(rep.violations == 0);
  CHECK(rep.holds_count >= 1);
  CHECK(rep.fails_count >= 1);
  // On-set probes carry exactly vanishing derivative coefficients.
  CHECK(rep.rows[0].dmu_abs == 0.0);
  CHECK(rep.rows[1].dmu_abs == 0.0);
  // Gap probes carry the closed-form slopes.
  CHECK(rep.rows[2].dmu_abs > 1e-3);
}

TEST_CASE("matching omega pairs degrees to the top") {
  const auto X = Polynomial::variable(2, 0);
  const auto bump = product_bump(point2(0.0, 0.0), point2(0.5, 0.5));
  const auto scalar = scalar_form(field_from(X, "x"), 2);
  const auto one = monomial_form(field_from(X, "x"), 2, {0});
  CHECK(matching_omega(scalar, bump, 0).k == 1);
  CHECK(matching_omega(one, bump, 0).k == 0);
  // Variant toggles the monomial axis for scalar lambdas.
  const auto o0 = matching_omega(scalar, bump, 0);
  const auto o1 = matching_omega(scalar, bump, 1);
  const Vec p = point2(0.1, 0.2);
  CHECK(evaluate(o0, p).coeff({0}) != 0.0);
  CHECK(evaluate(o0, p).coeff({1}) == 0.0);
  CHECK(evaluate(o1, p).coeff({1}) != 0.0);
}
