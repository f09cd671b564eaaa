#include "superdense/forms.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace superdense {

std::int64_t binomial(int n, int k) {
  require(n >= 0 && k >= 0, "binomial: arguments must be nonnegative");
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool valid_multi_index(int n, const MultiIndex& beta) {
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (beta[i] < 0 || beta[i] >= n) return false;
    if (i > 0 && beta[i] <= beta[i - 1]) return false;
  }
  return static_cast<int>(beta.size()) <= n;
}

std::vector<MultiIndex> increasing_indices(int n, int k) {
  require(n >= 0 && k >= 0 && k <= n, "increasing_indices: need 0 <= k <= n");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(binomial(n, k)));
  MultiIndex cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int v = start; v < n; ++v) {
      cur.push_back(v);
      self(self, v + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

int index_rank(int n, const MultiIndex& beta) {
  require(valid_multi_index(n, beta), "index_rank: not an increasing multi-index");
  const int k = static_cast<int>(beta.size());
  std::int64_t rank = 0;
  int prev = -1;
  for (int i = 0; i < k; ++i) {
    for (int v = prev + 1; v < beta[i]; ++v) rank += binomial(n - v - 1, k - i - 1);
    prev = beta[i];
  }
  return static_cast<int>(rank);
}

MultiIndex complement_index(int n, const MultiIndex& beta) {
  require(valid_multi_index(n, beta), "complement_index: not an increasing multi-index");
  MultiIndex out;
  std::size_t j = 0;
  for (int v = 0; v < n; ++v) {
    if (j < beta.size() && beta[j] == v) {
      ++j;
      continue;
    }
    out.push_back(v);
  }
  return out;
}

int merge_sign(const MultiIndex& a, const MultiIndex& b, MultiIndex& merged) {
  merged.clear();
  std::size_t i = 0, j = 0;
  std::int64_t inversions = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return 0;
    if (a[i] < b[j]) {
      merged.push_back(a[i++]);
    } else {
      inversions += static_cast<std::int64_t>(a.size() - i);
      merged.push_back(b[j++]);
    }
  }
  while (i < a.size()) merged.push_back(a[i++]);
  while (j < b.size()) merged.push_back(b[j++]);
  return (inversions % 2 == 0) ? 1 : -1;
}

// --- constant covectors ---

double Covector::coeff(const MultiIndex& beta) const {
  require(static_cast<int>(beta.size()) == k, "Covector::coeff: degree mismatch");
  return coeffs[index_rank(n, beta)];
}

void Covector::set(const MultiIndex& beta, double v) {
  require(static_cast<int>(beta.size()) == k, "Covector::set: degree mismatch");
  coeffs[index_rank(n, beta)] = v;
}

Covector zero_covector(int n, int k) {
  require(n >= 0 && k >= 0, "zero_covector: need n, k >= 0");
  Covector c;
  c.n = n;
  c.k = k;
  c.coeffs = Eigen::VectorXd::Zero(binomial(n, k));  // empty above the top degree
  return c;
}

Covector basis_covector(int n, const MultiIndex& beta) {
  auto c = zero_covector(n, static_cast<int>(beta.size()));
  c.set(beta, 1.0);
  return c;
}

Covector wedge(const Covector& a, const Covector& b) {
  require(a.n == b.n, "wedge: ambient dimension mismatch");
  auto out = zero_covector(a.n, a.k + b.k);
  if (a.k + b.k > a.n) return out;
  const auto A = increasing_indices(a.n, a.k);
  const auto B = increasing_indices(b.n, b.k);
  MultiIndex merged;
  for (std::size_t i = 0; i < A.size(); ++i) {
    const double av = a.coeffs[i];
    if (av == 0.0) continue;
    for (std::size_t j = 0; j < B.size(); ++j) {
      const double bv = b.coeffs[j];
      if (bv == 0.0) continue;
      const int s = merge_sign(A[i], B[j], merged);
      if (s != 0) out.coeffs[index_rank(a.n, merged)] += s * av * bv;
    }
  }
  return out;
}

double inner_product(const Covector& a, const Covector& b) {
  require(a.n == b.n && a.k == b.k, "inner_product: shape mismatch");
  return a.coeffs.dot(b.coeffs);
}

double top_coefficient(const Covector& a) {
  require(a.k == a.n, "top_coefficient: not a top-degree covector");
  return a.coeffs[0];
}

PairingReport complement_pairing_table(const Covector& xi) {
  PairingReport rep;
  rep.n = xi.n;
  rep.k = xi.k;
  for (const auto& beta : increasing_indices(xi.n, xi.k)) {
    const auto bar = complement_index(xi.n, beta);
    MultiIndex merged;
    PairingCell cell;
    cell.beta = beta;
    cell.sign = merge_sign(beta, bar, merged);
    cell.expected = cell.sign * xi.coeff(beta);
    cell.recovered = top_coefficient(wedge(xi, basis_covector(xi.n, bar)));
    rep.max_abs_error = std::max(rep.max_abs_error, std::abs(cell.recovered - cell.expected));
    rep.exact = rep.exact && (cell.recovered == cell.expected);
    rep.cells.push_back(std::move(cell));
  }
  return rep;
}

bool nondegeneracy_check(const Covector& xi) {
  const auto rep = complement_pairing_table(xi);
  bool all_pairings_zero = true;
  for (const auto& cell : rep.cells) all_pairings_zero = all_pairings_zero && cell.recovered == 0.0;
  const bool all_coeffs_zero = (xi.coeffs.array() == 0.0).all();
  return rep.exact && (all_pairings_zero == all_coeffs_zero);
}

// --- smooth fields ---

namespace {

double partial_at(const SmoothFn& f, const Vec& x, int axis, double step) {
  if (f.gradient) {
    Vec g(x.size());
    f.gradient(x, g);
    return g[axis];
  }
  Vec xp = x, xm = x;
  xp[axis] += step;
  xm[axis] -= step;
  return (f.value(xp) - f.value(xm)) / (2.0 * step);
}

FormField scale_form(FormField a, double s) {
  for (auto& c : a.coeffs) {
    auto inner_v = c.value;
    c.value = [inner_v, s](const Vec& x) { return s * inner_v(x); };
    if (c.gradient) {
      auto inner_g = c.gradient;
      c.gradient = [inner_g, s](const Vec& x, Vec& g) {
        inner_g(x, g);
        g *= s;
      };
    }
  }
  return a;
}

}  // namespace

SmoothFn field_from(const Polynomial& p, std::string name) {
  std::vector<Polynomial> partials;
  for (int d = 0; d < p.n; ++d) partials.push_back(p.partial(d));
  SmoothFn f;
  f.value = [p](const Vec& x) { return p(x); };
  f.gradient = [partials](const Vec& x, Vec& g) {
    g.resize(static_cast<int>(partials.size()));
    for (std::size_t d = 0; d < partials.size(); ++d) g[static_cast<int>(d)] = partials[d](x);
  };
  f.name = std::move(name);
  return f;
}

SmoothFn constant_field(int n, double c) {
  SmoothFn f;
  f.value = [c](const Vec&) { return c; };
  f.gradient = [n](const Vec&, Vec& g) { g = Vec::Zero(n); };
  f.name = "const";
  return f;
}

SmoothFn product_bump(const Vec& center, const Vec& halfwidth) {
  require(center.size() == halfwidth.size(), "product_bump: shape mismatch");
  require((halfwidth.array() > 0.0).all(), "product_bump: halfwidths must be positive");
  const Vec c = center, w = halfwidth;
  auto factors = [c, w](const Vec& x, Vec& val, Vec& der) {
    const int n = static_cast<int>(c.size());
    for (int d = 0; d < n; ++d) {
      const double u = (x[d] - c[d]) / w[d];
      if (std::abs(u) >= 1.0) {
        val[d] = 0.0;
        der[d] = 0.0;
        continue;
      }
      const double s = 1.0 - u * u;
      val[d] = s * s * s;
      der[d] = -6.0 * u * s * s / w[d];
    }
  };
  SmoothFn f;
  f.value = [factors, c](const Vec& x) {
    Vec val(c.size()), der(c.size());
    factors(x, val, der);
    return val.prod();
  };
  f.gradient = [factors, c](const Vec& x, Vec& g) {
    const int n = static_cast<int>(c.size());
    Vec val(n), der(n);
    factors(x, val, der);
    g.resize(n);
    for (int d = 0; d < n; ++d) {
      double prod = der[d];
      for (int e = 0; e < n; ++e)
        if (e != d) prod *= val[e];
      g[d] = prod;
    }
  };
  f.name = "bump";
  return f;
}

SmoothFn radial_bump(const Vec& center, double radius) {
  require(radius > 0.0, "radial_bump: radius must be positive");
  const Vec c = center;
  const double r2 = radius * radius;
  SmoothFn f;
  f.value = [c, r2](const Vec& x) {
    const double s = (x - c).squaredNorm() / r2;
    if (s >= 1.0) return 0.0;
    const double t = 1.0 - s;
    return t * t * t;
  };
  f.gradient = [c, r2](const Vec& x, Vec& g) {
    const double s = (x - c).squaredNorm() / r2;
    if (s >= 1.0) {
      g = Vec::Zero(c.size());
      return;
    }
    const double t = 1.0 - s;
    g = (-6.0 * t * t / r2) * (x - c);
  };
  f.name = "radial-bump";
  return f;
}

// --- form fields ---

FormField zero_form(int n, int k) {
  require(n >= 1 && k >= 0, "zero_form: need n >= 1, k >= 0");
  FormField a;
  a.n = n;
  a.k = k;
  for (std::int64_t i = 0; i < binomial(n, k); ++i) a.coeffs.push_back(constant_field(n, 0.0));
  a.name = "0";
  return a;
}

FormField scalar_form(const SmoothFn& f, int n) {
  FormField a;
  a.n = n;
  a.k = 0;
  a.coeffs.push_back(f);
  a.name = f.name;
  return a;
}

FormField monomial_form(const SmoothFn& f, int n, const MultiIndex& beta) {
  auto a = zero_form(n, static_cast<int>(beta.size()));
  a.coeffs[index_rank(n, beta)] = f;
  a.name = f.name + " dx" + [&beta] {
    std::string s;
    for (int v : beta) s += "_" + std::to_string(v);
    return s;
  }();
  return a;
}

Covector evaluate(const FormField& a, const Vec& x) {
  require(x.size() == a.n, "evaluate: point dimension mismatch");
  auto c = zero_covector(a.n, a.k);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    c.coeffs[static_cast<int>(i)] = a.coeffs[i].value(x);
  return c;
}

FormField exterior_derivative(const FormField& a) {
  if (a.k >= a.n) {
    auto empty = zero_form(a.n, a.k + 1);
    empty.name = "d(" + a.name + ")";
    return empty;
  }
  const auto out_bases = increasing_indices(a.n, a.k + 1);
  FormField out;
  out.n = a.n;
  out.k = a.k + 1;
  out.support = a.support;
  out.fd_step = a.fd_step;
  out.name = "d(" + a.name + ")";

  struct DTerm {
    double sign;
    int axis;
    int src;
  };
  auto coeffs = std::make_shared<const std::vector<SmoothFn>>(a.coeffs);
  for (const auto& gamma : out_bases) {
    std::vector<DTerm> terms;
    for (std::size_t p = 0; p < gamma.size(); ++p) {
      MultiIndex beta = gamma;
      beta.erase(beta.begin() + static_cast<std::ptrdiff_t>(p));
      terms.push_back({(p % 2 == 0) ? 1.0 : -1.0, gamma[p], index_rank(a.n, beta)});
    }
    const double step = a.fd_step;
    SmoothFn f;
    f.value = [coeffs, terms, step](const Vec& x) {
      double acc = 0.0;
      for (const auto& t : terms) acc += t.sign * partial_at((*coeffs)[t.src], x, t.axis, step);
      return acc;
    };
    f.name = "d-coeff";
    out.coeffs.push_back(std::move(f));
  }
  return out;
}

FormField wedge(const FormField& a, const FormField& b) {
  require(a.n == b.n, "wedge: ambient dimension mismatch");
  if (a.k + b.k > a.n) {
    auto empty = zero_form(a.n, a.k + b.k);
    empty.name = "(" + a.name + ")^(" + b.name + ")";
    return empty;
  }
  const auto A = increasing_indices(a.n, a.k);
  const auto B = increasing_indices(b.n, b.k);

  struct WTerm {
    double sign;
    int ai, bi;
  };
  std::vector<std::vector<WTerm>> table(static_cast<std::size_t>(binomial(a.n, a.k + b.k)));
  MultiIndex merged;
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < B.size(); ++j) {
      const int s = merge_sign(A[i], B[j], merged);
      if (s != 0)
        table[index_rank(a.n, merged)].push_back(
            {static_cast<double>(s), static_cast<int>(i), static_cast<int>(j)});
    }

  bool analytic = true;
  for (const auto& c : a.coeffs) analytic = analytic && static_cast<bool>(c.gradient);
  for (const auto& c : b.coeffs) analytic = analytic && static_cast<bool>(c.gradient);

  auto ca = std::make_shared<const std::vector<SmoothFn>>(a.coeffs);
  auto cb = std::make_shared<const std::vector<SmoothFn>>(b.coeffs);

  FormField out;
  out.n = a.n;
  out.k = a.k + b.k;
  out.fd_step = std::min(a.fd_step, b.fd_step);
  if (a.support && b.support)
    out.support = Box(a.support->lo.cwiseMax(b.support->lo), a.support->hi.cwiseMin(b.support->hi));
  else
    out.support = a.support ? a.support : b.support;
  out.name = "(" + a.name + ")^(" + b.name + ")";

  for (auto& terms : table) {
    SmoothFn f;
    f.value = [ca, cb, terms](const Vec& x) {
      double acc = 0.0;
      for (const auto& t : terms) acc += t.sign * (*ca)[t.ai].value(x) * (*cb)[t.bi].value(x);
      return acc;
    };
    if (analytic) {
      const int n = a.n;
      f.gradient = [ca, cb, terms, n](const Vec& x, Vec& g) {
        g = Vec::Zero(n);
        Vec ga(n), gb(n);
        for (const auto& t : terms) {
          const double va = (*ca)[t.ai].value(x), vb = (*cb)[t.bi].value(x);
          (*ca)[t.ai].gradient(x, ga);
          (*cb)[t.bi].gradient(x, gb);
          g += t.sign * (ga * vb + va * gb);
        }
      };
    }
    f.name = "wedge-coeff";
    out.coeffs.push_back(std::move(f));
  }
  return out;
}

MeasureEstimate integrate_form(const FormField& top, const Box& window,
                               const QuadratureSpec& q) {
  require(top.k == top.n, "integrate_form: only top-degree forms integrate over a window");
  require(window.dim() == top.n, "integrate_form: window dimension mismatch");
  const auto f = top.coeffs[0].value;
  return box_integral(window, q, f);
}

MeasureEstimate integrate_form(const FormField& top, const ImplicitRegion& E,
                               const QuadratureSpec& q) {
  require(top.k == top.n, "integrate_form: only top-degree forms integrate over a region");
  require(E.n == top.n, "integrate_form: region dimension mismatch");
  require(E.bbox.nondegenerate(), "integrate_form: region needs a bounded window");
  const auto f = top.coeffs[0].value;
  const auto member = E.member;
  return box_integral(E.bbox, q,
                      [f, member](const Vec& x) { return member(x) ? f(x) : 0.0; });
}

// --- weak pairing ---

FormField weak_partner(const FormField& lambda) {
  const double sign = ((lambda.k + 1) % 2 == 0) ? 1.0 : -1.0;
  return scale_form(exterior_derivative(lambda), sign);
}

WeakPairingRow weak_pairing_residual(const FormField& lambda, const FormField& Delta,
                                     const FormField& omega, const Box& window,
                                     const QuadratureSpec& q) {
  require(lambda.n == omega.n && Delta.n == lambda.n,
          "weak_pairing_residual: ambient dimension mismatch");
  require(lambda.k + omega.k + 1 == lambda.n,
          "weak_pairing_residual: degrees must pair to the top");
  require(Delta.k == lambda.k + 1, "weak_pairing_residual: partner degree mismatch");
  if (omega.support)
    for (int d = 0; d < window.dim(); ++d)
      require(window.lo[d] <= omega.support->lo[d] && omega.support->hi[d] <= window.hi[d],
              "weak_pairing_residual: partner support escapes the window");
  WeakPairingRow row;
  row.lambda_name = lambda.name;
  row.omega_name = omega.name;
  row.lhs = integrate_form(wedge(Delta, omega), window, q).value;
  row.rhs = integrate_form(wedge(lambda, exterior_derivative(omega)), window, q).value;
  row.abs_residual = std::abs(row.lhs - row.rhs);
  row.rel_residual =
      row.abs_residual / std::max({1.0, std::abs(row.lhs), std::abs(row.rhs)});
  return row;
}

WeakPairingRow weak_pairing_check(const FormField& lambda, const FormField& omega,
                                  const Box& window, const QuadratureSpec& q) {
  return weak_pairing_residual(lambda, weak_partner(lambda), omega, window, q);
}

std::vector<FormField> weak_pairing_lambda_battery() {
  const int n = 2;
  const auto X = Polynomial::variable(n, 0);
  const auto Y = Polynomial::variable(n, 1);
  std::vector<FormField> out;

  out.push_back(scalar_form(field_from(X, "x"), n));
  out.push_back(scalar_form(field_from(Y, "y"), n));
  out.push_back(scalar_form(field_from(X * Y, "xy"), n));
  out.push_back(scalar_form(field_from(X * X + Y * Y * -1.0, "x^2-y^2"), n));
  out.push_back(scalar_form(field_from(X * X * Y, "x^2 y"), n));

  out.push_back(monomial_form(field_from(X, "x"), n, {1}));
  out.push_back(monomial_form(field_from(Y, "y"), n, {0}));
  out.push_back(monomial_form(field_from(X * X, "x^2"), n, {1}));
  out.push_back(monomial_form(field_from(X * Y, "xy"), n, {0}));
  {
    FormField mixed = zero_form(n, 1);
    mixed.coeffs[0] = field_from(X + Y, "x+y");
    mixed.coeffs[1] = field_from(X + Y * -1.0, "x-y");
    mixed.name = "(x+y) dx_0 + (x-y) dx_1";
    out.push_back(std::move(mixed));
  }
  return out;
}

std::vector<SmoothFn> bump_battery(int count, const Box& window, std::uint64_t seed) {
  require(count >= 1, "bump_battery: count >= 1");
  require(window.nondegenerate(), "bump_battery: degenerate window");
  const int n = window.dim();
  std::vector<SmoothFn> out;
  std::uint64_t h = splitmix64(seed ^ 0xb7e151628aed2a6bULL);
  for (int i = 0; i < count; ++i) {
    Vec c(n), w(n);
    for (int d = 0; d < n; ++d) {
      const double lo = window.lo[d], hi = window.hi[d], ext = hi - lo;
      h = splitmix64(h);
      const double hw = ext * (0.075 + 0.10 * hash_unit(h));
      h = splitmix64(h);
      c[d] = lo + hw + (ext - 2.0 * hw) * hash_unit(h);
      w[d] = hw;
    }
    auto b = product_bump(c, w);
    b.name = "bump" + std::to_string(i);
    out.push_back(std::move(b));
  }
  return out;
}

FormField matching_omega(const FormField& lambda, const SmoothFn& bump, int variant) {
  require(lambda.n == 2, "matching_omega: built for the planar battery");
  const int need = lambda.n - lambda.k - 1;
  if (need == 0) return scalar_form(bump, lambda.n);
  require(need == 1, "matching_omega: unsupported partner degree");
  return monomial_form(bump, lambda.n, {variant % 2 == 0 ? 0 : 1});
}

// --- tangency experiment ---

SmoothFn cantor_gap_weight(const FatCantor& cantor) {
  const FatCantor c = cantor;
  auto eval = [c](double x, double& w, double& dw) {
    if (x < c.a) {
      const double t = c.a - x;
      w = 16.0 * t * t;
      dw = -32.0 * t;
      return;
    }
    if (x > c.b) {
      const double t = x - c.b;
      w = 16.0 * t * t;
      dw = 32.0 * t;
      return;
    }
    double lo = c.a, hi = c.b;
    for (int k = 0; k < c.depth; ++k) {
      const double half = 0.5 * (hi - lo) * (1.0 - c.fractions[k]);
      const double gl = lo + half, gr = hi - half;
      if (x <= gl) {
        hi = lo + half;
      } else if (x >= gr) {
        lo = hi - half;
      } else {
        const double L = gr - gl;
        const double u = (x - gl) / L;
        w = 16.0 * L * L * u * u * (1.0 - u) * (1.0 - u);
        dw = 32.0 * L * u * (1.0 - u) * (1.0 - 2.0 * u);
        return;
      }
    }
    w = 0.0;  // on the set itself
    dw = 0.0;
  };
  SmoothFn f;
  f.value = [eval](const Vec& x) {
    double w, dw;
    eval(x[0], w, dw);
    return w;
  };
  f.gradient = [eval](const Vec& x, Vec& g) {
    g = Vec::Zero(x.size());
    double w, dw;
    eval(x[0], w, dw);
    g[0] = dw;
  };
  f.name = "gap-weight";
  return f;
}

FormField cantor_tangency_form(const FatCantor& cantor) {
  auto mu = monomial_form(cantor_gap_weight(cantor), 2, {1});
  mu.name = "w(x_0) dx_1";
  return mu;
}

ImplicitRegion coincidence_region(const FormField& Delta, const FormField& mu,
                                  const Box& window, double eq_tol) {
  require(Delta.n == mu.n && Delta.k == mu.k, "coincidence_region: form shape mismatch");
  require(window.dim() == mu.n, "coincidence_region: window dimension mismatch");
  require(window.nondegenerate(), "coincidence_region: degenerate window");
  require(eq_tol >= 0.0, "coincidence_region: eq_tol must be nonnegative");
  auto da = std::make_shared<const std::vector<SmoothFn>>(Delta.coeffs);
  auto ma = std::make_shared<const std::vector<SmoothFn>>(mu.coeffs);
  ImplicitRegion out;
  out.n = mu.n;
  out.member = [da, ma, window, eq_tol](const Vec& x) {
    if (!window.contains(x)) return false;
    for (std::size_t i = 0; i < da->size(); ++i)
      if (std::abs((*da)[i].value(x) - (*ma)[i].value(x)) > eq_tol) return false;
    return true;
  };
  out.bbox = window;
  out.label = "coincidence(" + Delta.name + "=" + mu.name + ")";
  return out;
}

VanishingReport vanishing_derivative_experiment(
    const FormField& Delta, const FormField& mu, const Box& window,
    const std::vector<Vec>& samples, const RadiusLadder& ladder,
    const QuadratureSpec& q, double eq_tol, double tol_dmu, double c_big) {
  require(!samples.empty(), "vanishing_derivative_experiment: need samples");
  require(tol_dmu > 0.0 && c_big >= tol_dmu,
          "vanishing_derivative_experiment: need 0 < tol_dmu <= c_big");
  const auto E = coincidence_region(Delta, mu, window, eq_tol);
  const auto dmu = exterior_derivative(mu);
  const double order = mu.n + 1.0;

  VanishingReport rep;
  rep.tol_dmu = tol_dmu;
  rep.c_big = c_big;

  // Vacuity scan: a coarse midpoint lattice that never enters E means the
  // report asserts nothing about on-set behavior.
  {
    const std::int64_t per_axis = (mu.n <= 2) ? 48 : 12;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(mu.n), per_axis);
    bool hit = false;
    for_each_index(counts, [&](const std::vector<std::int64_t>& idx) {
      if (hit) return;
      Vec x(mu.n);
      for (int d = 0; d < mu.n; ++d)
        x[d] = window.lo[d] +
               (idx[static_cast<std::size_t>(d)] + 0.5) * (window.hi[d] - window.lo[d]) / per_axis;
      hit = E.member(x);
    });
    rep.empty_at_resolution = !hit;
  }

  for (const auto& x : samples) {
    TangencyRow row;
    row.x = x;
    row.order_verdict = is_m_density_point(E, x, order, ladder, q);
    row.degree = estimate_degree(E, x, ladder, q);
    double worst = 0.0;
    const auto at = evaluate(dmu, x);
    for (int i = 0; i < at.coeffs.size(); ++i) worst = std::max(worst, std::abs(at.coeffs[i]));
    row.dmu_abs = worst;
    const bool holds = row.order_verdict == Verdict::holds;
    row.consistent = !(holds && row.dmu_abs > tol_dmu) && !(row.dmu_abs >= c_big && holds);
    if (holds) ++rep.holds_count;
    if (row.order_verdict == Verdict::fails) ++rep.fails_count;
    if (!row.consistent) ++rep.violations;
    rep.rows.push_back(std::move(row));
  }

  if (mu.n == 2 && mu.k == 1) {
    for (int i = 0; i < ladder.rungs; ++i)
      rep.controls.push_back(stokes_identity_check(mu, samples.front(), ladder.radius(i), q));
  }
  return rep;
}

TangencyReport tangency_experiment(const FatCantor& cantor, int set_probes,
                                   int gap_probes, const RadiusLadder& ladder,
                                   const QuadratureSpec& q, double tol) {
  require(set_probes >= 1 && gap_probes >= 0, "tangency_experiment: probe counts");
  require(tol > 0.0, "tangency_experiment: tol must be positive");
  const auto mu = cantor_tangency_form(cantor);
  const auto Delta = zero_form(2, 1);
  const Box window = make_box({cantor.a - 1.0, -4.0}, {cantor.b + 1.0, 4.0});

  std::vector<Vec> samples;
  const int path_depth = std::min(cantor.depth, 6);
  std::uint64_t h = splitmix64(q.seed ^ 0x7f4a7c15ULL);
  auto push = [&samples](double x0, double y) {
    Vec x(2);
    x << x0, y;
    samples.push_back(std::move(x));
  };
  for (int i = 0; i < set_probes; ++i) {
    std::vector<int> path(static_cast<std::size_t>(path_depth));
    for (int b = 0; b < path_depth; ++b) path[static_cast<std::size_t>(b)] = (i >> b) & 1;
    const auto [lo, hi] = cantor.interval(path);
    h = splitmix64(h);
    push(0.5 * (lo + hi), -1.0 + 2.0 * hash_unit(h));
  }
  for (int i = 0; i < gap_probes; ++i) {
    const int stage = 1 + (i % std::min(3, cantor.depth));
    std::vector<int> path(static_cast<std::size_t>(stage - 1));
    for (int b = 0; b < stage - 1; ++b) path[static_cast<std::size_t>(b)] = (i >> b) & 1;
    const auto [lo, hi] = cantor.interval(path);
    const double half = 0.5 * (hi - lo) * (1.0 - cantor.fractions[static_cast<std::size_t>(stage - 1)]);
    const double gl = lo + half, gr = hi - half;
    h = splitmix64(h);
    push(gl + 0.25 * (gr - gl), -1.0 + 2.0 * hash_unit(h));
  }

  const auto rep = vanishing_derivative_experiment(Delta, mu, window, samples, ladder, q,
                                                   1e-9, tol, tol);
  TangencyReport out;
  out.rows = rep.rows;
  out.violations = rep.violations;
  out.holds_count = rep.holds_count;
  out.fails_count = rep.fails_count;
  out.tol = tol;
  return out;
}

StokesRow stokes_identity_check(const FormField& mu, const Vec& x, double r,
                                const QuadratureSpec& q) {
  require(mu.n == 2 && mu.k == 1, "stokes_identity_check: planar 1-forms only");
  require(r > 0.0, "stokes_identity_check: r must be positive");
  const auto psi = radial_bump(x, r);
  const auto dmu = exterior_derivative(mu);
  const auto dpsi_mu = wedge(exterior_derivative(scalar_form(psi, 2)), mu);

  const Ball b(x, r);
  const auto psi_v = psi.value;
  const auto dmu_v = dmu.coeffs[0].value;
  StokesRow row;
  row.r = r;
  row.interior = ball_integral(b, q, [psi_v, dmu_v](const Vec& y) {
                   return psi_v(y) * dmu_v(y);
                 }).value;
  row.boundary = ball_integral(b, q, dpsi_mu.coeffs[0].value).value;
  row.residual = std::abs(row.interior + row.boundary) /
                 std::max({1.0, std::abs(row.interior), std::abs(row.boundary)});
  return row;
}

}  // namespace superdense
