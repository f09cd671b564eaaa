#pragma once

#include "superdense/geometry.hpp"

#include <string>
#include <vector>

namespace superdense {

// Sparse multivariate polynomial with exact partial derivatives; the workhorse
// coefficient field for differential-identity checks that need 1e-12 accuracy.
struct Polynomial {
  struct Term {
    double coef = 0.0;
    std::vector<int> exps;  // one exponent per variable
  };

  int n = 0;
  std::vector<Term> terms;

  static Polynomial constant(int n, double c) {
    Polynomial p;
    p.n = n;
    if (c != 0.0) p.terms.push_back({c, std::vector<int>(n, 0)});
    return p;
  }

  static Polynomial variable(int n, int d) {
    require(d >= 0 && d < n, "Polynomial::variable: axis out of range");
    Polynomial p;
    p.n = n;
    Term t{1.0, std::vector<int>(n, 0)};
    t.exps[d] = 1;
    p.terms.push_back(std::move(t));
    return p;
  }

  double operator()(const Vec& x) const {
    require(x.size() == n, "Polynomial: point dimension mismatch");
    double acc = 0.0;
    for (const auto& t : terms) {
      double v = t.coef;
      for (int d = 0; d < n; ++d)
        for (int e = 0; e < t.exps[d]; ++e) v *= x[d];
      acc += v;
    }
    return acc;
  }

  Polynomial partial(int d) const {
    require(d >= 0 && d < n, "Polynomial::partial: axis out of range");
    Polynomial p;
    p.n = n;
    for (const auto& t : terms) {
      if (t.exps[d] == 0) continue;
      Term s = t;
      s.coef *= t.exps[d];
      --s.exps[d];
      p.terms.push_back(std::move(s));
    }
    return p;
  }

  Polynomial operator+(const Polynomial& o) const {
    require(n == o.n, "Polynomial: variable count mismatch");
    Polynomial p = *this;
    p.terms.insert(p.terms.end(), o.terms.begin(), o.terms.end());
    return p;
  }

  Polynomial operator*(const Polynomial& o) const {
    require(n == o.n, "Polynomial: variable count mismatch");
    Polynomial p;
    p.n = n;
    for (const auto& a : terms)
      for (const auto& b : o.terms) {
        Term t{a.coef * b.coef, a.exps};
        for (int d = 0; d < n; ++d) t.exps[d] += b.exps[d];
        p.terms.push_back(std::move(t));
      }
    return p;
  }

  Polynomial operator*(double c) const {
    Polynomial p = *this;
    for (auto& t : p.terms) t.coef *= c;
    return p;
  }
};

}  // namespace superdense
