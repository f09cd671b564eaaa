#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace superdense {

using Vec = Eigen::VectorXd;

// Thrown whenever a caller breaks a documented precondition.
struct ContractViolation : std::runtime_error {
  explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ContractViolation(msg);
}

// Axis-aligned box [lo, hi]. Degenerate axes (hi <= lo) are rejected where a
// positive-volume domain is required.
struct Box {
  Vec lo, hi;

  Box() = default;
  Box(Vec l, Vec h) : lo(std::move(l)), hi(std::move(h)) {
    require(lo.size() == hi.size(), "Box: lo/hi dimension mismatch");
  }

  int dim() const { return static_cast<int>(lo.size()); }

  double volume() const {
    double v = 1.0;
    for (int d = 0; d < dim(); ++d) v *= std::max(0.0, hi[d] - lo[d]);
    return v;
  }

  bool contains(const Vec& x) const {
    for (int d = 0; d < dim(); ++d)
      if (x[d] < lo[d] || x[d] > hi[d]) return false;
    return true;
  }

  bool nondegenerate() const {
    for (int d = 0; d < dim(); ++d)
      if (!(hi[d] > lo[d])) return false;
    return true;
  }

  Vec center() const { return 0.5 * (lo + hi); }
  Vec extent() const { return hi - lo; }
};

inline Box make_box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  Vec l(static_cast<int>(lo.size())), h(static_cast<int>(hi.size()));
  int i = 0;
  for (double v : lo) l[i++] = v;
  i = 0;
  for (double v : hi) h[i++] = v;
  return Box(l, h);
}

inline Box cube_box(int n, double lo, double hi) {
  return Box(Vec::Constant(n, lo), Vec::Constant(n, hi));
}

inline Box hull(const Box& a, const Box& b) {
  return Box(a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi));
}

struct Ball {
  Vec center;
  double radius = 0.0;

  Ball() = default;
  Ball(Vec c, double r) : center(std::move(c)), radius(r) {
    require(radius > 0.0, "Ball: radius must be positive");
  }

  int dim() const { return static_cast<int>(center.size()); }

  Box bounding_box() const {
    return Box(center.array() - radius, center.array() + radius);
  }

  bool contains(const Vec& x) const {
    return (x - center).squaredNorm() < radius * radius;
  }
};

// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
  require(n >= 1, "unit_ball_volume: n >= 1");
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// Row-major odometer over an n-dimensional lattice with per-axis counts.
// Calls fn(index) for every multi-index; index is reused storage.
template <typename F>
void for_each_index(const std::vector<std::int64_t>& counts, F&& fn) {
  const int n = static_cast<int>(counts.size());
  for (int d = 0; d < n; ++d)
    if (counts[d] <= 0) return;
  std::vector<std::int64_t> idx(n, 0);
  while (true) {
    fn(idx);
    int d = n - 1;
    while (d >= 0) {
      if (++idx[d] < counts[d]) break;
      idx[d] = 0;
      --d;
    }
    if (d < 0) break;
  }
}

// SplitMix64; the deterministic hash chain behind stratified sampling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform double in [0,1) from a hash state.
inline double hash_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  return fnv1a(s.data(), s.size(), seed);
}

}  // namespace superdense
