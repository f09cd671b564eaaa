#include "superdense/measure.hpp"

#include <cstring>
#include <fstream>

namespace superdense {

namespace {

struct PassResult {
  double value = 0.0;
  double stat_floor = 0.0;  // cellvol * sqrt(sum f^2): resolution floor for sparse integrands
};

// One lattice pass at a fixed resolution. accept() gates sample points (the
// ball test); offsets come from the midpoint rule or the stratified hash.
PassResult lattice_pass(const Box& domain, int pts_per_axis, SampleMode mode,
                        std::uint64_t stream_id,
                        const std::function<bool(const Vec&)>& accept,
                        const std::function<double(const Vec&)>& fn) {
  const int n = domain.dim();
  std::vector<std::int64_t> counts(n, pts_per_axis);
  Vec h(n);
  for (int d = 0; d < n; ++d) h[d] = (domain.hi[d] - domain.lo[d]) / pts_per_axis;
  double cellvol = 1.0;
  for (int d = 0; d < n; ++d) cellvol *= h[d];

  Vec p(n);
  double acc = 0.0, acc_sq = 0.0;
  std::int64_t linear = 0;
  for_each_index(counts, [&](const std::vector<std::int64_t>& idx) {
    if (mode == SampleMode::midpoint) {
      for (int d = 0; d < n; ++d) p[d] = domain.lo[d] + (idx[d] + 0.5) * h[d];
    } else {
      std::uint64_t s = splitmix64(stream_id ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(linear + 1)));
      for (int d = 0; d < n; ++d) {
        s = splitmix64(s + static_cast<std::uint64_t>(d) + 1);
        p[d] = domain.lo[d] + (idx[d] + hash_unit(s)) * h[d];
      }
    }
    ++linear;
    if (accept(p)) {
      const double v = fn(p);
      acc += v;
      acc_sq += v * v;
    }
  });
  return PassResult{acc * cellvol, cellvol * std::sqrt(acc_sq)};
}

MeasureEstimate refined_integral(const Box& domain, const QuadratureSpec& q,
                                 std::uint64_t domain_id,
                                 const std::function<bool(const Vec&)>& accept,
                                 const std::function<double(const Vec&)>& fn) {
  require(domain.dim() >= 1, "quadrature: empty domain");
  require(domain.nondegenerate(), "quadrature: degenerate domain box");
  require(q.points_per_axis >= 2, "quadrature: points_per_axis >= 2");
  require(q.refinement_levels >= 1, "quadrature: refinement_levels >= 1");

  // A single requested level still needs an error estimate; run a coarse
  // companion pass at half resolution for the difference.
  std::vector<int> ks;
  if (q.refinement_levels == 1) {
    ks.push_back(std::max(2, q.points_per_axis / 2));
    ks.push_back(q.points_per_axis);
  } else {
    for (int j = 0; j < q.refinement_levels; ++j)
      ks.push_back(q.points_per_axis << j);
  }

  double prev = 0.0, last = 0.0, floor = 0.0;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    std::uint64_t stream = splitmix64(domain_id ^ splitmix64(q.seed + 0x51ed2701) ^
                                      (static_cast<std::uint64_t>(ks[j]) << 32));
    const auto pass = lattice_pass(domain, ks[j], q.mode, stream, accept, fn);
    prev = (j == 0) ? pass.value : last;
    last = pass.value;
    floor = pass.stat_floor;
  }
  double err = std::abs(last - prev);
  // Stratified samples of a sparse integrand can agree across levels by
  // accident; a Poisson-style bound on the finest pass keeps rungs that rest
  // on a handful of hits from masquerading as trustworthy readings.
  if (q.mode == SampleMode::stratified) err = std::max(err, floor);
  return MeasureEstimate{last, err};
}

std::uint64_t hash_box(const Box& b) {
  std::uint64_t h = fnv1a(b.lo.data(), sizeof(double) * b.lo.size());
  return fnv1a(b.hi.data(), sizeof(double) * b.hi.size(), h);
}

}  // namespace

MeasureEstimate ball_integral(const Ball& b, const QuadratureSpec& q,
                              const std::function<double(const Vec&)>& fn) {
  require(b.radius > 0.0, "ball_integral: radius must be positive");
  const double r2 = b.radius * b.radius;
  const Vec c = b.center;
  auto accept = [&c, r2](const Vec& p) { return (p - c).squaredNorm() < r2; };
  return refined_integral(b.bounding_box(), q, hash_box(b.bounding_box()), accept, fn);
}

MeasureEstimate box_integral(const Box& domain, const QuadratureSpec& q,
                             const std::function<double(const Vec&)>& fn) {
  auto accept = [](const Vec&) { return true; };
  return refined_integral(domain, q, hash_box(domain), accept, fn);
}

MeasureEstimate residual_measure(const ImplicitRegion& E, const Ball& b,
                                 const QuadratureSpec& q) {
  require(E.n == b.dim(), "residual_measure: dimension mismatch");
  require(static_cast<bool>(E.member), "residual_measure: empty membership predicate");
  const auto& member = E.member;
  return ball_integral(b, q, [&member](const Vec& p) { return member(p) ? 0.0 : 1.0; });
}

// --- GridRegion ---

void GridRegion::midpoint(std::int64_t linear, Vec& out) const {
  const int n = dim();
  out.resize(n);
  for (int d = n - 1; d >= 0; --d) {
    std::int64_t i = linear % cells[d];
    linear /= cells[d];
    out[d] = origin[d] + (i + 0.5) * spacing[d];
  }
}

std::int64_t GridRegion::true_count() const {
  std::int64_t c = 0;
  for (auto b : mask) c += (b != 0);
  return c;
}

bool GridRegion::same_extent(const GridRegion& o) const {
  return cells == o.cells && (origin - o.origin).cwiseAbs().maxCoeff() == 0.0 &&
         (spacing - o.spacing).cwiseAbs().maxCoeff() == 0.0;
}

double grid_measure(const GridRegion& g) {
  return static_cast<double>(g.true_count()) * g.cell_volume();
}

GridRegion rasterize(const ImplicitRegion& E, double spacing, const Box& window) {
  require(spacing > 0.0, "rasterize: spacing must be positive");
  require(window.dim() == E.n, "rasterize: window dimension mismatch");
  require(window.nondegenerate(), "rasterize: degenerate window");

  const int n = E.n;
  GridRegion g;
  g.origin = window.lo;
  g.spacing.resize(n);
  g.cells.resize(n);
  for (int d = 0; d < n; ++d) {
    double extent = window.hi[d] - window.lo[d];
    std::int64_t k = std::max<std::int64_t>(1, std::llround(extent / spacing));
    g.cells[d] = k;
    g.spacing[d] = extent / static_cast<double>(k);
  }
  g.mask.assign(static_cast<std::size_t>(g.cell_count()), 0);

  Vec p(n);
  std::int64_t linear = 0;
  for_each_index(g.cells, [&](const std::vector<std::int64_t>& idx) {
    for (int d = 0; d < n; ++d) p[d] = g.origin[d] + (idx[d] + 0.5) * g.spacing[d];
    g.mask[static_cast<std::size_t>(linear++)] = E.member(p) ? 1 : 0;
  });
  return g;
}

GridRegion grid_complement(const GridRegion& g) {
  GridRegion out = g;
  for (auto& b : out.mask) b = b ? 0 : 1;
  return out;
}

namespace {
GridRegion grid_binary(const GridRegion& a, const GridRegion& b, const char* name,
                       const std::function<std::uint8_t(std::uint8_t, std::uint8_t)>& op) {
  require(a.same_extent(b), std::string(name) + ": grids must share extent");
  GridRegion out = a;
  for (std::size_t i = 0; i < out.mask.size(); ++i) out.mask[i] = op(a.mask[i], b.mask[i]);
  return out;
}
}  // namespace

GridRegion grid_intersect(const GridRegion& a, const GridRegion& b) {
  return grid_binary(a, b, "grid_intersect", [](std::uint8_t x, std::uint8_t y) -> std::uint8_t { return x & y; });
}
GridRegion grid_union(const GridRegion& a, const GridRegion& b) {
  return grid_binary(a, b, "grid_union", [](std::uint8_t x, std::uint8_t y) -> std::uint8_t { return x | y; });
}
GridRegion grid_xor(const GridRegion& a, const GridRegion& b) {
  return grid_binary(a, b, "grid_xor", [](std::uint8_t x, std::uint8_t y) -> std::uint8_t { return x ^ y; });
}

// --- binary mask format ---

namespace {
constexpr char kMagic[8] = {'G', 'R', 'I', 'D', 'R', 'G', 'N', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  put_u64(os, u);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  std::uint64_t u = get_u64(is);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}
}  // namespace

void save_grid(const GridRegion& g, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary);
  require(static_cast<bool>(os), "save_grid: cannot open " + file.string());
  os.write(kMagic, 8);
  const int n = g.dim();
  put_u64(os, static_cast<std::uint64_t>(n));
  for (int d = 0; d < n; ++d) put_u64(os, static_cast<std::uint64_t>(g.cells[d]));
  for (int d = 0; d < n; ++d) put_f64(os, g.origin[d]);
  for (int d = 0; d < n; ++d) put_f64(os, g.spacing[d]);
  // bit-packed, LSB first within each byte
  std::uint8_t byte = 0;
  int nbits = 0;
  for (std::size_t i = 0; i < g.mask.size(); ++i) {
    if (g.mask[i]) byte |= static_cast<std::uint8_t>(1u << nbits);
    if (++nbits == 8) {
      os.put(static_cast<char>(byte));
      byte = 0;
      nbits = 0;
    }
  }
  if (nbits > 0) os.put(static_cast<char>(byte));
  require(static_cast<bool>(os), "save_grid: write failed for " + file.string());
}

GridRegion load_grid(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  require(static_cast<bool>(is), "load_grid: cannot open " + file.string());
  char magic[8];
  is.read(magic, 8);
  require(is && std::memcmp(magic, kMagic, 8) == 0, "load_grid: bad magic in " + file.string());
  const auto n64 = get_u64(is);
  require(n64 >= 1 && n64 <= 16, "load_grid: implausible dimension");
  const int n = static_cast<int>(n64);
  GridRegion g;
  g.cells.resize(n);
  g.origin.resize(n);
  g.spacing.resize(n);
  for (int d = 0; d < n; ++d) g.cells[d] = static_cast<std::int64_t>(get_u64(is));
  for (int d = 0; d < n; ++d) g.origin[d] = get_f64(is);
  for (int d = 0; d < n; ++d) g.spacing[d] = get_f64(is);
  require(static_cast<bool>(is), "load_grid: truncated header");
  const std::int64_t total = g.cell_count();
  require(total > 0, "load_grid: empty grid");
  g.mask.assign(static_cast<std::size_t>(total), 0);
  std::uint8_t byte = 0;
  int nbits = 8;
  for (std::int64_t i = 0; i < total; ++i) {
    if (nbits == 8) {
      int c = is.get();
      require(c != EOF, "load_grid: truncated mask");
      byte = static_cast<std::uint8_t>(c);
      nbits = 0;
    }
    g.mask[static_cast<std::size_t>(i)] = (byte >> nbits) & 1u;
    ++nbits;
  }
  return g;
}

// --- region algebra ---

Box default_universe(int n) { return cube_box(n, -8.0, 8.0); }

ImplicitRegion region_complement(const ImplicitRegion& E) {
  return region_complement(E, default_universe(E.n));
}

ImplicitRegion region_complement(const ImplicitRegion& E, const Box& universe) {
  require(universe.dim() == E.n, "region_complement: universe dimension mismatch");
  require(universe.nondegenerate(), "region_complement: degenerate universe");
  auto inner = E.member;
  Box u = universe;
  ImplicitRegion out;
  out.n = E.n;
  // Set difference within the universe window, so members stay inside bbox.
  out.member = [inner, u](const Vec& x) { return u.contains(x) && !inner(x); };
  out.bbox = u;
  out.label = "complement(" + E.label + ")";
  return out;
}

ImplicitRegion region_intersect(const ImplicitRegion& a, const ImplicitRegion& b) {
  require(a.n == b.n, "region_intersect: dimension mismatch");
  auto ma = a.member, mb = b.member;
  ImplicitRegion out;
  out.n = a.n;
  out.member = [ma, mb](const Vec& x) { return ma(x) && mb(x); };
  out.bbox = Box(a.bbox.lo.cwiseMax(b.bbox.lo), a.bbox.hi.cwiseMin(b.bbox.hi));
  out.label = "(" + a.label + " & " + b.label + ")";
  return out;
}

ImplicitRegion region_union(const ImplicitRegion& a, const ImplicitRegion& b) {
  require(a.n == b.n, "region_union: dimension mismatch");
  auto ma = a.member, mb = b.member;
  ImplicitRegion out;
  out.n = a.n;
  out.member = [ma, mb](const Vec& x) { return ma(x) || mb(x); };
  out.bbox = hull(a.bbox, b.bbox);
  out.label = "(" + a.label + " | " + b.label + ")";
  return out;
}

ImplicitRegion region_xor(const ImplicitRegion& a, const ImplicitRegion& b) {
  require(a.n == b.n, "region_xor: dimension mismatch");
  auto ma = a.member, mb = b.member;
  ImplicitRegion out;
  out.n = a.n;
  out.member = [ma, mb](const Vec& x) { return ma(x) != mb(x); };
  out.bbox = hull(a.bbox, b.bbox);
  out.label = "(" + a.label + " ^ " + b.label + ")";
  return out;
}

ImplicitRegion region_translate(const ImplicitRegion& E, const Vec& shift) {
  require(shift.size() == E.n, "region_translate: shift dimension mismatch");
  auto inner = E.member;
  Vec s = shift;
  ImplicitRegion out;
  out.n = E.n;
  out.member = [inner, s](const Vec& x) { return inner(x - s); };
  out.bbox = Box(E.bbox.lo + s, E.bbox.hi + s);
  out.label = "translate(" + E.label + ")";
  return out;
}

ImplicitRegion region_dilate(const ImplicitRegion& E, const Vec& x, double r) {
  require(x.size() == E.n, "region_dilate: center dimension mismatch");
  require(r > 0.0, "region_dilate: scale must be positive");
  auto inner = E.member;
  Vec c = x;
  ImplicitRegion out;
  out.n = E.n;
  out.member = [inner, c, r](const Vec& z) { return inner(c + r * z); };
  out.bbox = Box((E.bbox.lo - c) / r, (E.bbox.hi - c) / r);
  out.label = "dilate(" + E.label + ")";
  return out;
}

ImplicitRegion region_product(const ImplicitRegion& a, const ImplicitRegion& b) {
  auto ma = a.member, mb = b.member;
  const int na = a.n, nb = b.n;
  ImplicitRegion out;
  out.n = na + nb;
  out.member = [ma, mb, na, nb](const Vec& x) {
    return ma(x.head(na)) && mb(x.tail(nb));
  };
  Vec lo(na + nb), hi(na + nb);
  lo << a.bbox.lo, b.bbox.lo;
  hi << a.bbox.hi, b.bbox.hi;
  out.bbox = Box(lo, hi);
  out.label = "(" + a.label + " x " + b.label + ")";
  return out;
}

ImplicitRegion region_from_grid(const GridRegion& g, std::string label) {
  auto grid = std::make_shared<GridRegion>(g);
  const int n = g.dim();
  ImplicitRegion out;
  out.n = n;
  out.member = [grid, n](const Vec& x) {
    std::int64_t linear = 0;
    for (int d = 0; d < n; ++d) {
      double t = (x[d] - grid->origin[d]) / grid->spacing[d];
      auto i = static_cast<std::int64_t>(std::floor(t));
      if (i < 0 || i >= grid->cells[d]) return false;
      linear = linear * grid->cells[d] + i;
    }
    return grid->mask[static_cast<std::size_t>(linear)] != 0;
  };
  Vec hi(n);
  for (int d = 0; d < n; ++d) hi[d] = g.origin[d] + g.spacing[d] * static_cast<double>(g.cells[d]);
  out.bbox = Box(g.origin, hi);
  out.label = std::move(label);
  return out;
}

}  // namespace superdense
