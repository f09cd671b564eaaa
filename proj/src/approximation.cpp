#include "superdense/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

namespace superdense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t v) { return static_cast<double>(v >> 11) * 0x1.0p-53; }

Vec random_point(const Box& window, std::uint64_t& state) {
  const int n = window.dim();
  Vec x(n);
  for (int d = 0; d < n; ++d)
    x[d] = window.lo[d] + (window.hi[d] - window.lo[d]) * unit_double(splitmix(state));
  return x;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Quantization level j of n + j*2^-k below the value, capped at j = k*2^k
// (degree n + k); -1 encodes the zero level.
std::int64_t stage_level(double f_tilde, int n, int k) {
  if (!(f_tilde >= static_cast<double>(n))) return -1;
  const double cap = static_cast<double>(k) * std::ldexp(1.0, k);
  const double scaled = (f_tilde - static_cast<double>(n)) * std::ldexp(1.0, k);
  if (scaled >= cap) return static_cast<std::int64_t>(cap);
  return static_cast<std::int64_t>(std::floor(scaled));
}

double level_to_value(std::int64_t j, int n, int k) {
  return static_cast<double>(n) + std::ldexp(static_cast<double>(j), -k);
}

// Integer cell layout of the window at spacing 2^-k. The window bounds must
// sit on the grid so the partition ledger stays exact.
struct RasterLayout {
  double h = 0.0;
  std::vector<std::int64_t> i0;      // global index of the first cell per axis
  std::vector<std::int64_t> counts;  // cells per axis
};

RasterLayout raster_layout(const Box& window, int k) {
  const int n = window.dim();
  RasterLayout rs;
  rs.h = std::ldexp(1.0, -k);
  rs.i0.resize(n);
  rs.counts.resize(n);
  for (int d = 0; d < n; ++d) {
    const double lo = window.lo[d] / rs.h;
    const double hi = window.hi[d] / rs.h;
    const auto a = static_cast<std::int64_t>(std::llround(lo));
    const auto b = static_cast<std::int64_t>(std::llround(hi));
    require(std::abs(lo - static_cast<double>(a)) < 1e-9 &&
                std::abs(hi - static_cast<double>(b)) < 1e-9,
            "raster_layout: window bounds must be dyadic at the stage resolution");
    require(b > a, "raster_layout: window too thin for the stage resolution");
    rs.i0[d] = a;
    rs.counts[d] = b - a;
  }
  return rs;
}

// 3^n sample offsets inside a cell: per-axis fractions 1/6, 1/2, 5/6.
std::vector<Vec> cell_offsets(int n, double h) {
  std::vector<Vec> offs;
  std::vector<std::int64_t> three(static_cast<std::size_t>(n), 3);
  for_each_index(three, [&](const std::vector<std::int64_t>& s) {
    Vec o(n);
    for (int d = 0; d < n; ++d) o[d] = (2.0 * static_cast<double>(s[d]) + 1.0) / 6.0 * h;
    offs.push_back(o);
  });
  return offs;
}

// Classifies every cell: fn(local_index, level) with level >= 0 when all 3^n
// samples agree on a positive quantization level, -1 for all-background,
// -2 for mixed occupancy.
template <typename EvalFn, typename CellFn>
void classify_cells(const RasterLayout& rs, int n, const EvalFn& level_at, CellFn&& fn) {
  const auto offs = cell_offsets(n, rs.h);
  Vec base(n), x(n);
  for_each_index(rs.counts, [&](const std::vector<std::int64_t>& idx) {
    for (int d = 0; d < n; ++d)
      base[d] = static_cast<double>(rs.i0[d] + idx[d]) * rs.h;
    std::int64_t level = 0;
    bool mixed = false;
    for (std::size_t s = 0; s < offs.size(); ++s) {
      x = base + offs[s];
      const std::int64_t j = level_at(x);
      if (s == 0) {
        level = j;
      } else if (j != level) {
        mixed = true;
        break;
      }
    }
    fn(idx, mixed ? std::int64_t{-2} : level);
  });
}

}  // namespace

// --- targets ---

double TargetFunction::remapped(const Vec& x) const {
  require(static_cast<bool>(f), "TargetFunction: missing function");
  const double v = f(x);
  return v >= static_cast<double>(n) ? v : 0.0;
}

TargetFunction constant_target(int n, double value, const Box& window) {
  require(n >= 1, "constant_target: n >= 1");
  require(window.dim() == n && window.nondegenerate(), "constant_target: bad window");
  TargetFunction t;
  t.n = n;
  t.f = [value](const Vec&) { return value; };
  t.window = window;
  std::ostringstream name;
  name << "const(" << value << ")";
  t.name = name.str();
  return t;
}

TargetFunction indicator_target(double value, const Box& support, const Box& window,
                                std::string name) {
  const int n = support.dim();
  require(n >= 1 && window.dim() == n, "indicator_target: dimension mismatch");
  require(window.nondegenerate() && support.nondegenerate(), "indicator_target: bad boxes");
  TargetFunction t;
  t.n = n;
  t.f = [support, value](const Vec& x) { return support.contains(x) ? value : 0.0; };
  t.window = window;
  t.name = std::move(name);
  return t;
}

TargetFunction two_value_target(double value_a, const Box& box_a, double value_b,
                                const Box& box_b, const Box& window) {
  const int n = box_a.dim();
  require(box_b.dim() == n && window.dim() == n, "two_value_target: dimension mismatch");
  bool separated = false;
  for (int d = 0; d < n && !separated; ++d)
    separated = box_a.hi[d] < box_b.lo[d] || box_b.hi[d] < box_a.lo[d];
  require(separated, "two_value_target: boxes must be disjoint");
  TargetFunction t;
  t.n = n;
  t.f = [box_a, value_a, box_b, value_b](const Vec& x) {
    if (box_a.contains(x)) return value_a;
    if (box_b.contains(x)) return value_b;
    return 0.0;
  };
  t.window = window;
  std::ostringstream name;
  name << "two-value(" << value_a << "," << value_b << ")";
  t.name = name.str();
  return t;
}

// --- quantization ---

double stage_value(double f_tilde, int n, int k) {
  const std::int64_t j = stage_level(f_tilde, n, k);
  return j < 0 ? 0.0 : level_to_value(j, n, k);
}

double SimpleStage::evaluate(const Vec& x) const {
  return value_fn ? value_fn(x) : 0.0;
}

SimpleStage simple_stage(const TargetFunction& f, int k) {
  require(f.n >= 1 && static_cast<bool>(f.f), "simple_stage: incomplete target");
  require(f.window.dim() == f.n && f.window.nondegenerate(), "simple_stage: bad window");
  require(k >= 1 && k <= 16, "simple_stage: stage index in [1,16]");
  const int n = f.n;

  SimpleStage s;
  s.n = n;
  s.k = k;
  TargetFunction target = f;
  s.value_fn = [target, n, k](const Vec& x) {
    return stage_value(target.remapped(x), n, k);
  };

  // Levels realized on the stage lattice; mixed cells contribute their
  // individual samples, so every level that survives rasterization shows up.
  const RasterLayout rs = raster_layout(f.window, k);
  std::set<std::int64_t> realized;
  {
    const auto offs = cell_offsets(n, rs.h);
    Vec base(n), x(n);
    for_each_index(rs.counts, [&](const std::vector<std::int64_t>& idx) {
      for (int d = 0; d < n; ++d)
        base[d] = static_cast<double>(rs.i0[d] + idx[d]) * rs.h;
      for (const auto& off : offs) {
        x = base + off;
        const std::int64_t j = stage_level(target.remapped(x), n, k);
        if (j >= 0) realized.insert(j);
      }
    });
  }

  for (std::int64_t j : realized) {
    SimpleStage::Term term;
    term.level = j;
    term.value = level_to_value(j, n, k);
    ImplicitRegion region;
    region.n = n;
    const Box window = f.window;
    region.member = [target, window, n, k, j](const Vec& x) {
      return window.contains(x) && stage_level(target.remapped(x), n, k) == j;
    };
    region.bbox = window;
    std::ostringstream label;
    label << "level(" << term.value << ",k=" << k << ")";
    region.label = label.str();
    term.region = std::move(region);
    s.terms.push_back(std::move(term));
  }
  return s;
}

// --- rectangles ---

bool RectanglePartition::pairwise_disjoint() const {
  for (std::size_t i = 0; i < rects.size(); ++i)
    for (std::size_t j = i + 1; j < rects.size(); ++j) {
      bool separated = false;
      for (int d = 0; d < n && !separated; ++d)
        separated = rects[i].hi[d] + 2 <= rects[j].lo[d] ||
                    rects[j].hi[d] + 2 <= rects[i].lo[d];
      if (!separated) return false;
    }
  return true;
}

RectanglePartition rectangle_stage(const SimpleStage& s, int k, const Box& window) {
  require(s.k == k, "rectangle_stage: stage index mismatch");
  require(static_cast<bool>(s.value_fn), "rectangle_stage: stage missing its quantizer");
  const int n = s.n;
  require(window.dim() == n && window.nondegenerate(), "rectangle_stage: bad window");

  const RasterLayout rs = raster_layout(window, k);
  RectanglePartition p;
  p.n = n;
  p.k = k;
  p.window = window;
  p.eps = 1.0 / (2.0 * static_cast<double>(k));
  p.unit = std::ldexp(1.0, -(k + 4));
  p.window_volume = window.volume();

  const auto level_at = [&s, n, k](const Vec& x) {
    return stage_level(s.value_fn(x), n, k);
  };

  // Pass 1: bucket fully-occupied cells by level, count mixed cells.
  std::map<std::int64_t, std::vector<std::vector<std::int64_t>>> by_level;
  std::int64_t partial_cells = 0;
  classify_cells(rs, n, level_at, [&](const std::vector<std::int64_t>& idx, std::int64_t lvl) {
    if (lvl == -2) {
      ++partial_cells;
    } else if (lvl >= 0) {
      by_level[lvl].push_back(idx);
    }
  });
  p.partial_bound = static_cast<double>(partial_cells) * std::pow(rs.h, n);

  // Pass 2: greedy maximal-rectangle merge per level.
  const double un = std::pow(p.unit, n);
  for (auto& [lvl, cells] : by_level) {
    const auto linear = [&rs, n](const std::vector<std::int64_t>& idx) {
      std::int64_t id = 0;
      for (int d = 0; d < n; ++d) id = id * rs.counts[d] + idx[d];
      return id;
    };
    std::unordered_set<std::int64_t> present, claimed;
    present.reserve(cells.size() * 2);
    for (const auto& c : cells) present.insert(linear(c));

    std::vector<std::int64_t> lo(n), hi(n), probe(n), span(n);
    for (const auto& c : cells) {
      if (claimed.count(linear(c))) continue;
      for (int d = 0; d < n; ++d) {
        lo[d] = c[d];
        hi[d] = c[d] + 1;
      }
      // Grow along the last axis first (cells arrive row-major), then sweep
      // the remaining axes, admitting a full slab at a time.
      probe = c;
      while (hi[n - 1] < rs.counts[n - 1]) {
        probe[n - 1] = hi[n - 1];
        const std::int64_t id = linear(probe);
        if (!present.count(id) || claimed.count(id)) break;
        ++hi[n - 1];
      }
      for (int d = n - 2; d >= 0; --d) {
        while (hi[d] < rs.counts[d]) {
          for (int e = 0; e < n; ++e) span[e] = hi[e] - lo[e];
          span[d] = 1;
          bool ok = true;
          for_each_index(span, [&](const std::vector<std::int64_t>& off) {
            if (!ok) return;
            for (int e = 0; e < n; ++e) probe[e] = lo[e] + off[e];
            probe[d] = hi[d];
            const std::int64_t id = linear(probe);
            if (!present.count(id) || claimed.count(id)) ok = false;
          });
          if (!ok) break;
          ++hi[d];
        }
      }
      for (int e = 0; e < n; ++e) span[e] = hi[e] - lo[e];
      for_each_index(span, [&](const std::vector<std::int64_t>& off) {
        for (int e = 0; e < n; ++e) probe[e] = lo[e] + off[e];
        claimed.insert(linear(probe));
      });

      RectanglePartition::Rect rect;
      rect.level = lvl;
      rect.value = level_to_value(lvl, n, k) + 1.0 / static_cast<double>(k);
      rect.lo.resize(n);
      rect.hi.resize(n);
      Vec blo(n), bhi(n);
      std::int64_t cell_units = 1, kept_units = 1;
      for (int d = 0; d < n; ++d) {
        rect.lo[d] = (rs.i0[d] + lo[d]) * 16 + 1;
        rect.hi[d] = (rs.i0[d] + hi[d]) * 16 - 1;
        blo[d] = static_cast<double>(rect.lo[d]) * p.unit;
        bhi[d] = static_cast<double>(rect.hi[d]) * p.unit;
        cell_units *= (hi[d] - lo[d]) * 16;
        kept_units *= rect.hi[d] - rect.lo[d];
      }
      rect.box = Box(std::move(blo), std::move(bhi));
      p.kept_area += static_cast<double>(kept_units) * un;
      p.frame_discard += static_cast<double>(cell_units - kept_units) * un;
      p.rects.push_back(std::move(rect));
    }
  }
  return p;
}

// --- synthesis ---

struct SynthesizedStage::Units {
  int n = 0;
  double margin = 0.0;
  std::vector<Box> boxes;
  std::vector<std::function<bool(const Vec&)>> members;
};

bool SynthesizedStage::excludes(const Vec& x, double f_tilde) const {
  require(static_cast<bool>(units_), "SynthesizedStage: not synthesized");
  const auto& u = *units_;
  const double m = u.margin;
  for (std::size_t i = 0; i < u.boxes.size(); ++i) {
    const Box& b = u.boxes[i];
    bool in_dilated = true, in_shrunk = true;
    for (int d = 0; d < u.n && in_dilated; ++d) {
      if (x[d] < b.lo[d] - m || x[d] > b.hi[d] + m) in_dilated = false;
      if (x[d] < b.lo[d] + m || x[d] > b.hi[d] - m) in_shrunk = false;
    }
    if (!in_dilated) continue;
    if (!in_shrunk) return true;  // boundary collar
    if (f_tilde >= static_cast<double>(u.n)) return !u.members[i](x);  // removed interior
    return false;
  }
  // A prescribed degree with no rectangle underneath: the stage never built
  // anything here (dropped partial cell or skipped rectangle).
  return f_tilde >= static_cast<double>(u.n);
}

SynthesizedStage synthesize_stage(const RectanglePartition& p, std::uint64_t seed) {
  require(p.n >= 1 && p.k >= 1, "synthesize_stage: empty partition header");
  const int n = p.n;

  SynthesizedStage st;
  st.k = p.k;
  st.partition = p;

  auto units = std::make_shared<SynthesizedStage::Units>();
  units->n = n;
  units->margin = 2.0 * p.unit;  // 2^-(k+3)

  const std::size_t N = p.rects.size();
  const double budget = std::ldexp(1.0, -p.k) / static_cast<double>(std::max<std::size_t>(1, N));
  st.removal_budget_total = budget * static_cast<double>(N);

  std::uint64_t rng = seed ^ 0xa076'1d64'78bd'642fULL;
  for (const auto& rect : p.rects) {
    SynthesizedStage::RectReport rep;
    rep.box = rect.box;
    rep.value = rect.value;
    rep.budget_target = budget;
    const Vec ext = rect.box.extent();
    const double vol = rect.box.volume();

    if (rect.level == 0) {
      // Degree target n + 1/k: the uniform-degree removal regime. The removal
      // fraction stays well under the stage budget so sampled quotients keep a
      // readable slope at desk-scale radii.
      const double eps = std::min(budget, 0.02 * vol);
      const int gens = std::min(10, 20 / n);
      SwissCheese sc = make_swiss_cheese(rect.box, eps, splitmix(rng), gens);
      rep.kind = 2;
      rep.param = eps;
      rep.generations = gens;
      rep.removed = sc.removed_volume_bound;
      units->members.push_back(sc.region().member);
    } else {
      // Graded removal targeting t = rect.value. Generations capped so the
      // construction never enumerates more than a few million lattice cells.
      int gens = 0;
      double enumerated = 0.0, ball_cells = 0.0;
      for (int g = 1; g <= 12; ++g) {
        double cost = 1.0, balls = 1.0;
        for (int d = 0; d < n; ++d) {
          const double c = std::floor(ext[d] * std::ldexp(1.0, g) + 1e-9);
          cost *= std::max(1.0, c);
          balls *= c;
        }
        if (gens >= 1 && enumerated + cost > 3e6) break;
        enumerated += cost;
        ball_cells += std::max(0.0, balls);
        gens = g;
      }
      if (ball_cells == 0.0) {
        // Too small to host even one removal ball: keep the solid rectangle
        // and flag it.
        rep.kind = 0;
        rep.skipped = true;
        rep.generations = gens;
        const Box box = rect.box;
        units->members.push_back([box](const Vec& x) { return box.contains(x); });
      } else {
        const double t = rect.value;
        double s_t = 0.0;
        for (int g = 1; g <= gens; ++g)
          s_t += std::pow(2.0, -static_cast<double>(g) * (t - n));
        const double ideal = 0.9 * budget / std::max(vol * s_t, 1e-300);
        // The floor keeps the removal visible to desk-scale quadrature; when
        // it overrides the budget share the overshoot is recorded through
        // budget_met rather than asserted.
        const double v0 = std::clamp(ideal, 0.05, 0.08);
        GradedRemoval gr = make_graded_removal(rect.box, t, gens, v0);
        rep.kind = 1;
        rep.param = v0;
        rep.generations = gens;
        rep.removed = gr.removed_volume();
        units->members.push_back(gr.region().member);
      }
    }
    rep.budget_met = rep.removed <= budget + 1e-12;
    st.removal_achieved += rep.removed;
    units->boxes.push_back(rect.box);
    st.reports.push_back(std::move(rep));
  }

  st.units_ = units;
  st.set.n = n;
  std::ostringstream label;
  label << "stage(k=" << p.k << ")";
  st.set.label = label.str();
  if (units->boxes.empty()) {
    st.set.bbox = p.window;
    st.set.member = [](const Vec&) { return false; };
  } else {
    Box bb = units->boxes.front();
    for (std::size_t i = 1; i < units->boxes.size(); ++i) bb = hull(bb, units->boxes[i]);
    st.set.bbox = bb;
    const std::shared_ptr<const SynthesizedStage::Units> u = units;
    st.set.member = [u](const Vec& x) {
      for (std::size_t i = 0; i < u->boxes.size(); ++i)
        if (u->boxes[i].contains(x)) return u->members[i](x);
      return false;
    };
  }
  return st;
}

std::vector<SynthesizedStage> build_pipeline(const TargetFunction& f,
                                             const std::vector<int>& ks,
                                             std::uint64_t seed) {
  require(!ks.empty(), "build_pipeline: no stages requested");
  for (std::size_t i = 0; i + 1 < ks.size(); ++i)
    require(ks[i] < ks[i + 1], "build_pipeline: stages must be strictly increasing");
  std::vector<SynthesizedStage> stages;
  std::uint64_t rng = seed;
  for (int k : ks) {
    const SimpleStage s = simple_stage(f, k);
    const RectanglePartition p = rectangle_stage(s, k, f.window);
    stages.push_back(synthesize_stage(p, splitmix(rng)));
  }
  return stages;
}

// --- convergence scoring ---

namespace {

// |estimated degree - target|, categorical at the ends of the scale.
double degree_deviation(const DegreeEstimate& de, double target, int n) {
  if (target == 0.0) return de.cls == DegreeClass::zero ? 0.0 : kInf;
  if (std::isinf(target)) return de.cls == DegreeClass::infinite ? 0.0 : kInf;
  if (de.cls != DegreeClass::finite) return kInf;
  (void)n;
  return std::abs(de.exponent - target);
}

}  // namespace

ConvergenceReport convergence_report(const TargetFunction& f,
                                     const std::vector<SynthesizedStage>& stages,
                                     int samples, const RadiusLadder& ladder,
                                     const QuadratureSpec& q, double tol,
                                     int fit_rungs) {
  require(stages.size() >= 3, "convergence_report: need at least three stages");
  require(samples >= 1, "convergence_report: samples >= 1");
  require(fit_rungs >= 2, "convergence_report: fit_rungs >= 2");
  ladder.validate();

  ConvergenceReport rep;
  rep.tol = tol;
  for (const auto& st : stages) rep.ks.push_back(st.k);

  std::uint64_t rng = q.seed ^ 0x2545'f491'4f6c'dd1dULL;
  int excluded = 0;
  for (int i = 0; i < samples; ++i) {
    ConvergenceRow row;
    row.x = random_point(f.window, rng);
    row.f_value = f.remapped(row.x);
    for (const auto& st : stages)
      if (st.excludes(row.x, row.f_value)) {
        row.excluded = true;
        break;
      }
    if (row.excluded) {
      ++excluded;
      rep.rows.push_back(std::move(row));
      continue;
    }
    for (const auto& st : stages) {
      const DegreeEstimate de = estimate_degree(st.set, row.x, ladder, q, fit_rungs);
      row.cls.push_back(de.cls);
      row.exponent.push_back(de.value());
      row.deviation.push_back(degree_deviation(de, row.f_value, f.n));
    }
    rep.rows.push_back(std::move(row));
  }

  const std::size_t S = stages.size();
  std::vector<std::vector<double>> devs(S);
  std::map<double, std::vector<std::vector<double>>> devs_by_value;
  for (const auto& row : rep.rows) {
    if (row.excluded) continue;
    ++rep.retained;
    auto it = devs_by_value.find(row.f_value);
    if (it == devs_by_value.end())
      it = devs_by_value.emplace(row.f_value, std::vector<std::vector<double>>(S)).first;
    for (std::size_t s = 0; s < S; ++s) {
      devs[s].push_back(row.deviation[s]);
      it->second[s].push_back(row.deviation[s]);
    }
  }
  for (std::size_t s = 0; s < S; ++s) rep.medians.push_back(median_of(devs[s]));
  for (auto& [value, per_stage] : devs_by_value) {
    std::vector<double> meds;
    for (auto& v : per_stage) meds.push_back(median_of(v));
    rep.medians_by_value.emplace(value, std::move(meds));
  }

  rep.excluded_fraction = static_cast<double>(excluded) / static_cast<double>(samples);
  rep.final_median = rep.medians.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : rep.medians.back();
  rep.medians_nonincreasing = rep.retained > 0;
  for (std::size_t s = 0; s + 1 < rep.medians.size() && rep.medians_nonincreasing; ++s)
    if (!(rep.medians[s + 1] <= rep.medians[s] + 1e-12)) rep.medians_nonincreasing = false;
  rep.final_ok = rep.retained > 0 && rep.final_median <= tol;
  rep.valid = rep.excluded_fraction <= 0.2;
  return rep;
}

// --- increasing families ---

FamilyReport increasing_family(const ImplicitRegion& E, const std::vector<int>& stages,
                               int samples, const RadiusLadder& ladder,
                               const QuadratureSpec& q, std::uint64_t seed) {
  require(E.n >= 1 && static_cast<bool>(E.member), "increasing_family: incomplete set");
  require(!stages.empty(), "increasing_family: no stages");
  require(samples >= 1, "increasing_family: samples >= 1");
  require(E.bbox.dim() == E.n && E.bbox.nondegenerate(),
          "increasing_family: set needs a bounding box");
  const int n = E.n;

  // Integer-cornered window padding the target: dyadic at every stage.
  Vec wlo(n), whi(n);
  for (int d = 0; d < n; ++d) {
    wlo[d] = std::floor(E.bbox.lo[d] - 0.25);
    whi[d] = std::ceil(E.bbox.hi[d] + 0.25);
  }
  TargetFunction f;
  f.n = n;
  f.window = Box(std::move(wlo), std::move(whi));
  const ImplicitRegion target_set = E;
  f.f = [target_set, n](const Vec& x) {
    return target_set.member(x) ? static_cast<double>(n) : 0.0;
  };
  f.name = "uniform-degree(" + E.label + ")";

  const auto pipeline = build_pipeline(f, stages, seed);

  FamilyReport rep;
  const double spacing = std::ldexp(1.0, -8);
  const double target_measure = grid_measure(rasterize(E, spacing, f.window));
  rep.empty_target = target_measure == 0.0;

  // F_l = intersection of the stage sets with k >= l.
  for (std::size_t i = 0; i < pipeline.size(); ++i) {
    ImplicitRegion fl = pipeline.back().set;
    for (std::size_t j = pipeline.size() - 1; j > i;) {
      --j;
      fl = region_intersect(pipeline[j].set, fl);
    }
    std::ostringstream label;
    label << "family(l=" << stages[i] << ")";
    fl.label = label.str();
    rep.members.push_back(fl);
  }

  std::uint64_t rng = seed ^ 0x8538'cb14'3ad4'2cb9ULL;
  for (std::size_t i = 0; i < rep.members.size(); ++i) {
    FamilyRow row;
    row.l = stages[i];
    row.measure = grid_measure(rasterize(rep.members[i], spacing, f.window));
    row.measure_target = target_measure;
    row.measure_slack = std::ldexp(1.0, -(stages[i] - 2));

    if (i + 1 < rep.members.size()) {
      for (int s = 0; s < 2000; ++s) {
        const Vec x = random_point(f.window, rng);
        if (rep.members[i].member(x) && !rep.members[i + 1].member(x)) ++row.subset_violations;
      }
    }

    std::vector<double> exps;
    const std::int64_t tries = 400LL * samples;
    for (std::int64_t s = 0; s < tries && static_cast<int>(exps.size()) < samples; ++s) {
      const Vec x = random_point(f.window, rng);
      if (!rep.members[i].member(x)) continue;
      exps.push_back(estimate_degree(rep.members[i], x, ladder, q).value());
    }
    row.exponent_samples = static_cast<int>(exps.size());
    row.exponent_median = exps.empty() ? 0.0 : median_of(exps);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// --- impossibility ---

ImpossibilityReport impossibility_demo(double m, const ImplicitRegion& F, int samples,
                                       const RadiusLadder& ladder, const QuadratureSpec& q,
                                       std::uint64_t seed) {
  require(m > 0.0, "impossibility_demo: m must be positive");
  require(samples >= 1, "impossibility_demo: samples >= 1");
  require(F.n >= 1 && static_cast<bool>(F.member), "impossibility_demo: incomplete set");
  require(F.bbox.dim() == F.n && F.bbox.nondegenerate(),
          "impossibility_demo: set needs a bounding box");
  ladder.validate();

  ImpossibilityReport rep;
  rep.requested_m = m;

  std::uint64_t rng = seed ^ 0xd6e8'feb8'6659'fd93ULL;
  std::vector<Vec> points;
  const std::int64_t tries = 400LL * samples;
  for (std::int64_t s = 0; s < tries && static_cast<int>(points.size()) < samples; ++s) {
    const Vec x = random_point(F.bbox, rng);
    if (F.member(x)) points.push_back(x);
  }
  rep.samples_used = static_cast<int>(points.size());
  rep.vacuous = points.empty();

  std::ostringstream out;
  out << "prescribed degree: " << m << " on every point of " << F.label << ", 0 elsewhere\n";
  if (rep.vacuous) {
    out << "no sample landed in the set after " << tries
        << " draws; the comparison is vacuous\n";
    rep.narrative = out.str();
    return rep;
  }

  int infinite_count = 0;
  for (const auto& x : points) {
    const double v = estimate_degree(F, x, ladder, q).value();
    rep.exponents.push_back(v);
    if (std::isinf(v)) ++infinite_count;
  }
  rep.observed_max = *std::max_element(rep.exponents.begin(), rep.exponents.end());
  rep.observed_median = median_of(rep.exponents);
  rep.precondition_ok = m > rep.observed_max;
  rep.contradiction_shown = rep.precondition_ok;

  out << "sampled degrees on the set (" << rep.samples_used << " points): max "
      << rep.observed_max << ", median " << rep.observed_median << "\n";

  // Histogram over finite exponents, bin width 0.25.
  std::vector<double> finite;
  for (double v : rep.exponents)
    if (!std::isinf(v)) finite.push_back(v);
  if (!finite.empty()) {
    const double lo = std::floor(*std::min_element(finite.begin(), finite.end()) * 4.0) / 4.0;
    const double hi = std::ceil((*std::max_element(finite.begin(), finite.end()) + 1e-12) * 4.0) / 4.0;
    for (double b = lo; b < hi - 1e-12; b += 0.25) {
      int count = 0;
      for (double v : finite)
        if (v >= b && v < b + 0.25) ++count;
      out << "  [" << b << ", " << b + 0.25 << ") ";
      for (int c = 0; c < count; ++c) out << '#';
      out << " (" << count << ")\n";
    }
  }
  if (infinite_count > 0) out << "  +inf: " << infinite_count << "\n";

  if (rep.precondition_ok) {
    out << "degree readings ignore null-set edits, so any set whose degree function\n"
        << "equals " << m << " exactly on this set would have to agree with the set up to\n"
        << "measure zero and therefore reach exponent " << m << " at these very points.\n"
        << "the sampled maximum " << rep.observed_max << " falls short by "
        << m - rep.observed_max << "; no such set exists at this resolution.\n";
  } else {
    out << "requested degree does not exceed the sampled maximum; the prescription\n"
        << "is not ruled out by this sample and no contradiction is claimed.\n";
  }
  rep.narrative = out.str();
  return rep;
}

}  // namespace superdense
