#include "superdense/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

namespace superdense {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Membership is clipped to this window so unbounded sets keep the
// members-inside-bbox invariant; density probes stay far from its faces.
Box clip_universe(int n) { return default_universe(n); }

constexpr int kPrimes[16] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  const double inv = 1.0 / static_cast<double>(base);
  double f = inv, x = 0.0;
  while (i != 0) {
    x += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return x;
}

}  // namespace

ImplicitRegion make_cusp(double m) {
  require(m > 2.0, "make_cusp: exponent m must exceed 2");
  const Box u = clip_universe(2);
  ImplicitRegion out;
  out.n = 2;
  out.member = [m, u](const Vec& x) {
    require(x.size() == 2, "cusp member: point must be 2-dimensional");
    return u.contains(x) && std::abs(x[1]) > std::pow(std::abs(x[0]), m - 1.0);
  };
  out.bbox = u;
  out.label = "cusp(m=" + fmt_g(m) + ")";
  return out;
}

ImplicitRegion make_half_space(const Vec& normal, double offset) {
  require(normal.size() >= 1, "make_half_space: empty normal");
  require(normal.norm() > 0.0, "make_half_space: zero normal");
  const int n = static_cast<int>(normal.size());
  const Box u = clip_universe(n);
  Vec nrm = normal;
  ImplicitRegion out;
  out.n = n;
  out.member = [nrm, offset, u](const Vec& x) {
    return u.contains(x) && nrm.dot(x) < offset;
  };
  out.bbox = u;
  out.label = "halfspace(offset=" + fmt_g(offset) + ")";
  return out;
}

ImplicitRegion make_ball_region(const Vec& center, double radius) {
  Ball b(center, radius);
  ImplicitRegion out;
  out.n = b.dim();
  out.member = [b](const Vec& x) { return b.contains(x); };
  out.bbox = b.bounding_box();
  out.label = "ball(r=" + fmt_g(radius) + ")";
  return out;
}

ImplicitRegion make_punctured_ball(const Vec& center, double radius) {
  Ball b(center, radius);
  ImplicitRegion out;
  out.n = b.dim();
  out.member = [b](const Vec& x) {
    return b.contains(x) && (x - b.center).squaredNorm() > 0.0;
  };
  out.bbox = b.bounding_box();
  out.label = "puncture(r=" + fmt_g(radius) + ")";
  return out;
}

ImplicitRegion make_rectangle(const Box& box) {
  require(box.nondegenerate(), "make_rectangle: degenerate box");
  Box b = box;
  ImplicitRegion out;
  out.n = b.dim();
  out.member = [b](const Vec& x) { return b.contains(x); };
  out.bbox = b;
  out.label = "rectangle";
  return out;
}

// --- swiss cheese ---

struct SwissCheese::Buckets {
  struct Gen {
    double rho = 0.0;
    std::vector<std::int64_t> counts;  // buckets per axis
    std::vector<double> width;         // bucket edge per axis
    std::unordered_map<std::int64_t, std::vector<std::int32_t>> cells;
  };

  int n = 0;
  Box window;
  std::vector<double> centers;  // flat, n doubles per ball
  std::vector<double> radii;
  std::vector<Gen> gens;

  std::int64_t bucket_of(const Gen& g, const double* p) const {
    std::int64_t id = 0;
    for (int d = 0; d < n; ++d) {
      auto i = static_cast<std::int64_t>(std::floor((p[d] - window.lo[d]) / g.width[d]));
      i = std::clamp<std::int64_t>(i, 0, g.counts[d] - 1);
      id = id * g.counts[d] + i;
    }
    return id;
  }

  bool in_some_ball(const Vec& x) const {
    for (const auto& g : gens) {
      auto it = g.cells.find(bucket_of(g, x.data()));
      if (it == g.cells.end()) continue;
      for (std::int32_t j : it->second) {
        double d2 = 0.0;
        for (int d = 0; d < n; ++d) {
          const double t = x[d] - centers[static_cast<std::size_t>(j) * n + d];
          d2 += t * t;
        }
        if (d2 < radii[j] * radii[j]) return true;
      }
    }
    return false;
  }
};

SwissCheese make_swiss_cheese(const Box& window, double eps, std::uint64_t seed,
                              int generations) {
  const int n = window.dim();
  require(n >= 1, "make_swiss_cheese: empty window");
  require(window.nondegenerate(), "make_swiss_cheese: degenerate window");
  require(eps > 0.0, "make_swiss_cheese: eps must be positive");
  require(generations >= 1, "make_swiss_cheese: generations >= 1");
  require(n * generations <= 20, "make_swiss_cheese: ball count 2^(n*generations) too large");

  SwissCheese sc;
  sc.window = window;
  sc.eps = eps;
  sc.seed = seed;
  sc.generations = generations;
  sc.exponent_target = n + 0.25;

  // Generation g holds balls of radius c * 2^(-g*t/n); cumulative ball count
  // through generation g is 2^(n*g), matching lattice spacing 2^-g.
  const double t = sc.exponent_target;
  double S = 0.0;
  std::int64_t prev = 1;
  for (int g = 1; g <= generations; ++g) {
    const std::int64_t cum = std::int64_t{1} << (n * g);
    S += static_cast<double>(cum - prev) * std::pow(2.0, -t * g);
    prev = cum;
  }
  const double omega = unit_ball_volume(n);
  const double c = std::pow(0.95 * eps / (omega * S), 1.0 / n);
  sc.removed_volume_bound = omega * std::pow(c, n) * S;

  auto buckets = std::make_shared<SwissCheese::Buckets>();
  buckets->n = n;
  buckets->window = window;
  const Vec extent = window.extent();

  std::uint64_t idx = 1 + (seed % 65536);  // Halton start offset
  prev = 1;
  std::int64_t total_prev = 0;
  for (int g = 1; g <= generations; ++g) {
    const std::int64_t cum = std::int64_t{1} << (n * g);
    const std::int64_t count = cum - prev;
    prev = cum;
    const double rho = c * std::pow(2.0, -g * t / n);

    SwissCheese::Buckets::Gen gen;
    gen.rho = rho;
    gen.counts.resize(n);
    gen.width.resize(n);
    for (int d = 0; d < n; ++d) {
      gen.counts[d] = std::max<std::int64_t>(1, std::int64_t{1} << g);
      gen.width[d] = extent[d] / static_cast<double>(gen.counts[d]);
    }

    Vec p(n);
    std::vector<std::int64_t> blo(n), bhi(n), span(n);
    for (std::int64_t j = 0; j < count; ++j, ++idx) {
      for (int d = 0; d < n; ++d)
        p[d] = window.lo[d] + extent[d] * radical_inverse(idx, kPrimes[d]);
      const auto ball_id = static_cast<std::int32_t>(total_prev + j);
      sc.centers.push_back(p);
      sc.radii.push_back(rho);
      for (int d = 0; d < n; ++d) buckets->centers.push_back(p[d]);
      buckets->radii.push_back(rho);
      // Register the ball in every bucket its bounding box touches, so a
      // point query only ever inspects its own bucket.
      for (int d = 0; d < n; ++d) {
        auto lo = static_cast<std::int64_t>(std::floor((p[d] - rho - window.lo[d]) / gen.width[d]));
        auto hi = static_cast<std::int64_t>(std::floor((p[d] + rho - window.lo[d]) / gen.width[d]));
        blo[d] = std::clamp<std::int64_t>(lo, 0, gen.counts[d] - 1);
        bhi[d] = std::clamp<std::int64_t>(hi, 0, gen.counts[d] - 1);
        span[d] = bhi[d] - blo[d] + 1;
      }
      for_each_index(span, [&](const std::vector<std::int64_t>& off) {
        std::int64_t id = 0;
        for (int d = 0; d < n; ++d) id = id * gen.counts[d] + (blo[d] + off[d]);
        gen.cells[id].push_back(ball_id);
      });
    }
    total_prev += count;
    buckets->gens.push_back(std::move(gen));
  }

  sc.buckets_ = buckets;
  return sc;
}

ImplicitRegion SwissCheese::region() const {
  require(buckets_ != nullptr, "SwissCheese: build via make_swiss_cheese");
  auto b = buckets_;
  Box w = window;
  ImplicitRegion out;
  out.n = w.dim();
  out.member = [b, w](const Vec& x) { return w.contains(x) && !b->in_some_ball(x); };
  out.bbox = w;
  out.label = "swiss(eps=" + fmt_g(eps) + ",seed=" + std::to_string(seed) + ")";
  return out;
}

// --- graded removal ---

GradedRemoval make_graded_removal(const Box& window, double t, int generations, double v0) {
  const int n = window.dim();
  require(n >= 1, "make_graded_removal: empty window");
  require(window.nondegenerate(), "make_graded_removal: degenerate window");
  require(t >= static_cast<double>(n), "make_graded_removal: target degree t must be >= n");
  require(v0 > 0.0 && v0 < 0.5, "make_graded_removal: v0 in (0, 0.5)");
  require(generations >= 1 && generations <= 14, "make_graded_removal: generations in [1,14]");

  GradedRemoval gr;
  gr.window = window;
  gr.t = t;
  gr.generations = generations;
  gr.v0 = v0;
  const double omega = unit_ball_volume(n);
  gr.c = std::pow(v0 / omega, 1.0 / n);

  const Vec extent = window.extent();
  Vec center(n), prior(n);
  for (int k = 1; k <= generations; ++k) {
    GradedRemoval::Generation gen;
    gen.h = std::pow(2.0, -k);
    gen.rho = gr.c * std::pow(gen.h, t / n);
    require(gen.rho < gen.h / 4.0,
            "make_graded_removal: ball radius exceeds a quarter cell; lower v0");
    gen.counts.resize(n);
    for (int d = 0; d < n; ++d)
      gen.counts[d] = static_cast<std::int64_t>(std::floor(extent[d] / gen.h + 1e-9));

    std::int64_t total = 0;
    for_each_index(gen.counts, [&](const std::vector<std::int64_t>& idx) {
      ++total;
      for (int d = 0; d < n; ++d)
        center[d] = window.lo[d] + (static_cast<double>(idx[d]) + 0.5) * gen.h;
      // A candidate overlapping an earlier kept ball is dropped; since every
      // radius is under a quarter cell, only the containing cell of each
      // earlier generation can reach the candidate.
      bool blocked = false;
      for (int j = 0; j < static_cast<int>(gr.gens.size()) && !blocked; ++j) {
        const auto& old_gen = gr.gens[j];
        std::int64_t id = 0;
        bool in_range = true;
        for (int d = 0; d < n; ++d) {
          auto i = static_cast<std::int64_t>(std::floor((center[d] - window.lo[d]) / old_gen.h));
          if (i < 0 || i >= old_gen.counts[d]) {
            in_range = false;
            break;
          }
          prior[d] = window.lo[d] + (static_cast<double>(i) + 0.5) * old_gen.h;
          id = id * old_gen.counts[d] + i;
        }
        if (!in_range || old_gen.skipped.count(id)) continue;
        const double reach = old_gen.rho + gen.rho;
        if ((center - prior).squaredNorm() < reach * reach) blocked = true;
      }
      if (blocked) {
        std::int64_t id = 0;
        for (int d = 0; d < n; ++d) id = id * gen.counts[d] + idx[d];
        gen.skipped.insert(id);
      }
    });
    gen.kept = total - static_cast<std::int64_t>(gen.skipped.size());
    gr.gens.push_back(std::move(gen));
  }
  return gr;
}

double GradedRemoval::removed_volume() const {
  const int n = window.dim();
  const double omega = unit_ball_volume(n);
  double v = 0.0;
  for (const auto& gen : gens)
    v += static_cast<double>(gen.kept) * omega * std::pow(gen.rho, n);
  return v;
}

bool GradedRemoval::in_removed_ball(const Vec& x) const {
  const int n = window.dim();
  for (const auto& gen : gens) {
    std::int64_t id = 0;
    bool in_range = true;
    double d2 = 0.0;
    for (int d = 0; d < n; ++d) {
      auto i = static_cast<std::int64_t>(std::floor((x[d] - window.lo[d]) / gen.h));
      if (i < 0 || i >= gen.counts[d]) {
        in_range = false;
        break;
      }
      const double mid = window.lo[d] + (static_cast<double>(i) + 0.5) * gen.h;
      d2 += (x[d] - mid) * (x[d] - mid);
      id = id * gen.counts[d] + i;
    }
    if (!in_range || d2 >= gen.rho * gen.rho) continue;
    if (!gen.skipped.count(id)) return true;
  }
  return false;
}

ImplicitRegion GradedRemoval::region() const {
  auto self = std::make_shared<const GradedRemoval>(*this);
  Box w = window;
  ImplicitRegion out;
  out.n = w.dim();
  out.member = [self, w](const Vec& x) { return w.contains(x) && !self->in_removed_ball(x); };
  out.bbox = w;
  out.label = "graded(t=" + fmt_g(t) + ",v0=" + fmt_g(v0) + ")";
  return out;
}

// --- fat Cantor set ---

FatCantor make_fat_cantor(const std::vector<double>& fractions, int depth, double a, double b) {
  require(depth >= 0, "make_fat_cantor: depth >= 0");
  require(static_cast<int>(fractions.size()) >= depth,
          "make_fat_cantor: need a removal fraction per stage");
  require(a < b, "make_fat_cantor: empty base interval");
  for (int k = 0; k < depth; ++k)
    require(fractions[k] > 0.0 && fractions[k] < 1.0,
            "make_fat_cantor: fractions must lie in (0,1)");
  FatCantor c;
  c.a = a;
  c.b = b;
  c.fractions = fractions;
  c.depth = depth;
  return c;
}

double FatCantor::measure() const {
  double m = b - a;
  for (int k = 0; k < depth; ++k) m *= 1.0 - fractions[k];
  return m;
}

bool FatCantor::member1d(double x) const {
  if (x < a || x > b) return false;
  double lo = a, hi = b;
  for (int k = 0; k < depth; ++k) {
    const double half = 0.5 * (hi - lo) * (1.0 - fractions[k]);
    if (x <= lo + half) {
      hi = lo + half;  // left child; gap endpoints stay members
    } else if (x >= hi - half) {
      lo = hi - half;
    } else {
      return false;  // open middle gap
    }
  }
  return true;
}

std::pair<double, double> FatCantor::interval(const std::vector<int>& path) const {
  require(static_cast<int>(path.size()) <= depth, "FatCantor::interval: path longer than depth");
  double lo = a, hi = b;
  for (std::size_t k = 0; k < path.size(); ++k) {
    require(path[k] == 0 || path[k] == 1, "FatCantor::interval: path bits must be 0 or 1");
    const double half = 0.5 * (hi - lo) * (1.0 - fractions[k]);
    if (path[k] == 0)
      hi = lo + half;
    else
      lo = hi - half;
  }
  return {lo, hi};
}

ImplicitRegion FatCantor::region() const {
  FatCantor self = *this;
  ImplicitRegion out;
  out.n = 1;
  out.member = [self](const Vec& x) {
    require(x.size() == 1, "cantor member: point must be 1-dimensional");
    return self.member1d(x[0]);
  };
  out.bbox = Box(Vec::Constant(1, a), Vec::Constant(1, b));
  out.label = "cantor(depth=" + std::to_string(depth) + ")";
  return out;
}

ImplicitRegion make_fat_cantor_cylinder(const FatCantor& cantor, double y0, double y1) {
  require(y0 < y1, "make_fat_cantor_cylinder: empty vertical extent");
  FatCantor c = cantor;
  ImplicitRegion out;
  out.n = 2;
  out.member = [c, y0, y1](const Vec& x) {
    require(x.size() == 2, "cantor cylinder member: point must be 2-dimensional");
    return x[1] >= y0 && x[1] <= y1 && c.member1d(x[0]);
  };
  out.bbox = make_box({c.a, y0}, {c.b, y1});
  out.label = "cantor-cylinder(depth=" + std::to_string(c.depth) + ")";
  return out;
}

// --- perimeter helpers ---

namespace {

int orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const double v = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                        const Eigen::Vector2d& q1, const Eigen::Vector2d& q2) {
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

double perimeter_polygon(const std::vector<Eigen::Vector2d>& vertices) {
  const auto m = vertices.size();
  require(m >= 3, "perimeter_polygon: need at least 3 vertices");
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % m];
    require((b - a).norm() > 0.0, "perimeter_polygon: zero-length edge");
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % m];
    const auto& c = vertices[(i + 2) % m];
    // A spike (the boundary doubling back along itself) is not simple.
    require(!(orient(a, b, c) == 0 && (a - b).dot(c - b) > 0.0),
            "perimeter_polygon: boundary doubles back on itself");
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == m - 1);
      if (adjacent) continue;
      require(!segments_intersect(vertices[i], vertices[(i + 1) % m], vertices[j],
                                  vertices[(j + 1) % m]),
              "perimeter_polygon: edges cross; polygon is not simple");
    }
  }
  double p = 0.0;
  for (std::size_t i = 0; i < m; ++i) p += (vertices[(i + 1) % m] - vertices[i]).norm();
  return p;
}

double perimeter_disc(double radius) {
  require(radius > 0.0, "perimeter_disc: radius must be positive");
  return 2.0 * M_PI * radius;
}

double finite_perimeter_degree_threshold(int n) {
  require(n >= 2, "finite_perimeter_degree_threshold: n >= 2");
  return n + 1.0 + 1.0 / (n - 1.0);
}

// --- catalog ---

std::vector<GalleryEntry> gallery_catalog() {
  return {
      {"halfplane", "offset=0", "zero", "0", "closed-form", "(0,0)"},
      {"disc", "r=1", "infinite", "inf", "closed-form", "(0,0)"},
      {"puncture", "r=1", "infinite", "inf", "closed-form", "(0,0)"},
      {"square", "side=1", "infinite", "inf", "closed-form", "(0.5,0.5)"},
      {"cusp", "m=2.5", "finite", "2.5", "closed-form", "(0,0)"},
      {"cusp", "m=3", "finite", "3", "closed-form", "(0,0)"},
      {"cusp", "m=4", "finite", "4", "closed-form", "(0,0)"},
      {"cusp", "m=6", "finite", "6", "closed-form", "(0,0)"},
      {"swiss", "eps=0.5,seed=1", "finite", "near 2.25", "construction-target",
       "retained points"},
      {"graded", "t=2.5", "finite", "near 2.5", "construction-target", "retained points"},
      {"cantor", "depth=10", "finite", "near 1", "empirical", "stage-interval midpoints"},
      {"cantor2", "depth=8", "finite", "above 2", "empirical",
       "deep interval midpoints x [0,1]"},
  };
}

std::string gallery_manifest_text() {
  std::ostringstream os;
  os << "name | parameters | expected class | expected exponent | source | probe\n";
  for (const auto& e : gallery_catalog())
    os << e.name << " | " << e.parameters << " | " << e.expected_class << " | "
       << e.expected_exponent << " | " << e.source << " | " << e.probe << "\n";
  return os.str();
}

namespace {

std::map<std::string, double> parse_params(const std::string& text, const std::string& spec) {
  std::map<std::string, double> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    require(eq != std::string::npos && eq > 0,
            "build_gallery_set: expected key=value in '" + spec + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(val, &used);
      require(used == val.size(), "build_gallery_set: trailing junk in value '" + val + "'");
      kv[key] = v;
    } catch (const ContractViolation&) {
      throw;
    } catch (const std::exception&) {
      throw ContractViolation("build_gallery_set: bad numeric value '" + val + "' in '" +
                              spec + "'");
    }
  }
  return kv;
}

double take(std::map<std::string, double>& kv, const std::string& key, double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const double v = it->second;
  kv.erase(it);
  return v;
}

std::vector<double> default_cantor_fractions(int depth) {
  std::vector<double> f(depth);
  for (int k = 0; k < depth; ++k) f[k] = std::pow(4.0, -(k + 1));
  return f;
}

}  // namespace

ImplicitRegion build_gallery_set(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  auto kv = parse_params(colon == std::string::npos ? "" : spec.substr(colon + 1), spec);
  require(!name.empty(), "build_gallery_set: empty set name");

  ImplicitRegion out;
  if (name == "cusp") {
    out = make_cusp(take(kv, "m", 3.0));
  } else if (name == "halfplane") {
    Vec nrm(2);
    nrm << 0.0, 1.0;
    out = make_half_space(nrm, take(kv, "offset", 0.0));
  } else if (name == "disc") {
    Vec c(2);
    c << take(kv, "cx", 0.0), take(kv, "cy", 0.0);
    out = make_ball_region(c, take(kv, "r", 1.0));
  } else if (name == "puncture") {
    Vec c(2);
    c << take(kv, "cx", 0.0), take(kv, "cy", 0.0);
    out = make_punctured_ball(c, take(kv, "r", 1.0));
  } else if (name == "square") {
    const double side = take(kv, "side", 1.0);
    require(side > 0.0, "build_gallery_set: square side must be positive");
    out = make_rectangle(cube_box(2, 0.0, side));
  } else if (name == "swiss") {
    const double eps = take(kv, "eps", 0.5);
    const auto seed = static_cast<std::uint64_t>(take(kv, "seed", 1.0));
    const auto gens = static_cast<int>(take(kv, "gens", 10.0));
    out = make_swiss_cheese(cube_box(2, -1.0, 1.0), eps, seed, gens).region();
  } else if (name == "graded") {
    const double t = take(kv, "t", 2.5);
    const auto gens = static_cast<int>(take(kv, "gens", 10.0));
    const double v0 = take(kv, "v0", 0.01);
    out = make_graded_removal(cube_box(2, -1.0, 1.0), t, gens, v0).region();
  } else if (name == "cantor") {
    const auto depth = static_cast<int>(take(kv, "depth", 10.0));
    out = make_fat_cantor(default_cantor_fractions(depth), depth).region();
  } else if (name == "cantor2") {
    const auto depth = static_cast<int>(take(kv, "depth", 8.0));
    out = make_fat_cantor_cylinder(make_fat_cantor(default_cantor_fractions(depth), depth),
                                   0.0, 1.0);
  } else {
    throw ContractViolation("build_gallery_set: unknown set name '" + name + "'");
  }
  for (const auto& [key, value] : kv) {
    (void)value;
    throw ContractViolation("build_gallery_set: unknown parameter '" + key + "' for '" +
                            name + "'");
  }
  return out;
}

}  // namespace superdense
