#include "superdense/cli.hpp"

#include "superdense/approximation.hpp"
#include "superdense/density.hpp"
#include "superdense/forms.hpp"
#include "superdense/gallery.hpp"
#include "superdense/report.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace superdense {

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    require(used == it->second.size(), "trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ContractViolation("config: " + key + " is not a number: " + it->second);
  }
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    require(used == it->second.size(), "trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ContractViolation("config: " + key + " is not an integer: " + it->second);
  }
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(it->second, &used);
    require(used == it->second.size(), "trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ContractViolation("config: " + key + " is not an unsigned integer: " +
                            it->second);
  }
}

std::string RunConfig::render() const {
  std::map<std::string, std::string> kv(values.begin(), values.end());
  kv["subcommand"] = subcommand;
  return render_config(kv);
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream f(path);
  require(f.good(), "config: cannot open " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    require(eq != std::string::npos && eq > 0,
            "config: malformed line " + std::to_string(lineno) + " in " + path);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t");
      return s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    require(!key.empty(),
            "config: malformed line " + std::to_string(lineno) + " in " + path);
    cfg.values[key] = trim(line.substr(eq + 1));
  }
}

namespace {

// Inserts defaults for keys the file/flags did not set, so the resolved
// config always spells out every knob the run consulted.
void ensure_defaults(RunConfig& cfg,
                     std::initializer_list<std::pair<const char*, const char*>> kv) {
  for (const auto& [k, v] : kv) cfg.values.emplace(k, v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// "0,0;0.5,0.25" -> two points; "" -> none. All points share a dimension.
std::vector<Vec> parse_points(const std::string& text) {
  std::vector<Vec> pts;
  for (const std::string& chunk : split(text, ';')) {
    const std::vector<std::string> coords = split(chunk, ',');
    require(!coords.empty(), "points: empty coordinate group");
    Vec x(static_cast<int>(coords.size()));
    for (std::size_t d = 0; d < coords.size(); ++d) {
      try {
        x[static_cast<int>(d)] = std::stod(coords[d]);
      } catch (const std::exception&) {
        throw ContractViolation("points: bad coordinate " + coords[d]);
      }
    }
    if (!pts.empty())
      require(x.size() == pts.front().size(), "points: mixed dimensions");
    pts.push_back(std::move(x));
  }
  return pts;
}

RadiusLadder ladder_from(const RunConfig& cfg) {
  RadiusLadder lad{cfg.get_double("ladder.r0", 0.25), cfg.get_double("ladder.ratio", 0.5),
                   cfg.get_int("ladder.rungs", 8)};
  lad.validate();
  return lad;
}

QuadratureSpec quad_from(const RunConfig& cfg) {
  QuadratureSpec q;
  q.points_per_axis = cfg.get_int("quad.points", 32);
  q.refinement_levels = cfg.get_int("quad.levels", 2);
  q.seed = cfg.get_u64("seed", 0);
  const std::string mode = cfg.get("quad.mode", "midpoint");
  if (mode == "stratified") {
    q.mode = SampleMode::stratified;
  } else {
    require(mode == "midpoint", "config: quad.mode must be midpoint or stratified");
  }
  require(q.points_per_axis >= 2, "config: quad.points must be >= 2");
  require(q.refinement_levels >= 1, "config: quad.levels must be >= 1");
  return q;
}

std::uint64_t splitmix(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t& s) {
  return static_cast<double>(splitmix(s) >> 11) * 0x1.0p-53;
}

// Collects every emitted file so the closing manifest can hash the whole
// run; the resolved config is always the first entry.
struct RunDir {
  std::filesystem::path dir;
  std::vector<std::pair<std::string, std::string>> blobs;

  explicit RunDir(const std::string& path) : dir(path) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, "output: cannot create directory " + path);
  }

  void file(const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary);
    require(f.good(), "output: cannot open " + (dir / name).string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    require(f.good(), "output: write failed on " + (dir / name).string());
    blobs.push_back({name, content});
  }

  void finish(const RunConfig& cfg) {
    file("resolved.cfg", cfg.render());
    std::ofstream f(dir / "manifest.txt", std::ios::binary);
    const std::string m = input_hash_manifest(blobs);
    f.write(m.data(), static_cast<std::streamsize>(m.size()));
  }
};

const char* class_name(DegreeClass c) { return to_string(c); }

// --- estimate: degree readings over a gallery set ---

int cmd_estimate(RunConfig& cfg, std::ostream& out, std::ostream&) {
  ensure_defaults(cfg, {{"gallery", "cusp:m=3"},
                        {"quad.mode", "midpoint"},
                        {"points", "0,0"},
                        {"ladder.r0", "0.25"},
                        {"ladder.ratio", "0.5"},
                        {"ladder.rungs", "8"},
                        {"quad.points", "32"},
                        {"quad.levels", "2"},
                        {"seed", "0"},
                        {"svg", "0"},
                        {"out", "runs/estimate"}});
  const ImplicitRegion E = build_gallery_set(cfg.get("gallery", ""));
  const std::vector<Vec> points = parse_points(cfg.get("points", ""));
  for (const Vec& x : points)
    require(x.size() == E.n, "points: dimension does not match the gallery set");
  const RadiusLadder lad = ladder_from(cfg);
  const QuadratureSpec q = quad_from(cfg);

  std::vector<DegreeEstimate> estimates;
  estimates.reserve(points.size());
  for (const Vec& x : points) estimates.push_back(estimate_degree(E, x, lad, q));

  RunDir run(cfg.get("out", ""));
  run.file("degree.csv", degree_csv(points, estimates, E.n).str());
  if (cfg.get_int("svg", 0) != 0)
    for (std::size_t i = 0; i < points.size(); ++i)
      run.file("loglog_" + std::to_string(i) + ".svg",
               loglog_svg(E.label + " sample " + std::to_string(i), estimates[i]));
  run.finish(cfg);

  out << "set: " << E.label << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << "point " << i << ": class " << class_name(estimates[i].cls);
    if (estimates[i].cls == DegreeClass::finite)
      out << " exponent " << format_double(estimates[i].exponent) << " +- "
          << format_double(estimates[i].stderr_);
    out << '\n';
  }
  if (points.empty()) out << "no sample points; header-only csv\n";
  return 0;
}

// --- laws: intersection/union bounds, null-set invariance, 1-d jump ---

int cmd_laws(RunConfig& cfg, std::ostream& out, std::ostream&) {
  ensure_defaults(cfg, {{"first", "halfplane"},
                        {"quad.mode", "midpoint"},
                        {"second", "disc:r=1"},
                        {"pairs", "12"},
                        {"ladder.r0", "0.25"},
                        {"ladder.ratio", "0.5"},
                        {"ladder.rungs", "8"},
                        {"quad.points", "24"},
                        {"quad.levels", "2"},
                        {"seed", "1"},
                        {"tol.law", "0.3"},
                        {"out", "runs/laws"}});
  const ImplicitRegion E = build_gallery_set(cfg.get("first", ""));
  const ImplicitRegion F = build_gallery_set(cfg.get("second", ""));
  require(E.n == F.n, "laws: sets must share a dimension");
  const RadiusLadder lad = ladder_from(cfg);
  const QuadratureSpec q = quad_from(cfg);
  const int pairs = cfg.get_int("pairs", 12);
  require(pairs >= 1, "laws: pairs must be >= 1");

  const Box roam = hull(E.bbox, F.bbox);
  std::uint64_t rng = cfg.get_u64("seed", 1) ^ 0x6c62272e07bb0142ULL;
  std::vector<Vec> samples;
  for (int i = 0; i < pairs; ++i) {
    Vec x(E.n);
    for (int d = 0; d < E.n; ++d)
      x[d] = roam.lo[d] + (roam.hi[d] - roam.lo[d]) * unit_double(rng);
    samples.push_back(std::move(x));
  }

  const LawSuiteReport suite =
      degree_law_suite(E, F, samples, lad, q, cfg.get_double("tol.law", 0.3));

  // Null perturbation: a zero-width axis hyperplane through the roam box.
  const double cut = roam.lo[0] + 0.37 * (roam.hi[0] - roam.lo[0]);
  ImplicitRegion N;
  N.n = E.n;
  N.bbox = roam;
  N.label = "hyperplane-slice";
  N.member = [cut](const Vec& x) { return x[0] == cut; };
  const InvarianceReport inv = equivalence_invariance_check(E, N, samples, lad, q);

  // One-dimensional jump: the union of two open half-intervals exceeds both
  // parts categorically at the deleted midpoint.
  ImplicitRegion left, right, both;
  left.n = right.n = both.n = 1;
  left.bbox = make_box({-1.0}, {0.0});
  right.bbox = make_box({0.0}, {1.0});
  both.bbox = make_box({-1.0}, {1.0});
  left.label = "interval(-1,0)";
  right.label = "interval(0,1)";
  both.label = "punctured(-1,1)";
  left.member = [](const Vec& x) { return x[0] > -1.0 && x[0] < 0.0; };
  right.member = [](const Vec& x) { return x[0] > 0.0 && x[0] < 1.0; };
  both.member = [](const Vec& x) { return x[0] > -1.0 && x[0] < 1.0 && x[0] != 0.0; };
  Vec origin(1);
  origin << 0.0;
  const RadiusLadder lad1{0.2, 0.5, 6};
  QuadratureSpec q1 = q;
  q1.points_per_axis = 64;
  const DegreeEstimate d_left = estimate_degree(left, origin, lad1, q1);
  const DegreeEstimate d_right = estimate_degree(right, origin, lad1, q1);
  const DegreeEstimate d_both = estimate_degree(both, origin, lad1, q1);
  const bool jump_ok = d_left.cls == DegreeClass::zero &&
                       d_right.cls == DegreeClass::zero &&
                       d_both.cls == DegreeClass::infinite;

  RunDir run(cfg.get("out", ""));
  {
    std::vector<std::string> cols;
    for (int d = 1; d <= E.n; ++d) cols.push_back("x_" + std::to_string(d));
    for (const char* c : {"first_class", "first_exp", "second_class", "second_exp",
                          "inter_class", "inter_exp", "union_class", "union_exp",
                          "min_ok", "sup_ok", "skipped"})
      cols.push_back(c);
    CsvTable t(cols);
    for (const LawSampleRow& row : suite.rows) {
      std::vector<std::string> cells;
      for (int d = 0; d < E.n; ++d) cells.push_back(format_double(row.x[d]));
      for (const DegreeEstimate* de :
           {&row.e_first, &row.e_second, &row.e_intersection, &row.e_union}) {
        cells.push_back(class_name(de->cls));
        cells.push_back(format_double(de->value()));
      }
      cells.push_back(row.min_law_ok ? "1" : "0");
      cells.push_back(row.sup_law_ok ? "1" : "0");
      cells.push_back(row.skipped ? "1" : "0");
      t.add_row(std::move(cells));
    }
    run.file("laws.csv", t.str());
  }
  {
    std::vector<std::string> cols;
    for (int d = 1; d <= E.n; ++d) cols.push_back("x_" + std::to_string(d));
    for (const char* c : {"base_class", "base_exp", "pert_class", "pert_exp", "agrees"})
      cols.push_back(c);
    CsvTable t(cols);
    for (const InvarianceRow& row : inv.rows) {
      std::vector<std::string> cells;
      for (int d = 0; d < E.n; ++d) cells.push_back(format_double(row.x[d]));
      cells.push_back(class_name(row.base.cls));
      cells.push_back(format_double(row.base.value()));
      cells.push_back(class_name(row.perturbed.cls));
      cells.push_back(format_double(row.perturbed.value()));
      cells.push_back(row.agrees ? "1" : "0");
      t.add_row(std::move(cells));
    }
    run.file("invariance.csv", t.str());
  }

  std::ostringstream summary;
  summary << "law suite: " << suite.rows.size() << " samples, min violations "
          << suite.min_violations << ", sup violations " << suite.sup_violations
          << ", skipped " << suite.skipped << '\n';
  summary << "invariance: disagreements " << inv.disagreements << ", null mass "
          << format_double(inv.null_mass) << '\n';
  summary << "interval jump at 0: left " << class_name(d_left.cls) << ", right "
          << class_name(d_right.cls) << ", union " << class_name(d_both.cls)
          << (jump_ok ? " (union exceeds both parts)" : " (UNEXPECTED)") << '\n';
  run.file("summary.txt", summary.str());
  run.finish(cfg);
  out << summary.str();

  const bool ok = suite.min_violations == 0 && suite.sup_violations == 0 &&
                  inv.disagreements == 0 && jump_ok;
  return ok ? 0 : 1;
}

// --- forms: coefficient algebra, pairing identity, tangency experiment ---

int cmd_forms(RunConfig& cfg, std::ostream& out, std::ostream&) {
  ensure_defaults(cfg, {{"quad.points", "96"},
                        {"quad.levels", "2"},
                        {"quad.mode", "stratified"},
                        {"seed", "3"},
                        {"bumps", "3"},
                        {"tol.exact", "1e-12"},
                        {"tol.derivative", "1e-8"},
                        {"tol.pairing", "5e-3"},
                        {"cantor.base", "0.25"},
                        {"cantor.ratio", "0.25"},
                        {"cantor.depth", "6"},
                        {"probes", "2"},
                        {"ladder.r0", "0.2"},
                        {"ladder.ratio", "0.6"},
                        {"ladder.rungs", "8"},
                        {"tol.dmu", "1e-6"},
                        {"out", "runs/forms"}});
  const QuadratureSpec q = quad_from(cfg);
  std::uint64_t rng = cfg.get_u64("seed", 3) ^ 0x9ae16a3b2f90404fULL;

  // Constant-coefficient algebra: antisymmetry and associativity residuals.
  double max_alg = 0.0;
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 2 + static_cast<int>(splitmix(rng) % 4);  // 2..5
    const int ka = 1 + static_cast<int>(splitmix(rng) % 2);
    const int kb = 1 + static_cast<int>(splitmix(rng) % 2);
    auto rand_cv = [&](int k) {
      Covector c = zero_covector(n, k);
      for (int i = 0; i < c.coeffs.size(); ++i) c.coeffs[i] = 2.0 * unit_double(rng) - 1.0;
      return c;
    };
    const Covector a = rand_cv(ka), b = rand_cv(kb), c = rand_cv(1);
    Covector ab = wedge(a, b), ba = wedge(b, a);
    const double sign = ((ka * kb) % 2 == 0) ? 1.0 : -1.0;
    if (ab.coeffs.size() > 0)
      max_alg = std::max(max_alg, (ab.coeffs - sign * ba.coeffs).cwiseAbs().maxCoeff());
    Covector l = wedge(wedge(a, b), c), r = wedge(a, wedge(b, c));
    if (l.coeffs.size() > 0)
      max_alg = std::max(max_alg, (l.coeffs - r.coeffs).cwiseAbs().maxCoeff());
  }

  // Differential identities over the polynomial battery: d(d(.)) = 0 and the
  // graded product rule, sampled pointwise.
  const std::vector<FormField> battery = weak_pairing_lambda_battery();
  const Box window = cube_box(2, -1.0, 1.0);
  double max_ddl = 0.0, max_leibniz = 0.0;
  std::vector<Vec> probes;
  for (int i = 0; i < 6; ++i) {
    Vec x(2);
    x << -1.0 + 2.0 * unit_double(rng), -1.0 + 2.0 * unit_double(rng);
    probes.push_back(std::move(x));
  }
  for (const FormField& lam : battery) {
    const FormField ddl = exterior_derivative(exterior_derivative(lam));
    for (const Vec& x : probes) {
      const Covector v = evaluate(ddl, x);
      if (v.coeffs.size() > 0) max_ddl = std::max(max_ddl, v.coeffs.cwiseAbs().maxCoeff());
    }
    for (const FormField& mu : battery) {
      if (lam.k + mu.k + 1 > 2) continue;
      const FormField lhs = exterior_derivative(wedge(lam, mu));
      const FormField da_b = wedge(exterior_derivative(lam), mu);
      const FormField a_db = wedge(lam, exterior_derivative(mu));
      const double sign = (lam.k % 2 == 0) ? 1.0 : -1.0;
      for (const Vec& x : probes) {
        const Covector v = evaluate(lhs, x);
        const Covector w1 = evaluate(da_b, x);
        const Covector w2 = evaluate(a_db, x);
        if (v.coeffs.size() > 0)
          max_leibniz = std::max(
              max_leibniz,
              (v.coeffs - w1.coeffs - sign * w2.coeffs).cwiseAbs().maxCoeff());
      }
    }
  }

  // Integration-by-parts pairing battery.
  const std::vector<SmoothFn> bumps =
      bump_battery(cfg.get_int("bumps", 3), window, cfg.get_u64("seed", 3));
  double max_pairing = 0.0;
  CsvTable pairing_table({"lambda", "omega", "lhs", "rhs", "rel_residual"});
  int variant = 0;
  for (const FormField& lam : battery) {
    for (const SmoothFn& bump : bumps) {
      const FormField omega = matching_omega(lam, bump, variant++);
      if (lam.k + 1 + omega.k != 2) continue;
      const WeakPairingRow row = weak_pairing_check(lam, omega, window, q);
      max_pairing = std::max(max_pairing, row.rel_residual);
      pairing_table.add_row({row.lambda_name, row.omega_name, format_double(row.lhs),
                             format_double(row.rhs), format_double(row.rel_residual)});
    }
  }

  // Tangency experiment on the fat-Cantor cylinder.
  std::vector<double> fractions;
  double frac = cfg.get_double("cantor.base", 0.3);
  const double fr_ratio = cfg.get_double("cantor.ratio", 0.5);
  for (int d = 0; d < cfg.get_int("cantor.depth", 8); ++d) {
    fractions.push_back(frac);
    frac *= fr_ratio;
  }
  const FatCantor cantor = make_fat_cantor(fractions, cfg.get_int("cantor.depth", 8));
  const RadiusLadder lad = ladder_from(cfg);
  const TangencyReport tang =
      tangency_experiment(cantor, cfg.get_int("probes", 2), cfg.get_int("probes", 2),
                          lad, q, cfg.get_double("tol.dmu", 1e-6));

  RunDir run(cfg.get("out", ""));
  run.file("pairing.csv", pairing_table.str());
  run.file("tangency.csv", tangency_csv(tang.rows).str());

  const double tol_exact = cfg.get_double("tol.exact", 1e-12);
  const double tol_deriv = cfg.get_double("tol.derivative", 1e-8);
  const double tol_pair = cfg.get_double("tol.pairing", 5e-3);
  std::ostringstream summary;
  summary << "algebra max residual: " << format_double(max_alg) << '\n';
  summary << "d(d(.)) max coefficient: " << format_double(max_ddl) << '\n';
  summary << "product rule max residual: " << format_double(max_leibniz) << '\n';
  summary << "pairing max relative residual: " << format_double(max_pairing) << '\n';
  summary << "tangency: " << tang.rows.size() << " probes, " << tang.holds_count
          << " holds, " << tang.fails_count << " fails, " << tang.violations
          << " violations\n";
  run.file("summary.txt", summary.str());
  run.finish(cfg);
  out << summary.str();

  const bool ok = max_alg <= tol_exact && max_ddl <= tol_deriv &&
                  max_leibniz <= tol_deriv && max_pairing <= tol_pair &&
                  tang.violations == 0;
  return ok ? 0 : 1;
}

// --- approx: staged pipeline, optional family and impossibility reports ---

TargetFunction target_from(const RunConfig& cfg) {
  const std::string name = cfg.get("target", "three-chi");
  if (name == "three-chi")
    return indicator_target(3.0, cube_box(2, 0.0, 1.0), cube_box(2, 0.0, 1.0), "3chi");
  if (name == "two-value")
    return two_value_target(2.5, make_box({-1.25, -1.25}, {-0.25, -0.25}), 4.0,
                            make_box({0.25, 0.25}, {1.25, 1.25}),
                            cube_box(2, -1.25, 1.25));
  if (name == "zero") return constant_target(2, 0.0, cube_box(2, 0.0, 1.0));
  throw ContractViolation("config: unknown target " + name);
}

int cmd_approx(RunConfig& cfg, std::ostream& out, std::ostream&) {
  ensure_defaults(cfg, {{"target", "three-chi"},
                        {"quad.mode", "midpoint"},
                        {"ks", "4,5,6"},
                        {"samples", "8"},
                        {"ladder.r0", "0.25"},
                        {"ladder.ratio", "0.65"},
                        {"ladder.rungs", "10"},
                        {"quad.points", "32"},
                        {"quad.levels", "2"},
                        {"seed", "0"},
                        {"tol.final", "0.6"},
                        {"family", "0"},
                        {"family.samples", "8"},
                        {"impossibility", "0"},
                        {"out", "runs/approx"}});
  const TargetFunction f = target_from(cfg);
  std::vector<int> ks;
  for (const std::string& s : split(cfg.get("ks", ""), ',')) {
    try {
      ks.push_back(std::stoi(s));
    } catch (const std::exception&) {
      throw ContractViolation("config: bad stage index " + s);
    }
  }
  const RadiusLadder lad = ladder_from(cfg);
  const QuadratureSpec q = quad_from(cfg);
  const std::uint64_t seed = cfg.get_u64("seed", 0);

  const std::vector<SynthesizedStage> stages = build_pipeline(f, ks, seed);
  const ConvergenceReport conv = convergence_report(
      f, stages, cfg.get_int("samples", 8), lad, q, cfg.get_double("tol.final", 0.6));

  RunDir run(cfg.get("out", ""));
  run.file("pipeline.txt", pipeline_manifest(stages));
  run.file("trajectory.csv", trajectory_csv(conv).str());

  std::ostringstream summary;
  summary << "target: " << f.name << '\n';
  summary << "stage medians:";
  for (double m : conv.medians) summary << ' ' << format_double(m);
  summary << '\n';
  summary << "final median: " << format_double(conv.final_median) << " (tol "
          << format_double(conv.tol) << ")\n";
  summary << "excluded fraction: " << format_double(conv.excluded_fraction) << '\n';
  for (const auto& [value, meds] : conv.medians_by_value) {
    summary << "value " << format_double(value) << " medians:";
    for (double m : meds) summary << ' ' << format_double(m);
    summary << '\n';
  }
  summary << "nonincreasing: " << (conv.medians_nonincreasing ? "yes" : "no")
          << ", final ok: " << (conv.final_ok ? "yes" : "no") << ", valid: "
          << (conv.valid ? "yes" : "no") << '\n';

  if (cfg.get_int("family", 0) != 0) {
    const ImplicitRegion square = make_rectangle(cube_box(2, 0.0, 1.0));
    const FamilyReport fam = increasing_family(
        square, ks, cfg.get_int("family.samples", 8), lad, q, seed ^ 0x5851f42dULL);
    CsvTable t({"l", "measure", "measure_target", "measure_slack", "subset_violations",
                "exponent_median", "exponent_samples"});
    for (const FamilyRow& row : fam.rows)
      t.add_row({std::to_string(row.l), format_double(row.measure),
                 format_double(row.measure_target), format_double(row.measure_slack),
                 std::to_string(row.subset_violations),
                 format_double(row.exponent_median),
                 std::to_string(row.exponent_samples)});
    run.file("family.csv", t.str());
    summary << "family rows: " << fam.rows.size() << '\n';
  }

  if (cfg.get_int("impossibility", 0) != 0) {
    const GradedRemoval gr = make_graded_removal(cube_box(2, 0.0, 1.0), 2.5, 9, 0.04);
    const ImpossibilityReport imp =
        impossibility_demo(4.0, gr.region(), 10, lad, q, seed ^ 0x2c1b3c6dULL);
    run.file("impossibility.txt", imp.narrative);
    summary << "impossibility: contradiction "
            << (imp.contradiction_shown ? "shown" : "not shown") << '\n';
  }

  run.file("summary.txt", summary.str());
  run.finish(cfg);
  out << summary.str();

  return (conv.valid && conv.final_ok) ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"numerical laboratory for density degrees of closed sets"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"estimate", "laws", "forms", "approx", "gallery-list"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--set", overrides, "override: key=value (repeatable)");
    subs[name] = sub;
  }
  subs["estimate"]->description("degree estimates over a gallery set");
  subs["laws"]->description("intersection/union degree bounds and invariance checks");
  subs["forms"]->description("coefficient algebra, pairing, and tangency batteries");
  subs["approx"]->description("staged approximation pipeline and family reports");
  subs["gallery-list"]->description("print the set catalog");

  std::vector<const char*> argv;
  argv.push_back("superdense-lab");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    RunConfig cfg;
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) load_config_file(config_path, cfg);
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      require(eq != std::string::npos && eq > 0, "config: --set expects key=value");
      cfg.values[kv.substr(0, eq)] = kv.substr(eq + 1);
    }

    if (cfg.subcommand == "estimate") return cmd_estimate(cfg, out, err);
    if (cfg.subcommand == "laws") return cmd_laws(cfg, out, err);
    if (cfg.subcommand == "forms") return cmd_forms(cfg, out, err);
    if (cfg.subcommand == "approx") return cmd_approx(cfg, out, err);
    out << gallery_manifest_text();
    return 0;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace superdense
