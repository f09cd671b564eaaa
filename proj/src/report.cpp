#include "superdense/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace superdense {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Point coordinates followed by the estimate's summary columns.
void point_cells(const Vec& x, std::vector<std::string>& cells) {
  for (int d = 0; d < x.size(); ++d) cells.push_back(format_double(x[d]));
}

std::vector<std::string> point_columns(int n) {
  std::vector<std::string> cols;
  for (int d = 1; d <= n; ++d) cols.push_back("x_" + std::to_string(d));
  return cols;
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  require(!columns_.empty(), "CsvTable: empty schema");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  require(cells.size() == columns_.size(), "CsvTable: row width != schema width");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(columns_[i]);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(row[i]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), "CsvTable: cannot open " + path);
  const std::string body = str();
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  require(f.good(), "CsvTable: write failed on " + path);
}

CsvTable degree_csv(const std::vector<Vec>& points,
                    const std::vector<DegreeEstimate>& estimates, int n_hint) {
  require(points.size() == estimates.size(), "degree_csv: points/estimates mismatch");
  require(n_hint >= 1, "degree_csv: n_hint must be >= 1");
  const int n = points.empty() ? n_hint : static_cast<int>(points.front().size());
  std::vector<std::string> cols = point_columns(n);
  for (const char* c : {"r", "residual", "residual_err", "quotient_n", "class",
                        "exponent", "stderr"})
    cols.push_back(c);
  CsvTable t(std::move(cols));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const DegreeEstimate& de = estimates[i];
    for (const RungDiagnostic& rung : de.diagnostics) {
      std::vector<std::string> cells;
      point_cells(points[i], cells);
      cells.push_back(format_double(rung.r));
      cells.push_back(format_double(rung.residual.value));
      cells.push_back(format_double(rung.residual.error));
      cells.push_back(format_double(rung.quotient_n));
      cells.push_back(to_string(de.cls));
      cells.push_back(format_double(de.exponent));
      cells.push_back(format_double(de.stderr_));
      t.add_row(std::move(cells));
    }
  }
  return t;
}

CsvTable tangency_csv(const std::vector<TangencyRow>& rows) {
  const int n = rows.empty() ? 2 : static_cast<int>(rows.front().x.size());
  std::vector<std::string> cols = point_columns(n);
  for (const char* c : {"class", "exponent", "dmu_abs", "verdict", "consistent"})
    cols.push_back(c);
  CsvTable t(std::move(cols));
  for (const TangencyRow& row : rows) {
    std::vector<std::string> cells;
    point_cells(row.x, cells);
    cells.push_back(to_string(row.degree.cls));
    cells.push_back(format_double(row.degree.exponent));
    cells.push_back(format_double(row.dmu_abs));
    cells.push_back(to_string(row.order_verdict));
    cells.push_back(row.consistent ? "1" : "0");
    t.add_row(std::move(cells));
  }
  return t;
}

CsvTable trajectory_csv(const ConvergenceReport& rep) {
  const int n = rep.rows.empty() ? 2 : static_cast<int>(rep.rows.front().x.size());
  std::vector<std::string> cols{"sample"};
  for (const std::string& c : point_columns(n)) cols.push_back(c);
  for (const char* c : {"f_value", "excluded", "k", "class", "estimate", "deviation"})
    cols.push_back(c);
  CsvTable t(std::move(cols));
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const ConvergenceRow& row = rep.rows[i];
    for (std::size_t s = 0; s < rep.ks.size(); ++s) {
      std::vector<std::string> cells{std::to_string(i)};
      point_cells(row.x, cells);
      cells.push_back(format_double(row.f_value));
      cells.push_back(row.excluded ? "1" : "0");
      cells.push_back(std::to_string(rep.ks[s]));
      if (row.excluded) {
        // Excluded samples carry no per-stage scores.
        cells.push_back("");
        cells.push_back("");
        cells.push_back("");
      } else {
        cells.push_back(to_string(row.cls[s]));
        cells.push_back(format_double(row.exponent[s]));
        cells.push_back(format_double(row.deviation[s]));
      }
      t.add_row(std::move(cells));
    }
  }
  return t;
}

std::string pipeline_manifest(const std::vector<SynthesizedStage>& stages) {
  std::ostringstream out;
  const char* kind_name[] = {"skipped", "graded", "uniform"};
  for (const SynthesizedStage& st : stages) {
    const RectanglePartition& p = st.partition;
    out << "stage k=" << st.k << '\n';
    out << "  rectangles: " << p.rects.size() << '\n';
    out << "  kept_area: " << format_double(p.kept_area) << '\n';
    out << "  frame_discard: " << format_double(p.frame_discard) << '\n';
    out << "  partial_bound: " << format_double(p.partial_bound) << '\n';
    out << "  removal_budget_total: " << format_double(st.removal_budget_total) << '\n';
    out << "  removal_achieved: " << format_double(st.removal_achieved) << '\n';
    for (const auto& rep : st.reports) {
      out << "  rect value=" << format_double(rep.value)
          << " kind=" << kind_name[rep.kind]
          << " generations=" << rep.generations
          << " removed=" << format_double(rep.removed)
          << " budget=" << format_double(rep.budget_target)
          << " met=" << (rep.budget_met ? "yes" : "no")
          << (rep.skipped ? " flag=too-small" : "") << '\n';
    }
  }
  return out.str();
}

std::string loglog_svg(const std::string& title, const DegreeEstimate& estimate) {
  // Usable rungs only: positive residual, above the measurement floor.
  std::vector<std::pair<double, double>> pts;  // (log10 r, log10 residual)
  for (const RungDiagnostic& rung : estimate.diagnostics)
    if (!rung.below_floor && rung.residual.value > 0.0)
      pts.push_back({std::log10(rung.r), std::log10(rung.residual.value)});

  const double W = 480, H = 360, ML = 60, MR = 20, MT = 40, MB = 45;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"monospace\" font-size=\"14\">" << title << "</text>\n";

  if (pts.size() >= 2) {
    double xmin = pts[0].first, xmax = xmin, ymin = pts[0].second, ymax = ymin;
    for (auto& p : pts) {
      xmin = std::min(xmin, p.first);
      xmax = std::max(xmax, p.first);
      ymin = std::min(ymin, p.second);
      ymax = std::max(ymax, p.second);
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
    auto X = [&](double lx) { return ML + (lx - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto Y = [&](double ly) { return H - MB - (ly - ymin) / (ymax - ymin) * (H - MT - MB); };

    svg << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
        << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML
        << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">"
        << "log10 r</text>\n";
    svg << "<text x=\"16\" y=\"" << H / 2
        << "\" font-family=\"monospace\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << H / 2 << ")\">log10 residual</text>\n";

    if (estimate.cls == DegreeClass::finite) {
      // Fitted line: slope = exponent, intercept = least-squares offset.
      double offset = 0.0;
      for (auto& p : pts) offset += p.second - estimate.exponent * p.first;
      offset /= static_cast<double>(pts.size());
      svg << "<line x1=\"" << X(xmin) << "\" y1=\""
          << Y(estimate.exponent * xmin + offset) << "\" x2=\"" << X(xmax)
          << "\" y2=\"" << Y(estimate.exponent * xmax + offset)
          << "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
      svg << "<text x=\"" << W - MR << "\" y=\"" << MT + 14
          << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">"
          << "slope " << format_double(estimate.exponent) << "</text>\n";
    }
    for (auto& p : pts)
      svg << "<circle cx=\"" << X(p.first) << "\" cy=\"" << Y(p.second)
          << "\" r=\"3\" fill=\"crimson\"/>\n";
  } else {
    svg << "<text x=\"" << W / 2 << "\" y=\"" << H / 2
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">"
        << "no usable rungs (class " << to_string(estimate.cls) << ")</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string input_hash_manifest(
    std::vector<std::pair<std::string, std::string>> named_blobs) {
  std::sort(named_blobs.begin(), named_blobs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  char hex[17];
  for (const auto& [name, blob] : named_blobs) {
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(blob)));
    out += name;
    out += "  ";
    out += hex;
    out += "  ";
    out += std::to_string(blob.size());
    out += '\n';
  }
  return out;
}

std::string render_config(const std::map<std::string, std::string>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

}  // namespace superdense
