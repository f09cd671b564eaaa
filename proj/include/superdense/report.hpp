#pragma once

#include "superdense/approximation.hpp"
#include "superdense/density.hpp"
#include "superdense/forms.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace superdense {

// 17-significant-digit rendering: round-trips every double and is
// byte-stable across runs. Infinities and NaN render as inf/-inf/nan.
std::string format_double(double v);

// Minimal CSV assembly against a fixed column schema. Cells containing a
// comma, quote, or newline are quoted; rendering uses '\n' line endings so
// the emitted bytes are platform-stable.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }

  std::string str() const;
  void save(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// Degree diagnostics, one row per ladder rung of each estimate:
// x_1..x_n, r, residual, residual_err, quotient_n, class, exponent, stderr.
// The class/exponent/stderr columns repeat the estimate's summary on each of
// its rows. points and estimates pair up index by index; n_hint sets the
// coordinate column count when points is empty (header-only output).
CsvTable degree_csv(const std::vector<Vec>& points,
                    const std::vector<DegreeEstimate>& estimates, int n_hint = 2);

// Coincidence/tangency experiment, one row per sample:
// x_1..x_n, class, exponent, dmu_abs, verdict, consistent.
CsvTable tangency_csv(const std::vector<TangencyRow>& rows);

// Pipeline sample trajectories, one row per (sample, stage):
// sample, x_1..x_n, f_value, excluded, k, class, estimate, deviation.
CsvTable trajectory_csv(const ConvergenceReport& rep);

// Structured text block describing synthesized stages: rectangle counts,
// removal budgets, achieved removal, and the partition area ledger.
std::string pipeline_manifest(const std::vector<SynthesizedStage>& stages);

// Log-log plot of one estimate's rung diagnostics (log10 r against log10
// residual) with the fitted power-law line drawn through the usable rungs.
// Returns a complete standalone SVG document.
std::string loglog_svg(const std::string& title, const DegreeEstimate& estimate);

// FNV-1a 64-bit content hash.
std::uint64_t fnv1a64(std::string_view bytes);

// One line per named blob, sorted by name:
//   <name>  <16 hex digit fnv1a64>  <byte count>
std::string input_hash_manifest(
    std::vector<std::pair<std::string, std::string>> named_blobs);

// key=value lines, keys sorted, '\n' endings; the resolved-config format.
std::string render_config(const std::map<std::string, std::string>& kv);

}  // namespace superdense
