#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace superdense {

// Flat key=value configuration. Layers resolve in order: built-in defaults,
// then config file entries, then command-line overrides; the resolved map is
// written next to every run's outputs so a run can be replayed exactly.
struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

  // Sorted key=value lines; parses back to an identical map.
  std::string render() const;
};

// Parses key=value lines into cfg.values; '#' comments and blank lines are
// skipped. Throws ContractViolation on malformed lines or unreadable files.
void load_config_file(const std::string& path, RunConfig& cfg);

// Entry point shared by main() and the tests. args excludes the program
// name: {"estimate", "--set", "gallery=cusp:m=3", ...}. Returns 0 on
// success, 1 when a run-level assertion fails, 2 on configuration errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace superdense
