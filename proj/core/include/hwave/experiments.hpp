#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hwave/config.hpp"

namespace hwave {

/// Machine-readable experiment summary, serialized as report.json next to
/// the CSV products.  config_hash is an FNV-1a over the canonical resolved
/// configuration (defaults materialized, keys sorted), so re-running from
/// the embedded resolved config reproduces both hashes.
struct ExperimentReport {
  struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
  };

  std::string experiment;
  std::string config_hash;
  std::map<std::string, std::map<std::string, std::string>> resolved_config;
  std::map<std::string, double> metrics;
  std::vector<Check> checks;
  std::string status;     // completed | blew_up | numeric_failure | pass | fail | invalid
  std::string report_hash;
};

struct RunOptions {
  std::string out_dir = ".";
  unsigned threads = 0;                // 0: HWAVE_THREADS, else hardware default
  std::optional<std::uint64_t> seed;   // overrides [experiment] seed
};

/// Validates the configuration against the experiment schema (unknown
/// sections/keys rejected), dispatches on [experiment] name, runs it and
/// writes all products (CSVs, snapshots, report.json) under opts.out_dir.
ExperimentReport run_config(const IniConfig& cfg, const RunOptions& opts);

/// CLI entry: parse the file, run, map errors to exit codes.
/// 0 success (including detected blow-up), 2 configuration errors,
/// 3 numeric failures.
int run_experiment(const std::string& config_path, const RunOptions& opts);

/// 64-bit FNV-1a, the hash behind config_hash / report_hash.
std::uint64_t fnv1a64(const std::string& text);

}  // namespace hwave
