// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "htdg/bench/generator.hpp"
#include "htdg/executor.hpp"

namespace htdg::bench {

/// Ordered key=value report; keys print sorted.
class Report {
 public:
  void set(const std::string& key, std::uint64_t v) { values_[key] = std::to_string(v); }
  void set(const std::string& key, double v);
  void set(const std::string& key, const std::string& v) { values_[key] = v; }

  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  std::string str() const;
  void write(std::ostream& os) const;

 private:
  std::map<std::string, std::string> values_;
};

struct RepResult {
  std::uint64_t seed = 0;
  bool counts_match = true;
  bool checksum_match = true;
  bool bound_ok = true;
  bool completed = true;
  double millis = 0;
  MetricsReport metrics;
};

struct BenchResult {
  std::vector<RepResult> reps;
  std::uint64_t oracle_mismatches = 0;
  std::uint64_t checksum_mismatches = 0;
  std::uint64_t bound_violations = 0;
  std::uint64_t hangs = 0;
  Report report;

  bool passed() const noexcept {
    return oracle_mismatches == 0 && checksum_mismatches == 0 && bound_violations == 0 && hangs == 0;
  }
};

/**
 * For each repetition (seed, seed+1, ...): builds the workload, runs the
 * sequential oracle, runs it again on an instrumented executor, compares
 * per-callable execution counts and result arrays, and checks the
 * wasteful-steal bound when configured. Mismatches are tallied, not thrown.
 */
BenchResult run_bench(const BenchConfig& cfg);

/// Runs one workload on `exec` with a watchdog. Returns false on timeout.
bool run_with_watchdog(Executor& exec, const TaskGraph& g, std::chrono::milliseconds limit);

struct CorunResult {
  double baseline_ms = 0;
  std::vector<double> corun_ms;
  double weighted_speedup = 0;
};

/// Runs `processes` copies of the workload concurrently, each on its own
/// executor, and reports sum(baseline / corun_i).
CorunResult corun_throughput(const BenchConfig& cfg, std::size_t processes);

struct CreationCost {
  std::size_t tasks = 0;
  std::size_t edges = 0;
  double ns_per_task = 0;
  double ns_per_edge = 0;
};

/// Amortized cost of add_task and precede over `ops` operations each.
CreationCost measure_creation(std::size_t ops);

}  // namespace htdg::bench
