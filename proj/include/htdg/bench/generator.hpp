// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "htdg/bench/workload.hpp"

namespace htdg::bench {

struct BenchConfig {
  /// "random", "chain" or "corpus:<name>".
  std::string generator = "random";
  std::size_t nodes = 100;
  double edge_prob = 0.1;
  std::size_t domains = 1;
  /// Relative share of tasks per domain; empty means equal shares.
  std::vector<double> domain_ratio;
  std::uint64_t seed = 1;
  std::vector<std::size_t> workers{1};
  std::size_t reps = 1;
  std::size_t max_steals_mult = 10;
  /// Applies the wasteful-steal bound (2 * nodes * MAX_STEALS) to each rep.
  bool check_steal_bound = true;
  std::string report_path;
  std::string trace_path;
  std::string dot_path;

  /// Throws Error(InvalidConfig) describing the first problem found.
  void validate() const;
};

/**
 * Layered random DAG. Nodes are split into about sqrt(n) consecutive layers
 * and every pair in adjacent layers is connected with probability
 * edge_prob, so layer 0 always consists of sources. Domain-0 tasks are
 * static; tasks of other domains are device flows (copy in, kernel, copy
 * out). Every task adds mix(seed_i, sum of its predecessors' slots) to its
 * own result slot, so a lost or repeated execution changes the results.
 *
 * Sampling uses raw generator output only, so structures are identical
 * across standard libraries.
 */
Workload gen_random_htdg(const BenchConfig& cfg);

/// n static tasks in a line, each touching its result slot.
Workload gen_chain(std::size_t n, std::uint64_t seed);

/// Dispatches on cfg.generator.
Workload make_workload(const BenchConfig& cfg);

/// FNV-1a over node kinds, domains and ordered successor lists.
std::uint64_t structure_hash(const TaskGraph& g);

}  // namespace htdg::bench
