// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "htdg/device.hpp"
#include "htdg/graph.hpp"

namespace htdg::bench {

struct OracleTrace {
  /// (label, n) meaning the n-th execution of that label, in order.
  std::vector<std::pair<std::string, std::uint64_t>> order;
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t steps = 0;

  std::uint64_t count(const std::string& label) const {
    auto it = counts.find(label);
    return it == counts.end() ? 0 : it->second;
  }
};

inline constexpr std::uint64_t kDefaultStepLimit = 10'000'000;

/**
 * Runs a graph on the calling thread with one FIFO ready list, applying the
 * same rule as the executor: a condition task jumps to the chosen successor,
 * every other task releases successors whose strong count drops to zero.
 * Modules and subflows run inline to completion.
 *
 * Labels are the node name (or n<id>), prefixed by the enclosing module or
 * subflow label and '/'. Throws Error(NonTermination) once `step_limit`
 * tasks have run.
 */
OracleTrace sequential_oracle(const TaskGraph& graph, std::uint64_t step_limit = kDefaultStepLimit,
                              const DeviceConfig& device = {});

}  // namespace htdg::bench
