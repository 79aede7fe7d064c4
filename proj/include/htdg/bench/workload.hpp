// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "htdg/graph.hpp"

namespace htdg::bench {

/**
 * Per-callable execution counters shared by a workload's tasks.
 *
 * Each hit also takes a stamp from a global clock, so tests can assert
 * ordering ("every B1 finished before the first B3") without a trace.
 */
class Probe {
 public:
  struct Entry {
    explicit Entry(std::string n) : name(std::move(n)) {}
    std::string name;
    std::atomic<std::uint64_t> hits{0};
    std::atomic<std::uint64_t> first{UINT64_MAX};
    std::atomic<std::uint64_t> last{0};
  };

  /// Entry references stay valid for the probe's lifetime.
  Entry& add(std::string name);

  void hit(Entry& e) noexcept;
  void reset() noexcept;

  const Entry& at(const std::string& name) const;
  std::uint64_t hits(const std::string& name) const { return at(name).hits.load(); }
  std::map<std::string, std::uint64_t> counts() const;

 private:
  std::deque<Entry> entries_;
  std::atomic<std::uint64_t> clock_{1};
};

/// A runnable graph together with the state its callables read and write.
struct Workload {
  std::string name;
  /// Owned graphs; composed children come before the graphs using them.
  std::vector<std::unique_ptr<TaskGraph>> graphs;
  TaskGraph* top = nullptr;
  std::shared_ptr<Probe> probe = std::make_shared<Probe>();
  /// Restores every piece of mutable state (including the probe) so the
  /// next run starts from scratch; `seed` drives any randomized decisions.
  std::function<void(std::uint64_t seed)> reset;
  /// Final observable state of the result array, compared bit-exactly.
  std::function<std::vector<std::uint64_t>()> results;

  TaskGraph& graph() { return *top; }
};

/// 64-bit mix used by payloads and hashes.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdull;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ull;
  x ^= x >> 33;
  return x;
}

}  // namespace htdg::bench
