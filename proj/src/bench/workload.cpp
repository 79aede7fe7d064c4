// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#include "htdg/bench/workload.hpp"

#include <algorithm>

#include "htdg/error.hpp"

namespace htdg::bench {

Probe::Entry& Probe::add(std::string name) { return entries_.emplace_back(std::move(name)); }

void Probe::hit(Entry& e) noexcept {
  const std::uint64_t stamp = clock_.fetch_add(1, std::memory_order_relaxed);
  e.hits.fetch_add(1, std::memory_order_relaxed);
  // A callable never runs concurrently with itself in a well-formed graph,
  // so plain min/max updates are enough here.
  if (stamp < e.first.load(std::memory_order_relaxed)) e.first.store(stamp, std::memory_order_relaxed);
  if (stamp > e.last.load(std::memory_order_relaxed)) e.last.store(stamp, std::memory_order_relaxed);
}

void Probe::reset() noexcept {
  for (auto& e : entries_) {
    e.hits.store(0, std::memory_order_relaxed);
    e.first.store(UINT64_MAX, std::memory_order_relaxed);
    e.last.store(0, std::memory_order_relaxed);
  }
  clock_.store(1, std::memory_order_relaxed);
}

const Probe::Entry& Probe::at(const std::string& name) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
  if (it == entries_.end()) throw Error(ErrorCode::UnknownNode, "no probe named '" + name + "'");
  return *it;
}

std::map<std::string, std::uint64_t> Probe::counts() const {
  std::map<std::string, std::uint64_t> out;
  for (const auto& e : entries_) out[e.name] += e.hits.load(std::memory_order_relaxed);
  return out;
}

}  // namespace htdg::bench
