// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "htdg/device.hpp"
#include "htdg/graph.hpp"

namespace htdg {

namespace detail {
class Scheduler;
struct RunState;
}  // namespace detail

struct ExecutorConfig {
  /// Worker count per domain; domain 0 first. Every entry must be positive.
  std::vector<std::size_t> workers_per_domain{1};
  /// MAX_STEALS = max_steals_multiplier * total workers.
  std::size_t max_steals_multiplier = 10;
  std::uint64_t rng_seed = 0x243f6a8885a308d3ull;
  /// Exposes counters through metrics() and enables the sampler.
  bool instrument = false;
  /// Records a per-worker event log (see TraceEvent).
  bool trace = false;
  /// Period of the actives/thieves sampler; zero disables it.
  std::chrono::microseconds sample_interval{0};
  /// Stream limit and op latency for device-flow tasks.
  std::size_t max_streams = 4;
  LatencyFn device_latency;
};

struct DomainSample {
  std::uint64_t ns = 0;
  DomainId domain = 0;
  std::size_t actives = 0;
  std::size_t thieves = 0;
};

struct MetricsReport {
  std::size_t max_steals = 0;
  std::uint64_t tasks_executed = 0;
  std::uint64_t steal_attempts_total = 0;
  std::uint64_t steals_successful = 0;
  std::uint64_t wasteful_steals = 0;
  /// Subset of wasteful_steals lost to contention rather than emptiness.
  std::uint64_t steal_retries = 0;
  std::uint64_t notifications_sent = 0;
  std::uint64_t parks = 0;
  std::uint64_t explore_calls = 0;
  /// Largest number of failed attempts in a single explore round.
  std::uint64_t max_wasteful_per_explore = 0;
  /// Samples taken while at least one run was in flight.
  std::vector<DomainSample> samples;
};

enum class TraceKind : std::uint8_t { Exec, Submit, StealOk, StealFail, Notify, Park, Unpark, ActiveInc, ActiveDec };

std::string_view to_string(TraceKind kind) noexcept;

/// One scheduler event. Field meaning depends on the kind; format() renders
/// the `<ns> <worker> <EVENT> <arg>` line.
struct TraceEvent {
  std::uint64_t ns = 0;
  std::int64_t worker = -1;  // -1 for threads outside the executor
  TraceKind kind = TraceKind::Exec;
  std::int64_t domain = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
};

std::string format(const TraceEvent& e);

/// Completion handle for one run. Copyable; all copies observe the same run.
class RunHandle {
 public:
  RunHandle() = default;

  /// Blocks until every task of the run, including nested and detached
  /// work, has finished. Rethrows the first error raised by the run.
  void wait() const;

  /// Like wait() but gives up after `timeout`; returns false on timeout.
  bool wait_for(std::chrono::milliseconds timeout) const;

  bool done() const;
  bool valid() const noexcept { return state_ != nullptr; }

 private:
  friend class detail::Scheduler;
  explicit RunHandle(std::shared_ptr<detail::RunState> state) : state_(std::move(state)) {}

  std::shared_ptr<detail::RunState> state_;
};

/**
 * Multi-domain work-stealing executor.
 *
 * Workers are created at construction and joined at destruction. Each
 * worker belongs to one domain and only runs tasks of that domain, but can
 * produce tasks for any domain. Idle workers park on a per-domain notifier;
 * at most one stays awake as a thief while some worker of its domain is
 * active.
 *
 * A graph may be run by one top-level run at a time. If a task throws, the
 * rest of that run is skipped and wait() rethrows; other runs are unaffected.
 */
class Executor {
 public:
  explicit Executor(ExecutorConfig config = {});
  explicit Executor(std::size_t num_workers);
  ~Executor();

  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  RunHandle run(const TaskGraph& graph);

  /// Blocks until no run is in flight.
  void wait_for_all();

  std::size_t num_workers() const noexcept;
  std::size_t num_domains() const noexcept;
  std::size_t max_steals() const noexcept;
  const ExecutorConfig& config() const noexcept;

  /// Throws Error(NotInstrumented) unless config().instrument.
  MetricsReport metrics() const;
  void reset_metrics();

  /// Events from all workers ordered by timestamp; empty unless config().trace.
  std::vector<TraceEvent> trace() const;
  /// Per-worker event streams in program order, indexed by worker id; the
  /// final entry holds events from outside threads.
  std::vector<std::vector<TraceEvent>> trace_by_worker() const;
  void write_trace(std::ostream& os) const;
  void clear_trace();

  /// Tasks submitted and not yet finished, across all runs.
  std::size_t inflight() const noexcept;

  detail::Scheduler& scheduler() noexcept { return *sched_; }

 private:
  std::unique_ptr<detail::Scheduler> sched_;
};

}  // namespace htdg
