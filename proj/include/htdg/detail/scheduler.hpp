// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_map>
#include <vector>

#include "htdg/executor.hpp"
#include "htdg/notifier.hpp"
#include "htdg/work_deque.hpp"

namespace htdg::detail {

struct Frame;
struct RunState;

/// What the deques carry: one node of one graph instantiation.
struct Slot {
  Frame* frame = nullptr;
  NodeId node = 0;
};

/// One instantiation of a graph inside a run: the root graph, a module's
/// child graph, or a spawned subflow. Holds the runtime copy of the strong
/// dependency counters.
struct Frame {
  Frame(RunState* run, const TaskGraph* graph, std::uint64_t serial);

  RunState* run;
  const TaskGraph* graph;
  std::unique_ptr<Subflow> owned;
  std::unique_ptr<std::atomic<std::size_t>[]> strong;
  std::unique_ptr<Slot[]> slots;
  // Submitted-but-unfinished tasks of this frame plus outstanding detached
  // child frames. The frame is done when this drops to zero.
  std::atomic<std::size_t> pending{0};
  Frame* parent = nullptr;
  NodeId parent_node = 0;
  bool joined = true;
  std::uint64_t serial;
};

struct RunState {
  RunState(Scheduler* s, const TaskGraph* g);

  void fail(std::exception_ptr e);
  bool cancelled() const noexcept { return cancelled_.load(std::memory_order_relaxed); }

  Scheduler* sched;
  const TaskGraph* graph;
  std::unique_ptr<Frame> root;
  std::atomic<bool> cancelled_{false};

  std::mutex mu;
  std::condition_variable cv;
  bool done = false;           // guarded by mu
  std::exception_ptr error;    // guarded by mu
};

template <typename T>
struct Counter {
  // Single writer (the owning worker); readers tolerate staleness.
  void add(T v = 1) noexcept { value.store(value.load(std::memory_order_relaxed) + v, std::memory_order_relaxed); }
  void max(T v) noexcept {
    if (v > value.load(std::memory_order_relaxed)) value.store(v, std::memory_order_relaxed);
  }
  T get() const noexcept { return value.load(std::memory_order_relaxed); }
  void reset() noexcept { value.store(0, std::memory_order_relaxed); }

  std::atomic<T> value{0};
};

struct alignas(64) WorkerStats {
  Counter<std::uint64_t> tasks, steal_attempts, steals_ok, steal_retries, notifications, parks, explore_calls,
      max_failed_per_explore;
};

struct Worker {
  std::size_t id = 0;
  DomainId domain = 0;
  std::vector<std::unique_ptr<WorkDeque<Slot*>>> queues;  // one per domain
  std::mt19937_64 rng;
  WorkerStats stats;

  std::mutex trace_mu;
  std::vector<TraceEvent> trace;  // guarded by trace_mu
};

struct alignas(64) DomainState {
  std::atomic<std::size_t> actives{0};
  std::atomic<std::size_t> thieves{0};
};

/**
 * The scheduler proper. Each algorithm step is a member taking the acting
 * worker explicitly, so tests can drive a scheduler built without threads
 * one step at a time.
 */
class Scheduler {
 public:
  Scheduler(ExecutorConfig config, bool spawn_threads);
  ~Scheduler();

  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  // -- algorithm steps ------------------------------------------------------
  void worker_loop(Worker& w);
  void exploit_task(Worker& w, Slot*& t);
  bool wait_for_task(Worker& w, Slot*& t);
  Slot* explore_task(Worker& w);
  void execute_task(Worker& w, Slot* t);
  void submit_task(Worker& w, Slot* t);

  /// Validates, instantiates the root frame and pushes its sources to the
  /// shared queues.
  RunHandle submit_graph(const TaskGraph& graph);

  void shutdown();
  void wait_for_all();

  // -- state ----------------------------------------------------------------
  const ExecutorConfig& config() const noexcept { return config_; }
  std::size_t num_workers() const noexcept { return workers_.size(); }
  std::size_t num_domains() const noexcept { return domains_.size(); }
  std::size_t max_steals() const noexcept { return max_steals_; }
  Worker& worker(std::size_t id) { return *workers_[id]; }
  DomainState& domain(DomainId d) { return *domains_[d]; }
  Notifier& notifier(DomainId d) { return *notifiers_[d]; }
  WorkDeque<Slot*>& shared_queue(DomainId d) { return *shared_[d]; }
  bool stopping() const noexcept { return stop_.load(std::memory_order_seq_cst); }
  std::size_t inflight() const noexcept { return inflight_.load(std::memory_order_relaxed); }

  /// Worker running on the calling thread, or null.
  Worker* this_worker() const noexcept;

  MetricsReport metrics() const;
  void reset_metrics();
  std::vector<std::vector<TraceEvent>> trace_by_worker() const;
  void clear_trace();

 private:
  void notify(Worker* w, DomainId d, bool all);
  void record(Worker* w, TraceKind kind, std::int64_t domain, std::int64_t a = 0, std::int64_t b = 0);
  std::uint64_t now_ns() const noexcept;

  Frame* make_frame(RunState* run, const TaskGraph* graph);
  void start_frame(Worker* w, Frame* f);
  void finish_task(Worker& w, Frame* f, NodeId node);
  void release(Worker* w, Frame* f);
  void frame_done(Worker* w, Frame* f);
  void complete_run(RunState* run);
  void sample_loop();

  ExecutorConfig config_;
  std::size_t max_steals_ = 0;
  std::vector<std::unique_ptr<Worker>> workers_;
  std::vector<std::unique_ptr<DomainState>> domains_;
  std::vector<std::unique_ptr<Notifier>> notifiers_;
  std::vector<std::unique_ptr<WorkDeque<Slot*>>> shared_;
  std::mutex queue_mutex_;

  alignas(64) std::atomic<bool> stop_{false};
  alignas(64) std::atomic<std::size_t> inflight_{0};
  std::atomic<std::uint64_t> frame_serial_{0};

  Counter<std::uint64_t> external_notifications_;
  std::mutex external_trace_mu_;
  std::vector<TraceEvent> external_trace_;

  std::mutex runs_mu_;
  std::condition_variable runs_cv_;
  std::unordered_map<RunState*, std::shared_ptr<RunState>> runs_;  // guarded by runs_mu_

  std::mutex samples_mu_;
  std::condition_variable samples_cv_;
  std::vector<DomainSample> samples_;  // guarded by samples_mu_

  std::chrono::steady_clock::time_point epoch_;
  std::vector<std::thread> threads_;
  std::thread sampler_;
};

}  // namespace htdg::detail
