// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "htdg/device.hpp"
#include "htdg/error.hpp"

namespace htdg {

enum class TaskKind : std::uint8_t { Static, Subflow, Module, Condition, DeviceFlow };

std::string_view to_string(TaskKind kind) noexcept;

using NodeId = std::size_t;
using DomainId = std::size_t;

/// Domain 0 is the host (CPU) domain by convention.
inline constexpr DomainId kHostDomain = 0;

class TaskGraph;
class Subflow;

namespace detail {
class Scheduler;
}

using StaticWork = std::function<void()>;
/// Returns the index of the successor to run next.
using ConditionWork = std::function<int()>;
using SubflowWork = std::function<void(Subflow&)>;

/// Non-owning link from a module node to the graph it runs.
struct ModuleRef {
  const TaskGraph* graph = nullptr;
};

using Callable =
    std::variant<StaticWork, ConditionWork, SubflowWork, ModuleRef, DeviceFlowWork, CaptureWork>;

struct TaskNode {
  NodeId id = 0;
  TaskKind kind = TaskKind::Static;
  DomainId domain = kHostDomain;
  std::string name;
  Callable work;
  // Order matters for condition nodes: the returned index selects into it.
  std::vector<NodeId> successors;
  std::size_t strong_dependents = 0;
  std::size_t weak_dependents = 0;

  bool is_source() const noexcept { return strong_dependents + weak_dependents == 0; }

  // Lookup set for nodes with many successors; keeps duplicate-edge checks
  // cheap without paying for a hash set on every node.
  std::unique_ptr<std::unordered_set<NodeId>> successor_index;
};

enum class Severity : std::uint8_t { Warning, Error };

enum class DiagnosticCode : std::uint8_t { NoSource, PossibleRace, DanglingCondition, ConcurrentModuleUse };

std::string_view to_string(Severity s) noexcept;
std::string_view to_string(DiagnosticCode c) noexcept;

struct Diagnostic {
  Severity severity = Severity::Warning;
  DiagnosticCode code = DiagnosticCode::NoSource;
  std::vector<NodeId> nodes;
  std::string message;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Lightweight handle for fluent graph building. Valid while the graph lives.
class Task {
 public:
  Task() = default;
  Task(TaskGraph* graph, NodeId id) : graph_(graph), id_(id) {}

  template <typename... Ts>
  Task& precede(const Ts&... successors);

  template <typename... Ts>
  Task& succeed(const Ts&... predecessors);

  Task& name(std::string name);
  const std::string& name() const;

  NodeId id() const noexcept { return id_; }
  TaskKind kind() const;
  DomainId domain() const;

  friend bool operator==(const Task& a, const Task& b) noexcept {
    return a.graph_ == b.graph_ && a.id_ == b.id_;
  }

 private:
  TaskGraph* graph_ = nullptr;
  NodeId id_ = 0;
};

/**
 * A heterogeneous task dependency graph.
 *
 * Built single-threaded, then finalize()d; after that it is immutable and may
 * be shared by any number of threads. Per-run mutable state (remaining
 * dependency counts) lives in the executor.
 *
 * Node ids are dense ordinals in insertion order.
 */
class TaskGraph {
 public:
  explicit TaskGraph(std::string name = {}, std::size_t num_domains = 1);
  virtual ~TaskGraph() = default;

  TaskGraph(TaskGraph&& other) noexcept;
  TaskGraph& operator=(TaskGraph&& other) noexcept;
  TaskGraph(const TaskGraph&) = delete;
  TaskGraph& operator=(const TaskGraph&) = delete;

  NodeId add_task(TaskKind kind, DomainId domain, Callable work);

  /// Deduces the task kind from the callable's signature.
  template <typename F>
  Task emplace(F&& work, DomainId domain = kHostDomain);

  /// Adds a module node that runs all of `child` when scheduled.
  Task compose(const TaskGraph& child, DomainId domain = kHostDomain);

  void precede(NodeId from, std::span<const NodeId> to);
  void precede(NodeId from, std::initializer_list<NodeId> to) {
    precede(from, std::span<const NodeId>(to.begin(), to.size()));
  }

  Task task(NodeId id);
  void set_name(NodeId id, std::string name);

  std::vector<Diagnostic> validate() const;

  /// Freezes the graph. Throws ValidationError if validate() reports errors.
  void finalize();

  std::string export_dot() const;
  void export_dot(std::ostream& os) const;

  const std::string& name() const noexcept { return name_; }
  std::size_t num_domains() const noexcept { return num_domains_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  bool finalized() const noexcept { return finalized_; }
  std::size_t num_edges() const noexcept { return num_edges_; }

  const TaskNode& node(NodeId id) const;
  std::span<const TaskNode> nodes() const noexcept { return nodes_; }

  /// Nodes with zero strong and zero weak in-edges, in id order.
  std::vector<NodeId> sources() const;

  std::span<const TaskGraph* const> composed_children() const noexcept { return children_; }

  /// Largest domain index used by this graph or any graph it composes.
  DomainId max_domain_used() const;

  /// True if `to` is reachable from `from` along successor edges without
  /// entering `avoid` (pass size() to avoid nothing). from == to counts.
  bool reaches(NodeId from, NodeId to, NodeId avoid) const;

 protected:
  void require_mutable() const;

 private:
  friend class detail::Scheduler;

  bool try_begin_run() const noexcept { return !running_.exchange(true, std::memory_order_acq_rel); }
  void end_run() const noexcept { running_.store(false, std::memory_order_release); }

  bool composes(const TaskGraph* target) const;

  std::string name_;
  std::size_t num_domains_;
  std::vector<TaskNode> nodes_;
  std::vector<const TaskGraph*> children_;
  std::vector<NodeId> sources_;
  std::size_t num_edges_ = 0;
  bool finalized_ = false;

  // Held while a top-level run of this graph is in flight.
  mutable std::atomic<bool> running_{false};
};

/// The builder handed to a subflow task's callable. Joined by default: the
/// spawning task completes only after every spawned task has finished.
class Subflow : public TaskGraph {
 public:
  explicit Subflow(std::size_t num_domains = 1, std::string name = {})
      : TaskGraph(std::move(name), num_domains) {}

  void detach() noexcept { detached_ = true; }
  void join() noexcept { detached_ = false; }
  bool detached() const noexcept { return detached_; }

 private:
  bool detached_ = false;
};

// ---------------------------------------------------------------------------

template <typename F>
Task TaskGraph::emplace(F&& work, DomainId domain) {
  if constexpr (std::is_invocable_v<F, Subflow&>) {
    return task(add_task(TaskKind::Subflow, domain, SubflowWork(std::forward<F>(work))));
  } else if constexpr (std::is_invocable_v<F, Capturer&>) {
    return task(add_task(TaskKind::DeviceFlow, domain, CaptureWork(std::forward<F>(work))));
  } else if constexpr (std::is_invocable_v<F, DeviceGraph&>) {
    return task(add_task(TaskKind::DeviceFlow, domain, DeviceFlowWork(std::forward<F>(work))));
  } else if constexpr (std::is_invocable_r_v<int, F> && !std::is_void_v<std::invoke_result_t<F>>) {
    return task(add_task(TaskKind::Condition, domain, ConditionWork(std::forward<F>(work))));
  } else {
    static_assert(std::is_invocable_v<F>, "unsupported task callable signature");
    return task(add_task(TaskKind::Static, domain, StaticWork(std::forward<F>(work))));
  }
}

template <typename... Ts>
Task& Task::precede(const Ts&... successors) {
  const NodeId ids[] = {successors.id()...};
  graph_->precede(id_, std::span<const NodeId>(ids, sizeof...(Ts)));
  return *this;
}

template <typename... Ts>
Task& Task::succeed(const Ts&... predecessors) {
  (graph_->precede(predecessors.id(), {id_}), ...);
  return *this;
}

}  // namespace htdg
