// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "htdg/error.hpp"

namespace htdg {

enum class OpKind : std::uint8_t { Copy, Kernel, Opaque };

std::string_view to_string(OpKind kind) noexcept;

using OpId = std::size_t;
using StreamId = std::size_t;

/// Device-side work. Receives the (simulated) stream the op was placed on.
using OpPayload = std::function<void(StreamId)>;

struct DeviceOp {
  OpId id = 0;
  OpKind kind = OpKind::Opaque;
  std::string label;
  OpPayload payload;
  std::vector<OpId> successors;
  std::vector<OpId> predecessors;
};

/**
 * An explicit device task graph: copies, kernels and opaque stream work with
 * dependencies between them. Acyclicity is checked when the graph is
 * levelized, not on every edge insertion.
 */
class DeviceGraph {
 public:
  class Op {
   public:
    Op(DeviceGraph* graph, OpId id) : graph_(graph), id_(id) {}

    template <typename... Ts>
    Op& precede(const Ts&... successors) {
      (graph_->add_edge(id_, successors.id()), ...);
      return *this;
    }

    template <typename... Ts>
    Op& succeed(const Ts&... predecessors) {
      (graph_->add_edge(predecessors.id(), id_), ...);
      return *this;
    }

    OpId id() const noexcept { return id_; }

   private:
    DeviceGraph* graph_;
    OpId id_;
  };

  Op add_op(OpKind kind, std::string label, OpPayload payload = {});

  Op copy(std::string label, std::function<void()> fn = {});
  Op kernel(std::string label, std::function<void()> fn = {});
  /// Opaque work issued through a stream-based API.
  Op on(std::string label, OpPayload fn);

  void add_edge(OpId from, OpId to);

  std::size_t size() const noexcept { return ops_.size(); }
  bool empty() const noexcept { return ops_.empty(); }
  std::size_t num_edges() const noexcept { return num_edges_; }
  const DeviceOp& op(OpId id) const { return ops_.at(id); }
  const std::vector<DeviceOp>& ops() const noexcept { return ops_; }

  /// True if every op is opaque, i.e. the graph came from stream capture.
  bool captured() const noexcept;

 private:
  std::vector<DeviceOp> ops_;
  std::size_t num_edges_ = 0;
};

/**
 * Stream-capture front end. Every operation recorded here is opaque to the
 * runtime: only its dependencies are known, so placement onto streams is
 * decided by make_schedule().
 */
class Capturer {
 public:
  DeviceGraph::Op on(std::string label, OpPayload fn) { return graph_.on(std::move(label), std::move(fn)); }

  /// A copy issued through a stream; captured as opaque work.
  DeviceGraph::Op copy(std::string label, std::function<void()> fn = {});

  DeviceGraph& graph() noexcept { return graph_; }
  const DeviceGraph& graph() const noexcept { return graph_; }

 private:
  DeviceGraph graph_;
};

using DeviceFlowWork = std::function<void(DeviceGraph&)>;
using CaptureWork = std::function<void(Capturer&)>;

/// level[op] is the longest-path depth from any source; index[op] is the
/// op's position within its level, in op-insertion order.
struct LevelTable {
  std::vector<std::size_t> level;
  std::vector<std::size_t> index;
  std::vector<std::vector<OpId>> levels;

  std::size_t num_levels() const noexcept { return levels.size(); }
};

/// Throws Error(CycleDetected) if the graph has a cycle.
LevelTable levelize(const DeviceGraph& graph);

/// A cross-stream dependency: record an event after `producer` on
/// `record_stream`, and wait on it before `consumer` on `wait_stream`.
struct StreamEvent {
  OpId producer = 0;
  StreamId record_stream = 0;
  OpId consumer = 0;
  StreamId wait_stream = 0;

  friend bool operator==(const StreamEvent&, const StreamEvent&) = default;
};

struct StreamSchedule {
  std::size_t max_streams = 1;
  std::vector<std::vector<OpId>> streams;
  std::vector<StreamEvent> events;
  std::vector<StreamId> stream_of;
  LevelTable levels;
  std::vector<std::string> labels;

  std::size_t streams_used() const noexcept;

  /// `S<k>: a,b,...` per stream, then sorted `E: <producer>-><consumer>` lines.
  std::string dump() const;
};

/// Level-by-level round-robin placement onto `max_streams` streams with
/// record/wait event pairs for every cross-stream edge.
StreamSchedule make_schedule(const DeviceGraph& graph, std::size_t max_streams);

struct OpTiming {
  OpId op = 0;
  StreamId stream = 0;
  std::uint64_t start = 0;
  /// Last tick the op occupies its stream. An op of latency L starting at
  /// tick s completes at s + L - 1; dependents start at completion + 1 or
  /// later.
  std::uint64_t completion = 0;
};

struct SimTrace {
  /// Ordered by completion tick, then stream.
  std::vector<OpTiming> order;
  /// Indexed by op id.
  std::vector<OpTiming> timing;
  /// Number of ticks until the last op completes.
  std::uint64_t makespan = 0;
};

using LatencyFn = std::function<std::uint64_t(OpId)>;

/// Discrete-event execution of a schedule on an ideal device with one
/// in-order queue per stream. Default latency is 1 tick per op. Throws
/// Error(Deadlock) if the event waits can never all be satisfied.
SimTrace simulate(const StreamSchedule& schedule, const LatencyFn& latency = {});

/// Edges (p, t) for which completion(p) < start(t) does not hold.
std::vector<std::pair<OpId, OpId>> dependency_violations(const DeviceGraph& graph, const SimTrace& trace);

struct DeviceConfig {
  std::size_t max_streams = 4;
  LatencyFn latency;
};

/// Schedules, simulates and then invokes payloads in simulated completion
/// order.
SimTrace run_device_graph(const DeviceGraph& graph, const DeviceConfig& config);

SimTrace execute_deviceflow(const DeviceFlowWork& build, const DeviceConfig& config);
SimTrace execute_deviceflow(const CaptureWork& build, const DeviceConfig& config);

}  // namespace htdg
