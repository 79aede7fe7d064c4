// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#include "htdg/device.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace htdg {

std::string_view to_string(OpKind kind) noexcept {
  switch (kind) {
    case OpKind::Copy: return "copy";
    case OpKind::Kernel: return "kernel";
    case OpKind::Opaque: return "opaque";
  }
  return "?";
}

namespace {

OpPayload nullary(std::function<void()> fn) {
  if (!fn) return {};
  return [f = std::move(fn)](StreamId) { f(); };
}

}  // namespace

DeviceGraph::Op DeviceGraph::add_op(OpKind kind, std::string label, OpPayload payload) {
  DeviceOp op;
  op.id = ops_.size();
  op.kind = kind;
  op.label = label.empty() ? "op" + std::to_string(op.id) : std::move(label);
  op.payload = std::move(payload);
  ops_.push_back(std::move(op));
  return Op(this, ops_.back().id);
}

DeviceGraph::Op DeviceGraph::copy(std::string label, std::function<void()> fn) {
  return add_op(OpKind::Copy, std::move(label), nullary(std::move(fn)));
}

DeviceGraph::Op DeviceGraph::kernel(std::string label, std::function<void()> fn) {
  return add_op(OpKind::Kernel, std::move(label), nullary(std::move(fn)));
}

DeviceGraph::Op DeviceGraph::on(std::string label, OpPayload fn) {
  return add_op(OpKind::Opaque, std::move(label), std::move(fn));
}

void DeviceGraph::add_edge(OpId from, OpId to) {
  if (from >= ops_.size() || to >= ops_.size()) {
    throw Error(ErrorCode::UnknownNode, "device edge references a missing op");
  }
  auto& succ = ops_[from].successors;
  if (std::find(succ.begin(), succ.end(), to) != succ.end()) {
    throw Error(ErrorCode::DuplicateEdge, ops_[from].label + " -> " + ops_[to].label);
  }
  succ.push_back(to);
  ops_[to].predecessors.push_back(from);
  ++num_edges_;
}

bool DeviceGraph::captured() const noexcept {
  return std::all_of(ops_.begin(), ops_.end(), [](const DeviceOp& op) { return op.kind == OpKind::Opaque; });
}

DeviceGraph::Op Capturer::copy(std::string label, std::function<void()> fn) {
  return graph_.on(std::move(label), nullary(std::move(fn)));
}

LevelTable levelize(const DeviceGraph& graph) {
  const auto& ops = graph.ops();
  const std::size_t n = ops.size();

  LevelTable table;
  table.level.assign(n, 0);
  table.index.assign(n, 0);

  std::vector<std::size_t> indegree(n);
  std::deque<OpId> ready;
  for (OpId v = 0; v < n; ++v) {
    indegree[v] = ops[v].predecessors.size();
    if (indegree[v] == 0) ready.push_back(v);
  }

  std::size_t visited = 0;
  while (!ready.empty()) {
    OpId v = ready.front();
    ready.pop_front();
    ++visited;
    for (OpId s : ops[v].successors) {
      table.level[s] = std::max(table.level[s], table.level[v] + 1);
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  if (visited != n) throw Error(ErrorCode::CycleDetected, "device graph is not acyclic");

  // Walking ids in ascending order gives insertion order within each level.
  for (OpId v = 0; v < n; ++v) {
    std::size_t l = table.level[v];
    if (l >= table.levels.size()) table.levels.resize(l + 1);
    table.index[v] = table.levels[l].size();
    table.levels[l].push_back(v);
  }
  return table;
}

std::size_t StreamSchedule::streams_used() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(streams.begin(), streams.end(), [](const auto& s) { return !s.empty(); }));
}

std::string StreamSchedule::dump() const {
  auto label = [&](OpId id) { return id < labels.size() ? labels[id] : "op" + std::to_string(id); };

  std::ostringstream os;
  for (StreamId s = 0; s < streams.size(); ++s) {
    os << 'S' << s << ':';
    for (std::size_t i = 0; i < streams[s].size(); ++i) os << (i == 0 ? " " : ",") << label(streams[s][i]);
    os << '\n';
  }
  std::vector<std::string> lines;
  lines.reserve(events.size());
  for (const auto& e : events) lines.push_back("E: " + label(e.producer) + "->" + label(e.consumer));
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << '\n';
  return os.str();
}

StreamSchedule make_schedule(const DeviceGraph& graph, std::size_t max_streams) {
  if (max_streams == 0) throw Error(ErrorCode::InvalidConfig, "max_streams must be positive");

  StreamSchedule sched;
  sched.max_streams = max_streams;
  sched.levels = levelize(graph);
  sched.streams.resize(max_streams);

  const auto& ops = graph.ops();
  sched.stream_of.resize(ops.size());
  sched.labels.reserve(ops.size());
  for (const auto& op : ops) {
    sched.stream_of[op.id] = sched.levels.index[op.id] % max_streams;
    sched.labels.push_back(op.label);
  }

  for (const auto& level : sched.levels.levels) {
    for (OpId t : level) {
      const StreamId s = sched.stream_of[t];
      // Same-stream predecessors are already ahead of t in that stream's FIFO.
      for (OpId p : ops[t].predecessors) {
        if (sched.stream_of[p] != s) sched.events.push_back({p, sched.stream_of[p], t, s});
      }
      sched.streams[s].push_back(t);
    }
  }
  return sched;
}

SimTrace simulate(const StreamSchedule& schedule, const LatencyFn& latency) {
  const std::size_t n = schedule.stream_of.size();
  const std::size_t num_streams = schedule.streams.size();

  std::vector<std::vector<OpId>> waits(n);
  for (const auto& e : schedule.events) {
    if (e.consumer >= n || e.producer >= n) throw Error(ErrorCode::UnknownNode, "event references a missing op");
    waits[e.consumer].push_back(e.producer);
  }

  SimTrace trace;
  trace.timing.resize(n);
  std::vector<bool> done(n, false);
  std::vector<std::size_t> head(num_streams, 0);
  std::vector<std::uint64_t> free_at(num_streams, 0);

  std::size_t completed = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    for (StreamId s = 0; s < num_streams; ++s) {
      const auto& list = schedule.streams[s];
      while (head[s] < list.size()) {
        const OpId op = list[head[s]];
        std::uint64_t start = free_at[s];
        bool released = true;
        for (OpId p : waits[op]) {
          if (!done[p]) {
            released = false;
            break;
          }
          start = std::max(start, trace.timing[p].completion + 1);
        }
        if (!released) break;

        const std::uint64_t ticks = latency ? latency(op) : 1;
        if (ticks == 0) throw Error(ErrorCode::InvalidConfig, "op latency must be positive");
        trace.timing[op] = {op, s, start, start + ticks - 1};
        free_at[s] = start + ticks;
        done[op] = true;
        ++completed;
        ++head[s];
        progress = true;
      }
    }
  }

  std::size_t scheduled = 0;
  for (const auto& list : schedule.streams) scheduled += list.size();
  if (completed != scheduled) {
    throw Error(ErrorCode::Deadlock, std::to_string(scheduled - completed) + " ops never released");
  }

  for (const auto& list : schedule.streams) {
    for (OpId op : list) {
      trace.order.push_back(trace.timing[op]);
      trace.makespan = std::max(trace.makespan, trace.timing[op].completion + 1);
    }
  }
  std::sort(trace.order.begin(), trace.order.end(), [](const OpTiming& a, const OpTiming& b) {
    if (a.completion != b.completion) return a.completion < b.completion;
    if (a.stream != b.stream) return a.stream < b.stream;
    return a.start < b.start;
  });
  return trace;
}

std::vector<std::pair<OpId, OpId>> dependency_violations(const DeviceGraph& graph, const SimTrace& trace) {
  std::vector<std::pair<OpId, OpId>> bad;
  for (const auto& op : graph.ops()) {
    for (OpId s : op.successors) {
      if (!(trace.timing.at(op.id).completion < trace.timing.at(s).start)) bad.emplace_back(op.id, s);
    }
  }
  return bad;
}

SimTrace run_device_graph(const DeviceGraph& graph, const DeviceConfig& config) {
  if (graph.empty()) return {};
  StreamSchedule schedule = make_schedule(graph, config.max_streams);
  SimTrace trace = simulate(schedule, config.latency);
  if (auto bad = dependency_violations(graph, trace); !bad.empty()) {
    throw Error(ErrorCode::DependencyViolation,
                graph.op(bad.front().first).label + " -> " + graph.op(bad.front().second).label);
  }
  for (const auto& t : trace.order) {
    const auto& payload = graph.op(t.op).payload;
    if (payload) payload(t.stream);
  }
  return trace;
}

SimTrace execute_deviceflow(const DeviceFlowWork& build, const DeviceConfig& config) {
  DeviceGraph graph;
  if (build) build(graph);
  return run_device_graph(graph, config);
}

SimTrace execute_deviceflow(const CaptureWork& build, const DeviceConfig& config) {
  Capturer capturer;
  if (build) build(capturer);
  return run_device_graph(capturer.graph(), config);
}

}  // namespace htdg
