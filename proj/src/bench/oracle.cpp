// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#include "htdg/bench/oracle.hpp"

#include <deque>
#include <memory>

namespace htdg::bench {

namespace {

class Oracle {
 public:
  Oracle(std::uint64_t limit, const DeviceConfig& device) : limit_(limit), device_(device) {}

  void run(const TaskGraph& g, const std::string& prefix) {
    const auto nodes = g.nodes();
    std::vector<std::size_t> strong(nodes.size());
    for (const auto& n : nodes) strong[n.id] = n.strong_dependents;

    std::deque<NodeId> ready;
    for (NodeId s : g.sources()) ready.push_back(s);

    while (!ready.empty()) {
      const TaskNode& n = nodes[ready.front()];
      ready.pop_front();
      if (++trace_.steps > limit_) {
        throw Error(ErrorCode::NonTermination, "step limit of " + std::to_string(limit_) + " reached");
      }
      const std::string label = prefix + (n.name.empty() ? "n" + std::to_string(n.id) : n.name);
      trace_.order.emplace_back(label, ++trace_.counts[label]);
      strong[n.id] = n.strong_dependents;

      switch (n.kind) {
        case TaskKind::Static:
          if (const auto& fn = std::get<StaticWork>(n.work)) fn();
          break;
        case TaskKind::Condition: {
          const auto& fn = std::get<ConditionWork>(n.work);
          const int r = fn ? fn() : 0;
          if (r < 0 || static_cast<std::size_t>(r) >= n.successors.size()) {
            throw Error(ErrorCode::ConditionIndexOutOfRange, label + " returned " + std::to_string(r));
          }
          ready.push_back(n.successors[static_cast<std::size_t>(r)]);
          continue;
        }
        case TaskKind::DeviceFlow:
          if (const auto* build = std::get_if<DeviceFlowWork>(&n.work)) {
            execute_deviceflow(*build, device_);
          } else {
            execute_deviceflow(std::get<CaptureWork>(n.work), device_);
          }
          break;
        case TaskKind::Subflow: {
          Subflow sf(g.num_domains(), n.name);
          if (const auto& fn = std::get<SubflowWork>(n.work)) fn(sf);
          sf.finalize();
          run(sf, label + "/");
          break;
        }
        case TaskKind::Module:
          run(*std::get<ModuleRef>(n.work).graph, label + "/");
          break;
      }
      for (NodeId s : n.successors) {
        if (--strong[s] == 0) ready.push_back(s);
      }
    }
  }

  OracleTrace take() { return std::move(trace_); }

 private:
  std::uint64_t limit_;
  DeviceConfig device_;
  OracleTrace trace_;
};

}  // namespace

OracleTrace sequential_oracle(const TaskGraph& graph, std::uint64_t step_limit, const DeviceConfig& device) {
  if (!graph.finalized()) throw Error(ErrorCode::NotFinalized, "graph '" + graph.name() + "'");
  Oracle o(step_limit, device);
  o.run(graph, "");
  return o.take();
}

}  // namespace htdg::bench
