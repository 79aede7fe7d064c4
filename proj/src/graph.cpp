// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#include "htdg/graph.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <ostream>
#include <sstream>
#include <tuple>

namespace htdg {

std::string_view to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::Static: return "static";
    case TaskKind::Subflow: return "subflow";
    case TaskKind::Module: return "module";
    case TaskKind::Condition: return "condition";
    case TaskKind::DeviceFlow: return "deviceflow";
  }
  return "?";
}

std::string_view to_string(Severity s) noexcept {
  return s == Severity::Error ? "error" : "warning";
}

std::string_view to_string(DiagnosticCode c) noexcept {
  switch (c) {
    case DiagnosticCode::NoSource: return "NoSource";
    case DiagnosticCode::PossibleRace: return "PossibleRace";
    case DiagnosticCode::DanglingCondition: return "DanglingCondition";
    case DiagnosticCode::ConcurrentModuleUse: return "ConcurrentModuleUse";
  }
  return "?";
}

namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(d.code)) + " (" + d.message + ")";
  }
  return out;
}

bool matches(TaskKind kind, const Callable& work) {
  switch (kind) {
    case TaskKind::Static: return std::holds_alternative<StaticWork>(work);
    case TaskKind::Condition: return std::holds_alternative<ConditionWork>(work);
    case TaskKind::Subflow: return std::holds_alternative<SubflowWork>(work);
    case TaskKind::Module: return std::holds_alternative<ModuleRef>(work);
    case TaskKind::DeviceFlow:
      return std::holds_alternative<DeviceFlowWork>(work) || std::holds_alternative<CaptureWork>(work);
  }
  return false;
}

constexpr std::size_t kIndexThreshold = 16;

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : Error(ErrorCode::ValidationFailed, summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

// --- Task ------------------------------------------------------------------

Task& Task::name(std::string name) {
  graph_->set_name(id_, std::move(name));
  return *this;
}

const std::string& Task::name() const { return graph_->node(id_).name; }
TaskKind Task::kind() const { return graph_->node(id_).kind; }
DomainId Task::domain() const { return graph_->node(id_).domain; }

// --- TaskGraph -------------------------------------------------------------

TaskGraph::TaskGraph(std::string name, std::size_t num_domains)
    : name_(std::move(name)), num_domains_(num_domains) {
  if (num_domains_ == 0) throw Error(ErrorCode::InvalidConfig, "a graph needs at least one domain");
}

TaskGraph::TaskGraph(TaskGraph&& other) noexcept
    : name_(std::move(other.name_)),
      num_domains_(other.num_domains_),
      nodes_(std::move(other.nodes_)),
      children_(std::move(other.children_)),
      sources_(std::move(other.sources_)),
      num_edges_(other.num_edges_),
      finalized_(other.finalized_) {
  other.num_edges_ = 0;
  other.finalized_ = false;
}

TaskGraph& TaskGraph::operator=(TaskGraph&& other) noexcept {
  if (this != &other) {
    name_ = std::move(other.name_);
    num_domains_ = other.num_domains_;
    nodes_ = std::move(other.nodes_);
    children_ = std::move(other.children_);
    sources_ = std::move(other.sources_);
    num_edges_ = other.num_edges_;
    finalized_ = other.finalized_;
    other.num_edges_ = 0;
    other.finalized_ = false;
  }
  return *this;
}

void TaskGraph::require_mutable() const {
  if (finalized_) throw Error(ErrorCode::FinalizedGraph, "graph '" + name_ + "' is finalized");
}

const TaskNode& TaskGraph::node(NodeId id) const {
  if (id >= nodes_.size()) throw Error(ErrorCode::UnknownNode, "node " + std::to_string(id));
  return nodes_[id];
}

NodeId TaskGraph::add_task(TaskKind kind, DomainId domain, Callable work) {
  require_mutable();
  if (domain >= num_domains_) {
    throw Error(ErrorCode::UnknownDomain,
                "domain " + std::to_string(domain) + " of " + std::to_string(num_domains_));
  }
  if (!matches(kind, work)) {
    throw Error(ErrorCode::KindMismatch, "callable does not fit a " + std::string(to_string(kind)) + " task");
  }
  if (kind == TaskKind::Module) {
    const TaskGraph* child = std::get<ModuleRef>(work).graph;
    if (child == nullptr) throw Error(ErrorCode::UnknownNode, "module without a graph");
    if (child == this || child->composes(this)) {
      throw Error(ErrorCode::CompositionCycle, "'" + child->name() + "' would compose itself");
    }
    if (!child->finalized()) throw Error(ErrorCode::UnfinalizedChild, "'" + child->name() + "'");
    if (std::find(children_.begin(), children_.end(), child) == children_.end()) children_.push_back(child);
  }

  TaskNode n;
  n.id = nodes_.size();
  n.kind = kind;
  n.domain = domain;
  n.work = std::move(work);
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

Task TaskGraph::compose(const TaskGraph& child, DomainId domain) {
  return task(add_task(TaskKind::Module, domain, ModuleRef{&child}));
}

bool TaskGraph::composes(const TaskGraph* target) const {
  // Composition links form a DAG (enforced on insertion), so a plain DFS
  // terminates; shared children may be visited more than once.
  for (const TaskGraph* c : children_) {
    if (c == target || c->composes(target)) return true;
  }
  return false;
}

Task TaskGraph::task(NodeId id) {
  node(id);
  return Task(this, id);
}

void TaskGraph::set_name(NodeId id, std::string name) {
  node(id);
  nodes_[id].name = std::move(name);
}

void TaskGraph::precede(NodeId from, std::span<const NodeId> to) {
  require_mutable();
  const TaskNode& src = node(from);

  // Check everything first so a failed call leaves the graph untouched.
  for (std::size_t i = 0; i < to.size(); ++i) {
    const NodeId t = to[i];
    node(t);
    if (t == from && src.kind != TaskKind::Condition) {
      throw Error(ErrorCode::SelfLoopOnStrongEdge, "node " + std::to_string(from));
    }
    bool dup = src.successor_index ? src.successor_index->count(t) > 0
                                   : std::find(src.successors.begin(), src.successors.end(), t) !=
                                         src.successors.end();
    dup = dup || std::find(to.begin(), to.begin() + i, t) != to.begin() + i;
    if (dup) {
      throw Error(ErrorCode::DuplicateEdge, std::to_string(from) + " -> " + std::to_string(t));
    }
  }

  TaskNode& s = nodes_[from];
  const bool weak = s.kind == TaskKind::Condition;
  for (NodeId t : to) {
    s.successors.push_back(t);
    if (s.successor_index) {
      s.successor_index->insert(t);
    } else if (s.successors.size() > kIndexThreshold) {
      s.successor_index = std::make_unique<std::unordered_set<NodeId>>(s.successors.begin(), s.successors.end());
    }
    if (weak) {
      ++nodes_[t].weak_dependents;
    } else {
      ++nodes_[t].strong_dependents;
    }
    ++num_edges_;
  }
}

std::vector<NodeId> TaskGraph::sources() const {
  if (finalized_) return sources_;
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.is_source()) out.push_back(n.id);
  }
  return out;
}

DomainId TaskGraph::max_domain_used() const {
  DomainId d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.domain);
  for (const TaskGraph* c : children_) d = std::max(d, c->max_domain_used());
  return d;
}

bool TaskGraph::reaches(NodeId from, NodeId to, NodeId avoid) const {
  if (from == avoid || to == avoid) return false;
  if (from == to) return true;
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> stack{from};
  seen[from] = true;
  if (avoid < seen.size()) seen[avoid] = true;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (NodeId s : nodes_[v].successors) {
      if (s == to) return true;
      if (!seen[s]) {
        seen[s] = true;
        stack.push_back(s);
      }
    }
  }
  return false;
}

std::vector<Diagnostic> TaskGraph::validate() const {
  std::vector<Diagnostic> out;
  const std::size_t n = nodes_.size();
  const NodeId none = n;

  if (n > 0 && sources().empty()) {
    out.push_back({Severity::Error, DiagnosticCode::NoSource, {},
                   "every node has an in-edge; the scheduler has nowhere to start"});
  }

  std::vector<std::vector<NodeId>> preds(n);
  for (const auto& v : nodes_) {
    for (NodeId s : v.successors) preds[s].push_back(v.id);
  }
  auto unrelated = [&](NodeId a, NodeId b) { return !reaches(a, b, none) && !reaches(b, a, none); };

  for (const auto& v : nodes_) {
    if (v.kind == TaskKind::Condition && v.successors.empty()) {
      out.push_back({Severity::Warning, DiagnosticCode::DanglingCondition, {v.id},
                     "condition task has no successor to select"});
    }
    if (v.weak_dependents == 0) continue;

    std::vector<NodeId> strong, weak;
    for (NodeId p : preds[v.id]) (nodes_[p].kind == TaskKind::Condition ? weak : strong).push_back(p);

    // A strong in-edge from u and a weak in-edge from c race when c can fire
    // without u's contribution having been consumed: either u reaches c
    // without passing through v, or the two are unordered altogether.
    std::vector<NodeId> culprits;
    for (NodeId u : strong) {
      for (NodeId c : weak) {
        if (c == v.id) continue;
        if (reaches(u, c, v.id) || unrelated(u, c)) {
          culprits = {u, c};
          break;
        }
      }
      if (!culprits.empty()) break;
    }
    for (std::size_t i = 0; culprits.empty() && i < weak.size(); ++i) {
      for (std::size_t j = i + 1; j < weak.size(); ++j) {
        if (weak[i] != v.id && weak[j] != v.id && unrelated(weak[i], weak[j])) {
          culprits = {weak[i], weak[j]};
          break;
        }
      }
    }
    if (!culprits.empty()) {
      out.push_back({Severity::Warning, DiagnosticCode::PossibleRace, {v.id, culprits[0], culprits[1]},
                     "node " + std::to_string(v.id) + " may be scheduled by " + std::to_string(culprits[0]) +
                         " and " + std::to_string(culprits[1]) + " independently"});
    }
  }

  for (NodeId a = 0; a < n; ++a) {
    if (nodes_[a].kind != TaskKind::Module) continue;
    for (NodeId b = a + 1; b < n; ++b) {
      if (nodes_[b].kind != TaskKind::Module) continue;
      if (std::get<ModuleRef>(nodes_[a].work).graph != std::get<ModuleRef>(nodes_[b].work).graph) continue;
      if (unrelated(a, b)) {
        out.push_back({Severity::Warning, DiagnosticCode::ConcurrentModuleUse, {a, b},
                       "modules over the same graph may run concurrently"});
      }
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Diagnostic& x, const Diagnostic& y) {
    auto key = [](const Diagnostic& d) { return d.nodes.empty() ? NodeId{0} : d.nodes.front(); };
    return std::make_tuple(key(x), x.code) < std::make_tuple(key(y), y.code);
  });
  return out;
}

void TaskGraph::finalize() {
  if (finalized_) return;
  auto diagnostics = validate();
  std::vector<Diagnostic> errors;
  std::copy_if(diagnostics.begin(), diagnostics.end(), std::back_inserter(errors),
               [](const Diagnostic& d) { return d.severity == Severity::Error; });
  if (!errors.empty()) throw ValidationError(std::move(errors));
  sources_ = sources();
  finalized_ = true;
}

// --- DOT -------------------------------------------------------------------

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

void TaskGraph::export_dot(std::ostream& os) const {
  if (nodes_.empty()) {
    os << "digraph {}\n";
    return;
  }
  std::vector<std::string> ids;
  ids.reserve(nodes_.size());
  for (const auto& v : nodes_) {
    if (v.name.empty()) {
      ids.push_back("n" + std::to_string(v.id));
    } else {
      ids.push_back(is_identifier(v.name) ? v.name : quoted(v.name));
    }
  }

  os << "digraph {\n";
  for (const auto& v : nodes_) {
    os << "  " << ids[v.id];
    switch (v.kind) {
      case TaskKind::Condition: os << " [shape=diamond]"; break;
      case TaskKind::Module: os << " [shape=box3d]"; break;
      case TaskKind::Subflow: os << " [style=bold]"; break;
      case TaskKind::DeviceFlow: {
        std::string label = (v.name.empty() ? "n" + std::to_string(v.id) : v.name) + " @d" + std::to_string(v.domain);
        os << " [shape=box, label=" << quoted(label) << "]";
        break;
      }
      case TaskKind::Static: break;
    }
    os << ";\n";
  }
  for (const auto& v : nodes_) {
    for (NodeId s : v.successors) {
      os << "  " << ids[v.id] << " -> " << ids[s];
      if (v.kind == TaskKind::Condition) os << " [style=dashed]";
      os << ";\n";
    }
  }
  os << "}\n";
}

std::string TaskGraph::export_dot() const {
  std::ostringstream os;
  export_dot(os);
  return os.str();
}

}  // namespace htdg
