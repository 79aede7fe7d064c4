// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#include "htdg/executor.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "htdg/detail/scheduler.hpp"

namespace htdg {

namespace {

thread_local detail::Worker* tls_worker = nullptr;
thread_local const detail::Scheduler* tls_scheduler = nullptr;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(TraceKind kind) noexcept {
  switch (kind) {
    case TraceKind::Exec: return "EXEC";
    case TraceKind::Submit: return "SUBMIT";
    case TraceKind::StealOk: return "STEAL_OK";
    case TraceKind::StealFail: return "STEAL_FAIL";
    case TraceKind::Notify: return "NOTIFY";
    case TraceKind::Park: return "PARK";
    case TraceKind::Unpark: return "UNPARK";
    case TraceKind::ActiveInc: return "ACTIVE_INC";
    case TraceKind::ActiveDec: return "ACTIVE_DEC";
  }
  return "?";
}

std::string format(const TraceEvent& e) {
  auto victim = [](std::int64_t v) { return v < 0 ? std::string("shared") : std::to_string(v); };
  std::string arg;
  switch (e.kind) {
    case TraceKind::Exec:
      arg = "f" + std::to_string(e.a) + ":n" + std::to_string(e.b);
      break;
    case TraceKind::Submit:
      arg = "f" + std::to_string(e.a) + ":n" + std::to_string(e.b) + ",d=" + std::to_string(e.domain);
      break;
    case TraceKind::StealOk:
      arg = "v=" + victim(e.a);
      break;
    case TraceKind::StealFail:
      arg = "v=" + victim(e.a) + ",retry=" + std::to_string(e.b);
      break;
    case TraceKind::Notify:
      arg = "d=" + std::to_string(e.domain) + ",all=" + std::to_string(e.a);
      break;
    case TraceKind::Park:
    case TraceKind::Unpark:
      arg = "d=" + std::to_string(e.domain);
      break;
    case TraceKind::ActiveInc:
      arg = "d=" + std::to_string(e.domain) + ",a=" + std::to_string(e.a);
      if (e.b >= 0) arg += ",t=" + std::to_string(e.b);
      break;
    case TraceKind::ActiveDec:
      arg = "d=" + std::to_string(e.domain) + ",a=" + std::to_string(e.a);
      break;
  }
  return std::to_string(e.ns) + ' ' + std::to_string(e.worker) + ' ' + std::string(to_string(e.kind)) + ' ' + arg;
}

namespace detail {

// --- frames and runs ---------------------------------------------------------

Frame::Frame(RunState* r, const TaskGraph* g, std::uint64_t s) : run(r), graph(g), serial(s) {
  const std::size_t n = g->size();
  strong.reset(new std::atomic<std::size_t>[n]);
  slots.reset(new Slot[n]);
  for (NodeId i = 0; i < n; ++i) {
    strong[i].store(g->nodes()[i].strong_dependents, std::memory_order_relaxed);
    slots[i] = {this, i};
  }
}

RunState::RunState(Scheduler* s, const TaskGraph* g) : sched(s), graph(g) {}

void RunState::fail(std::exception_ptr e) {
  {
    std::lock_guard lk(mu);
    if (!error) error = std::move(e);
  }
  cancelled_.store(true, std::memory_order_relaxed);
}

// --- construction ------------------------------------------------------------

Scheduler::Scheduler(ExecutorConfig config, bool spawn_threads)
    : config_(std::move(config)), epoch_(std::chrono::steady_clock::now()) {
  if (config_.workers_per_domain.empty()) throw Error(ErrorCode::InvalidConfig, "no domains configured");
  for (std::size_t n : config_.workers_per_domain) {
    if (n == 0) throw Error(ErrorCode::InvalidConfig, "every domain needs at least one worker");
  }
  if (config_.max_steals_multiplier == 0) throw Error(ErrorCode::InvalidConfig, "max_steals_multiplier is zero");
  if (config_.max_streams == 0) throw Error(ErrorCode::InvalidConfig, "max_streams is zero");

  const std::size_t num_domains = config_.workers_per_domain.size();
  std::size_t total = 0;
  for (std::size_t n : config_.workers_per_domain) total += n;
  max_steals_ = config_.max_steals_multiplier * total;

  for (DomainId d = 0; d < num_domains; ++d) {
    domains_.push_back(std::make_unique<DomainState>());
    notifiers_.push_back(std::make_unique<Notifier>(total));
    shared_.push_back(std::make_unique<WorkDeque<Slot*>>());
  }
  for (DomainId d = 0; d < num_domains; ++d) {
    for (std::size_t i = 0; i < config_.workers_per_domain[d]; ++i) {
      auto w = std::make_unique<Worker>();
      w->id = workers_.size();
      w->domain = d;
      for (DomainId q = 0; q < num_domains; ++q) w->queues.push_back(std::make_unique<WorkDeque<Slot*>>());
      w->rng.seed(splitmix64(config_.rng_seed ^ splitmix64(w->id)));
      workers_.push_back(std::move(w));
    }
  }

  if (!spawn_threads) return;
  threads_.reserve(total);
  for (auto& w : workers_) {
    threads_.emplace_back([this, wp = w.get()] {
      tls_worker = wp;
      tls_scheduler = this;
      worker_loop(*wp);
    });
  }
  if (config_.instrument && config_.sample_interval.count() > 0) {
    sampler_ = std::thread([this] { sample_loop(); });
  }
}

Scheduler::~Scheduler() { shutdown(); }

void Scheduler::shutdown() {
  wait_for_all();
  if (stop_.exchange(true, std::memory_order_seq_cst)) return;
  for (auto& n : notifiers_) n->notify_all();
  samples_cv_.notify_all();
  for (auto& t : threads_) t.join();
  threads_.clear();
  if (sampler_.joinable()) sampler_.join();
}

void Scheduler::wait_for_all() {
  std::unique_lock lk(runs_mu_);
  runs_cv_.wait(lk, [&] { return runs_.empty(); });
}

Worker* Scheduler::this_worker() const noexcept { return tls_scheduler == this ? tls_worker : nullptr; }

std::uint64_t Scheduler::now_ns() const noexcept {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - epoch_).count());
}

void Scheduler::record(Worker* w, TraceKind kind, std::int64_t domain, std::int64_t a, std::int64_t b) {
  if (!config_.trace) return;
  TraceEvent e{now_ns(), w ? static_cast<std::int64_t>(w->id) : -1, kind, domain, a, b};
  if (w) {
    std::lock_guard lk(w->trace_mu);
    w->trace.push_back(e);
  } else {
    std::lock_guard lk(external_trace_mu_);
    external_trace_.push_back(e);
  }
}

void Scheduler::notify(Worker* w, DomainId d, bool all) {
  record(w, TraceKind::Notify, static_cast<std::int64_t>(d), all ? 1 : 0);
  if (w) {
    w->stats.notifications.add();
  } else {
    std::lock_guard lk(external_trace_mu_);
    external_notifications_.add();
  }
  notifiers_[d]->notify(all);
}

// --- worker loop -------------------------------------------------------------

void Scheduler::worker_loop(Worker& w) {
  Slot* t = nullptr;
  while (true) {
    exploit_task(w, t);
    if (!wait_for_task(w, t)) break;
  }
}

// --- exploit -----------------------------------------------------------------

void Scheduler::exploit_task(Worker& w, Slot*& t) {
  if (t == nullptr) return;
  const DomainId d = w.domain;
  DomainState& ds = *domains_[d];

  // actives first, then thieves: the wait path tests them in the mirror order.
  const std::size_t a = ds.actives.fetch_add(1, std::memory_order_seq_cst) + 1;
  if (a == 1) {
    const std::size_t th = ds.thieves.load(std::memory_order_seq_cst);
    record(&w, TraceKind::ActiveInc, static_cast<std::int64_t>(d), 1, static_cast<std::int64_t>(th));
    if (th == 0) notify(&w, d, false);
  } else {
    record(&w, TraceKind::ActiveInc, static_cast<std::int64_t>(d), static_cast<std::int64_t>(a), -1);
  }

  do {
    execute_task(w, t);
    auto next = w.queues[d]->pop();
    t = next ? *next : nullptr;
  } while (t != nullptr);

  const std::size_t left = ds.actives.fetch_sub(1, std::memory_order_seq_cst) - 1;
  record(&w, TraceKind::ActiveDec, static_cast<std::int64_t>(d), static_cast<std::int64_t>(left));
}

// --- execute -----------------------------------------------------------------

void Scheduler::execute_task(Worker& w, Slot* t) {
  Frame* f = t->frame;
  const NodeId id = t->node;
  const TaskNode& node = f->graph->nodes()[id];
  RunState* run = f->run;

  record(&w, TraceKind::Exec, static_cast<std::int64_t>(node.domain), static_cast<std::int64_t>(f->serial),
         static_cast<std::int64_t>(id));
  w.stats.tasks.add();
  // Re-arm for the next time a loop reaches this node.
  f->strong[id].store(node.strong_dependents, std::memory_order_relaxed);

  if (run->cancelled()) {
    release(&w, f);
    return;
  }

  try {
    switch (node.kind) {
      case TaskKind::Static: {
        const auto& fn = std::get<StaticWork>(node.work);
        if (fn) fn();
        finish_task(w, f, id);
        break;
      }
      case TaskKind::Condition: {
        const auto& fn = std::get<ConditionWork>(node.work);
        const int r = fn ? fn() : 0;
        if (r < 0 || static_cast<std::size_t>(r) >= node.successors.size()) {
          throw Error(ErrorCode::ConditionIndexOutOfRange,
                      "node " + std::to_string(id) + " returned " + std::to_string(r) + " with " +
                          std::to_string(node.successors.size()) + " successors");
        }
        // Weak edge: jump straight to the chosen successor.
        Slot* s = &f->slots[node.successors[static_cast<std::size_t>(r)]];
        f->pending.fetch_add(1, std::memory_order_relaxed);
        inflight_.fetch_add(1, std::memory_order_relaxed);
        submit_task(w, s);
        release(&w, f);
        break;
      }
      case TaskKind::DeviceFlow: {
        DeviceConfig dc{config_.max_streams, config_.device_latency};
        if (const auto* build = std::get_if<DeviceFlowWork>(&node.work)) {
          execute_deviceflow(*build, dc);
        } else {
          execute_deviceflow(std::get<CaptureWork>(node.work), dc);
        }
        finish_task(w, f, id);
        break;
      }
      case TaskKind::Subflow: {
        auto sf = std::make_unique<Subflow>(num_domains(), node.name);
        const auto& fn = std::get<SubflowWork>(node.work);
        if (fn) fn(*sf);
        sf->finalize();
        if (sf->max_domain_used() >= num_domains()) {
          throw Error(ErrorCode::UnknownDomain, "subflow uses a domain without workers");
        }
        if (sf->empty()) {
          finish_task(w, f, id);
          break;
        }
        Frame* child = make_frame(run, sf.get());
        child->owned = std::move(sf);
        child->parent = f;
        child->parent_node = id;
        child->joined = !child->owned->detached();
        if (!child->joined) {
          // The detached child holds the parent frame open, not the node.
          f->pending.fetch_add(1, std::memory_order_relaxed);
          finish_task(w, f, id);
        }
        start_frame(&w, child);
        break;
      }
      case TaskKind::Module: {
        const TaskGraph* g = std::get<ModuleRef>(node.work).graph;
        if (g->empty()) {
          finish_task(w, f, id);
          break;
        }
        Frame* child = make_frame(run, g);
        child->parent = f;
        child->parent_node = id;
        start_frame(&w, child);
        break;
      }
    }
  } catch (...) {
    run->fail(std::current_exception());
    release(&w, f);
  }
}

void Scheduler::finish_task(Worker& w, Frame* f, NodeId id) {
  const TaskNode& node = f->graph->nodes()[id];
  for (NodeId s : node.successors) {
    if (f->strong[s].fetch_sub(1, std::memory_order_acq_rel) == 1) {
      f->pending.fetch_add(1, std::memory_order_relaxed);
      inflight_.fetch_add(1, std::memory_order_relaxed);
      submit_task(w, &f->slots[s]);
    }
  }
  release(&w, f);
}

void Scheduler::release(Worker* w, Frame* f) {
  inflight_.fetch_sub(1, std::memory_order_relaxed);
  if (f->pending.fetch_sub(1, std::memory_order_acq_rel) == 1) frame_done(w, f);
}

Frame* Scheduler::make_frame(RunState* run, const TaskGraph* graph) {
  return new Frame(run, graph, frame_serial_.fetch_add(1, std::memory_order_relaxed));
}

void Scheduler::start_frame(Worker* w, Frame* f) {
  // The extra unit keeps the frame alive until every source is queued.
  f->pending.store(1, std::memory_order_relaxed);
  const auto sources = f->graph->sources();
  if (w != nullptr && f->parent != nullptr) {
    for (NodeId s : sources) {
      f->pending.fetch_add(1, std::memory_order_relaxed);
      inflight_.fetch_add(1, std::memory_order_relaxed);
      submit_task(*w, &f->slots[s]);
    }
  } else {
    // Sources go to the shared queues.
    std::scoped_lock lk(queue_mutex_);
    for (NodeId s : sources) {
      const DomainId d = f->graph->nodes()[s].domain;
      f->pending.fetch_add(1, std::memory_order_relaxed);
      inflight_.fetch_add(1, std::memory_order_relaxed);
      shared_[d]->push(&f->slots[s]);
      record(w, TraceKind::Submit, static_cast<std::int64_t>(d), static_cast<std::int64_t>(f->serial),
             static_cast<std::int64_t>(s));
      notify(w, d, false);
    }
  }
  if (f->pending.fetch_sub(1, std::memory_order_acq_rel) == 1) frame_done(w, f);
}

void Scheduler::frame_done(Worker* w, Frame* f) {
  if (f->parent == nullptr) {
    complete_run(f->run);
    return;
  }
  Frame* parent = f->parent;
  const NodeId node = f->parent_node;
  const bool joined = f->joined;
  delete f;
  if (joined) {
    finish_task(*w, parent, node);
  } else if (parent->pending.fetch_sub(1, std::memory_order_acq_rel) == 1) {
    frame_done(w, parent);
  }
}

void Scheduler::complete_run(RunState* run) {
  std::shared_ptr<RunState> self;
  {
    std::lock_guard lk(runs_mu_);
    auto it = runs_.find(run);
    self = std::move(it->second);
    runs_.erase(it);
  }
  run->graph->end_run();
  {
    std::lock_guard lk(run->mu);
    run->done = true;
  }
  run->cv.notify_all();
  std::lock_guard lk(runs_mu_);
  runs_cv_.notify_all();
}

// --- submit ------------------------------------------------------------------

void Scheduler::submit_task(Worker& w, Slot* t) {
  const DomainId dt = t->frame->graph->nodes()[t->node].domain;
  w.queues[dt]->push(t);
  record(&w, TraceKind::Submit, static_cast<std::int64_t>(dt), static_cast<std::int64_t>(t->frame->serial),
         static_cast<std::int64_t>(t->node));
  if (dt != w.domain) {
    // Pairs with the fence a last thief issues before scanning the queues.
    std::atomic_thread_fence(std::memory_order_seq_cst);
    DomainState& ds = *domains_[dt];
    if (ds.actives.load(std::memory_order_seq_cst) == 0 && ds.thieves.load(std::memory_order_seq_cst) == 0) {
      notify(&w, dt, false);
    }
  }
}

// --- wait --------------------------------------------------------------------

bool Scheduler::wait_for_task(Worker& w, Slot*& t) {
  const DomainId d = w.domain;
  DomainState& ds = *domains_[d];
  Notifier& nt = *notifiers_[d];

  auto become_active = [&] {
    if (ds.thieves.fetch_sub(1, std::memory_order_seq_cst) == 1) notify(&w, d, false);
    return true;
  };

explore_from_start:
  ds.thieves.fetch_add(1, std::memory_order_seq_cst);

explore:
  t = explore_task(w);
  if (t != nullptr) return become_active();

  nt.prepare_wait(w.id);

  if (!shared_[d]->empty()) {
    nt.cancel_wait(w.id);
    auto r = shared_[d]->steal();
    w.stats.steal_attempts.add();
    if (r) {
      w.stats.steals_ok.add();
      record(&w, TraceKind::StealOk, static_cast<std::int64_t>(d), -1);
      t = r.item;
      return become_active();
    }
    if (r.status == StealStatus::Retry) w.stats.steal_retries.add();
    record(&w, TraceKind::StealFail, static_cast<std::int64_t>(d), -1, r.status == StealStatus::Retry);
    goto explore;  // thieves is still held
  }

  if (stop_.load(std::memory_order_seq_cst)) {
    nt.cancel_wait(w.id);
    for (DomainId x = 0; x < domains_.size(); ++x) notify(&w, x, true);
    ds.thieves.fetch_sub(1, std::memory_order_seq_cst);
    return false;
  }

  if (ds.thieves.fetch_sub(1, std::memory_order_seq_cst) == 1) {
    std::atomic_thread_fence(std::memory_order_seq_cst);
    bool work_left = ds.actives.load(std::memory_order_seq_cst) > 0;
    for (std::size_t x = 0; !work_left && x < workers_.size(); ++x) work_left = !workers_[x]->queues[d]->empty();
    if (work_left) {
      nt.cancel_wait(w.id);
      goto explore_from_start;  // thieves was released above
    }
  }

  record(&w, TraceKind::Park, static_cast<std::int64_t>(d));
  w.stats.parks.add();
  nt.commit_wait(w.id);
  record(&w, TraceKind::Unpark, static_cast<std::int64_t>(d));
  return true;
}

// --- explore -----------------------------------------------------------------

Slot* Scheduler::explore_task(Worker& w) {
  const DomainId d = w.domain;
  const std::size_t others = workers_.size() - 1;
  // Victims: every other worker's queue for this domain, then the shared one.
  std::uniform_int_distribution<std::size_t> pick(0, others);

  w.stats.explore_calls.add();
  std::uint64_t failed = 0;
  Slot* out = nullptr;
  for (std::size_t steals = 0; out == nullptr && steals < max_steals_; ++steals) {
    std::this_thread::yield();
    const std::size_t r = pick(w.rng);
    std::int64_t victim = -1;
    StealResult<Slot*> res;
    if (r == others) {
      res = shared_[d]->steal();
    } else {
      const std::size_t x = r < w.id ? r : r + 1;
      victim = static_cast<std::int64_t>(x);
      res = workers_[x]->queues[d]->steal();
    }
    w.stats.steal_attempts.add();
    if (res) {
      w.stats.steals_ok.add();
      record(&w, TraceKind::StealOk, static_cast<std::int64_t>(d), victim);
      out = res.item;
    } else {
      ++failed;
      if (res.status == StealStatus::Retry) w.stats.steal_retries.add();
      record(&w, TraceKind::StealFail, static_cast<std::int64_t>(d), victim, res.status == StealStatus::Retry);
    }
  }
  w.stats.max_failed_per_explore.max(failed);
  return out;
}

// --- submit graph ------------------------------------------------------------

RunHandle Scheduler::submit_graph(const TaskGraph& graph) {
  if (!graph.finalized()) throw Error(ErrorCode::NotFinalized, "graph '" + graph.name() + "'");
  if (graph.max_domain_used() >= num_domains()) {
    throw Error(ErrorCode::UnknownDomain, "graph '" + graph.name() + "' uses a domain without workers");
  }
  if (!graph.try_begin_run()) {
    throw Error(ErrorCode::SecondConcurrentRun, "graph '" + graph.name() + "' is already running");
  }

  auto run = std::make_shared<RunState>(this, &graph);
  run->root.reset(make_frame(run.get(), &graph));
  {
    std::lock_guard lk(runs_mu_);
    runs_.emplace(run.get(), run);
  }
  start_frame(this_worker(), run->root.get());
  return RunHandle(run);
}

// --- metrics -----------------------------------------------------------------

void Scheduler::sample_loop() {
  std::unique_lock lk(samples_mu_);
  while (!stop_.load(std::memory_order_relaxed)) {
    samples_cv_.wait_for(lk, config_.sample_interval);
    bool busy;
    {
      std::lock_guard rl(runs_mu_);
      busy = !runs_.empty();
    }
    if (!busy) continue;
    const std::uint64_t ns = now_ns();
    for (DomainId d = 0; d < domains_.size(); ++d) {
      samples_.push_back({ns, d, domains_[d]->actives.load(std::memory_order_relaxed),
                          domains_[d]->thieves.load(std::memory_order_relaxed)});
    }
  }
}

MetricsReport Scheduler::metrics() const {
  if (!config_.instrument) throw Error(ErrorCode::NotInstrumented, "executor was built without instrument");
  MetricsReport m;
  m.max_steals = max_steals_;
  for (const auto& w : workers_) {
    const auto& s = w->stats;
    m.tasks_executed += s.tasks.get();
    m.steal_attempts_total += s.steal_attempts.get();
    m.steals_successful += s.steals_ok.get();
    m.steal_retries += s.steal_retries.get();
    m.notifications_sent += s.notifications.get();
    m.parks += s.parks.get();
    m.explore_calls += s.explore_calls.get();
    m.max_wasteful_per_explore = std::max(m.max_wasteful_per_explore, s.max_failed_per_explore.get());
  }
  m.notifications_sent += external_notifications_.get();
  m.wasteful_steals = m.steal_attempts_total - m.steals_successful;
  {
    std::lock_guard lk(const_cast<std::mutex&>(samples_mu_));
    m.samples = samples_;
  }
  return m;
}

void Scheduler::reset_metrics() {
  for (auto& w : workers_) {
    auto& s = w->stats;
    for (auto* c : {&s.tasks, &s.steal_attempts, &s.steals_ok, &s.steal_retries, &s.notifications, &s.parks,
                    &s.explore_calls, &s.max_failed_per_explore}) {
      c->reset();
    }
  }
  external_notifications_.reset();
  std::lock_guard lk(samples_mu_);
  samples_.clear();
}

std::vector<std::vector<TraceEvent>> Scheduler::trace_by_worker() const {
  std::vector<std::vector<TraceEvent>> out;
  for (const auto& w : workers_) {
    std::lock_guard lk(w->trace_mu);
    out.push_back(w->trace);
  }
  std::lock_guard lk(const_cast<std::mutex&>(external_trace_mu_));
  out.push_back(external_trace_);
  return out;
}

void Scheduler::clear_trace() {
  for (auto& w : workers_) {
    std::lock_guard lk(w->trace_mu);
    w->trace.clear();
  }
  std::lock_guard lk(external_trace_mu_);
  external_trace_.clear();
}

}  // namespace detail

// --- public facade -----------------------------------------------------------

void RunHandle::wait() const {
  if (!state_) return;
  if (tls_worker != nullptr) {
    throw Error(ErrorCode::WaitFromWorker, "waiting on a run from a worker thread can deadlock");
  }
  std::unique_lock lk(state_->mu);
  state_->cv.wait(lk, [&] { return state_->done; });
  if (state_->error) std::rethrow_exception(state_->error);
}

bool RunHandle::wait_for(std::chrono::milliseconds timeout) const {
  if (!state_) return true;
  if (tls_worker != nullptr) {
    throw Error(ErrorCode::WaitFromWorker, "waiting on a run from a worker thread can deadlock");
  }
  std::unique_lock lk(state_->mu);
  if (!state_->cv.wait_for(lk, timeout, [&] { return state_->done; })) return false;
  if (state_->error) std::rethrow_exception(state_->error);
  return true;
}

bool RunHandle::done() const {
  if (!state_) return true;
  std::lock_guard lk(state_->mu);
  return state_->done;
}

Executor::Executor(ExecutorConfig config) : sched_(std::make_unique<detail::Scheduler>(std::move(config), true)) {}

Executor::Executor(std::size_t num_workers) : Executor([&] {
  ExecutorConfig c;
  c.workers_per_domain = {num_workers};
  return c;
}()) {}

Executor::~Executor() = default;

RunHandle Executor::run(const TaskGraph& graph) { return sched_->submit_graph(graph); }
void Executor::wait_for_all() { sched_->wait_for_all(); }
std::size_t Executor::num_workers() const noexcept { return sched_->num_workers(); }
std::size_t Executor::num_domains() const noexcept { return sched_->num_domains(); }
std::size_t Executor::max_steals() const noexcept { return sched_->max_steals(); }
const ExecutorConfig& Executor::config() const noexcept { return sched_->config(); }
MetricsReport Executor::metrics() const { return sched_->metrics(); }
void Executor::reset_metrics() { sched_->reset_metrics(); }
std::size_t Executor::inflight() const noexcept { return sched_->inflight(); }

std::vector<std::vector<TraceEvent>> Executor::trace_by_worker() const { return sched_->trace_by_worker(); }

std::vector<TraceEvent> Executor::trace() const {
  std::vector<TraceEvent> all;
  for (auto& stream : sched_->trace_by_worker()) all.insert(all.end(), stream.begin(), stream.end());
  std::stable_sort(all.begin(), all.end(), [](const TraceEvent& a, const TraceEvent& b) {
    return a.ns != b.ns ? a.ns < b.ns : a.worker < b.worker;
  });
  return all;
}

void Executor::write_trace(std::ostream& os) const {
  for (const auto& e : trace()) os << format(e) << '\n';
}

void Executor::clear_trace() { sched_->clear_trace(); }

}  // namespace htdg
