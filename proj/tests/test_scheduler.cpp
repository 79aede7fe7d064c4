// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

// Drives a scheduler built without worker threads one algorithm step at a
// time from the test thread.

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "htdg/detail/scheduler.hpp"
#include "htdg/executor.hpp"

using namespace htdg;
using detail::Scheduler;
using detail::Slot;
using detail::Worker;

namespace {

ExecutorConfig traced(std::vector<std::size_t> workers) {
  ExecutorConfig c;
  c.workers_per_domain = std::move(workers);
  c.trace = true;
  c.instrument = true;
  return c;
}

std::vector<std::string> kinds(const std::vector<TraceEvent>& evs) {
  std::vector<std::string> out;
  for (const auto& e : evs) out.emplace_back(to_string(e.kind));
  return out;
}

// One scheduling decision: worker `w` takes a task from `source` and runs it.
// source == -1 is the shared queue, source == w pops the worker's own deque,
// anything else steals from that worker.
struct Action {
  std::size_t w;
  int source;
};

// Builds a graph that appends executed labels to a log, drives a fresh
// threadless scheduler through `path` and reports the actions available
// afterwards.
struct Replay {
  using Builder = std::function<void(TaskGraph&, std::vector<std::string>&)>;

  Replay(const Builder& build, std::size_t workers, const std::vector<Action>& path)
      : sched(config(workers), false) {
    build(graph, log);
    graph.finalize();
    handle = sched.submit_graph(graph);
    for (const auto& a : path) apply(a);
  }

  // A scheduler only shuts down once its runs are over.
  ~Replay() {
    for (auto next = available(); !next.empty(); next = available()) apply(next.front());
  }

  static ExecutorConfig config(std::size_t workers) {
    ExecutorConfig c;
    c.workers_per_domain = {workers};
    return c;
  }

  std::optional<Slot*> take(const Action& a) {
    Worker& w = sched.worker(a.w);
    if (a.source == static_cast<int>(a.w)) return w.queues[0]->pop();
    auto r = a.source < 0 ? sched.shared_queue(0).steal()
                          : sched.worker(static_cast<std::size_t>(a.source)).queues[0]->steal();
    if (r) return r.item;
    return std::nullopt;
  }

  void apply(const Action& a) {
    auto t = take(a);
    REQUIRE(t.has_value());
    sched.execute_task(sched.worker(a.w), *t);
  }

  std::vector<Action> available() {
    std::vector<Action> out;
    const std::size_t n = sched.num_workers();
    for (std::size_t w = 0; w < n; ++w) {
      if (!sched.shared_queue(0).empty()) out.push_back({w, -1});
      for (std::size_t v = 0; v < n; ++v) {
        if (!sched.worker(v).queues[0]->empty()) out.push_back({w, static_cast<int>(v)});
      }
    }
    return out;
  }

  TaskGraph graph;
  std::vector<std::string> log;
  Scheduler sched;
  RunHandle handle;
};

struct Explored {
  std::size_t paths = 0;
  std::set<std::vector<std::string>> orders;
};

// Depth-first over every sequence of scheduling decisions; each complete path
// is handed to `check`.
void explore_all(const Replay::Builder& build, std::size_t workers, std::vector<Action>& path, Explored& out,
                 const std::function<void(Replay&)>& check) {
  Replay r(build, workers, path);
  auto next = r.available();
  if (next.empty()) {
    ++out.paths;
    out.orders.insert(r.log);
    check(r);
    return;
  }
  for (const auto& a : next) {
    path.push_back(a);
    explore_all(build, workers, path, out, check);
    path.pop_back();
  }
}

StaticWork logging(std::vector<std::string>& log, std::string label) {
  return [&log, label] { log.push_back(label); };
}

}  // namespace

TEST_CASE("every interleaving of a diamond on two workers runs each task once") {
  Replay::Builder diamond = [](TaskGraph& g, std::vector<std::string>& log) {
    auto A = g.emplace(logging(log, "A"));
    auto B = g.emplace(logging(log, "B"));
    auto C = g.emplace(logging(log, "C"));
    auto D = g.emplace(logging(log, "D"));
    A.precede(B, C);
    D.succeed(B, C);
  };
  std::vector<Action> path;
  Explored ex;
  explore_all(diamond, 2, path, ex, [](Replay& r) {
    REQUIRE(r.log.size() == 4);
    CHECK(r.log.front() == "A");
    CHECK(r.log.back() == "D");
    CHECK(r.handle.done());
    CHECK(r.sched.inflight() == 0);
  });
  CHECK(ex.orders == std::set<std::vector<std::string>>{{"A", "B", "C", "D"}, {"A", "C", "B", "D"}});
  CHECK(ex.paths > 2);
}

TEST_CASE("every interleaving of a short condition loop on two workers") {
  // init -> body -> cond; cond -(0)-> body until three bodies ran, then done
  Replay::Builder loop = [](TaskGraph& g, std::vector<std::string>& log) {
    auto n = std::make_shared<int>(0);
    auto init = g.emplace(logging(log, "init"));
    auto body = g.emplace([&log, n] {
      ++*n;
      log.push_back("body");
    });
    auto cond = g.emplace([&log, n] {
      log.push_back("cond");
      return *n < 3 ? 0 : 1;
    });
    auto done = g.emplace(logging(log, "done"));
    init.precede(body);
    body.precede(cond);
    cond.precede(body, done);
  };
  std::vector<Action> path;
  Explored ex;
  explore_all(loop, 2, path, ex, [](Replay& r) { CHECK(r.handle.done()); });
  REQUIRE(ex.orders.size() == 1);
  CHECK(*ex.orders.begin() ==
        std::vector<std::string>{"init", "body", "cond", "body", "cond", "body", "cond", "done"});
}

TEST_CASE("every interleaving of a fork with a joined subflow on three workers") {
  Replay::Builder fork = [](TaskGraph& g, std::vector<std::string>& log) {
    auto A = g.emplace(logging(log, "A"));
    auto S = g.emplace([&log](Subflow& sf) {
      log.push_back("S");
      auto x = sf.emplace(logging(log, "x"));
      auto y = sf.emplace(logging(log, "y"));
      (void)x;
      (void)y;
    });
    auto C = g.emplace(logging(log, "C"));
    auto D = g.emplace(logging(log, "D"));
    A.precede(S, C);
    D.succeed(S, C);
  };
  std::vector<Action> path;
  Explored ex;
  explore_all(fork, 3, path, ex, [](Replay& r) {
    REQUIRE(r.log.size() == 6);
    CHECK(r.log.back() == "D");
    CHECK(r.handle.done());
  });
  CHECK(ex.orders.size() > 1);
}

TEST_CASE("exploit drains the local deque before going idle") {
  Scheduler s(traced({1}), false);
  TaskGraph g;
  int ran = 0;
  auto A = g.emplace([&] { ++ran; });
  for (int i = 0; i < 5; ++i) A.precede(g.emplace([&] { ++ran; }));
  g.finalize();
  auto h = s.submit_graph(g);

  Worker& w = s.worker(0);
  auto first = s.shared_queue(0).steal();
  REQUIRE(first);
  Slot* t = first.item;
  s.exploit_task(w, t);
  CHECK(t == nullptr);
  CHECK(ran == 6);
  CHECK(h.done());
  CHECK(s.domain(0).actives.load() == 0);

  auto evs = s.trace_by_worker()[0];
  auto k = kinds(evs);
  // first activation with no thief around wakes someone up
  REQUIRE(k.size() >= 3);
  CHECK(k[0] == "ACTIVE_INC");
  CHECK(evs[0].a == 1);
  CHECK(evs[0].b == 0);
  CHECK(k[1] == "NOTIFY");
  CHECK(std::count(k.begin(), k.end(), "EXEC") == 6);
  CHECK(k.back() == "ACTIVE_DEC");
}

TEST_CASE("exploit skips the wakeup when a thief is already out") {
  Scheduler s(traced({2}), false);
  TaskGraph g;
  g.emplace([] {});
  g.finalize();
  auto h = s.submit_graph(g);
  s.domain(0).thieves.store(1);
  Slot* t = s.shared_queue(0).steal().item;
  s.exploit_task(s.worker(0), t);
  s.domain(0).thieves.store(0);
  auto k = kinds(s.trace_by_worker()[0]);
  CHECK(std::count(k.begin(), k.end(), "NOTIFY") == 0);
  CHECK(h.done());
}

TEST_CASE("exploit skips the wakeup when another worker is active") {
  Scheduler s(traced({2}), false);
  TaskGraph g;
  g.emplace([] {});
  g.finalize();
  auto h = s.submit_graph(g);
  s.domain(0).actives.store(1);
  Slot* t = s.shared_queue(0).steal().item;
  s.exploit_task(s.worker(0), t);
  CHECK(s.domain(0).actives.load() == 1);
  s.domain(0).actives.store(0);
  auto evs = s.trace_by_worker()[0];
  CHECK(evs.front().kind == TraceKind::ActiveInc);
  CHECK(evs.front().a == 2);
  auto k = kinds(evs);
  CHECK(std::count(k.begin(), k.end(), "NOTIFY") == 0);
  CHECK(h.done());
}

TEST_CASE("cross-domain submission wakes an idle domain") {
  Scheduler s(traced({1, 1}), false);
  TaskGraph g("x", 2);
  auto a = g.emplace([] {});
  auto b = g.emplace([] {}, 1);
  auto c = g.emplace([] {});
  a.precede(b, c);
  g.finalize();
  auto h = s.submit_graph(g);

  Worker& w0 = s.worker(0);
  Slot* t = s.shared_queue(0).steal().item;
  s.execute_task(w0, t);
  auto evs = s.trace_by_worker()[0];
  std::vector<std::int64_t> notified;
  for (const auto& e : evs)
    if (e.kind == TraceKind::Notify) notified.push_back(e.domain);
  // domain 1 was idle; the same-domain successor wakes nobody
  CHECK(notified == std::vector<std::int64_t>{1});
  CHECK(w0.queues[1]->size() == 1);
  CHECK(w0.queues[0]->size() == 1);

  // finish the run by hand
  s.execute_task(w0, *w0.queues[0]->pop());
  auto r = w0.queues[1]->steal();
  REQUIRE(r);
  s.execute_task(s.worker(1), r.item);
  CHECK(h.done());
}

TEST_CASE("cross-domain submission stays quiet while the domain has a thief") {
  Scheduler s(traced({1, 1}), false);
  TaskGraph g("x", 2);
  auto a = g.emplace([] {});
  auto b = g.emplace([] {}, 1);
  a.precede(b);
  g.finalize();
  auto h = s.submit_graph(g);
  s.domain(1).thieves.store(1);
  s.execute_task(s.worker(0), s.shared_queue(0).steal().item);
  s.domain(1).thieves.store(0);
  auto k = kinds(s.trace_by_worker()[0]);
  CHECK(std::count(k.begin(), k.end(), "NOTIFY") == 0);
  s.execute_task(s.worker(1), s.worker(0).queues[1]->steal().item);
  CHECK(h.done());
}

TEST_CASE("explore gives up after max_steals failed attempts") {
  Scheduler s(traced({3}), false);
  CHECK(s.max_steals() == 30);
  CHECK(s.explore_task(s.worker(0)) == nullptr);
  auto m = s.metrics();
  CHECK(m.steal_attempts_total == 30);
  CHECK(m.wasteful_steals == 30);
  CHECK(m.max_wasteful_per_explore == 30);
  CHECK(m.explore_calls == 1);
  // never picks itself as a victim
  const auto evs = s.trace_by_worker()[0];
  for (const auto& e : evs) CHECK(e.a != 0);
}

TEST_CASE("explore finds work in another worker's deque and is deterministic") {
  auto attempts = [](std::uint64_t seed) {
    ExecutorConfig c = traced({4});
    c.rng_seed = seed;
    Scheduler s(c, false);
    Slot dummy;
    s.worker(3).queues[0]->push(&dummy);
    Slot* got = s.explore_task(s.worker(0));
    CHECK(got == &dummy);
    return s.metrics().steal_attempts_total;
  };
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    const auto n = attempts(seed);
    CHECK(n >= 1);
    CHECK(n <= 40);
    CHECK(attempts(seed) == n);
  }
}

TEST_CASE("the last thief to succeed wakes a replacement") {
  Scheduler s(traced({1}), false);
  TaskGraph g;
  g.emplace([] {});
  g.finalize();
  auto h = s.submit_graph(g);
  s.clear_trace();
  Slot* t = nullptr;
  CHECK(s.wait_for_task(s.worker(0), t));
  REQUIRE(t != nullptr);
  CHECK(s.domain(0).thieves.load() == 0);
  auto evs = s.trace_by_worker()[0];
  REQUIRE(evs.size() >= 2);
  CHECK(evs[evs.size() - 2].kind == TraceKind::StealOk);
  CHECK(evs.back().kind == TraceKind::Notify);
  s.exploit_task(s.worker(0), t);
  CHECK(h.done());
}

TEST_CASE("wait returns false once stopping and wakes every domain") {
  Scheduler s(traced({1, 1}), false);
  s.shutdown();
  Slot* t = nullptr;
  CHECK_FALSE(s.wait_for_task(s.worker(0), t));
  CHECK(t == nullptr);
  CHECK(s.domain(0).thieves.load() == 0);
  std::vector<std::int64_t> woke;
  const auto evs = s.trace_by_worker()[0];
  for (const auto& e : evs)
    if (e.kind == TraceKind::Notify && e.a == 1) woke.push_back(e.domain);
  CHECK(woke == std::vector<std::int64_t>{0, 1});
  CHECK(s.notifier(0).num_announced() == 0);
}

TEST_CASE("trace lines have the documented shape") {
  TraceEvent e{1234, 2, TraceKind::StealFail, 0, -1, 1};
  CHECK(format(e) == "1234 2 STEAL_FAIL v=shared,retry=1");
  CHECK(format({5, 0, TraceKind::ActiveInc, 1, 1, 0}) == "5 0 ACTIVE_INC d=1,a=1,t=0");
  CHECK(format({5, 0, TraceKind::ActiveInc, 1, 3, -1}) == "5 0 ACTIVE_INC d=1,a=3");
  CHECK(format({7, -1, TraceKind::Notify, 0, 0, 0}) == "7 -1 NOTIFY d=0,all=0");
  CHECK(format({9, 1, TraceKind::Exec, 0, 4, 17}) == "9 1 EXEC f4:n17");
}
