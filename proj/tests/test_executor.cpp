// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <chrono>
#include <latch>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "doctest.h"
#include "htdg/bench/corpus.hpp"
#include "htdg/bench/oracle.hpp"
#include "htdg/executor.hpp"

using namespace htdg;
using namespace std::chrono_literals;
using bench::Workload;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::UnknownCorpus;
}

ExecutorConfig workers(std::vector<std::size_t> per_domain, bool instrument = false) {
  ExecutorConfig c;
  c.workers_per_domain = std::move(per_domain);
  c.instrument = instrument;
  return c;
}

// The tasks labelled `a` all finished before any labelled `b` started.
bool before(const Workload& w, const std::string& a, const std::string& b) {
  return w.probe->at(a).last.load() < w.probe->at(b).first.load();
}

Workload run_corpus(Executor& ex, const std::string& name, std::uint64_t seed = 1) {
  auto w = bench::make_corpus(name, ex.num_domains());
  if (!w.graph().finalized()) w.graph().finalize();
  w.reset(seed);
  ex.run(w.graph()).wait();
  return w;
}

}  // namespace

TEST_CASE("static tasks respect their dependencies") {
  Executor ex(4);
  for (int rep = 0; rep < 50; ++rep) {
    auto w = run_corpus(ex, "listing1");
    for (const char* t : {"A", "B", "C", "D"}) CHECK(w.probe->hits(t) == 1);
    CHECK(before(w, "A", "B"));
    CHECK(before(w, "A", "C"));
    CHECK(before(w, "B", "D"));
    CHECK(before(w, "C", "D"));
  }
  CHECK(ex.inflight() == 0);
}

TEST_CASE("a joined subflow completes before the successors of its parent") {
  Executor ex(4);
  for (int rep = 0; rep < 50; ++rep) {
    auto w = run_corpus(ex, "listing2");
    for (const char* t : {"A", "B", "C", "D", "B1", "B2", "B3"}) CHECK(w.probe->hits(t) == 1);
    CHECK(before(w, "A", "B"));
    CHECK(before(w, "B", "B1"));
    CHECK(before(w, "B1", "B3"));
    CHECK(before(w, "B2", "B3"));
    CHECK(before(w, "B3", "D"));
    CHECK(before(w, "C", "D"));
  }
}

TEST_CASE("a module runs its whole graph in place of one task") {
  Executor ex(4);
  for (int rep = 0; rep < 50; ++rep) {
    auto w = run_corpus(ex, "listing3");
    for (const char* t : {"A", "B", "C", "D", "D1", "D2"}) CHECK(w.probe->hits(t) == 1);
    CHECK(before(w, "C", "D"));
    CHECK(before(w, "D1", "D2"));
    CHECK(before(w, "D2", "A"));
    CHECK(before(w, "A", "B"));
  }
}

TEST_CASE("a condition loop runs its body the configured number of times") {
  Executor ex(4);
  auto w = bench::make_corpus("listing4");
  w.graph().finalize();
  for (int rep = 0; rep < 20; ++rep) {
    w.reset(rep);
    ex.run(w.graph()).wait();
    CHECK(w.probe->hits("init") == 1);
    CHECK(w.probe->hits("body") == 100);
    CHECK(w.probe->hits("cond") == 100);
    CHECK(w.probe->hits("done") == 1);
    CHECK(w.results() == std::vector<std::uint64_t>{100});
  }
}

TEST_CASE("condition branches and coin-flip loops match the sequential oracle") {
  Executor ex(3);
  auto ie = run_corpus(ex, "if-else");
  CHECK(ie.probe->hits("yes") == 1);
  CHECK(ie.probe->hits("no") == 0);

  auto w = bench::make_fig6();
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    w.reset(seed);
    auto oracle = bench::sequential_oracle(w.graph());
    const auto expect = w.probe->counts();
    w.reset(seed);
    ex.run(w.graph()).wait();
    CHECK(w.probe->counts() == expect);
    CHECK(oracle.count("F1") == expect.at("F1"));
  }
}

TEST_CASE("device flows on a second domain produce the oracle's results") {
  Executor ex(workers({2, 2}));
  for (const char* name : {"saxpy", "saxpy-capturer", "kmeans"}) {
    auto w = bench::make_corpus(name, 2);
    w.graph().finalize();
    w.reset(1);
    bench::sequential_oracle(w.graph());
    const auto expect = w.results();
    const auto counts = w.probe->counts();
    for (int rep = 0; rep < 5; ++rep) {
      w.reset(1);
      ex.run(w.graph()).wait();
      CHECK(w.results() == expect);
      CHECK(w.probe->counts() == counts);
    }
  }
}

TEST_CASE("an out-of-range condition index fails the run") {
  Executor ex(2);
  TaskGraph g;
  auto a = g.emplace([] {});
  auto c = g.emplace([] { return 2; });
  std::atomic<int> after{0};
  auto x = g.emplace([&] { ++after; });
  auto y = g.emplace([&] { ++after; });
  a.precede(c);
  c.precede(x, y);
  g.finalize();
  CHECK(code_of([&] { ex.run(g).wait(); }) == ErrorCode::ConditionIndexOutOfRange);
  CHECK(after.load() == 0);
  CHECK(ex.inflight() == 0);

  TaskGraph neg;
  neg.emplace([] { return -1; }).precede(neg.emplace([] {}));
  neg.finalize();
  CHECK(code_of([&] { ex.run(neg).wait(); }) == ErrorCode::ConditionIndexOutOfRange);
}

TEST_CASE("an exception skips the rest of its run only") {
  Executor ex(4);
  TaskGraph bad("bad");
  std::atomic<int> ran{0};
  auto a = bad.emplace([] { throw std::runtime_error("boom"); });
  auto b = bad.emplace([&] { ++ran; });
  a.precede(b);
  bad.finalize();

  TaskGraph good("good");
  std::atomic<int> good_ran{0};
  for (int i = 0; i < 100; ++i) good.emplace([&] { ++good_ran; });
  good.finalize();

  auto hb = ex.run(bad);
  auto hg = ex.run(good);
  CHECK_THROWS_WITH_AS(hb.wait(), "boom", std::runtime_error);
  hg.wait();
  CHECK(ran.load() == 0);
  CHECK(good_ran.load() == 100);

  // the graph can run again
  CHECK_THROWS_AS(ex.run(bad).wait(), std::runtime_error);
}

TEST_CASE("a graph cannot be run twice at the same time") {
  Executor ex(2);
  std::latch gate(1);
  TaskGraph g;
  g.emplace([&] { gate.wait(); });
  g.finalize();
  auto h = ex.run(g);
  CHECK(code_of([&] { ex.run(g); }) == ErrorCode::SecondConcurrentRun);
  CHECK_FALSE(h.wait_for(20ms));
  gate.count_down();
  h.wait();
  ex.run(g).wait();
}

TEST_CASE("run rejects unfinished and mismatched graphs") {
  Executor ex(1);
  TaskGraph g;
  g.emplace([] {});
  CHECK(code_of([&] { ex.run(g); }) == ErrorCode::NotFinalized);

  TaskGraph two("two", 2);
  two.emplace([] {}, 1);
  two.finalize();
  CHECK(code_of([&] { ex.run(two); }) == ErrorCode::UnknownDomain);

  TaskGraph sub;
  sub.emplace([](Subflow& sf) { sf.emplace([] {}, 3); });
  sub.finalize();
  CHECK(code_of([&] { ex.run(sub).wait(); }) == ErrorCode::UnknownDomain);
}

TEST_CASE("bad configurations are rejected") {
  CHECK(code_of([] { Executor ex(workers({})); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { Executor ex(workers({2, 0})); }) == ErrorCode::InvalidConfig);
  ExecutorConfig c;
  c.max_steals_multiplier = 0;
  CHECK(code_of([&] { Executor ex(c); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("an empty graph completes immediately") {
  Executor ex(2);
  TaskGraph g;
  g.finalize();
  auto h = ex.run(g);
  h.wait();
  CHECK(h.done());
}

TEST_CASE("a detached subflow still finishes before the run does") {
  Executor ex(4);
  std::atomic<int> inner{0};
  std::atomic<bool> parent_done{false};
  std::atomic<int> after_parent_saw{-1};
  TaskGraph g;
  auto s = g.emplace([&](Subflow& sf) {
    for (int i = 0; i < 20; ++i) {
      sf.emplace([&] {
        std::this_thread::sleep_for(100us);
        ++inner;
      });
    }
    sf.detach();
  });
  auto next = g.emplace([&] {
    after_parent_saw = inner.load();
    parent_done = true;
  });
  s.precede(next);
  g.finalize();
  for (int rep = 0; rep < 10; ++rep) {
    inner = 0;
    ex.run(g).wait();
    CHECK(inner.load() == 20);
    CHECK(parent_done.load());
  }
}

TEST_CASE("subflows nest") {
  Executor ex(4);
  std::atomic<int> leaves{0};
  TaskGraph g;
  g.emplace([&](Subflow& a) {
    for (int i = 0; i < 4; ++i) {
      a.emplace([&](Subflow& b) {
        for (int j = 0; j < 4; ++j) b.emplace([&] { ++leaves; });
      });
    }
  });
  g.finalize();
  ex.run(g).wait();
  CHECK(leaves.load() == 16);
}

TEST_CASE("one child graph composed in sequence and inside a loop") {
  Executor ex(4);
  std::atomic<int> hits{0};
  TaskGraph child("child");
  auto c1 = child.emplace([&] { ++hits; });
  auto c2 = child.emplace([&] { ++hits; });
  c1.precede(c2);
  child.finalize();

  TaskGraph seq("seq");
  auto m1 = seq.compose(child);
  auto m2 = seq.compose(child);
  m1.precede(m2);
  seq.finalize();
  ex.run(seq).wait();
  CHECK(hits.load() == 4);

  hits = 0;
  auto count = std::make_shared<int>(0);
  TaskGraph loop("loop");
  auto init = loop.emplace([count] { *count = 0; });
  auto mod = loop.compose(child);
  auto cond = loop.emplace([count] { return ++*count < 5 ? 0 : 1; });
  auto stop = loop.emplace([] {});
  init.precede(mod);
  mod.precede(cond);
  cond.precede(mod, stop);
  loop.finalize();
  ex.run(loop).wait();
  CHECK(hits.load() == 10);
}

TEST_CASE("waiting from inside a task is refused") {
  Executor ex(2);
  TaskGraph inner;
  inner.emplace([] {});
  inner.finalize();
  TaskGraph outer;
  outer.emplace([&] { ex.run(inner).wait(); });
  outer.finalize();
  CHECK(code_of([&] { ex.run(outer).wait(); }) == ErrorCode::WaitFromWorker);
  ex.wait_for_all();
}

TEST_CASE("a task may start another run without waiting for it") {
  Executor ex(2);
  std::atomic<int> inner_ran{0};
  TaskGraph inner;
  inner.emplace([&] { ++inner_ran; });
  inner.finalize();
  TaskGraph outer;
  outer.emplace([&] { ex.run(inner); });
  outer.finalize();
  ex.run(outer).wait();
  ex.wait_for_all();
  CHECK(inner_ran.load() == 1);
}

TEST_CASE("many independent graphs run concurrently") {
  Executor ex(4);
  std::vector<std::unique_ptr<TaskGraph>> graphs;
  std::atomic<int> total{0};
  for (int i = 0; i < 32; ++i) {
    auto g = std::make_unique<TaskGraph>();
    auto prev = g->emplace([&] { ++total; });
    for (int k = 0; k < 50; ++k) {
      auto t = g->emplace([&] { ++total; });
      prev.precede(t);
      prev = t;
    }
    g->finalize();
    graphs.push_back(std::move(g));
  }
  std::vector<RunHandle> hs;
  for (auto& g : graphs) hs.push_back(ex.run(*g));
  for (auto& h : hs) h.wait();
  CHECK(total.load() == 32 * 51);

  // and from several client threads at once
  total = 0;
  std::vector<std::thread> clients;
  for (int c = 0; c < 4; ++c) {
    clients.emplace_back([&, c] {
      for (int i = c; i < 32; i += 4) ex.run(*graphs[static_cast<std::size_t>(i)]).wait();
    });
  }
  for (auto& t : clients) t.join();
  CHECK(total.load() == 32 * 51);
}

TEST_CASE("metrics need instrumentation and add up") {
  Executor plain(2);
  CHECK(code_of([&] { plain.metrics(); }) == ErrorCode::NotInstrumented);

  Executor ex(workers({4}, true));
  CHECK(ex.max_steals() == 40);
  auto w = bench::make_corpus("listing4");
  w.graph().finalize();
  w.reset(0);
  ex.run(w.graph()).wait();
  auto m = ex.metrics();
  CHECK(m.tasks_executed == 202);
  CHECK(m.steal_attempts_total == m.steals_successful + m.wasteful_steals);
  CHECK(m.steal_retries <= m.wasteful_steals);
  CHECK(m.max_wasteful_per_explore <= m.max_steals);
  ex.reset_metrics();
  CHECK(ex.metrics().tasks_executed == 0);
}

TEST_CASE("traces record every execution") {
  ExecutorConfig c = workers({3});
  c.trace = true;
  Executor ex(c);
  auto w = bench::make_corpus("listing1");
  w.graph().finalize();
  w.reset(0);
  ex.run(w.graph()).wait();
  ex.wait_for_all();
  auto all = ex.trace();
  CHECK(std::is_sorted(all.begin(), all.end(),
                       [](const TraceEvent& a, const TraceEvent& b) { return a.ns < b.ns; }));
  CHECK(std::count_if(all.begin(), all.end(), [](const TraceEvent& e) { return e.kind == TraceKind::Exec; }) == 4);
  CHECK(ex.trace_by_worker().size() == 4);
  std::ostringstream os;
  ex.write_trace(os);
  CHECK(os.str().find(" EXEC f") != std::string::npos);
  ex.clear_trace();
  CHECK(ex.trace().empty());
}

TEST_CASE("executors with parked or idle workers shut down cleanly") {
  for (int i = 0; i < 20; ++i) {
    Executor ex(workers({4, 2}));
    if (i % 2 == 0) std::this_thread::sleep_for(1ms);
  }
  TaskGraph g;  // must outlive the executor's runs
  g.emplace([] {});
  g.finalize();
  Executor ex(4);
  ex.run(g);  // destructor waits for it
}

TEST_CASE("single tasks handed to a two-worker pool never get stuck") {
  // Repeatedly lands one task while workers are in every phase of going idle.
  Executor ex(2);
  TaskGraph g;
  std::atomic<int> n{0};
  g.emplace([&] { ++n; });
  g.finalize();
  for (int i = 0; i < 3000; ++i) {
    REQUIRE(ex.run(g).wait_for(10s));
    if (i % 7 == 0) std::this_thread::sleep_for(std::chrono::microseconds(i % 50));
  }
  CHECK(n.load() == 3000);
}
