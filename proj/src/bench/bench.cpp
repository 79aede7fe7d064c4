// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#include "htdg/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "htdg/bench/oracle.hpp"

namespace htdg::bench {

using Clock = std::chrono::steady_clock;

namespace {

double millis_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

ExecutorConfig executor_config(const BenchConfig& cfg, bool trace) {
  ExecutorConfig ec;
  ec.workers_per_domain = cfg.workers;
  ec.max_steals_multiplier = cfg.max_steals_mult;
  ec.rng_seed = cfg.seed;
  ec.instrument = true;
  ec.trace = trace;
  return ec;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path + "'");
  out << text;
}

}  // namespace

void Report::set(const std::string& key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  values_[key] = buf;
}

std::string Report::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

void Report::write(std::ostream& os) const {
  for (const auto& [k, v] : values_) os << k << '=' << v << '\n';
}

bool run_with_watchdog(Executor& exec, const TaskGraph& g, std::chrono::milliseconds limit) {
  return exec.run(g).wait_for(limit);
}

BenchResult run_bench(const BenchConfig& cfg) {
  cfg.validate();
  const bool tracing = !cfg.trace_path.empty();
  auto exec_owner = std::make_unique<Executor>(executor_config(cfg, tracing));
  Executor& exec = *exec_owner;

  BenchResult res;
  std::uint64_t hash = 0, edges = 0, nodes = 0;
  MetricsReport total;
  total.max_steals = exec.max_steals();

  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    BenchConfig c = cfg;
    c.seed = cfg.seed + rep;
    Workload w = make_workload(c);
    if (rep == 0) {
      hash = structure_hash(w.graph());
      edges = w.graph().num_edges();
      nodes = w.graph().size();
      if (!cfg.dot_path.empty()) write_file(cfg.dot_path, w.graph().export_dot());
    }

    const DeviceConfig device{exec.config().max_streams, exec.config().device_latency};
    w.reset(c.seed);
    const OracleTrace oracle = sequential_oracle(w.graph(), kDefaultStepLimit, device);
    const auto want_counts = w.probe->counts();
    const auto want_results = w.results();

    w.reset(c.seed);
    exec.reset_metrics();
    exec.clear_trace();
    RepResult r;
    r.seed = c.seed;
    const auto t0 = Clock::now();
    r.completed = run_with_watchdog(exec, w.graph(), std::chrono::seconds(60));
    r.millis = millis_since(t0);
    if (!r.completed) {
      ++res.hangs;
      res.reps.push_back(r);
      // The stuck run still references both; leak them rather than block in
      // their destructors.
      (void)exec_owner.release();
      (void)new Workload(std::move(w));
      break;
    }
    r.counts_match = w.probe->counts() == want_counts;
    r.checksum_match = w.results() == want_results;
    r.metrics = exec.metrics();
    if (cfg.check_steal_bound) {
      r.bound_ok = r.metrics.wasteful_steals <= 2 * oracle.steps * exec.max_steals();
    }
    res.oracle_mismatches += !r.counts_match;
    res.checksum_mismatches += !r.checksum_match;
    res.bound_violations += !r.bound_ok;

    total.tasks_executed += r.metrics.tasks_executed;
    total.steal_attempts_total += r.metrics.steal_attempts_total;
    total.steals_successful += r.metrics.steals_successful;
    total.wasteful_steals += r.metrics.wasteful_steals;
    total.steal_retries += r.metrics.steal_retries;
    total.notifications_sent += r.metrics.notifications_sent;
    total.parks += r.metrics.parks;
    total.explore_calls += r.metrics.explore_calls;
    total.max_wasteful_per_explore = std::max(total.max_wasteful_per_explore, r.metrics.max_wasteful_per_explore);
    res.reps.push_back(std::move(r));

    if (tracing && rep + 1 == cfg.reps) {
      std::ostringstream os;
      exec.write_trace(os);
      write_file(cfg.trace_path, os.str());
    }
  }

  double sum_ms = 0, min_ms = 1e300, max_ms = 0;
  for (const auto& r : res.reps) {
    sum_ms += r.millis;
    min_ms = std::min(min_ms, r.millis);
    max_ms = std::max(max_ms, r.millis);
  }

  Report& rp = res.report;
  rp.set("bench.generator", cfg.generator);
  rp.set("bench.nodes", nodes);
  rp.set("bench.edges", edges);
  rp.set("bench.domains", static_cast<std::uint64_t>(cfg.domains));
  rp.set("bench.reps", static_cast<std::uint64_t>(res.reps.size()));
  rp.set("bench.seed", cfg.seed);
  rp.set("bench.structure_hash", hash);
  std::string workers;
  for (std::size_t i = 0; i < cfg.workers.size(); ++i) workers += (i ? "," : "") + std::to_string(cfg.workers[i]);
  rp.set("bench.workers", workers);
  rp.set("sched.max_steals", static_cast<std::uint64_t>(total.max_steals));
  rp.set("sched.tasks_executed", total.tasks_executed);
  rp.set("sched.steal_attempts", total.steal_attempts_total);
  rp.set("sched.steals_successful", total.steals_successful);
  rp.set("sched.wasteful_steals", total.wasteful_steals);
  rp.set("sched.steal_retries", total.steal_retries);
  rp.set("sched.notifications", total.notifications_sent);
  rp.set("sched.parks", total.parks);
  rp.set("sched.explore_calls", total.explore_calls);
  rp.set("sched.max_wasteful_per_explore", total.max_wasteful_per_explore);
  rp.set("result.oracle_mismatches", res.oracle_mismatches);
  rp.set("result.checksum_mismatches", res.checksum_mismatches);
  rp.set("result.bound_violations", res.bound_violations);
  rp.set("result.hangs", res.hangs);
  rp.set("result.pass", std::string(res.passed() ? "true" : "false"));
  rp.set("time.mean_ms", res.reps.empty() ? 0.0 : sum_ms / static_cast<double>(res.reps.size()));
  rp.set("time.min_ms", res.reps.empty() ? 0.0 : min_ms);
  rp.set("time.max_ms", max_ms);

  if (!cfg.report_path.empty()) write_file(cfg.report_path, rp.str());
  return res;
}

namespace {

double timed_reps(const BenchConfig& cfg) {
  Executor exec(executor_config(cfg, false));
  Workload w = make_workload(cfg);
  const auto t0 = Clock::now();
  for (std::size_t i = 0; i < cfg.reps; ++i) {
    w.reset(cfg.seed);
    exec.run(w.graph()).wait();
  }
  return millis_since(t0);
}

}  // namespace

CorunResult corun_throughput(const BenchConfig& cfg, std::size_t processes) {
  cfg.validate();
  if (processes == 0) throw Error(ErrorCode::InvalidConfig, "need at least one corun");
  CorunResult out;
  out.baseline_ms = timed_reps(cfg);
  out.corun_ms.assign(processes, 0.0);

  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(processes);
  for (std::size_t i = 0; i < processes; ++i) {
    threads.emplace_back([&, i] {
      try {
        out.corun_ms[i] = timed_reps(cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (double ms : out.corun_ms) out.weighted_speedup += out.baseline_ms / std::max(ms, 1e-9);
  return out;
}

CreationCost measure_creation(std::size_t ops) {
  CreationCost c;
  TaskGraph g("creation");
  auto t0 = Clock::now();
  for (std::size_t i = 0; i < ops; ++i) g.emplace([] {});
  const double task_ns = std::chrono::duration<double, std::nano>(Clock::now() - t0).count();

  t0 = Clock::now();
  for (std::size_t i = 0; i + 1 < ops; ++i) g.precede(i, {i + 1});
  const double edge_ns = std::chrono::duration<double, std::nano>(Clock::now() - t0).count();

  c.tasks = ops;
  c.edges = ops > 0 ? ops - 1 : 0;
  c.ns_per_task = ops ? task_ns / static_cast<double>(ops) : 0;
  c.ns_per_edge = c.edges ? edge_ns / static_cast<double>(c.edges) : 0;
  return c;
}

}  // namespace htdg::bench
