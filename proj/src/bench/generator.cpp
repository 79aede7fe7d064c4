// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#include "htdg/bench/generator.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "htdg/bench/corpus.hpp"

namespace htdg::bench {

void BenchConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (nodes == 0) bad("nodes must be at least 1");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) bad("edge probability must lie in [0, 1]");
  if (domains == 0) bad("domains must be at least 1");
  if (workers.size() != domains) bad("need one worker count per domain");
  for (std::size_t w : workers) {
    if (w == 0) bad("worker counts must be positive");
  }
  if (reps == 0) bad("reps must be at least 1");
  if (max_steals_mult == 0) bad("max steals multiplier must be positive");
  if (!domain_ratio.empty()) {
    if (domain_ratio.size() != domains) bad("need one ratio per domain");
    double sum = 0;
    for (double r : domain_ratio) {
      if (r < 0) bad("ratios must be non-negative");
      sum += r;
    }
    if (sum <= 0) bad("ratios must not all be zero");
  }
  const bool known = generator == "random" || generator == "chain" || generator.rfind("corpus:", 0) == 0;
  if (!known) bad("unknown generator '" + generator + "'");
}

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct SlotState {
  explicit SlotState(std::size_t n) : slots(new std::atomic<std::uint64_t>[n]), seeds(n), preds(n) {
    for (std::size_t i = 0; i < n; ++i) slots[i].store(0, std::memory_order_relaxed);
  }

  std::uint64_t inputs(std::size_t i) const {
    std::uint64_t acc = 0;
    for (NodeId p : preds[i]) acc += slots[p].load(std::memory_order_relaxed);
    return acc;
  }

  std::unique_ptr<std::atomic<std::uint64_t>[]> slots;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<NodeId>> preds;
};

void attach_slots(Workload& w, std::shared_ptr<SlotState> st, std::size_t n) {
  w.reset = [st, n, probe = w.probe](std::uint64_t) {
    for (std::size_t i = 0; i < n; ++i) st->slots[i].store(0, std::memory_order_relaxed);
    probe->reset();
  };
  w.results = [st, n] {
    std::vector<std::uint64_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = st->slots[i].load(std::memory_order_relaxed);
    return out;
  };
}

}  // namespace

Workload gen_random_htdg(const BenchConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.nodes;
  std::mt19937_64 rng(cfg.seed);

  Workload w;
  w.name = "random";
  w.graphs.push_back(std::make_unique<TaskGraph>("random", cfg.domains));
  w.top = w.graphs.back().get();
  auto st = std::make_shared<SlotState>(n);
  auto probe = w.probe;

  std::vector<double> cumulative(cfg.domains);
  {
    std::vector<double> ratio = cfg.domain_ratio.empty() ? std::vector<double>(cfg.domains, 1.0) : cfg.domain_ratio;
    const double total = std::accumulate(ratio.begin(), ratio.end(), 0.0);
    double run = 0;
    for (std::size_t d = 0; d < cfg.domains; ++d) cumulative[d] = (run += ratio[d] / total);
    cumulative.back() = 1.0;
  }

  for (std::size_t i = 0; i < n; ++i) {
    st->seeds[i] = rng();
    const double u = unit(rng);
    DomainId d = 0;
    while (d + 1 < cfg.domains && u >= cumulative[d]) ++d;
    auto& entry = probe->add("t" + std::to_string(i));

    if (d == 0) {
      w.top->emplace([st, i, probe, &entry] {
        st->slots[i].fetch_add(mix64(st->seeds[i] ^ st->inputs(i)), std::memory_order_relaxed);
        probe->hit(entry);
      });
    } else {
      w.top->emplace(
          [st, i, probe, &entry](DeviceGraph& g) {
            auto acc = std::make_shared<std::uint64_t>(0);
            auto h2d = g.copy("h2d", [st, i, acc] { *acc = st->inputs(i); });
            auto kernel = g.kernel("kernel", [st, i, acc] { *acc = mix64(st->seeds[i] ^ *acc); });
            auto d2h = g.copy("d2h", [st, i, acc, probe, &entry] {
              st->slots[i].fetch_add(*acc, std::memory_order_relaxed);
              probe->hit(entry);
            });
            h2d.precede(kernel);
            kernel.precede(d2h);
          },
          d);
    }
  }

  const std::size_t layers = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(std::sqrt(n))));
  auto layer_begin = [&](std::size_t k) { return (k * n + layers - 1) / layers; };
  std::vector<NodeId> succ;
  for (std::size_t k = 0; k + 1 < layers; ++k) {
    const std::size_t a0 = layer_begin(k), a1 = layer_begin(k + 1), b1 = layer_begin(k + 2);
    for (NodeId u = a0; u < a1; ++u) {
      succ.clear();
      for (NodeId v = a1; v < b1; ++v) {
        if (unit(rng) < cfg.edge_prob) {
          succ.push_back(v);
          st->preds[v].push_back(u);
        }
      }
      w.top->precede(u, succ);
    }
  }

  attach_slots(w, st, n);
  w.top->finalize();
  return w;
}

Workload gen_chain(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "a chain needs at least one task");
  std::mt19937_64 rng(seed);
  Workload w;
  w.name = "chain";
  w.graphs.push_back(std::make_unique<TaskGraph>("chain"));
  w.top = w.graphs.back().get();
  auto st = std::make_shared<SlotState>(n);
  auto probe = w.probe;

  for (std::size_t i = 0; i < n; ++i) {
    st->seeds[i] = rng();
    if (i > 0) st->preds[i].push_back(i - 1);
    auto& entry = probe->add("t" + std::to_string(i));
    w.top->emplace([st, i, probe, &entry] {
      st->slots[i].fetch_add(mix64(st->seeds[i] ^ st->inputs(i)), std::memory_order_relaxed);
      probe->hit(entry);
    });
    if (i > 0) w.top->precede(i - 1, {i});
  }
  attach_slots(w, st, n);
  w.top->finalize();
  return w;
}

Workload make_workload(const BenchConfig& cfg) {
  cfg.validate();
  if (cfg.generator == "random") return gen_random_htdg(cfg);
  if (cfg.generator == "chain") return gen_chain(cfg.nodes, cfg.seed);
  return make_corpus(cfg.generator.substr(7), cfg.domains);
}

std::uint64_t structure_hash(const TaskGraph& g) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ull;
    }
  };
  feed(g.size());
  for (const auto& n : g.nodes()) {
    feed(static_cast<std::uint64_t>(n.kind));
    feed(n.domain);
    feed(n.successors.size());
    for (NodeId s : n.successors) feed(s);
  }
  return h;
}

}  // namespace htdg::bench
