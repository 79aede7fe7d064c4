// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#include "htdg/bench/corpus.hpp"

#include <bit>
#include <cmath>
#include <random>

namespace htdg::bench {

namespace {

// Wraps a static body so each execution is counted under `label`.
StaticWork counted(Workload& w, const std::string& label, std::function<void()> body = {}) {
  auto& e = w.probe->add(label);
  return [probe = w.probe, &e, body = std::move(body)] {
    if (body) body();
    probe->hit(e);
  };
}

ConditionWork counted_cond(Workload& w, const std::string& label, std::function<int()> body) {
  auto& e = w.probe->add(label);
  return [probe = w.probe, &e, body = std::move(body)] {
    probe->hit(e);
    return body();
  };
}

TaskGraph& new_graph(Workload& w, const std::string& name, std::size_t domains) {
  w.graphs.push_back(std::make_unique<TaskGraph>(name, domains));
  return *w.graphs.back();
}

void no_state(Workload& w) {
  w.reset = [probe = w.probe](std::uint64_t) { probe->reset(); };
  w.results = [] { return std::vector<std::uint64_t>{}; };
}

Workload listing1(std::size_t domains) {
  Workload w;
  w.name = "listing1";
  auto& g = new_graph(w, "listing1", domains);
  auto A = g.emplace(counted(w, "A")).name("A");
  auto B = g.emplace(counted(w, "B")).name("B");
  auto C = g.emplace(counted(w, "C")).name("C");
  auto D = g.emplace(counted(w, "D")).name("D");
  A.precede(B, C);
  D.succeed(B, C);
  no_state(w);
  w.top = &g;
  return w;
}

Workload listing2(std::size_t domains) {
  Workload w;
  w.name = "listing2";
  auto& g = new_graph(w, "listing2", domains);
  auto b1 = counted(w, "B1"), b2 = counted(w, "B2"), b3 = counted(w, "B3");
  auto& eb = w.probe->add("B");
  auto A = g.emplace(counted(w, "A")).name("A");
  auto C = g.emplace(counted(w, "C")).name("C");
  auto D = g.emplace(counted(w, "D")).name("D");
  auto B = g.emplace([=, probe = w.probe, &eb](Subflow& sf) {
    probe->hit(eb);
    auto B1 = sf.emplace(b1).name("B1");
    auto B2 = sf.emplace(b2).name("B2");
    auto B3 = sf.emplace(b3).name("B3");
    B3.succeed(B1, B2);
  });
  B.name("B");
  A.precede(B, C);
  D.succeed(B, C);
  no_state(w);
  w.top = &g;
  return w;
}

Workload listing3(std::size_t domains) {
  Workload w;
  w.name = "listing3";
  auto& tf1 = new_graph(w, "taskflow1", domains);
  auto A = tf1.emplace(counted(w, "A")).name("A");
  auto B = tf1.emplace(counted(w, "B")).name("B");
  A.precede(B);
  tf1.finalize();

  auto& tf2 = new_graph(w, "taskflow2", domains);
  auto d1 = counted(w, "D1"), d2 = counted(w, "D2");
  auto& ed = w.probe->add("D");
  auto C = tf2.emplace(counted(w, "C")).name("C");
  auto D = tf2.emplace([=, probe = w.probe, &ed](Subflow& sf) {
    probe->hit(ed);
    auto D1 = sf.emplace(d1).name("D1");
    auto D2 = sf.emplace(d2).name("D2");
    D1.precede(D2);
  });
  D.name("D");
  auto E = tf2.compose(tf1).name("E");
  D.precede(E);
  C.precede(D);
  no_state(w);
  w.top = &tf2;
  return w;
}

Workload listing4(std::size_t domains) {
  Workload w;
  w.name = "listing4";
  auto& g = new_graph(w, "listing4", domains);
  auto i = std::make_shared<int>(0);
  auto init = g.emplace(counted(w, "init", [i] { *i = 0; })).name("init");
  auto body = g.emplace(counted(w, "body", [i] { ++*i; })).name("body");
  auto cond = g.emplace(counted_cond(w, "cond", [i] { return *i < 100 ? 0 : 1; })).name("cond");
  auto done = g.emplace(counted(w, "done")).name("done");
  init.precede(body);
  body.precede(cond);
  cond.precede(body, done);
  w.reset = [i, probe = w.probe](std::uint64_t) {
    *i = 0;
    probe->reset();
  };
  w.results = [i] { return std::vector<std::uint64_t>{static_cast<std::uint64_t>(*i)}; };
  w.top = &g;
  return w;
}

Workload if_else(std::size_t domains) {
  Workload w;
  w.name = "if-else";
  auto& g = new_graph(w, "if-else", domains);
  auto init = g.emplace(counted(w, "init")).name("init");
  auto cond = g.emplace(counted_cond(w, "cond", [] { return 0; })).name("cond");
  auto yes = g.emplace(counted(w, "yes")).name("yes");
  auto no = g.emplace(counted(w, "no")).name("no");
  cond.succeed(init).precede(yes, no);
  no_state(w);
  w.top = &g;
  return w;
}

// --- device-flow examples ----------------------------------------------------

constexpr std::size_t kSaxpyN = 1024;

struct SaxpyState {
  std::vector<float> hx, hy, dx, dy;
  void reset() {
    hx.assign(kSaxpyN, 1.0f);
    hy.assign(kSaxpyN, 2.0f);
    dx.clear();
    dy.clear();
  }
};

std::vector<std::uint64_t> float_bits(const std::vector<float>& v) {
  std::vector<std::uint64_t> out;
  out.reserve(v.size());
  for (float f : v) out.push_back(std::bit_cast<std::uint32_t>(f));
  return out;
}

Workload saxpy(std::size_t domains, bool capture) {
  Workload w;
  w.name = capture ? "saxpy-capturer" : "saxpy";
  auto& g = new_graph(w, w.name, domains);
  const DomainId dev = domains > 1 ? 1 : 0;
  auto st = std::make_shared<SaxpyState>();
  st->reset();

  auto allocate_x = g.emplace(counted(w, "allocate_x", [st] { st->dx.assign(kSaxpyN, 0.0f); })).name("allocate_x");
  auto allocate_y = g.emplace(counted(w, "allocate_y", [st] { st->dy.assign(kSaxpyN, 0.0f); })).name("allocate_y");
  auto& ek = w.probe->add("kernel");
  auto& ef = w.probe->add("flow");
  auto kernel_body = [st, probe = w.probe, &ek] {
    for (std::size_t i = 0; i < kSaxpyN; ++i) st->dy[i] = 2.0f * st->dx[i] + st->dy[i];
    probe->hit(ek);
  };
  auto h2d_x = [st] { st->dx = st->hx; };
  auto h2d_y = [st] { st->dy = st->hy; };
  auto d2h_x = [st] { st->hx = st->dx; };
  auto d2h_y = [st] { st->hy = st->dy; };

  Task flow;
  if (capture) {
    flow = g.emplace(
        [=, probe = w.probe, &ef](Capturer& cfc) {
          probe->hit(ef);
          auto hx = cfc.copy("h2d_x", h2d_x);
          auto hy = cfc.copy("h2d_y", h2d_y);
          auto dx = cfc.copy("d2h_x", d2h_x);
          auto dy = cfc.copy("d2h_y", d2h_y);
          auto kernel = cfc.on("saxpy", [kernel_body](StreamId) { kernel_body(); });
          kernel.succeed(hx, hy).precede(dx, dy);
        },
        dev);
  } else {
    flow = g.emplace(
        [=, probe = w.probe, &ef](DeviceGraph& cf) {
          probe->hit(ef);
          auto hx = cf.copy("h2d_x", h2d_x);
          auto hy = cf.copy("h2d_y", h2d_y);
          auto dx = cf.copy("d2h_x", d2h_x);
          auto dy = cf.copy("d2h_y", d2h_y);
          auto kernel = cf.kernel("saxpy", kernel_body);
          kernel.succeed(hx, hy).precede(dx, dy);
        },
        dev);
  }
  flow.name("cudaFlow");
  flow.succeed(allocate_x, allocate_y);

  w.reset = [st, probe = w.probe](std::uint64_t) {
    st->reset();
    probe->reset();
  };
  w.results = [st] {
    auto out = float_bits(st->hx);
    auto y = float_bits(st->hy);
    out.insert(out.end(), y.begin(), y.end());
    return out;
  };
  w.top = &g;
  return w;
}

constexpr std::size_t kPoints = 256;
constexpr std::size_t kClusters = 4;
constexpr int kMaxIterations = 50;

struct KMeansState {
  std::vector<double> px, py;                  // host input
  std::vector<double> dpx, dpy, cx, cy;        // device buffers
  std::vector<std::size_t> assign;
  std::vector<double> rx, ry;                  // host result
  bool changed = true;
  int iterations = 0;

  KMeansState() {
    std::mt19937_64 rng(2021);
    for (std::size_t i = 0; i < kPoints; ++i) {
      const std::size_t c = i % kClusters;
      auto jitter = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
      px.push_back(static_cast<double>(c * 7 % 5) * 4.0 + jitter() * 3.0);
      py.push_back(static_cast<double>(c * 3 % 4) * 4.0 + jitter() * 3.0);
    }
    reset();
  }

  void reset() {
    dpx.clear();
    dpy.clear();
    cx.clear();
    cy.clear();
    rx.clear();
    ry.clear();
    assign.assign(kPoints, kClusters);
    changed = true;
    iterations = 0;
  }

  void assign_points() {
    changed = false;
    for (std::size_t i = 0; i < kPoints; ++i) {
      std::size_t best = 0;
      double best_d = INFINITY;
      for (std::size_t c = 0; c < kClusters; ++c) {
        const double dx = dpx[i] - cx[c], dy = dpy[i] - cy[c];
        const double d = dx * dx + dy * dy;
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
  }

  void update_centroids() {
    std::vector<double> sx(kClusters, 0.0), sy(kClusters, 0.0);
    std::vector<std::size_t> n(kClusters, 0);
    for (std::size_t i = 0; i < kPoints; ++i) {
      sx[assign[i]] += dpx[i];
      sy[assign[i]] += dpy[i];
      ++n[assign[i]];
    }
    for (std::size_t c = 0; c < kClusters; ++c) {
      if (n[c] > 0) {
        cx[c] = sx[c] / static_cast<double>(n[c]);
        cy[c] = sy[c] / static_cast<double>(n[c]);
      }
    }
    ++iterations;
  }
};

Workload kmeans(std::size_t domains) {
  Workload w;
  w.name = "kmeans";
  auto& g = new_graph(w, "kmeans", domains);
  const DomainId dev = domains > 1 ? 1 : 0;
  auto st = std::make_shared<KMeansState>();
  auto probe = w.probe;
  auto& e_h2d = probe->add("h2d");
  auto& e_assign = probe->add("update.assign");
  auto& e_update = probe->add("update.kernel");
  auto& e_d2h = probe->add("d2h");

  auto h2d = g.emplace(
                  [st, probe, &e_h2d](DeviceGraph& cf) {
                    auto p = cf.copy("points", [st] {
                      st->dpx = st->px;
                      st->dpy = st->py;
                    });
                    auto c = cf.copy("centroids", [st, probe, &e_h2d] {
                      st->cx.assign(st->px.begin(), st->px.begin() + kClusters);
                      st->cy.assign(st->py.begin(), st->py.begin() + kClusters);
                      probe->hit(e_h2d);
                    });
                    p.precede(c);
                  },
                  dev)
                 .name("h2d");
  auto update = g.emplace(
                     [st, probe, &e_assign, &e_update](DeviceGraph& cf) {
                       auto a = cf.kernel("assign", [st, probe, &e_assign] {
                         st->assign_points();
                         probe->hit(e_assign);
                       });
                       auto u = cf.kernel("centroids", [st, probe, &e_update] {
                         st->update_centroids();
                         probe->hit(e_update);
                       });
                       a.precede(u);
                     },
                     dev)
                    .name("update");
  auto cond = g.emplace(counted_cond(w, "cond", [st] {
                 return (!st->changed || st->iterations >= kMaxIterations) ? 1 : 0;
               })).name("cond");
  auto d2h = g.emplace(
                  [st, probe, &e_d2h](DeviceGraph& cf) {
                    cf.copy("result", [st, probe, &e_d2h] {
                      st->rx = st->cx;
                      st->ry = st->cy;
                      probe->hit(e_d2h);
                    });
                  },
                  dev)
                 .name("d2h");
  h2d.precede(update);
  update.precede(cond);
  cond.precede(update, d2h);

  w.reset = [st, probe](std::uint64_t) {
    st->reset();
    probe->reset();
  };
  w.results = [st] {
    std::vector<std::uint64_t> out;
    for (double v : st->rx) out.push_back(std::bit_cast<std::uint64_t>(v));
    for (double v : st->ry) out.push_back(std::bit_cast<std::uint64_t>(v));
    out.push_back(static_cast<std::uint64_t>(st->iterations));
    return out;
  };
  w.top = &g;
  return w;
}

}  // namespace

Workload make_fig6() {
  Workload w;
  w.name = "fig6";
  auto& g = new_graph(w, "fig6", 1);
  auto rng = std::make_shared<std::mt19937_64>(0);
  auto coin = [rng] { return static_cast<int>((*rng)() >> 63); };

  auto init = g.emplace(counted(w, "init")).name("init");
  auto F1 = g.emplace(counted_cond(w, "F1", coin)).name("F1");
  auto F2 = g.emplace(counted_cond(w, "F2", coin)).name("F2");
  auto F3 = g.emplace(counted_cond(w, "F3", coin)).name("F3");
  auto stop = g.emplace(counted(w, "stop")).name("stop");
  init.precede(F1);
  F1.precede(F2, F1);
  F2.precede(F3, F1);
  F3.precede(stop, F1);

  w.reset = [rng, probe = w.probe](std::uint64_t seed) {
    rng->seed(seed);
    probe->reset();
  };
  w.results = [] { return std::vector<std::uint64_t>{}; };
  w.top = &g;
  g.finalize();
  return w;
}

std::vector<std::string> corpus_names() {
  return {"listing1", "listing2", "listing3", "listing4", "if-else", "fig6", "saxpy", "saxpy-capturer", "kmeans"};
}

Workload make_corpus(const std::string& name, std::size_t domains) {
  if (domains == 0) throw Error(ErrorCode::InvalidConfig, "domains must be at least 1");
  Workload w;
  if (name == "listing1") {
    w = listing1(domains);
  } else if (name == "listing2") {
    w = listing2(domains);
  } else if (name == "listing3") {
    w = listing3(domains);
  } else if (name == "listing4") {
    w = listing4(domains);
  } else if (name == "if-else") {
    w = if_else(domains);
  } else if (name == "fig6") {
    return make_fig6();
  } else if (name == "saxpy") {
    w = saxpy(domains, false);
  } else if (name == "saxpy-capturer") {
    w = saxpy(domains, true);
  } else if (name == "kmeans") {
    w = kmeans(domains);
  } else {
    throw Error(ErrorCode::UnknownCorpus, "'" + name + "'");
  }
  w.top->finalize();
  return w;
}

}  // namespace htdg::bench
