// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <barrier>
#include <random>
#include <thread>
#include <vector>

#include "doctest.h"
#include "htdg/work_deque.hpp"

using htdg::StealStatus;
using htdg::WorkDeque;

TEST_CASE("owner pops in lifo order") {
  WorkDeque<int> q;
  for (int i = 1; i <= 3; ++i) q.push(i);
  CHECK(*q.pop() == 3);
  CHECK(*q.pop() == 2);
  CHECK(*q.pop() == 1);
  CHECK_FALSE(q.pop().has_value());
  CHECK(q.empty());
}

TEST_CASE("thieves steal in fifo order") {
  WorkDeque<int> q;
  for (int i = 1; i <= 3; ++i) q.push(i);
  auto r = q.steal();
  CHECK(r.status == StealStatus::Success);
  CHECK(r.item == 1);
  CHECK(q.steal().item == 2);
  CHECK(*q.pop() == 3);
  CHECK(q.steal().status == StealStatus::Empty);
}

TEST_CASE("initial capacity is 64 and grows by doubling") {
  WorkDeque<int> q;
  CHECK(q.capacity() == 64);
  for (int i = 0; i < 64; ++i) q.push(i);
  CHECK(q.capacity() == 64);
  q.push(64);
  CHECK(q.capacity() == 128);
  for (int i = 65; i < 1000; ++i) q.push(i);
  CHECK(q.size() == 1000);
  CHECK(q.capacity() == 1024);
  // growth preserves both ends
  CHECK(q.steal().item == 0);
  CHECK(*q.pop() == 999);
  for (int i = 998; i >= 1; --i) CHECK(*q.pop() == i);
  CHECK(q.empty());
}

TEST_CASE("growth after wrap-around keeps items in order") {
  WorkDeque<int> q;
  for (int round = 0; round < 10; ++round) {
    for (int i = 0; i < 50; ++i) q.push(round * 100 + i);
    for (int i = 0; i < 50; ++i) CHECK(q.steal().item == round * 100 + i);
  }
  for (int i = 0; i < 200; ++i) q.push(i);
  for (int i = 0; i < 200; ++i) CHECK(q.steal().item == i);
}

TEST_CASE("owner and one thief race on the last item") {
  for (int trial = 0; trial < 2000; ++trial) {
    WorkDeque<int> q;
    q.push(42);
    std::barrier sync(2);
    int owner_got = 0, thief_got = 0;
    std::thread thief([&] {
      sync.arrive_and_wait();
      for (;;) {
        auto r = q.steal();
        if (r.status == StealStatus::Retry) continue;
        if (r) thief_got = r.item;
        break;
      }
    });
    sync.arrive_and_wait();
    if (auto v = q.pop()) owner_got = *v;
    thief.join();
    CHECK(owner_got + thief_got == 42);
    CHECK((owner_got == 0 || thief_got == 0));
  }
}

namespace {

// Owner pushes 1..n interleaved with random pops; `thieves` threads steal
// until the owner is done and the deque is empty. Every item must be taken
// exactly once.
void stress(std::size_t thieves, int n, std::uint64_t seed) {
  WorkDeque<int> q;
  std::vector<std::atomic<std::uint8_t>> seen(static_cast<std::size_t>(n) + 1);
  std::atomic<bool> owner_done{false};
  std::atomic<std::uint64_t> duplicates{0};
  auto take = [&](int v) {
    if (seen[static_cast<std::size_t>(v)].fetch_add(1) != 0) duplicates.fetch_add(1);
  };

  std::vector<std::thread> ts;
  for (std::size_t t = 0; t < thieves; ++t) {
    ts.emplace_back([&] {
      for (;;) {
        auto r = q.steal();
        if (r) {
          take(r.item);
        } else if (r.status == StealStatus::Empty && owner_done.load()) {
          if (q.empty()) break;
        }
      }
    });
  }

  std::mt19937_64 rng(seed);
  for (int i = 1; i <= n; ++i) {
    q.push(i);
    if (rng() % 3 == 0) {
      if (auto v = q.pop()) take(*v);
    }
  }
  while (auto v = q.pop()) take(*v);
  owner_done.store(true);
  for (auto& t : ts) t.join();

  CHECK(duplicates.load() == 0);
  std::size_t missing = 0;
  for (int i = 1; i <= n; ++i) missing += seen[static_cast<std::size_t>(i)].load() == 0;
  CHECK(missing == 0);
}

}  // namespace

TEST_CASE("concurrent stress takes every item exactly once") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) stress(4, 100000, seed);
  stress(1, 100000, 99);
}
