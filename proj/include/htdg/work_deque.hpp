// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <type_traits>
#include <vector>

namespace htdg {

/// Outcome of a steal attempt. `Retry` means the deque looked nonempty but
/// another thread won the race for the top item; the caller may try again.
enum class StealStatus { Success, Empty, Retry };

template <typename T>
struct StealResult {
  StealStatus status = StealStatus::Empty;
  T item{};

  explicit operator bool() const noexcept { return status == StealStatus::Success; }
};

/**
 * Chase-Lev work-stealing deque with growable ring storage.
 *
 * The owner thread pushes and pops at the bottom; any thread may steal from
 * the top. Memory orderings follow the C11 formulation of Le, Pop, Cohen and
 * Zappa Nardelli. Items are stored in atomics so that a thief reading a slot
 * concurrently with the owner overwriting it (after wrap-around) is not a data
 * race; the subsequent CAS on `top_` discards such stale reads.
 *
 * Retired rings are kept until destruction because a thief may still be
 * reading from one after the owner has grown the deque.
 */
template <typename T>
class WorkDeque {
  static_assert(std::is_trivially_copyable_v<T>, "WorkDeque stores trivially copyable items");

  struct Ring {
    explicit Ring(std::int64_t cap) : capacity(cap), mask(cap - 1), slots(new std::atomic<T>[cap]) {}

    void put(std::int64_t i, T v) noexcept { slots[i & mask].store(v, std::memory_order_relaxed); }
    T get(std::int64_t i) const noexcept { return slots[i & mask].load(std::memory_order_relaxed); }

    std::unique_ptr<Ring> grow(std::int64_t bottom, std::int64_t top) const {
      auto bigger = std::make_unique<Ring>(capacity * 2);
      for (std::int64_t i = top; i != bottom; ++i) bigger->put(i, get(i));
      return bigger;
    }

    std::int64_t capacity;
    std::int64_t mask;
    std::unique_ptr<std::atomic<T>[]> slots;
  };

 public:
  static constexpr std::int64_t kDefaultCapacity = 64;

  explicit WorkDeque(std::int64_t capacity = kDefaultCapacity) {
    assert(capacity > 0 && (capacity & (capacity - 1)) == 0);
    rings_.push_back(std::make_unique<Ring>(capacity));
    ring_.store(rings_.back().get(), std::memory_order_relaxed);
  }

  WorkDeque(const WorkDeque&) = delete;
  WorkDeque& operator=(const WorkDeque&) = delete;

  /// Owner only.
  void push(T item) {
    std::int64_t b = bottom_.load(std::memory_order_relaxed);
    std::int64_t t = top_.load(std::memory_order_acquire);
    Ring* r = ring_.load(std::memory_order_relaxed);
    if (b - t > r->capacity - 1) {
      rings_.push_back(r->grow(b, t));
      r = rings_.back().get();
      ring_.store(r, std::memory_order_release);
    }
    r->put(b, item);
    std::atomic_thread_fence(std::memory_order_release);
    bottom_.store(b + 1, std::memory_order_relaxed);
  }

  /// Owner only. Takes the most recently pushed item.
  std::optional<T> pop() {
    std::int64_t b = bottom_.load(std::memory_order_relaxed) - 1;
    Ring* r = ring_.load(std::memory_order_relaxed);
    bottom_.store(b, std::memory_order_relaxed);
    std::atomic_thread_fence(std::memory_order_seq_cst);
    std::int64_t t = top_.load(std::memory_order_relaxed);

    std::optional<T> out;
    if (t <= b) {
      out = r->get(b);
      if (t == b) {
        // last item: race against thieves for it
        if (!top_.compare_exchange_strong(t, t + 1, std::memory_order_seq_cst,
                                          std::memory_order_relaxed)) {
          out.reset();
        }
        bottom_.store(b + 1, std::memory_order_relaxed);
      }
    } else {
      bottom_.store(b + 1, std::memory_order_relaxed);
    }
    return out;
  }

  /// Any thread. Takes the oldest item.
  StealResult<T> steal() {
    std::int64_t t = top_.load(std::memory_order_acquire);
    std::atomic_thread_fence(std::memory_order_seq_cst);
    std::int64_t b = bottom_.load(std::memory_order_acquire);

    if (t >= b) return {StealStatus::Empty, T{}};

    Ring* r = ring_.load(std::memory_order_acquire);
    T item = r->get(t);
    if (!top_.compare_exchange_strong(t, t + 1, std::memory_order_seq_cst,
                                      std::memory_order_relaxed)) {
      return {StealStatus::Retry, T{}};
    }
    return {StealStatus::Success, item};
  }

  /// Snapshot; may be stale by the time the caller acts on it.
  bool empty() const noexcept {
    std::int64_t b = bottom_.load(std::memory_order_acquire);
    std::int64_t t = top_.load(std::memory_order_acquire);
    return b <= t;
  }

  std::size_t size() const noexcept {
    std::int64_t b = bottom_.load(std::memory_order_acquire);
    std::int64_t t = top_.load(std::memory_order_acquire);
    return static_cast<std::size_t>(b >= t ? b - t : 0);
  }

  std::int64_t capacity() const noexcept { return ring_.load(std::memory_order_relaxed)->capacity; }

 private:
  alignas(64) std::atomic<std::int64_t> top_{0};
  alignas(64) std::atomic<std::int64_t> bottom_{0};
  alignas(64) std::atomic<Ring*> ring_{nullptr};
  std::vector<std::unique_ptr<Ring>> rings_;
};

}  // namespace htdg
