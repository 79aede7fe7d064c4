// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

namespace htdg {

/**
 * Two-phase-commit event notifier (an event count).
 *
 * A waiter announces intent with prepare_wait(), re-checks its predicate, and
 * then either cancel_wait()s (predicate became true) or commit_wait()s to
 * block. A notifier makes the predicate true and then calls notify().
 *
 * The correctness crux is a Dekker-style store-load pair:
 *
 *   waiter:   RMW on state_ (announce)  ; seq_cst fence ; load predicate
 *   notifier: store predicate           ; seq_cst fence ; load state_
 *
 * With both fences at least one side observes the other's write. Either the
 * waiter sees the predicate and cancels, or notify() sees the announced waiter
 * and advances the epoch. commit_wait() compares the epoch captured at
 * announce time against the current one under `mu_`, so a notification that
 * lands anywhere between prepare and commit is never lost.
 *
 * Waiter ids are dense indices in [0, num_waiters). Each waiter's calls must
 * follow none -> prepare -> (cancel | commit) -> none; anything else throws
 * Error(ProtocolViolation).
 */
class Notifier {
 public:
  enum class WaiterState : std::uint8_t { None, Preparing, Committed };

  explicit Notifier(std::size_t num_waiters);

  Notifier(const Notifier&) = delete;
  Notifier& operator=(const Notifier&) = delete;

  void prepare_wait(std::size_t waiter);
  void cancel_wait(std::size_t waiter);

  /// Blocks unless a notification arrived after prepare_wait(). Returns true
  /// if the caller actually parked.
  bool commit_wait(std::size_t waiter);

  /// Wakes at least one (all == false) or every (all == true) waiter that is
  /// preparing or committed. A no-op when nobody has announced.
  void notify(bool all);
  void notify_one() { notify(false); }
  void notify_all() { notify(true); }

  std::size_t size() const noexcept { return num_waiters_; }

  /// Waiters currently between prepare_wait and the end of cancel/commit.
  std::size_t num_announced() const noexcept;

  /// Waiters blocked inside commit_wait.
  std::size_t num_parked() const;

  WaiterState state(std::size_t waiter) const;

 private:
  // state_ packs the announced-waiter count (low 32 bits) and the
  // notification epoch (high 32 bits) so prepare_wait can read the epoch and
  // announce in one RMW.
  static constexpr std::uint64_t kWaiterMask = 0xffffffffull;
  static constexpr std::uint64_t kEpochShift = 32;
  static constexpr std::uint64_t kEpochInc = 1ull << kEpochShift;

  struct alignas(64) Waiter {
    std::atomic<WaiterState> state{WaiterState::None};
    std::uint64_t epoch = 0;
    bool signaled = false;  // guarded by mu_
    std::condition_variable cv;
  };

  Waiter& at(std::size_t waiter);
  const Waiter& at(std::size_t waiter) const;

  alignas(64) std::atomic<std::uint64_t> state_{0};
  mutable std::mutex mu_;
  std::vector<std::size_t> parked_;  // guarded by mu_
  std::size_t num_waiters_;
  std::unique_ptr<Waiter[]> waiters_;
};

}  // namespace htdg
