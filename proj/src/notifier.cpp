// Copyright 2026 The htdg Authors
// SPDX-License-Identifier: Apache-2.0

#include "htdg/notifier.hpp"

#include <algorithm>
#include <string>

#include "htdg/error.hpp"

namespace htdg {

Notifier::Notifier(std::size_t num_waiters)
    : num_waiters_(num_waiters), waiters_(new Waiter[num_waiters]) {}

Notifier::Waiter& Notifier::at(std::size_t waiter) {
  if (waiter >= num_waiters_) {
    throw Error(ErrorCode::ProtocolViolation, "waiter id " + std::to_string(waiter) + " out of range");
  }
  return waiters_[waiter];
}

const Notifier::Waiter& Notifier::at(std::size_t waiter) const {
  return const_cast<Notifier*>(this)->at(waiter);
}

void Notifier::prepare_wait(std::size_t waiter) {
  Waiter& w = at(waiter);
  if (w.state.load(std::memory_order_relaxed) != WaiterState::None) {
    throw Error(ErrorCode::ProtocolViolation, "prepare_wait while already waiting");
  }
  std::uint64_t prev = state_.fetch_add(1, std::memory_order_relaxed);
  // Store-load barrier: the announce above must be globally visible before the
  // caller re-reads its predicate.
  std::atomic_thread_fence(std::memory_order_seq_cst);
  w.epoch = prev >> kEpochShift;
  w.state.store(WaiterState::Preparing, std::memory_order_relaxed);
}

void Notifier::cancel_wait(std::size_t waiter) {
  Waiter& w = at(waiter);
  if (w.state.load(std::memory_order_relaxed) != WaiterState::Preparing) {
    throw Error(ErrorCode::ProtocolViolation, "cancel_wait without prepare_wait");
  }
  state_.fetch_sub(1, std::memory_order_relaxed);
  w.state.store(WaiterState::None, std::memory_order_relaxed);
}

bool Notifier::commit_wait(std::size_t waiter) {
  Waiter& w = at(waiter);
  if (w.state.load(std::memory_order_relaxed) != WaiterState::Preparing) {
    throw Error(ErrorCode::ProtocolViolation, "commit_wait without prepare_wait");
  }
  bool parked = false;
  {
    std::unique_lock lock(mu_);
    // The epoch only advances under mu_, so this check and the enqueue below
    // are atomic with respect to notify().
    if ((state_.load(std::memory_order_relaxed) >> kEpochShift) == w.epoch) {
      parked = true;
      w.signaled = false;
      w.state.store(WaiterState::Committed, std::memory_order_relaxed);
      parked_.push_back(waiter);
      w.cv.wait(lock, [&] { return w.signaled; });
    }
  }
  state_.fetch_sub(1, std::memory_order_relaxed);
  w.state.store(WaiterState::None, std::memory_order_relaxed);
  return parked;
}

void Notifier::notify(bool all) {
  // Pairs with the fence in prepare_wait(); see the class comment.
  std::atomic_thread_fence(std::memory_order_seq_cst);
  if ((state_.load(std::memory_order_relaxed) & kWaiterMask) == 0) return;

  std::lock_guard lock(mu_);
  state_.fetch_add(kEpochInc, std::memory_order_relaxed);
  if (all) {
    for (std::size_t id : parked_) {
      waiters_[id].signaled = true;
      waiters_[id].cv.notify_one();
    }
    parked_.clear();
  } else if (!parked_.empty()) {
    std::size_t id = parked_.back();
    parked_.pop_back();
    waiters_[id].signaled = true;
    waiters_[id].cv.notify_one();
  }
}

std::size_t Notifier::num_announced() const noexcept {
  return static_cast<std::size_t>(state_.load(std::memory_order_relaxed) & kWaiterMask);
}

std::size_t Notifier::num_parked() const {
  std::lock_guard lock(mu_);
  return parked_.size();
}

Notifier::WaiterState Notifier::state(std::size_t waiter) const {
  return at(waiter).state.load(std::memory_order_relaxed);
}

}  // namespace htdg
