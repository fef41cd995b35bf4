#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "dashsim/sim_time.hpp"

namespace dashsim {

using EventId = std::uint64_t;

// Single-threaded discrete-event queue with a virtual microsecond clock.
// Events firing at the same instant run in insertion order (id order), so a
// run is fully reproducible.
class EventQueue {
 public:
  static constexpr std::uint64_t kDefaultEventBudget = 10'000'000;

  SimTime now() const { return now_; }

  // Enqueues `action` to run at `at`. Scheduling before the current clock is
  // a programming error and throws.
  EventId schedule(SimTime at, std::function<void()> action);

  // Removes a pending event. Returns false when the id is unknown or the
  // event already ran.
  bool cancel(EventId id);

  std::size_t pending() const { return actions_.size(); }
  std::uint64_t scheduled_count() const { return scheduled_; }
  std::uint64_t processed_count() const { return processed_; }
  std::uint64_t cancelled_count() const { return cancelled_; }

  // Processes events in (fire_at, id) order until none remain. Returns the
  // clock, i.e. the fire time of the last processed event (0 for an empty
  // queue). Throws std::runtime_error once `max_events` have been processed
  // in this call; that signals a livelock, not normal termination.
  SimTime run_until_idle(std::uint64_t max_events = kDefaultEventBudget);

 private:
  struct Entry {
    SimTime at;
    EventId id;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.id > b.id;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::unordered_map<EventId, std::function<void()>> actions_;
  SimTime now_ = 0;
  EventId next_id_ = 0;
  std::uint64_t scheduled_ = 0;
  std::uint64_t processed_ = 0;
  std::uint64_t cancelled_ = 0;
};

}  // namespace dashsim
