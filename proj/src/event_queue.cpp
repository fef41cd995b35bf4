#include "dashsim/event_queue.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace dashsim {

EventId EventQueue::schedule(SimTime at, std::function<void()> action) {
  if (at < now_) {
    throw std::invalid_argument("schedule: fire time " + std::to_string(at) +
                                "us is in the past (clock " +
                                std::to_string(now_) + "us)");
  }
  const EventId id = next_id_++;
  heap_.push(Entry{at, id});
  actions_.emplace(id, std::move(action));
  ++scheduled_;
  return id;
}

bool EventQueue::cancel(EventId id) {
  // The heap entry stays behind and is skipped when popped.
  const bool erased = actions_.erase(id) > 0;
  if (erased) ++cancelled_;
  return erased;
}

SimTime EventQueue::run_until_idle(std::uint64_t max_events) {
  std::uint64_t ran = 0;
  while (!heap_.empty()) {
    const Entry top = heap_.top();
    heap_.pop();
    auto it = actions_.find(top.id);
    if (it == actions_.end()) continue;  // cancelled
    if (ran >= max_events) {
      throw std::runtime_error(
          "event budget of " + std::to_string(max_events) +
          " exceeded at t=" + std::to_string(top.at) + "us; likely livelock");
    }
    std::function<void()> action = std::move(it->second);
    actions_.erase(it);
    now_ = top.at;
    ++processed_;
    ++ran;
    action();
  }
  return now_;
}

}  // namespace dashsim
