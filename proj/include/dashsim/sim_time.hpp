#pragma once

#include <cmath>
#include <cstdint>

namespace dashsim {

// Simulation time in integer microseconds since run start. Integer time keeps
// event ordering and trace output exact across runs and platforms.
using SimTime = std::int64_t;

inline constexpr SimTime kMicrosPerMilli = 1'000;
inline constexpr SimTime kMicrosPerSecond = 1'000'000;

constexpr SimTime from_millis(std::int64_t ms) { return ms * kMicrosPerMilli; }

inline SimTime from_seconds(double seconds) {
  return static_cast<SimTime>(std::llround(seconds * 1e6));
}

constexpr double to_seconds(SimTime t) { return static_cast<double>(t) / 1e6; }

constexpr double to_millis(SimTime t) { return static_cast<double>(t) / 1e3; }

}  // namespace dashsim
