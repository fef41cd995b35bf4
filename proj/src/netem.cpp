#include "dashsim/netem.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

namespace dashsim {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

BandwidthTrajectory::BandwidthTrajectory(std::vector<TrajectoryStep> steps)
    : steps_(std::move(steps)) {
  if (steps_.empty()) throw TrajectoryError("trajectory needs >= 1 step");
  if (steps_.front().start != 0) {
    throw TrajectoryError("first trajectory step must start at t=0");
  }
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (!(steps_[i].rate_kbps > 0.0)) {
      throw TrajectoryError("trajectory rates must be positive");
    }
    if (i > 0 && steps_[i].start <= steps_[i - 1].start) {
      throw TrajectoryError("trajectory step starts must strictly increase");
    }
  }
}

double BandwidthTrajectory::rate_at(SimTime t) const {
  if (t < 0) throw std::invalid_argument("rate_at: negative time");
  auto it = std::upper_bound(
      steps_.begin(), steps_.end(), t,
      [](SimTime value, const TrajectoryStep& s) { return value < s.start; });
  return std::prev(it)->rate_kbps;
}

double BandwidthTrajectory::min_rate_kbps() const {
  double m = steps_.front().rate_kbps;
  for (const auto& s : steps_) m = std::min(m, s.rate_kbps);
  return m;
}

double BandwidthTrajectory::max_rate_kbps() const {
  double m = steps_.front().rate_kbps;
  for (const auto& s : steps_) m = std::max(m, s.rate_kbps);
  return m;
}

double BandwidthTrajectory::time_weighted_mean_kbps(SimTime horizon) const {
  if (horizon <= 0) throw std::invalid_argument("mean horizon must be > 0");
  double weighted = 0.0;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const SimTime begin = std::min(steps_[i].start, horizon);
    const SimTime end =
        (i + 1 < steps_.size()) ? std::min(steps_[i + 1].start, horizon)
                                : horizon;
    weighted += steps_[i].rate_kbps * static_cast<double>(end - begin);
  }
  return weighted / static_cast<double>(horizon);
}

BandwidthTrajectory default_trajectory() {
  // One wave through the full 1-5 Mbps range, 12 steps of 50 s, time-weighted
  // mean exactly 2700 kbps.
  static constexpr double kRates[] = {2400, 3200, 4200, 5000, 4200, 3200,
                                      2200, 1400, 1000, 1400, 2000, 2200};
  std::vector<TrajectoryStep> steps;
  SimTime t = 0;
  for (double r : kRates) {
    steps.push_back(TrajectoryStep{t, r});
    t += 50 * kMicrosPerSecond;
  }
  return BandwidthTrajectory(std::move(steps));
}

BandwidthTrajectory parse_trajectory(std::istream& in) {
  std::vector<TrajectoryStep> steps;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double start_s = 0.0, rate = 0.0;
    if (!(row >> start_s >> rate)) {
      throw TrajectoryError("trajectory line " + std::to_string(line_no) +
                            ": expected `start_seconds rate_kbps`");
    }
    steps.push_back(TrajectoryStep{from_seconds(start_s), rate});
  }
  return BandwidthTrajectory(std::move(steps));
}

void write_trajectory(const BandwidthTrajectory& trajectory,
                      std::ostream& out) {
  out << "# start_seconds rate_kbps\n";
  for (const TrajectoryStep& s : trajectory.steps()) {
    out << format_double(to_seconds(s.start)) << ' '
        << format_double(s.rate_kbps) << "\n";
  }
}

BandwidthTrajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw TrajectoryError("cannot open trajectory file: " + path.string());
  }
  return parse_trajectory(in);
}

void save_trajectory(const BandwidthTrajectory& trajectory,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw TrajectoryError("cannot write trajectory file: " + path.string());
  }
  write_trajectory(trajectory, out);
}

void TokenBucket::refill(SimTime now) {
  if (now <= last_refill) return;
  const double elapsed_s = to_seconds(now - last_refill);
  tokens = std::min(burst_bytes, tokens + rate_bytes_per_sec * elapsed_s);
  last_refill = now;
}

EmulatedLink::EmulatedLink(LinkConfig config)
    : trajectory_(config.trajectory.has_value()
                      ? std::move(*config.trajectory)
                      : BandwidthTrajectory(
                            {TrajectoryStep{0, config.rate_kbps}})),
      one_way_delay_(std::max<SimTime>(config.one_way_delay, 1)),
      queue_capacity_(config.queue_capacity_bytes) {
  bucket_.burst_bytes = static_cast<double>(config.burst_bytes);
  bucket_.tokens = config.initial_tokens < 0.0
                       ? bucket_.burst_bytes
                       : std::min(config.initial_tokens, bucket_.burst_bytes);
  bucket_.rate_bytes_per_sec = trajectory_.rate_at(0) * 125.0;  // kbps -> B/s
}

double EmulatedLink::rate_kbps_at(SimTime t) const {
  return trajectory_.rate_at(t);
}

void EmulatedLink::drain(SimTime now) {
  while (!backlog_.empty() && backlog_.front().first <= now) {
    backlog_bytes_ -= backlog_.front().second;
    backlog_.pop_front();
  }
}

std::int64_t EmulatedLink::queued_bytes(SimTime now) {
  drain(now);
  return backlog_bytes_;
}

EmulatedLink::Transmit EmulatedLink::transmit(std::int64_t packet_bytes,
                                              SimTime now) {
  const std::uint64_t index = transmit_index_++;
  if (forced_drop_ && forced_drop_(index)) {
    ++drop_count_;
    dropped_bytes_ += packet_bytes;
    return Transmit{true, 0};
  }

  drain(now);
  if (backlog_bytes_ + packet_bytes > queue_capacity_) {
    ++drop_count_;
    dropped_bytes_ += packet_bytes;
    return Transmit{true, 0};
  }

  // FIFO: this packet cannot pass the shaper before earlier ones.
  const SimTime start = std::max(now, last_departure_);
  // Rate changes take effect at refill time, not retroactively.
  bucket_.rate_bytes_per_sec = trajectory_.rate_at(start) * 125.0;
  bucket_.refill(start);

  SimTime departure = start;
  const double need = static_cast<double>(packet_bytes);
  if (bucket_.tokens >= need) {
    bucket_.tokens -= need;
  } else {
    const double deficit = need - bucket_.tokens;
    const SimTime wait = static_cast<SimTime>(
        std::ceil(deficit / bucket_.rate_bytes_per_sec * 1e6));
    departure = start + wait;
    bucket_.tokens = 0.0;
    bucket_.last_refill = departure;
  }
  last_departure_ = departure;
  if (departure > now) {
    backlog_.push_back({departure, packet_bytes});
    backlog_bytes_ += packet_bytes;
  }
  ++delivered_packets_;
  delivered_bytes_ += packet_bytes;
  return Transmit{false, departure + one_way_delay_};
}

}  // namespace dashsim
