#include "dashsim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dashsim {

std::string format_fixed(double value, int precision) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::fixed, precision);
  if (ec != std::errc()) throw std::runtime_error("format_fixed failed");
  return std::string(buf, end);
}

void ResultTable::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << columns[i] << (i + 1 < columns.size() ? ',' : '\n');
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 < row.size() ? ',' : '\n');
    }
  }
}

void ResultTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out);
}

double ResultTable::value_at(std::size_t row, const std::string& column) const {
  auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end() || row >= rows.size()) {
    throw std::out_of_range("no such cell: row " + std::to_string(row) +
                            ", column " + column);
  }
  return std::stod(rows[row][static_cast<std::size_t>(it - columns.begin())]);
}

namespace {

// Runs one job per index on a small pool; results keyed by index so output
// order never depends on scheduling.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& job) {
  unsigned n = threads > 0 ? static_cast<unsigned>(threads)
                           : std::thread::hardware_concurrency();
  n = std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(count)));
  if (n == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

const MediaCatalog& catalog_of(const ScenarioSpec& spec,
                               std::optional<MediaCatalog>& storage) {
  if (spec.catalog) return *spec.catalog;
  if (!storage) storage = build_default_catalog();
  return *storage;
}

std::vector<int> levels_of(const ScenarioSpec& spec,
                           const MediaCatalog& catalog) {
  if (!spec.levels.empty()) {
    for (int level : spec.levels) {
      if (level < 0 || level >= catalog.level_count()) {
        throw std::out_of_range("scenario level " + std::to_string(level) +
                                " outside the catalog ladder");
      }
    }
    return spec.levels;
  }
  std::vector<int> all(static_cast<std::size_t>(catalog.level_count()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

int segments_for(const ScenarioSpec& spec, const MediaCatalog& catalog) {
  const double duration = catalog.segment_duration_s();
  const int n = static_cast<int>(
      std::llround(std::ceil(spec.session_seconds / duration)));
  return std::clamp(n, 1, catalog.segment_count());
}

void validate_common(const ScenarioSpec& spec) {
  if (spec.stacks.empty()) throw std::invalid_argument("no stacks selected");
  if (spec.seeds.empty()) throw std::invalid_argument("no seeds given");
  if (spec.rtts_ms.empty()) throw std::invalid_argument("no RTTs given");
}

void ensure_out_dir(const ScenarioSpec& spec) {
  if (!spec.out_dir.empty()) {
    std::filesystem::create_directories(spec.out_dir);
  }
}

std::string scenario_tag(const char* experiment, StackKind stack, int rtt_ms,
                         int level) {
  std::string tag = std::string(experiment) + "/" + to_string(stack) +
                    "/rtt" + std::to_string(rtt_ms);
  if (level >= 0) tag += "/L" + std::to_string(level);
  return tag;
}

void dump_packets_csv(const std::filesystem::path& dir, const std::string& tag,
                      const std::vector<PacketRecord>& packets,
                      const std::vector<FrameRecord>& frames) {
  std::string base = tag;
  std::replace(base.begin(), base.end(), '/', '_');
  {
    std::ofstream out(dir / ("packets_" + base + ".csv"), std::ios::binary);
    out << "time_us,direction,header_bytes,payload_bytes,stream_id,seq,ack,"
           "handshake,retransmit,dropped\n";
    for (const PacketRecord& p : packets) {
      out << p.time << ',' << (p.from == Side::kServer ? "down" : "up") << ','
          << p.header_bytes << ',' << p.payload_bytes << ',' << p.stream << ','
          << p.seq << ',' << int(p.ack) << ',' << int(p.handshake) << ','
          << int(p.retransmit) << ',' << int(p.dropped) << '\n';
    }
  }
  {
    std::ofstream out(dir / ("frames_" + base + ".csv"), std::ios::binary);
    out << "time_us,stream_id,type,bytes\n";
    for (const FrameRecord& f : frames) {
      out << f.time << ',' << f.stream << ',' << f.type << ',' << f.bytes
          << '\n';
    }
  }
}

}  // namespace

void write_session_trace(const ClientSession& session, std::ostream& out) {
  out << "index,level,bitrate_kbps,request_us,complete_us,media_bytes,"
         "wire_bytes,b_m_kbps,b_n_kbps,available_kbps\n";
  for (const SegmentDownloadRecord& r : session.records) {
    out << r.segment_index << ',' << r.level << ','
        << format_fixed(r.bitrate_kbps, 0) << ',' << r.request_time << ','
        << r.completion_time << ',' << r.media_bytes << ',' << r.wire_bytes
        << ',' << format_fixed(r.measured_kbps, 3) << ','
        << format_fixed(r.estimate_kbps, 3) << ','
        << format_fixed(r.available_kbps, 0) << '\n';
  }
}

OverheadResult run_overhead_sweep(const ScenarioSpec& spec) {
  validate_common(spec);
  ensure_out_dir(spec);
  std::optional<MediaCatalog> storage;
  const MediaCatalog& catalog = catalog_of(spec, storage);
  const std::vector<int> levels = levels_of(spec, catalog);
  const int segments = segments_for(spec, catalog);

  struct Cell {
    StackKind stack;
    int level;
    MetricsSummary mean;
    std::vector<MetricsSummary> per_seed;
  };
  std::vector<Cell> cells;
  for (StackKind stack : spec.stacks) {
    for (int level : levels) cells.push_back(Cell{stack, level, {}, {}});
  }

  parallel_for(cells.size(), spec.threads, [&](std::size_t i) {
    Cell& cell = cells[i];
    const double rate =
        catalog.representation(cell.level).bitrate_kbps;
    const std::string tag =
        scenario_tag("overhead", cell.stack, spec.overhead_rtt_ms, cell.level);
    try {
    for (std::uint64_t seed : spec.seeds) {
      SessionConfig sc;
      sc.catalog = &catalog;
      sc.stack = cell.stack;
      sc.rtt_ms = spec.overhead_rtt_ms;
      sc.link_rate_kbps = rate;
      sc.seed = seed;
      sc.segment_count = segments;
      sc.fixed_level = cell.level;
      std::vector<PacketRecord> packets;
      std::vector<FrameRecord> frames;
      if (spec.dump_packets && !spec.out_dir.empty()) {
        sc.packet_log = &packets;
        sc.frame_log = &frames;
      }
      const ClientSession session = run_session(sc);
      cell.per_seed.push_back(summarize(tag, session, rate));
      if (sc.packet_log) {
        dump_packets_csv(spec.out_dir, tag + "_seed" + std::to_string(seed),
                         packets, frames);
      }
    }
    cell.mean = aggregate(cell.per_seed);
    } catch (const std::exception& e) {
      throw std::runtime_error(tag + ": " + e.what());
    }
  });

  OverheadResult result;
  result.summary.columns = {"scenario", "stack", "rtt_ms", "rate_kbps",
                            "overhead", "utilization", "avg_throughput_kbps",
                            "runs", "level"};
  result.runs.columns = {"scenario", "stack", "rtt_ms", "rate_kbps",
                         "seed", "overhead", "level"};
  for (const Cell& cell : cells) {
    const std::string rate =
        std::to_string(catalog.representation(cell.level).bitrate_kbps);
    const std::string tag =
        scenario_tag("overhead", cell.stack, spec.overhead_rtt_ms, cell.level);
    result.summary.rows.push_back(
        {tag, to_string(cell.stack), std::to_string(spec.overhead_rtt_ms),
         rate, format_fixed(cell.mean.overhead, 6),
         format_fixed(cell.mean.utilization, 6),
         format_fixed(cell.mean.avg_media_throughput, 3),
         std::to_string(cell.mean.run_count), std::to_string(cell.level)});
    for (std::size_t s = 0; s < cell.per_seed.size(); ++s) {
      result.runs.rows.push_back(
          {tag, to_string(cell.stack), std::to_string(spec.overhead_rtt_ms),
           rate, std::to_string(spec.seeds[s]),
           format_fixed(cell.per_seed[s].overhead, 6),
           std::to_string(cell.level)});
    }
  }
  if (!spec.out_dir.empty()) {
    result.summary.save(spec.out_dir / "overhead_summary.csv");
    result.runs.save(spec.out_dir / "overhead_runs.csv");
  }
  return result;
}

UtilizationResult run_utilization_grid(const ScenarioSpec& spec) {
  validate_common(spec);
  ensure_out_dir(spec);
  std::optional<MediaCatalog> storage;
  const MediaCatalog& catalog = catalog_of(spec, storage);
  const std::vector<int> levels = levels_of(spec, catalog);
  const int segments = segments_for(spec, catalog);

  struct Cell {
    StackKind stack;
    int rtt_ms;
    int level;
    MetricsSummary mean;
    std::vector<MetricsSummary> per_seed;
  };
  std::vector<Cell> cells;
  for (StackKind stack : spec.stacks) {
    for (int rtt : spec.rtts_ms) {
      for (int level : levels) cells.push_back(Cell{stack, rtt, level, {}, {}});
    }
  }

  parallel_for(cells.size(), spec.threads, [&](std::size_t i) {
    Cell& cell = cells[i];
    const double rate = catalog.representation(cell.level).bitrate_kbps;
    const std::string tag =
        scenario_tag("utilization", cell.stack, cell.rtt_ms, cell.level);
    try {
    for (std::uint64_t seed : spec.seeds) {
      SessionConfig sc;
      sc.catalog = &catalog;
      sc.stack = cell.stack;
      sc.rtt_ms = cell.rtt_ms;
      sc.link_rate_kbps = rate;
      sc.seed = seed;
      sc.segment_count = segments;
      sc.fixed_level = cell.level;
      // Measured from a drained shaper so the burst credit cannot push the
      // utilization ratio past 1.
      sc.initial_tokens = 0.0;
      const ClientSession session = run_session(sc);
      cell.per_seed.push_back(summarize(tag, session, rate));
    }
    cell.mean = aggregate(cell.per_seed);
    } catch (const std::exception& e) {
      throw std::runtime_error(tag + ": " + e.what());
    }
  });

  UtilizationResult result;
  result.summary.columns = {"scenario", "stack", "rtt_ms", "rate_kbps",
                            "overhead", "utilization", "avg_throughput_kbps",
                            "runs", "level"};
  result.runs.columns = {"scenario", "stack", "rtt_ms", "rate_kbps",
                         "seed", "utilization", "level"};
  for (const Cell& cell : cells) {
    const std::string rate =
        std::to_string(catalog.representation(cell.level).bitrate_kbps);
    const std::string tag =
        scenario_tag("utilization", cell.stack, cell.rtt_ms, cell.level);
    result.summary.rows.push_back(
        {tag, to_string(cell.stack), std::to_string(cell.rtt_ms), rate,
         format_fixed(cell.mean.overhead, 6),
         format_fixed(cell.mean.utilization, 6),
         format_fixed(cell.mean.avg_media_throughput, 3),
         std::to_string(cell.mean.run_count), std::to_string(cell.level)});
    for (std::size_t s = 0; s < cell.per_seed.size(); ++s) {
      result.runs.rows.push_back(
          {tag, to_string(cell.stack), std::to_string(cell.rtt_ms), rate,
           std::to_string(spec.seeds[s]),
           format_fixed(cell.per_seed[s].utilization, 6),
           std::to_string(cell.level)});
    }
  }

  // Table-1 analogue: per stack x RTT, averaged across levels.
  result.averages.columns = {"stack", "rtt_ms", "utilization"};
  for (StackKind stack : spec.stacks) {
    for (int rtt : spec.rtts_ms) {
      double sum = 0.0;
      int n = 0;
      for (const Cell& cell : cells) {
        if (cell.stack == stack && cell.rtt_ms == rtt) {
          sum += cell.mean.utilization;
          ++n;
        }
      }
      result.averages.rows.push_back({to_string(stack), std::to_string(rtt),
                                      format_fixed(sum / n, 6)});
    }
  }
  if (!spec.out_dir.empty()) {
    result.summary.save(spec.out_dir / "utilization_summary.csv");
    result.runs.save(spec.out_dir / "utilization_runs.csv");
    result.averages.save(spec.out_dir / "utilization_table.csv");
  }
  return result;
}

AdaptationResult run_adaptation(const ScenarioSpec& spec) {
  validate_common(spec);
  ensure_out_dir(spec);
  std::optional<MediaCatalog> storage;
  const MediaCatalog& catalog = catalog_of(spec, storage);
  const BandwidthTrajectory trajectory =
      spec.trajectory ? *spec.trajectory : default_trajectory();

  struct Cell {
    StackKind stack;
    int rtt_ms;
    MetricsSummary mean;
    std::vector<MetricsSummary> per_seed;
    std::vector<ClientSession> sessions;
  };
  std::vector<Cell> cells;
  for (StackKind stack : spec.stacks) {
    for (int rtt : spec.rtts_ms) cells.push_back(Cell{stack, rtt, {}, {}, {}});
  }

  parallel_for(cells.size(), spec.threads, [&](std::size_t i) {
    Cell& cell = cells[i];
    const std::string tag =
        scenario_tag("adaptation", cell.stack, cell.rtt_ms, -1);
    try {
    for (std::uint64_t seed : spec.seeds) {
      SessionConfig sc;
      sc.catalog = &catalog;
      sc.stack = cell.stack;
      sc.rtt_ms = cell.rtt_ms;
      sc.trajectory = &trajectory;
      sc.seed = seed;
      std::vector<PacketRecord> packets;
      std::vector<FrameRecord> frames;
      if (spec.dump_packets && !spec.out_dir.empty()) {
        sc.packet_log = &packets;
        sc.frame_log = &frames;
      }
      ClientSession session = run_session(sc);
      cell.per_seed.push_back(summarize(tag, session, 0.0));
      if (sc.packet_log) {
        dump_packets_csv(spec.out_dir, tag + "_seed" + std::to_string(seed),
                         packets, frames);
      }
      cell.sessions.push_back(std::move(session));
    }
    cell.mean = aggregate(cell.per_seed);
    } catch (const std::exception& e) {
      throw std::runtime_error(tag + ": " + e.what());
    }
  });

  AdaptationResult result;
  result.summary.columns = {"scenario", "stack", "rtt_ms", "overhead",
                            "avg_throughput_kbps", "runs"};
  result.runs.columns = {"scenario", "stack", "rtt_ms", "seed",
                         "avg_throughput_kbps"};
  for (const Cell& cell : cells) {
    const std::string tag =
        scenario_tag("adaptation", cell.stack, cell.rtt_ms, -1);
    result.summary.rows.push_back(
        {tag, to_string(cell.stack), std::to_string(cell.rtt_ms),
         format_fixed(cell.mean.overhead, 6),
         format_fixed(cell.mean.avg_media_throughput, 3),
         std::to_string(cell.mean.run_count)});
    for (std::size_t s = 0; s < cell.per_seed.size(); ++s) {
      result.runs.rows.push_back(
          {tag, to_string(cell.stack), std::to_string(cell.rtt_ms),
           std::to_string(spec.seeds[s]),
           format_fixed(cell.per_seed[s].avg_media_throughput, 3)});
    }
    if (!spec.out_dir.empty()) {
      for (std::size_t s = 0; s < cell.sessions.size(); ++s) {
        const std::string name = "trace_" + to_string(cell.stack) + "_rtt" +
                                 std::to_string(cell.rtt_ms) + "_seed" +
                                 std::to_string(spec.seeds[s]) + ".csv";
        std::ofstream out(spec.out_dir / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write trace " + name);
        write_session_trace(cell.sessions[s], out);
      }
    }
  }
  if (!spec.out_dir.empty()) {
    result.summary.save(spec.out_dir / "adaptation_summary.csv");
    result.runs.save(spec.out_dir / "adaptation_runs.csv");
  }
  return result;
}

ResultTable analytic_overhead_table() {
  ResultTable table;
  table.columns = {"path",          "transport_header_bytes",
                   "ip_header_bytes", "ethernet_header_bytes",
                   "mtu_bytes",     "total_overhead_percent"};
  const StackConfig tcp = StackConfig::make(StackKind::kHttp2Tcp);
  const StackConfig quic = StackConfig::make(StackKind::kHttp1Quic);
  for (const StackConfig* cfg : {&tcp, &quic}) {
    table.rows.push_back({cfg->quic ? "quic" : "tcp",
                          std::to_string(cfg->transport_header_bytes),
                          std::to_string(cfg->ip_header_bytes),
                          std::to_string(cfg->ethernet_header_bytes),
                          std::to_string(cfg->mtu_bytes),
                          format_fixed(cfg->analytic_overhead() * 100.0, 2)});
  }
  return table;
}

}  // namespace dashsim
