// Acceptance suite: runs the full-scale checks behind the three experiments
// and prints one PASS/FAIL line per criterion. Exit code = number of failed
// criteria. Invoked by ctest as
//   acceptance --cli <path-to-dashsim-binary> --work <scratch-dir>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dashsim/dash_client.hpp"
#include "dashsim/media_catalog.hpp"
#include "dashsim/metrics.hpp"
#include "dashsim/netem.hpp"
#include "dashsim/rng.hpp"
#include "dashsim/scenario.hpp"
#include "dashsim/stack.hpp"
#include "dashsim/transport.hpp"

namespace fs = std::filesystem;
using namespace dashsim;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  std::printf("[%d] %s  %s\n", criterion, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void note(const std::string& line) {
  std::printf("        %s\n", line.c_str());
  std::fflush(stdout);
}

std::string run_cli(const std::string& cli, const std::string& args,
                    const fs::path& work, const std::string& tag) {
  const fs::path out = work / (tag + ".stdout");
  const std::string cmd = cli + " " + args + " > " + out.string() + " 2> " +
                          (work / (tag + ".stderr")).string();
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    throw std::runtime_error("cli exited with status " + std::to_string(rc) +
                             ": " + cmd);
  }
  std::ifstream in(out, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- criterion 1: the table2 subcommand reports the analytic overheads ----

void criterion_table2(const std::string& cli, const fs::path& work) {
  const std::string csv = run_cli(cli, "table2", work, "table2");
  double tcp = -1, quic = -1;
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string path, cell;
    std::getline(cells, path, ',');
    double last = -1;
    while (std::getline(cells, cell, ',')) last = std::stod(cell);
    if (path == "tcp") tcp = last;
    if (path == "quic") quic = last;
  }
  const bool pass = std::abs(tcp - 4.36) <= 0.005 &&
                    std::abs(quic - 3.38) <= 0.005 &&
                    std::abs(66.0 / 1514.0 * 100.0 - 4.36) <= 0.005 &&
                    std::abs(42.0 / 1242.0 * 100.0 - 3.38) <= 0.005;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "table2 overhead: tcp %.4f%% (want 4.36), quic %.4f%% "
                "(want 3.38), tolerance 0.005pp",
                tcp, quic);
  report(1, pass, buf);
}

// --- criterion 2: estimator equals an independent evaluation --------------

void criterion_estimator() {
  SeededRng rng(777);
  bool pass = true;
  for (int i = 0; i < 10'000 && pass; ++i) {
    const double b_prev = rng.uniform_double() * 10'000.0;
    const double b_m = rng.uniform_double() * 10'000.0;
    EstimatorState state{0.7, 1.3, b_prev};
    const double got = estimate_bandwidth(state, b_m);
    const double oracle = (0.7 * b_prev + 1.3 * b_m) / (0.7 + 1.3);
    pass &= std::abs(got - oracle) <= 1e-9 * std::max(1.0, oracle);
    pass &= std::abs(got - (0.35 * b_prev + 0.65 * b_m)) <=
            1e-9 * std::max(1.0, oracle);
  }
  report(2, pass,
         "estimator matches the closed-form oracle on 10000 random pairs "
         "(defaults reduce to 0.35/0.65)");
}

// --- criterion 3: overhead sweep shape -------------------------------------

void criterion_overhead_sweep() {
  ScenarioSpec spec;
  spec.session_seconds = 60;
  const OverheadResult result = run_overhead_sweep(spec);
  // Rows are ordered stack-major: h2-tcp, h2-ssl, h1-quic, spdy-quic.
  double overhead[4][14];
  for (int s = 0; s < 4; ++s) {
    for (int l = 0; l < 14; ++l) {
      overhead[s][l] = result.summary.value_at(
          static_cast<std::size_t>(s * 14 + l), "overhead");
    }
  }

  // (a) weakly decreasing per stack, within packetization granularity
  // (a near-empty tail packet can nudge a level by a few thousandths of a
  // percentage point).
  bool monotone = true;
  const double kPackingTolerance = 0.0005;
  for (int s = 0; s < 4; ++s) {
    for (int l = 1; l < 14; ++l) {
      monotone &= overhead[s][l] <= overhead[s][l - 1] + kPackingTolerance;
    }
  }
  report(3, monotone,
         "overhead weakly decreases with level per stack (tolerance 0.05pp "
         "for tail-packet packing)");

  // (b) both QUIC stacks above h2-tcp at every level.
  bool quic_above = true;
  for (int l = 0; l < 14; ++l) {
    quic_above &= overhead[2][l] > overhead[0][l];
    quic_above &= overhead[3][l] > overhead[0][l];
  }
  report(3, quic_above, "both QUIC stacks exceed h2-tcp at every level");

  // (c) all levels at or above 200 kbps stay below 10%.
  bool below10 = true;
  for (int s = 0; s < 4; ++s) {
    for (int l = 1; l < 14; ++l) below10 &= overhead[s][l] < 0.10;
  }
  report(3, below10, "every level >= 200 kbps shows overhead < 10%");

  // (d) mean QUIC-stack overhead above mean h2-ssl by 0.5..3.0 pp.
  double mean[4] = {0, 0, 0, 0};
  for (int s = 0; s < 4; ++s) {
    for (int l = 0; l < 14; ++l) mean[s] += overhead[s][l] / 14.0;
  }
  const double gap_pp = ((mean[2] + mean[3]) / 2.0 - mean[1]) * 100.0;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "mean QUIC minus mean h2-ssl overhead gap %.3fpp in "
                "[0.5, 3.0]",
                gap_pp);
  report(3, gap_pp >= 0.5 && gap_pp <= 3.0, buf);
}

// --- criterion 4: utilization grid ------------------------------------------

void criterion_utilization() {
  ScenarioSpec spec;
  spec.session_seconds = 60;
  const UtilizationResult result = run_utilization_grid(spec);
  // averages rows: stack-major, rtt order 0/50/150.
  double cell[4][3];
  for (int s = 0; s < 4; ++s) {
    for (int r = 0; r < 3; ++r) {
      cell[s][r] = result.averages.value_at(
          static_cast<std::size_t>(s * 3 + r), "utilization");
    }
  }

  bool above80 = true, decreasing = true, floor150 = true;
  for (int s = 0; s < 4; ++s) {
    for (int r = 0; r < 3; ++r) above80 &= cell[s][r] > 0.80;
    decreasing &= cell[s][0] > cell[s][1] && cell[s][1] > cell[s][2];
    floor150 &= cell[s][2] >= 0.85;
  }
  report(4, above80, "every (stack, RTT) averaged utilization > 80%");
  report(4, decreasing, "utilization strictly decreasing in RTT per stack");
  report(4, floor150, "at RTT 150 ms every stack >= 85% utilization");

  // Soft target: +-5pp against the testbed reference cells; reported per
  // cell, never gating.
  const double reference[4][3] = {{95.3, 92.9, 88.4},
                                  {95.1, 92.6, 88.0},
                                  {94.0, 91.8, 87.2},
                                  {93.9, 91.7, 87.2}};
  const char* names[4] = {"h2-tcp", "h2-ssl", "h1-quic", "spdy-quic"};
  const int rtts[3] = {0, 50, 150};
  int soft_pass = 0;
  for (int s = 0; s < 4; ++s) {
    for (int r = 0; r < 3; ++r) {
      const double diff = cell[s][r] * 100.0 - reference[s][r];
      const bool ok = std::abs(diff) <= 5.0;
      soft_pass += ok;
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "soft %s rtt %3d ms: %.1f%% vs reference %.1f%% "
                    "(%+.2fpp) %s",
                    names[s], rtts[r], cell[s][r] * 100.0, reference[s][r],
                    diff, ok ? "pass" : "fail");
      note(buf);
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "soft +-5pp reference comparison: %d/12 cells pass "
                "(reported, not gating)",
                soft_pass);
  note(buf);
}

// --- criterion 5: adaptation performance ------------------------------------

void criterion_adaptation() {
  const BandwidthTrajectory traj = default_trajectory();
  const double mean = traj.time_weighted_mean_kbps(from_seconds(600));
  const bool traj_ok = traj.min_rate_kbps() >= 1000 &&
                       traj.max_rate_kbps() <= 5000 &&
                       std::abs(mean - 2700) <= 27;
  char tbuf[128];
  std::snprintf(tbuf, sizeof(tbuf),
                "default trajectory in [1,5] Mbps with mean %.1f kbps "
                "(2700 +- 1%%)",
                mean);
  report(5, traj_ok, tbuf);

  ScenarioSpec spec;
  const AdaptationResult result = run_adaptation(spec);
  double cell[4][3];
  for (int s = 0; s < 4; ++s) {
    for (int r = 0; r < 3; ++r) {
      cell[s][r] = result.summary.value_at(
          static_cast<std::size_t>(s * 3 + r), "avg_throughput_kbps");
    }
  }
  bool in_range = true, decreasing = true;
  for (int s = 0; s < 4; ++s) {
    for (int r = 0; r < 3; ++r) {
      in_range &= cell[s][r] > 2000.0 && cell[s][r] <= 2700.0;
    }
    decreasing &= cell[s][0] >= cell[s][1] && cell[s][1] >= cell[s][2];
  }
  double lo = 1e9, hi = 0;
  for (int s = 0; s < 4; ++s) {
    for (int r = 0; r < 3; ++r) {
      lo = std::min(lo, cell[s][r]);
      hi = std::max(hi, cell[s][r]);
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "avg media throughput in (2000, 2700] for every stack x RTT "
                "(range %.0f..%.0f kbps)",
                lo, hi);
  report(5, in_range, buf);
  report(5, decreasing, "avg media throughput decreasing in RTT per stack");

  // Selection audit on one full session per stack x RTT: the chosen bitrate
  // never exceeds the estimate in force when a qualifying level exists.
  const MediaCatalog catalog = build_default_catalog();
  bool never_over = true;
  for (StackKind stack : kAllStacks) {
    for (int rtt : {0, 50, 150}) {
      SessionConfig sc;
      sc.catalog = &catalog;
      sc.stack = stack;
      sc.rtt_ms = rtt;
      sc.trajectory = &traj;
      sc.seed = 1;
      const ClientSession session = run_session(sc);
      for (std::size_t i = 1; i < session.records.size(); ++i) {
        const auto& rec = session.records[i];
        const double estimate = session.records[i - 1].estimate_kbps;
        if (rec.level > 0) {  // level 0 is the no-qualifier fallback
          never_over &= rec.bitrate_kbps <= estimate + 1e-9;
        }
      }
    }
  }
  report(5, never_over,
         "selected bitrate never exceeds the in-force estimate when a "
         "qualifying level exists");
}

// --- criterion 6: transport reliability invariants --------------------------

void criterion_transport() {
  bool delivered_ok = true, mtu_ok = true, header_ok = true;
  for (StackKind kind : {StackKind::kHttp2Tcp, StackKind::kHttp1Quic}) {
    EventQueue queue;
    LinkConfig lc;
    lc.rate_kbps = 8'000;
    lc.one_way_delay = from_millis(25);
    lc.queue_capacity_bytes = 1 << 20;
    EmulatedLink down(lc), up(lc);
    down.set_forced_drop([](std::uint64_t i) { return i % 20 == 7; });
    up.set_forced_drop([](std::uint64_t i) { return i % 20 == 13; });
    TransportConfig tc;
    tc.stack = StackConfig::make(kind);
    tc.nominal_rtt = from_millis(50);
    Connection conn(tc, queue, down, up);
    std::vector<PacketRecord> packets;
    conn.set_packet_log(&packets);
    std::map<std::pair<int, StreamId>, std::uint64_t> delivered;
    conn.set_on_data([&](Side at, StreamId stream, std::uint64_t offset,
                         std::int64_t len, SimTime) {
      auto& cursor = delivered[{at == Side::kServer, stream}];
      if (offset != cursor) delivered_ok = false;  // out of order or gap
      cursor += static_cast<std::uint64_t>(len);
    });
    conn.open(0);
    const StreamId a = conn.open_client_stream();
    const StreamId b = conn.open_client_stream();
    queue.run_until_idle();
    conn.send(Side::kServer, a, 400'000, queue.now());
    conn.send(Side::kServer, b, 150'000, queue.now());
    conn.send(Side::kClient, a, 50'000, queue.now());
    queue.run_until_idle(50'000'000);

    const std::uint64_t down_total =
        a == b ? delivered[{0, a}] : delivered[{0, a}] + delivered[{0, b}];
    delivered_ok &= down_total == 550'000;
    delivered_ok &= delivered[{1, a}] == 50'000;

    const int mtu = tc.stack.mtu_bytes;
    for (const auto& p : packets) {
      mtu_ok &= p.header_bytes + p.payload_bytes <= mtu;
      if (tc.stack.quic) {
        const int qh = static_cast<int>(p.header_bytes) - 42;
        header_ok &= qh >= 2 && qh <= 19;
      }
    }
  }
  report(6, delivered_ok,
         "forced 5% drops: delivered per-stream bytes equal sent bytes on "
         "both transports");
  report(6, mtu_ok, "every packet within its stack MTU under loss");
  report(6, header_ok, "QUIC header lengths within [2, 19] under loss");

  // Cross-stream independence: a dropped packet on stream A does not delay
  // stream B's delivery.
  auto b_delivery_time = [](bool drop) {
    EventQueue queue;
    LinkConfig lc;
    lc.rate_kbps = 4'000;
    lc.one_way_delay = from_millis(25);
    EmulatedLink down(lc), up(lc);
    TransportConfig tc;
    tc.stack = StackConfig::make(StackKind::kSpdyQuic);
    tc.nominal_rtt = from_millis(50);
    Connection conn(tc, queue, down, up);
    SimTime b_done = -1;
    StreamId b_id = 0;
    conn.set_on_data([&](Side at, StreamId stream, std::uint64_t offset,
                         std::int64_t len, SimTime t) {
      if (at == Side::kClient && stream == b_id &&
          offset + static_cast<std::uint64_t>(len) == 100) {
        b_done = t;
      }
    });
    conn.open(0);
    const StreamId a = conn.open_client_stream();
    b_id = conn.open_client_stream();
    queue.run_until_idle();
    if (drop) {
      down.set_forced_drop([](std::uint64_t i) { return i == 3; });
    }
    const std::int64_t mss = conn.mss_stream();
    conn.send(Side::kServer, a, 3 * mss, queue.now());
    conn.send(Side::kServer, b_id, 100, queue.now());
    conn.send(Side::kServer, a, 2 * mss, queue.now());
    queue.run_until_idle();
    return b_done;
  };
  const SimTime clean = b_delivery_time(false);
  const SimTime lossy = b_delivery_time(true);
  report(6, clean > 0 && clean == lossy,
         "QUIC cross-stream independence: stream-A loss leaves stream-B "
         "timing untouched");
}

// --- criterion 7: deterministic outputs -------------------------------------

void criterion_determinism(const std::string& cli, const fs::path& work) {
  const fs::path dir_a = work / "det_a";
  const fs::path dir_b = work / "det_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  const std::string overhead_args =
      "overhead --stack h2-tcp,spdy-quic --seeds 1,2 --out ";
  run_cli(cli, overhead_args + dir_a.string(), work, "det_oh_a");
  run_cli(cli, overhead_args + dir_b.string(), work, "det_oh_b");
  const std::string adapt_args =
      "adaptation --stack h1-quic --rtt 50 --seeds 1 --out ";
  run_cli(cli, adapt_args + dir_a.string(), work, "det_ad_a");
  run_cli(cli, adapt_args + dir_b.string(), work, "det_ad_b");

  bool pass = true;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    ++files;
    const fs::path other = dir_b / entry.path().filename();
    pass &= fs::exists(other);
    pass &= read_file(entry.path()) == read_file(other);
  }
  pass &= files >= 4;
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "identical flags and seeds give byte-identical CSVs "
                "(%d files compared)",
                files);
  report(7, pass, buf);
}

// --- criterion 8: shaper bound -----------------------------------------------

void criterion_shaper_bound() {
  bool pass = true;
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL}) {
    LinkConfig lc;
    lc.rate_kbps = 1'000;  // 125,000 B/s
    lc.one_way_delay = 0;
    lc.burst_bytes = 12'500;
    lc.queue_capacity_bytes = 1 << 20;
    EmulatedLink link(lc);
    SeededRng rng(seed);
    std::vector<std::pair<SimTime, std::int64_t>> departures;
    SimTime t = 0;
    for (int i = 0; i < 600; ++i) {
      t += rng.uniform_int(0, 25'000);
      const std::int64_t bytes = rng.uniform_int(40, 1514);
      const auto r = link.transmit(bytes, t);
      if (!r.dropped) departures.push_back({r.arrival - 1, bytes});
    }
    for (std::size_t i = 0; i < departures.size() && pass; ++i) {
      std::int64_t window = 0;
      for (std::size_t j = i; j < departures.size(); ++j) {
        window += departures[j].second;
        const double seconds =
            to_seconds(departures[j].first - departures[i].first);
        if (window > 12'500 + 125'000 * seconds + 1e-6) {
          pass = false;
          break;
        }
      }
    }
  }
  report(8, pass,
         "randomized schedules never exceed burst + rate*T over any window");
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  fs::path work = "acceptance_work";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") cli = argv[i + 1];
    if (flag == "--work") work = argv[i + 1];
  }
  if (cli.empty()) {
    std::fprintf(stderr, "usage: acceptance --cli <dashsim> [--work <dir>]\n");
    return 2;
  }
  fs::create_directories(work);

  try {
    criterion_table2(cli, work);
    criterion_estimator();
    criterion_overhead_sweep();
    criterion_utilization();
    criterion_adaptation();
    criterion_transport();
    criterion_determinism(cli, work);
    criterion_shaper_bound();
  } catch (const std::exception& e) {
    std::printf("[!] FAIL  suite aborted: %s\n", e.what());
    return 99;
  }

  std::printf("%s: %d criterion check(s) failed\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failures);
  return g_failures;
}
