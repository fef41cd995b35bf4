// Command-line front end: reproduces the three experiments (overhead sweep,
// utilization grid, adaptation runs) and prints the analytic header table.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dashsim/media_catalog.hpp"
#include "dashsim/netem.hpp"
#include "dashsim/scenario.hpp"
#include "dashsim/stack.hpp"

namespace {

std::vector<dashsim::StackKind> parse_stacks(
    const std::vector<std::string>& names) {
  std::vector<dashsim::StackKind> stacks;
  for (const std::string& name : names) {
    if (name == "all") {
      return {dashsim::kAllStacks, dashsim::kAllStacks + 4};
    }
    stacks.push_back(dashsim::stack_from_string(name));
  }
  return stacks;
}

struct CommonOptions {
  std::vector<std::string> stacks{"all"};
  std::vector<int> rtts{0, 50, 150};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string catalog_path;
  std::string trajectory_path;
  std::string out_dir = "out";
  std::string format = "csv";
  bool dump_packets = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--stack", opt.stacks,
                  "Stacks: h2-tcp, h2-ssl, h1-quic, spdy-quic or all")
      ->delimiter(',');
  cmd->add_option("--rtt", opt.rtts, "Round-trip times in ms")->delimiter(',');
  cmd->add_option("--seeds", opt.seeds, "Run seeds")->delimiter(',');
  cmd->add_option("--catalog", opt.catalog_path, "Media catalog file");
  cmd->add_option("--trajectory", opt.trajectory_path,
                  "Bandwidth trajectory file");
  cmd->add_option("--out", opt.out_dir, "Output directory");
  cmd->add_option("--format", opt.format, "Output format (csv)")
      ->check(CLI::IsMember({"csv"}));
  cmd->add_flag("--dump-packets", opt.dump_packets,
                "Write per-packet and per-frame debug CSVs");
  cmd->add_option("--threads", opt.threads,
                  "Worker threads (0 = hardware concurrency)");
}

dashsim::ScenarioSpec make_spec(const CommonOptions& opt,
                                dashsim::Experiment experiment) {
  dashsim::ScenarioSpec spec;
  spec.experiment = experiment;
  spec.stacks = parse_stacks(opt.stacks);
  spec.rtts_ms = opt.rtts;
  spec.seeds = opt.seeds;
  spec.out_dir = opt.out_dir;
  spec.dump_packets = opt.dump_packets;
  spec.threads = opt.threads;
  if (!opt.catalog_path.empty()) {
    spec.catalog = dashsim::load_catalog(opt.catalog_path);
  }
  if (!opt.trajectory_path.empty()) {
    spec.trajectory = dashsim::load_trajectory(opt.trajectory_path);
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DASH streaming simulator: protocol overhead, link utilization "
               "and adaptation performance over TCP/SSL/QUIC stacks"};
  app.require_subcommand(1);

  CommonOptions overhead_opt, util_opt, adapt_opt;
  CLI::App* overhead =
      app.add_subcommand("overhead", "Fixed-level overhead sweep per stack");
  add_common(overhead, overhead_opt);
  int overhead_rtt = 0;
  overhead->add_option("--sweep-rtt", overhead_rtt,
                       "RTT in ms used for the sweep");

  CLI::App* utilization = app.add_subcommand(
      "utilization", "Link utilization grid per stack and RTT");
  add_common(utilization, util_opt);

  CLI::App* adaptation = app.add_subcommand(
      "adaptation", "Adaptive sessions against a bandwidth trajectory");
  add_common(adaptation, adapt_opt);

  std::string table2_out;
  CLI::App* table2 = app.add_subcommand(
      "table2", "Analytic per-packet header overhead of both paths");
  table2->add_option("--out", table2_out, "Also write the table as CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (overhead->parsed()) {
      auto spec = make_spec(overhead_opt, dashsim::Experiment::kOverhead);
      spec.overhead_rtt_ms = overhead_rtt;
      const auto result = dashsim::run_overhead_sweep(spec);
      result.summary.write_csv(std::cout);
      std::cerr << "wrote " << spec.out_dir.string()
                << "/overhead_{summary,runs}.csv\n";
    } else if (utilization->parsed()) {
      auto spec = make_spec(util_opt, dashsim::Experiment::kUtilization);
      const auto result = dashsim::run_utilization_grid(spec);
      result.averages.write_csv(std::cout);
      std::cerr << "wrote " << spec.out_dir.string()
                << "/utilization_{summary,runs,table}.csv\n";
    } else if (adaptation->parsed()) {
      auto spec = make_spec(adapt_opt, dashsim::Experiment::kAdaptation);
      const auto result = dashsim::run_adaptation(spec);
      result.summary.write_csv(std::cout);
      std::cerr << "wrote " << spec.out_dir.string()
                << "/adaptation_{summary,runs}.csv and per-run traces\n";
    } else if (table2->parsed()) {
      const auto table = dashsim::analytic_overhead_table();
      table.write_csv(std::cout);
      if (!table2_out.empty()) table.save(table2_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
