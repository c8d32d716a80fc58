#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "ccsim/charge_model.hpp"
#include "ccsim/config.hpp"
#include "ccsim/io.hpp"
#include "ccsim/overhead.hpp"
#include "ccsim/replay.hpp"
#include "ccsim/rltl.hpp"
#include "ccsim/simulator.hpp"
#include "ccsim/stats_io.hpp"
#include "ccsim/trace.hpp"
#include "ccsim/verifier.hpp"

namespace fs = std::filesystem;
using namespace ccsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // validation or verification failure
constexpr int kExitUsage = 2;

void apply_trace_override(RunConfig& cfg, const std::vector<std::string>& traces) {
  if (traces.empty()) return;
  cfg.traces.clear();
  cfg.trace_names.clear();
  for (const auto& p : traces) {
    std::ifstream in(p);
    if (!in) throw ConfigError("trace file '" + p + "' does not exist");
    cfg.traces.push_back(parse_trace(in, p));
    cfg.trace_names.push_back(p);
  }
}

std::string run_info_text(const RunSpec& spec, const RunResult& res) {
  const RunConfig& c = spec.config;
  CalibratedChargeModel model = calibrate_charge_model(ChargeModelSpec{});
  std::ostringstream out;
  out << "policy = " << to_string(c.policy.kind) << "\n";
  out << "cores = " << c.num_cores() << "\n";
  out << "channels = " << c.geometry.channels << "\n";
  out << "row_policy = " << (c.controller.row_policy == RowPolicy::Open ? "open" : "closed")
      << "\n";
  out << "instruction_budget = " << c.instruction_budget << "\n";
  out << "warmup_core_cycles = " << c.warmup_core_cycles << "\n";
  out << "seed = " << c.seed << "\n";
  out << "hcrac.entries_per_core = " << c.policy.hcrac.entries << "\n";
  out << "hcrac.caching_duration_cycles = " << c.policy.hcrac.caching_duration << "\n";
  out << "reduced.trcd_delta = " << c.deltas.trcd << "\n";
  out << "reduced.tras_delta = " << c.deltas.tras << "\n";
  out << "wall_memory_cycles = " << res.wall_cycles << "\n";
  out << "charge_model.tau_leak_ms = " << fmt_f6(model.tau_leak_ms) << "\n";
  out << "charge_model.tau_sense_ns = " << fmt_f6(model.tau_sense_ns) << "\n";
  out << "charge_model.t0_ns = " << fmt_f6(model.t0_ns) << "\n";
  for (std::size_t i = 0; i < c.trace_names.size(); ++i)
    out << "trace." << i << " = " << c.trace_names[i] << "\n";
  return out.str();
}

int run_one_simulation(RunSpec spec, const fs::path& out_dir, bool quiet) {
  spec.config.emit_commands = spec.emit_cmd_trace;
  RunResult res = simulate(spec.config);

  EmitOptions opt;
  opt.write_cmd_trace = spec.emit_cmd_trace;
  std::vector<double> alone;
  WeightedSpeedup ws;
  if (spec.want_weighted_speedup()) {
    alone = alone_ipcs(spec.config);
    ws = weighted_speedup(res, alone);
    opt.alone_ipc = &alone;
    opt.ws = &ws;
  }
  EnergyReport baseline_energy;
  if (spec.compare_baseline && spec.config.policy.kind != PolicyKind::Baseline) {
    RunConfig base_cfg = spec.config;
    base_cfg.policy.kind = PolicyKind::Baseline;
    base_cfg.emit_commands = false;
    baseline_energy = simulate(base_cfg).energy;
    opt.baseline_energy = &baseline_energy;
  }
  emit_run_outputs(out_dir, res, opt);
  atomic_write_file(out_dir / "run_info.txt", run_info_text(spec, res));

  if (!quiet) {
    std::cout << "wall cycles: " << res.wall_cycles << "\n";
    for (std::size_t i = 0; i < res.cores.size(); ++i)
      std::cout << "core " << i << ": ipc " << fmt_f6(res.cores[i].ipc) << "\n";
    auto hr = res.hit_rate();
    std::cout << "reduced-act rate: " << (hr ? fmt_f6(*hr) : std::string("undefined")) << "\n";
    if (opt.ws) std::cout << "weighted speedup: " << fmt_f6(ws.value) << "\n";
    std::cout << "outputs in " << out_dir.string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trace-driven DRAM timing simulator with charge-aware latency policies"};
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run a full simulation and emit report CSVs");
  std::string sim_config;
  std::string sim_out;
  std::vector<std::string> sim_traces;
  std::uint64_t sim_seed = 0;
  bool sim_emit_trace = false;
  sim_cmd->add_option("--config", sim_config, "configuration file")->required();
  sim_cmd->add_option("--out", sim_out, "output directory (overrides run.out_dir)");
  sim_cmd->add_option("--trace", sim_traces, "trace file per core (overrides run.traces)");
  sim_cmd->add_option("--seed", sim_seed, "seed recorded with the run (overrides run.seed)");
  sim_cmd->add_flag("--emit-cmd-trace", sim_emit_trace, "write cmdtrace.txt");

  // rltl
  auto* rltl_cmd = app.add_subcommand("rltl", "replay with the baseline policy and emit the RLTL curve");
  std::string rltl_config;
  std::string rltl_out;
  std::vector<std::string> rltl_traces;
  std::string rltl_intervals;
  rltl_cmd->add_option("--config", rltl_config, "configuration file")->required();
  rltl_cmd->add_option("--out", rltl_out, "output directory");
  rltl_cmd->add_option("--trace", rltl_traces, "trace file per core (overrides run.traces)");
  rltl_cmd->add_option("--intervals", rltl_intervals, "comma-separated interval list in ms");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "re-check a command trace for timing and safety violations");
  std::string verify_config;
  std::string verify_trace;
  bool verify_no_safety = false;
  verify_cmd->add_option("trace", verify_trace, "command trace file")->required();
  verify_cmd->add_option("--config", verify_config, "configuration file")->required();
  verify_cmd->add_flag("--no-safety", verify_no_safety, "check timing constraints only");

  // gen-trace
  auto* gen_cmd = app.add_subcommand("gen-trace", "generate a synthetic CPU trace");
  std::string gen_kind = "pingpong";
  std::string gen_config;
  std::string gen_out;
  SyntheticParams gen_params;
  gen_cmd->add_option("--kind", gen_kind, "pingpong|rowstream|uniform|zipf")->required();
  gen_cmd->add_option("--out", gen_out, "output trace file")->required();
  gen_cmd->add_option("--config", gen_config, "configuration file for geometry (defaults otherwise)");
  gen_cmd->add_option("--requests", gen_params.requests, "number of memory requests");
  gen_cmd->add_option("--rows", gen_params.rows, "row-space size (uniform/zipf)");
  gen_cmd->add_option("--seed", gen_params.seed, "generator seed");
  gen_cmd->add_option("--nonmem", gen_params.nonmem, "non-memory instructions per record");
  gen_cmd->add_option("--write-frac", gen_params.write_fraction, "fraction of writes");
  gen_cmd->add_option("--zipf-s", gen_params.zipf_s, "zipf exponent");
  gen_cmd->add_option("--channel", gen_params.channel, "target channel");
  gen_cmd->add_option("--row-a", gen_params.row_a, "first ping-pong row");
  gen_cmd->add_option("--row-b", gen_params.row_b, "second ping-pong row");

  // overhead
  auto* over_cmd = app.add_subcommand("overhead", "table storage cost report (JSON)");
  OverheadInput over_in;
  std::string over_out;
  std::string over_config;
  over_cmd->add_option("--cores", over_in.cores, "core count");
  over_cmd->add_option("--channels", over_in.channels, "memory channel count");
  over_cmd->add_option("--entries", over_in.entries, "entries per table");
  over_cmd->add_option("--ranks", over_in.ranks, "ranks per channel");
  over_cmd->add_option("--banks", over_in.banks, "banks per rank");
  over_cmd->add_option("--rows", over_in.rows, "rows per bank");
  over_cmd->add_option("--lru-bits", over_in.lru_bits_per_entry, "LRU bits per entry");
  over_cmd->add_option("--config", over_config, "derive geometry and entries from a config file");
  over_cmd->add_option("--out", over_out, "write JSON here instead of stdout");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run several configurations, optionally in parallel");
  std::vector<std::string> sweep_configs;
  std::string sweep_out = "sweep-out";
  unsigned sweep_jobs = 1;
  sweep_cmd->add_option("configs", sweep_configs, "configuration files")->required();
  sweep_cmd->add_option("--out", sweep_out, "base output directory");
  sweep_cmd->add_option("--jobs", sweep_jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim_cmd->parsed()) {
      std::vector<std::string> warnings;
      RunSpec spec = load_run_spec(sim_config, &warnings);
      for (const auto& w : warnings) std::cerr << w << "\n";
      apply_trace_override(spec.config, sim_traces);
      if (!sim_out.empty()) spec.out_dir = sim_out;
      if (sim_cmd->count("--seed") > 0) spec.config.seed = sim_seed;
      if (sim_emit_trace) spec.emit_cmd_trace = true;
      return run_one_simulation(spec, spec.out_dir, /*quiet=*/false);
    }

    if (rltl_cmd->parsed()) {
      std::vector<std::string> warnings;
      RunSpec spec = load_run_spec(rltl_config, &warnings);
      for (const auto& w : warnings) std::cerr << w << "\n";
      apply_trace_override(spec.config, rltl_traces);
      spec.config.policy.kind = PolicyKind::Baseline;
      spec.config.collect_row_events = true;
      spec.config.emit_commands = false;
      std::vector<double> intervals = default_rltl_intervals();
      if (!rltl_intervals.empty()) {
        intervals.clear();
        std::istringstream ss(rltl_intervals);
        std::string tok;
        while (std::getline(ss, tok, ',')) intervals.push_back(std::stod(tok));
        if (intervals.empty()) throw ConfigError("--intervals list is empty");
      }
      RunResult res = simulate(spec.config);
      RltlCurve curve = rltl(res.row_events, intervals, spec.config.timings.clock_period_ns);
      fs::path out_dir = rltl_out.empty() ? fs::path(spec.out_dir) : fs::path(rltl_out);
      atomic_write_file(out_dir / "rltl.csv", rltl_csv(curve));
      std::cout << rltl_csv(curve);
      return kExitOk;
    }

    if (verify_cmd->parsed()) {
      RunSpec spec = load_run_spec(verify_config, nullptr, /*load_traces=*/false);
      VerifierConfig vcfg;
      vcfg.geometry = spec.config.geometry;
      vcfg.base = spec.config.timings;
      vcfg.deltas = spec.config.deltas;
      vcfg.caching_duration = spec.config.policy.hcrac.caching_duration;
      vcfg.check_safety = !verify_no_safety;
      VerifyReport rep = verify_trace_file(verify_trace, vcfg);
      std::cout << "commands: " << rep.commands << "\n";
      std::cout << "acts: " << rep.acts_standard << " standard, " << rep.acts_reduced
                << " reduced\n";
      std::cout << "timing violations: " << rep.timing_violations << "\n";
      std::cout << "safety violations: " << rep.safety_violations << "\n";
      if (!rep.ok()) {
        std::cout << "first violation at command index " << *rep.first_violation_index() << "\n";
        std::size_t shown = 0;
        for (const auto& v : rep.violations) {
          std::cout << "  [" << v.command_index << "] " << v.detail << "\n";
          if (++shown == 20) {
            std::cout << "  ... " << (rep.violations.size() - shown) << " more\n";
            break;
          }
        }
      }
      return rep.ok() ? kExitOk : kExitFailure;
    }

    if (gen_cmd->parsed()) {
      DramGeometry geom;
      if (!gen_config.empty())
        geom = load_run_spec(gen_config, nullptr, /*load_traces=*/false).config.geometry;
      gen_params.kind = parse_synthetic_kind(gen_kind);
      std::vector<TraceRecord> trace = gen_synthetic(gen_params, geom);
      std::ostringstream body;
      write_trace(body, trace);
      atomic_write_file(gen_out, body.str());
      std::cout << "wrote " << trace.size() << " records to " << gen_out << "\n";
      return kExitOk;
    }

    if (over_cmd->parsed()) {
      if (!over_config.empty()) {
        RunSpec spec = load_run_spec(over_config, nullptr, /*load_traces=*/false);
        if (over_cmd->count("--channels") == 0) over_in.channels = spec.config.geometry.channels;
        if (over_cmd->count("--ranks") == 0) over_in.ranks = spec.config.geometry.ranks_per_channel;
        if (over_cmd->count("--banks") == 0) over_in.banks = spec.config.geometry.banks_per_rank;
        if (over_cmd->count("--rows") == 0) over_in.rows = spec.config.geometry.rows_per_bank;
        if (over_cmd->count("--entries") == 0) over_in.entries = spec.config.policy.hcrac.entries;
      }
      OverheadReport rep = storage_overhead(over_in);
      std::string text = overhead_json(rep).dump(2) + "\n";
      if (over_out.empty())
        std::cout << text;
      else
        atomic_write_file(over_out, text);
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      struct Job {
        std::string config;
        fs::path out;
        bool failed = false;
        std::string message;
      };
      std::vector<Job> jobs;
      for (const auto& cfg : sweep_configs) {
        Job j;
        j.config = cfg;
        j.out = fs::path(sweep_out) / fs::path(cfg).stem();
        jobs.push_back(j);
      }
      std::mutex next_mutex;
      std::size_t next = 0;
      auto worker = [&]() {
        while (true) {
          std::size_t idx;
          {
            std::lock_guard<std::mutex> lock(next_mutex);
            if (next >= jobs.size()) return;
            idx = next++;
          }
          Job& job = jobs[idx];
          try {
            std::vector<std::string> warnings;
            RunSpec spec = load_run_spec(job.config, &warnings);
            run_one_simulation(spec, job.out, /*quiet=*/true);
            job.message = "ok";
          } catch (const std::exception& e) {
            job.failed = true;
            job.message = e.what();
          }
        }
      };
      unsigned n = std::max(1u, sweep_jobs);
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      bool any_failed = false;
      for (const auto& job : jobs) {
        std::cout << job.config << " -> " << job.out.string() << ": " << job.message << "\n";
        if (job.failed) any_failed = true;
      }
      return any_failed ? kExitFailure : kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
