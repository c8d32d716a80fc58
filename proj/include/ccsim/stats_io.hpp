#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ccsim/command.hpp"
#include "ccsim/io.hpp"
#include "ccsim/simulator.hpp"

namespace ccsim {

// Report files are plain CSV with a fixed column order, so reruns of the same
// configuration diff clean. Values derived from wall-clock time never appear
// in these files.

inline std::string metrics_csv(const RunResult& r, const std::vector<double>* alone_ipc,
                               const WeightedSpeedup* ws) {
  std::string out =
      "core,retired,core_cycles,ipc,reads,writes,avg_read_latency_cycles,max_outstanding_reads,"
      "finished,ipc_alone,ws_term\n";
  for (std::size_t i = 0; i < r.cores.size(); ++i) {
    const CoreMetrics& m = r.cores[i];
    out += std::to_string(i) + "," + std::to_string(m.retired) + "," +
           std::to_string(m.core_cycles) + "," + fmt_f6(m.ipc) + "," + std::to_string(m.reads) +
           "," + std::to_string(m.writes) + "," + fmt_f6(m.avg_read_latency) + "," +
           std::to_string(m.max_outstanding) + "," + (m.finished ? "1" : "0") + ",";
    if (alone_ipc != nullptr) out += fmt_f6((*alone_ipc)[i]);
    out += ",";
    if (ws != nullptr) out += fmt_f6(ws->terms[i]);
    out += "\n";
  }
  std::uint64_t retired = 0, reads = 0, writes = 0;
  std::uint64_t cycles = 0;
  for (const auto& m : r.cores) {
    retired += m.retired;
    reads += m.reads;
    writes += m.writes;
    cycles = std::max(cycles, m.core_cycles);
  }
  out += "all," + std::to_string(retired) + "," + std::to_string(cycles) + "," +
         fmt_f6(cycles == 0 ? 0.0 : static_cast<double>(retired) / static_cast<double>(cycles)) +
         "," + std::to_string(reads) + "," + std::to_string(writes) + "," +
         fmt_f6(r.aggregate.avg_read_latency()) + ",,,,";
  if (ws != nullptr) out += fmt_f6(ws->value);
  out += "\n";
  return out;
}

inline std::string controller_csv(const RunResult& r) {
  std::string out =
      "channel,acts_standard,acts_reduced,precharges,reads,writes,refreshes,row_hits,row_misses,"
      "row_conflicts,avg_read_latency_cycles,wall_cycles,measured_cycles\n";
  auto line = [&](const std::string& name, const ChannelStats& s) {
    out += name + "," + std::to_string(s.acts_standard) + "," + std::to_string(s.acts_reduced) +
           "," + std::to_string(s.precharges) + "," + std::to_string(s.reads) + "," +
           std::to_string(s.writes) + "," + std::to_string(s.refreshes) + "," +
           std::to_string(s.row_hits) + "," + std::to_string(s.row_misses) + "," +
           std::to_string(s.row_conflicts) + "," + fmt_f6(s.avg_read_latency()) + "," +
           std::to_string(r.wall_cycles) + "," + std::to_string(r.measured_cycles) + "\n";
  };
  for (std::size_t c = 0; c < r.channels.size(); ++c) line(std::to_string(c), r.channels[c]);
  line("all", r.aggregate);
  return out;
}

inline std::string policy_csv(const RunResult& r) {
  std::string out = "core,acts,acts_reduced,hit_rate\n";
  auto rate_str = [](std::optional<double> v) {
    return v.has_value() ? fmt_f6(*v) : std::string("undefined");
  };
  for (std::size_t i = 0; i < r.cores.size(); ++i) {
    std::uint64_t total = r.cores[i].acts_standard + r.cores[i].acts_reduced;
    out += std::to_string(i) + "," + std::to_string(total) + "," +
           std::to_string(r.cores[i].acts_reduced) + "," +
           rate_str(r.core_hit_rate(static_cast<std::uint32_t>(i))) + "\n";
  }
  out += "all," + std::to_string(r.total_acts()) + "," + std::to_string(r.aggregate.acts_reduced) +
         "," + rate_str(r.hit_rate()) + "\n";
  return out;
}

inline std::string queues_csv(const RunResult& r) {
  std::string out = "channel,queue,occupancy,cycles\n";
  for (std::size_t c = 0; c < r.channels.size(); ++c) {
    const ChannelStats& s = r.channels[c];
    for (std::size_t occ = 0; occ < s.read_occupancy.size(); ++occ)
      if (s.read_occupancy[occ] > 0)
        out += std::to_string(c) + ",read," + std::to_string(occ) + "," +
               std::to_string(s.read_occupancy[occ]) + "\n";
    for (std::size_t occ = 0; occ < s.write_occupancy.size(); ++occ)
      if (s.write_occupancy[occ] > 0)
        out += std::to_string(c) + ",write," + std::to_string(occ) + "," +
               std::to_string(s.write_occupancy[occ]) + "\n";
  }
  return out;
}

// Percent saved vs a reference (baseline) report, when one is supplied.
inline std::string energy_csv(const EnergyReport& e, const EnergyReport* baseline = nullptr) {
  std::string out =
      "act_pre_standard_j,act_pre_reduced_j,read_j,write_j,refresh_j,background_j,hcrac_j,total_j,"
      "pct_vs_baseline\n";
  out += fmt_sci(e.act_pre_standard) + "," + fmt_sci(e.act_pre_reduced) + "," + fmt_sci(e.read) +
         "," + fmt_sci(e.write) + "," + fmt_sci(e.refresh) + "," + fmt_sci(e.background) + "," +
         fmt_sci(e.hcrac) + "," + fmt_sci(e.total) + ",";
  if (baseline != nullptr && baseline->total > 0.0)
    out += fmt_f6(100.0 * (e.total - baseline->total) / baseline->total);
  out += "\n";
  return out;
}

inline std::string command_trace_text(const std::vector<DramCommand>& cmds) {
  std::string out;
  out.reserve(cmds.size() * 32);
  for (const auto& c : cmds) {
    out += format_command(c);
    out += "\n";
  }
  return out;
}

struct EmitOptions {
  bool write_cmd_trace = false;
  const std::vector<double>* alone_ipc = nullptr;
  const WeightedSpeedup* ws = nullptr;
  const EnergyReport* baseline_energy = nullptr;
};

inline void emit_run_outputs(const std::filesystem::path& dir, const RunResult& r,
                             const EmitOptions& opt = {}) {
  atomic_write_file(dir / "metrics.csv", metrics_csv(r, opt.alone_ipc, opt.ws));
  atomic_write_file(dir / "controller.csv", controller_csv(r));
  atomic_write_file(dir / "policy.csv", policy_csv(r));
  atomic_write_file(dir / "queues.csv", queues_csv(r));
  atomic_write_file(dir / "energy.csv", energy_csv(r.energy, opt.baseline_energy));
  if (opt.write_cmd_trace)
    atomic_write_file(dir / "cmdtrace.txt", command_trace_text(r.commands));
}

}  // namespace ccsim
