#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "ccsim/controller.hpp"
#include "ccsim/cpu.hpp"
#include "ccsim/energy.hpp"
#include "ccsim/errors.hpp"
#include "ccsim/geometry.hpp"
#include "ccsim/policy.hpp"
#include "ccsim/rltl.hpp"
#include "ccsim/timing.hpp"
#include "ccsim/trace.hpp"

namespace ccsim {

struct RunConfig {
  DramGeometry geometry;
  TimingParams timings;
  ReducedDeltas deltas;
  ControllerConfig controller;
  CoreConfig core;
  PolicyParams policy;
  PowerParams power;
  std::vector<std::vector<TraceRecord>> traces;  // one per core
  std::vector<std::string> trace_names;
  std::uint64_t instruction_budget = 1'000'000;
  std::uint64_t warmup_core_cycles = 0;
  Cycle max_memory_cycles = 0;  // 0: no limit
  bool emit_commands = false;
  bool collect_row_events = false;
  std::uint64_t seed = 1;

  std::uint32_t num_cores() const { return static_cast<std::uint32_t>(traces.size()); }

  void validate() const {
    geometry.validate();
    timings.validate();
    deltas.validate(timings);
    controller.validate();
    core.validate();
    power.validate();
    if (policy.kind == PolicyKind::ChargeCache || policy.kind == PolicyKind::ChargeCachePlusNuat)
      policy.hcrac.validate();
    if ((policy.kind == PolicyKind::NuatSimplified ||
         policy.kind == PolicyKind::ChargeCachePlusNuat) &&
        !controller.refresh_enabled)
      throw ConfigError("policy '" + std::string(to_string(policy.kind)) +
                        "' requires controller.refresh_enabled = true");
    if (traces.empty()) throw ConfigError("at least one trace (one per core) is required");
    for (std::size_t i = 0; i < traces.size(); ++i) {
      if (traces[i].empty())
        throw ConfigError("trace " + std::to_string(i) + " is empty");
      for (const auto& rec : traces[i])
        if (rec.address >= geometry.capacity_bytes())
          throw ConfigError("trace " + std::to_string(i) + ": address 0x" +
                            std::to_string(rec.address) + " outside geometry capacity");
    }
    if (instruction_budget == 0) throw ConfigError("run.instruction_budget must be >= 1");
    if (warmup_core_cycles % core.clock_multiplier != 0)
      throw ConfigError("run.warmup_core_cycles must be a multiple of the core clock multiplier");
  }
};

struct CoreMetrics {
  std::uint64_t retired = 0;
  std::uint64_t core_cycles = 0;
  double ipc = 0.0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  double avg_read_latency = 0.0;
  std::uint32_t max_outstanding = 0;
  bool finished = false;
  std::uint64_t acts_standard = 0;
  std::uint64_t acts_reduced = 0;
};

struct RunResult {
  Cycle wall_cycles = 0;      // memory cycles executed
  Cycle measured_cycles = 0;  // memory cycles after warm-up
  std::vector<CoreMetrics> cores;
  std::vector<ChannelStats> channels;
  ChannelStats aggregate;  // summed over channels
  std::uint64_t policy_expired = 0;
  std::uint64_t policy_occupancy = 0;
  std::vector<DramCommand> commands;
  std::vector<RowEvent> row_events;
  EnergyInputs energy_inputs;
  EnergyReport energy;

  std::uint64_t total_acts() const { return aggregate.acts_standard + aggregate.acts_reduced; }

  // Reduced-class fraction of all activations; empty when no ACT was issued.
  std::optional<double> hit_rate() const {
    std::uint64_t total = total_acts();
    if (total == 0) return std::nullopt;
    return static_cast<double>(aggregate.acts_reduced) / static_cast<double>(total);
  }
  std::optional<double> core_hit_rate(std::uint32_t core) const {
    std::uint64_t total = cores[core].acts_standard + cores[core].acts_reduced;
    if (total == 0) return std::nullopt;
    return static_cast<double>(cores[core].acts_reduced) / static_cast<double>(total);
  }
};

namespace detail {

struct CompletionOrder {
  bool operator()(const ReadCompletion& a, const ReadCompletion& b) const {
    if (a.done != b.done) return a.done > b.done;
    if (a.core != b.core) return a.core > b.core;
    return a.tag > b.tag;
  }
};

}  // namespace detail

// Single-threaded, cycle-driven simulation of the configured system. Cores
// run clock_multiplier ticks per memory cycle; controllers then issue at most
// one command per channel. The run ends when every core has retired its
// instruction budget (past warm-up) or the cycle limit is reached.
class Simulation : public MemoryPort {
 public:
  explicit Simulation(const RunConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const std::uint32_t cores = cfg_.num_cores();
    const std::uint64_t warmup = cfg_.warmup_core_cycles;
    for (std::uint32_t c = 0; c < cores; ++c)
      cores_.emplace_back(c, cfg_.core, &cfg_.traces[c], cfg_.instruction_budget, warmup);
    for (std::uint32_t ch = 0; ch < cfg_.geometry.channels; ++ch) {
      policies_.push_back(make_policy(cfg_.policy, cores, cfg_.geometry, cfg_.timings));
      channels_.push_back(std::make_unique<ChannelController>(
          ch, cfg_.geometry, cfg_.timings, cfg_.deltas, cfg_.controller, policies_.back().get(),
          cores));
      channels_.back()->on_command = [this](const DramCommand& cmd) { record_command(cmd); };
    }
  }

  RunResult run() {
    const Cycle warmup_mem =
        static_cast<Cycle>(cfg_.warmup_core_cycles / cfg_.core.clock_multiplier);
    Cycle last_progress = 0;
    std::uint64_t retired_snapshot = 0;
    while (!all_finished()) {
      const Cycle now = now_;
      if (cfg_.max_memory_cycles > 0 && now >= cfg_.max_memory_cycles) break;
      if (now == warmup_mem) reset_measurement();

      while (!completions_.empty() && completions_.top().done <= now) {
        ReadCompletion rc = completions_.top();
        completions_.pop();
        cores_[rc.core].on_read_complete(rc.tag);
      }
      for (std::uint32_t t = 0; t < cfg_.core.clock_multiplier; ++t)
        for (auto& core : cores_) core.tick(*this);
      const bool measuring = now >= warmup_mem;
      for (auto& ch : channels_) {
        ch->tick(now);
        for (const auto& rc : ch->completions()) completions_.push(rc);
        ch->completions().clear();
        if (measuring) ch->sample_cycle(now);
      }

      std::uint64_t retired_now = total_retired();
      if (retired_now != retired_snapshot) {
        retired_snapshot = retired_now;
        last_progress = now;
      } else if (now - last_progress > kStallLimit) {
        throw std::logic_error("simulation made no progress for " +
                               std::to_string(kStallLimit) + " cycles at cycle " +
                               std::to_string(now));
      }
      ++now_;
    }
    return collect(now_, warmup_mem);
  }

  // MemoryPort
  bool try_read(std::uint32_t core, std::uint64_t addr, std::uint64_t tag) override {
    DramCoord coord = map_address(addr, cfg_.geometry);
    return channels_[coord.channel]->try_enqueue_read(core, addr, coord, tag, now_);
  }
  bool try_write(std::uint32_t core, std::uint64_t addr) override {
    DramCoord coord = map_address(addr, cfg_.geometry);
    return channels_[coord.channel]->try_enqueue_write(core, addr, coord, now_);
  }

 private:
  static constexpr Cycle kStallLimit = 1'000'000;

  bool all_finished() const {
    for (const auto& c : cores_)
      if (!c.finished()) return false;
    return true;
  }

  std::uint64_t total_retired() const {
    std::uint64_t r = 0;
    for (const auto& c : cores_) r += c.retired();
    return r;
  }

  // Performance counters restart at the warm-up boundary. The command trace
  // and the row-event log keep their full history: safety verification needs
  // the precharges that justify later reduced activations, and locality is a
  // whole-run property.
  void reset_measurement() {
    for (auto& ch : channels_) ch->stats().reset();
  }

  void record_command(const DramCommand& cmd) {
    if (cfg_.emit_commands) commands_.push_back(cmd);
    if (cfg_.collect_row_events) {
      if (cmd.kind == CommandKind::Act)
        row_events_.push_back({cmd.issue_time, global_row_id(cmd.coord, cfg_.geometry), true});
      else if (cmd.kind == CommandKind::Pre)
        row_events_.push_back({cmd.issue_time, global_row_id(cmd.coord, cfg_.geometry), false});
    }
  }

  RunResult collect(Cycle wall, Cycle warmup_mem) {
    RunResult res;
    res.wall_cycles = wall;
    res.measured_cycles = wall > warmup_mem ? wall - warmup_mem : 0;
    for (std::uint32_t c = 0; c < cfg_.num_cores(); ++c) {
      const Core& core = cores_[c];
      CoreMetrics m;
      m.retired = std::min<std::uint64_t>(core.measured_retired(), cfg_.instruction_budget);
      m.core_cycles = core.measured_cycles();
      m.ipc = core.ipc();
      m.reads = core.reads_sent();
      m.writes = core.writes_sent();
      m.max_outstanding = core.max_outstanding();
      m.finished = core.finished();
      res.cores.push_back(m);
    }
    res.channels.reserve(channels_.size());
    for (auto& ch : channels_) res.channels.push_back(ch->stats());
    res.aggregate = ChannelStats{};
    res.aggregate.read_occupancy.assign(cfg_.controller.queue_capacity + 1, 0);
    res.aggregate.write_occupancy.assign(cfg_.controller.queue_capacity + 1, 0);
    res.aggregate.core_acts_standard.assign(cfg_.num_cores(), 0);
    res.aggregate.core_acts_reduced.assign(cfg_.num_cores(), 0);
    res.aggregate.core_read_latency_sum.assign(cfg_.num_cores(), 0);
    res.aggregate.core_read_latency_count.assign(cfg_.num_cores(), 0);
    for (const auto& ch : res.channels) {
      res.aggregate.acts_standard += ch.acts_standard;
      res.aggregate.acts_reduced += ch.acts_reduced;
      res.aggregate.precharges += ch.precharges;
      res.aggregate.reads += ch.reads;
      res.aggregate.writes += ch.writes;
      res.aggregate.refreshes += ch.refreshes;
      res.aggregate.row_hits += ch.row_hits;
      res.aggregate.row_misses += ch.row_misses;
      res.aggregate.row_conflicts += ch.row_conflicts;
      res.aggregate.read_latency_sum += ch.read_latency_sum;
      res.aggregate.read_latency_count += ch.read_latency_count;
      res.aggregate.active_cycles += ch.active_cycles;
      res.aggregate.standby_cycles += ch.standby_cycles;
      for (std::size_t i = 0; i < ch.read_occupancy.size(); ++i) {
        res.aggregate.read_occupancy[i] += ch.read_occupancy[i];
        res.aggregate.write_occupancy[i] += ch.write_occupancy[i];
      }
      for (std::size_t i = 0; i < ch.core_acts_standard.size(); ++i) {
        res.aggregate.core_acts_standard[i] += ch.core_acts_standard[i];
        res.aggregate.core_acts_reduced[i] += ch.core_acts_reduced[i];
        res.aggregate.core_read_latency_sum[i] += ch.core_read_latency_sum[i];
        res.aggregate.core_read_latency_count[i] += ch.core_read_latency_count[i];
      }
    }
    for (std::uint32_t c = 0; c < cfg_.num_cores(); ++c) {
      res.cores[c].acts_standard = res.aggregate.core_acts_standard[c];
      res.cores[c].acts_reduced = res.aggregate.core_acts_reduced[c];
      std::uint64_t lat_sum = 0;
      std::uint64_t lat_cnt = 0;
      for (const auto& ch : res.channels) {
        lat_sum += ch.core_read_latency_sum[c];
        lat_cnt += ch.core_read_latency_count[c];
      }
      res.cores[c].avg_read_latency =
          lat_cnt == 0 ? 0.0 : static_cast<double>(lat_sum) / static_cast<double>(lat_cnt);
    }

    for (auto& p : policies_) {
      res.policy_expired += p->expired_entries();
      res.policy_occupancy += p->table_occupancy();
    }
    res.commands = std::move(commands_);
    res.row_events = std::move(row_events_);

    EnergyInputs ei;
    ei.acts_standard = res.aggregate.acts_standard;
    ei.acts_reduced = res.aggregate.acts_reduced;
    ei.reads = res.aggregate.reads;
    ei.writes = res.aggregate.writes;
    ei.refreshes = res.aggregate.refreshes;
    ei.active_cycles = res.aggregate.active_cycles;
    ei.standby_cycles = res.aggregate.standby_cycles;
    ei.wall_cycles = static_cast<std::uint64_t>(res.measured_cycles);
    ei.ranks = cfg_.geometry.channels * cfg_.geometry.ranks_per_channel;
    ei.hcrac_present = cfg_.policy.kind == PolicyKind::ChargeCache ||
                       cfg_.policy.kind == PolicyKind::ChargeCachePlusNuat;
    res.energy_inputs = ei;
    res.energy = energy_from_run(ei, cfg_.power, cfg_.timings, cfg_.deltas);
    return res;
  }

  RunConfig cfg_;
  std::vector<Core> cores_;
  std::vector<std::unique_ptr<LatencyPolicy>> policies_;
  std::vector<std::unique_ptr<ChannelController>> channels_;
  std::priority_queue<ReadCompletion, std::vector<ReadCompletion>, detail::CompletionOrder>
      completions_;
  std::vector<DramCommand> commands_;
  std::vector<RowEvent> row_events_;
  Cycle now_ = 0;
};

inline RunResult simulate(const RunConfig& cfg) {
  Simulation sim(cfg);
  return sim.run();
}

// Solo-run IPC of each trace under the same configuration, for weighted
// speedup. Alone runs keep their own policy tables and an otherwise identical
// system.
inline std::vector<double> alone_ipcs(const RunConfig& cfg) {
  std::vector<double> ipcs;
  for (std::size_t i = 0; i < cfg.traces.size(); ++i) {
    RunConfig solo = cfg;
    solo.traces = {cfg.traces[i]};
    solo.trace_names = cfg.trace_names.empty()
                           ? std::vector<std::string>{}
                           : std::vector<std::string>{cfg.trace_names[i]};
    solo.emit_commands = false;
    solo.collect_row_events = false;
    ipcs.push_back(simulate(solo).cores[0].ipc);
  }
  return ipcs;
}

struct WeightedSpeedup {
  std::vector<double> terms;  // per-core IPC_shared / IPC_alone
  double value = 0.0;
};

inline WeightedSpeedup weighted_speedup(const RunResult& shared, const std::vector<double>& alone) {
  if (alone.size() != shared.cores.size())
    throw ConfigError("weighted speedup: alone IPC count does not match core count");
  WeightedSpeedup ws;
  for (std::size_t i = 0; i < alone.size(); ++i) {
    if (alone[i] <= 0.0) throw ConfigError("weighted speedup: alone IPC must be positive");
    ws.terms.push_back(shared.cores[i].ipc / alone[i]);
    ws.value += ws.terms.back();
  }
  return ws;
}

}  // namespace ccsim
