#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ccsim/bank.hpp"
#include "ccsim/command.hpp"
#include "ccsim/errors.hpp"
#include "ccsim/geometry.hpp"
#include "ccsim/policy.hpp"
#include "ccsim/timing.hpp"

namespace ccsim {

enum class RowPolicy : std::uint8_t { Open, Closed };

inline RowPolicy parse_row_policy(const std::string& s) {
  if (s == "open") return RowPolicy::Open;
  if (s == "closed") return RowPolicy::Closed;
  throw ConfigError("unknown row policy '" + s + "' (expected open|closed)");
}

struct ControllerConfig {
  RowPolicy row_policy = RowPolicy::Open;
  std::uint32_t queue_capacity = 64;
  bool refresh_enabled = true;

  void validate() const {
    if (queue_capacity == 0) throw ConfigError("controller.queue_capacity must be >= 1");
  }
};

struct MemRequest {
  std::uint32_t core = 0;
  bool write = false;
  std::uint64_t addr = 0;
  DramCoord coord;
  Cycle arrive = -1;
  Cycle first_issue = -1;
  Cycle complete = -1;
  std::uint64_t tag = 0;  // per-core read tag
  bool drove_pre = false;
  bool drove_act = false;
};

struct ReadCompletion {
  Cycle done;
  std::uint32_t core;
  std::uint64_t tag;
};

struct ChannelStats {
  std::uint64_t acts_standard = 0;
  std::uint64_t acts_reduced = 0;
  std::uint64_t precharges = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t refreshes = 0;
  std::uint64_t row_hits = 0;
  std::uint64_t row_misses = 0;
  std::uint64_t row_conflicts = 0;
  std::uint64_t read_latency_sum = 0;
  std::uint64_t read_latency_count = 0;
  std::uint64_t active_cycles = 0;   // per rank, summed: >= 1 bank open
  std::uint64_t standby_cycles = 0;  // per rank, summed: all banks precharged
  std::vector<std::uint64_t> read_occupancy;   // [occupancy] -> cycles
  std::vector<std::uint64_t> write_occupancy;
  std::vector<std::uint64_t> core_acts_standard;  // per requesting core
  std::vector<std::uint64_t> core_acts_reduced;
  std::vector<std::uint64_t> core_read_latency_sum;
  std::vector<std::uint64_t> core_read_latency_count;

  void reset() {
    auto ro = read_occupancy.size();
    auto wo = write_occupancy.size();
    auto nc = core_acts_standard.size();
    *this = ChannelStats{};
    read_occupancy.assign(ro, 0);
    write_occupancy.assign(wo, 0);
    core_acts_standard.assign(nc, 0);
    core_acts_reduced.assign(nc, 0);
    core_read_latency_sum.assign(nc, 0);
    core_read_latency_count.assign(nc, 0);
  }

  double avg_read_latency() const {
    return read_latency_count == 0
               ? 0.0
               : static_cast<double>(read_latency_sum) / static_cast<double>(read_latency_count);
  }
};

// One memory channel: FR-FCFS over per-channel read/write queues, open or
// closed row management, and tREFI/tRFC refresh with a bounded-postponement
// pull-in. Issues at most one command per cycle. Scheduling priority:
//   1. due refresh (when legal)
//   2. forced precharges once a refresh is overdue by the pull-in bound
//   3. column commands to open rows, oldest request first
//   4. precharge/activate for waiting requests, oldest request first
//   5. closed-policy or refresh-driven precharge of idle open banks
// Reads normally outrank writes; when the write queue passes the drain
// threshold the two swap. A rank with a due refresh accepts no new ACTs; an
// overdue one accepts no column commands either, so its banks can close.
class ChannelController {
 public:
  static constexpr int kRefreshPullInMultiple = 4;

  ChannelController(std::uint32_t channel, const DramGeometry& g, const TimingParams& base,
                    const ReducedDeltas& deltas, const ControllerConfig& cfg,
                    LatencyPolicy* policy, std::uint32_t num_cores)
      : channel_(channel),
        geom_(g),
        base_(base),
        deltas_(deltas),
        cfg_(cfg),
        policy_(policy),
        plan_(RefreshPlan::make(g, base)) {
    cfg_.validate();
    banks_.resize(g.ranks_per_channel, std::vector<BankState>(g.banks_per_rank));
    ranks_.resize(g.ranks_per_channel);
    last_ref_.assign(g.ranks_per_channel, 0);
    ref_block_.assign(g.ranks_per_channel, 0);
    stats_.read_occupancy.assign(cfg.queue_capacity + 1, 0);
    stats_.write_occupancy.assign(cfg.queue_capacity + 1, 0);
    stats_.core_acts_standard.assign(num_cores, 0);
    stats_.core_acts_reduced.assign(num_cores, 0);
    stats_.core_read_latency_sum.assign(num_cores, 0);
    stats_.core_read_latency_count.assign(num_cores, 0);
  }

  bool try_enqueue_read(std::uint32_t core, std::uint64_t addr, const DramCoord& coord,
                        std::uint64_t tag, Cycle now) {
    if (readq_.size() >= cfg_.queue_capacity) return false;
    MemRequest r;
    r.core = core;
    r.addr = addr;
    r.coord = coord;
    r.tag = tag;
    r.arrive = now;
    readq_.push_back(r);
    return true;
  }

  bool try_enqueue_write(std::uint32_t core, std::uint64_t addr, const DramCoord& coord,
                         Cycle now) {
    if (writeq_.size() >= cfg_.queue_capacity) return false;
    MemRequest r;
    r.core = core;
    r.write = true;
    r.addr = addr;
    r.coord = coord;
    r.arrive = now;
    writeq_.push_back(r);
    return true;
  }

  // Advances the channel by one memory cycle; issues at most one command.
  void tick(Cycle now) {
    policy_->tick(now);
    schedule(now);
  }

  // Post-tick accounting of queue occupancy and rank state residency.
  void sample_cycle(Cycle) {
    ++stats_.read_occupancy[readq_.size()];
    ++stats_.write_occupancy[writeq_.size()];
    for (std::uint32_t r = 0; r < geom_.ranks_per_channel; ++r) {
      bool any_open = false;
      for (const auto& b : banks_[r])
        if (b.open()) { any_open = true; break; }
      if (any_open) ++stats_.active_cycles; else ++stats_.standby_cycles;
    }
  }

  std::vector<ReadCompletion>& completions() { return completions_; }
  ChannelStats& stats() { return stats_; }
  const ChannelStats& stats() const { return stats_; }
  std::size_t read_queue_size() const { return readq_.size(); }
  std::size_t write_queue_size() const { return writeq_.size(); }
  const BankState& bank(std::uint32_t rank, std::uint32_t bank_idx) const {
    return banks_[rank][bank_idx];
  }

  // Observer for every issued command (trace emission, row-event capture).
  std::function<void(const DramCommand&)> on_command;

 private:
  bool refresh_due(std::uint32_t rank, Cycle now) const {
    return cfg_.refresh_enabled && now >= last_ref_[rank] + base_.trefi;
  }
  bool refresh_urgent(std::uint32_t rank, Cycle now) const {
    return cfg_.refresh_enabled &&
           now >= last_ref_[rank] + static_cast<Cycle>(kRefreshPullInMultiple) * base_.trefi;
  }

  bool can_issue_ref(std::uint32_t rank, Cycle now) const {
    DramCommand ref;
    ref.kind = CommandKind::Ref;
    ref.coord = DramCoord{channel_, rank, 0, 0, 0};
    for (const auto& b : banks_[rank])
      if (!can_issue(b, ranks_[rank], chan_, ref, now, base_, deltas_)) return false;
    return true;
  }

  void schedule(Cycle now) {
    // 1. due refresh
    for (std::uint32_t r = 0; r < geom_.ranks_per_channel; ++r) {
      if (refresh_due(r, now) && can_issue_ref(r, now)) {
        issue_ref(r, now);
        return;
      }
    }
    // 2. forced precharges for overdue refresh
    for (std::uint32_t r = 0; r < geom_.ranks_per_channel; ++r) {
      if (!refresh_urgent(r, now)) continue;
      for (std::uint32_t b = 0; b < geom_.banks_per_rank; ++b) {
        if (!banks_[r][b].open()) continue;
        if (try_issue_pre(r, b, nullptr, now)) return;
      }
    }

    const bool drain = writeq_.size() * 5 > static_cast<std::size_t>(cfg_.queue_capacity) * 4;
    std::deque<MemRequest>* primary = drain ? &writeq_ : &readq_;
    std::deque<MemRequest>* secondary = drain ? &readq_ : &writeq_;

    // 3. column commands to open rows, oldest first, reads before writes
    //    (swapped while draining)
    for (auto* q : {primary, secondary}) {
      for (std::size_t i = 0; i < q->size(); ++i) {
        MemRequest& req = (*q)[i];
        if (refresh_urgent(req.coord.rank, now)) continue;
        const BankState& bank = banks_[req.coord.rank][req.coord.bank];
        if (!bank.open() || *bank.open_row != req.coord.row) continue;
        if (try_issue_column(*q, i, now)) return;
      }
    }

    // 4. preparation commands for the oldest request of each bank
    for (auto* q : {primary, secondary}) {
      std::vector<bool> seen(geom_.ranks_per_channel * geom_.banks_per_rank, false);
      for (std::size_t i = 0; i < q->size(); ++i) {
        MemRequest& req = (*q)[i];
        std::size_t bkey = req.coord.rank * geom_.banks_per_rank + req.coord.bank;
        if (seen[bkey]) continue;
        seen[bkey] = true;
        BankState& bank = banks_[req.coord.rank][req.coord.bank];
        if (bank.open()) {
          if (*bank.open_row == req.coord.row) continue;  // column blocked on timing only
          if (try_issue_pre(req.coord.rank, req.coord.bank, &req, now)) return;
        } else {
          if (refresh_due(req.coord.rank, now)) continue;  // refresh preempts new ACTs
          if (try_issue_act(req, now)) return;
        }
      }
    }

    // 5. precharge idle open banks (closed-row policy, or to let a due
    //    refresh through)
    for (std::uint32_t r = 0; r < geom_.ranks_per_channel; ++r) {
      bool due = refresh_due(r, now);
      if (cfg_.row_policy != RowPolicy::Closed && !due) continue;
      for (std::uint32_t b = 0; b < geom_.banks_per_rank; ++b) {
        BankState& bank = banks_[r][b];
        if (!bank.open()) continue;
        if (has_pending_for_row(r, b, *bank.open_row)) continue;
        if (try_issue_pre(r, b, nullptr, now)) return;
      }
    }
  }

  bool has_pending_for_row(std::uint32_t rank, std::uint32_t bank, std::uint32_t row) const {
    for (const auto& req : readq_)
      if (req.coord.rank == rank && req.coord.bank == bank && req.coord.row == row) return true;
    for (const auto& req : writeq_)
      if (req.coord.rank == rank && req.coord.bank == bank && req.coord.row == row) return true;
    return false;
  }

  bool try_issue_column(std::deque<MemRequest>& q, std::size_t idx, Cycle now) {
    MemRequest& req = q[idx];
    DramCommand cmd;
    cmd.kind = req.write ? CommandKind::Wr : CommandKind::Rd;
    cmd.coord = req.coord;
    cmd.issue_time = now;
    BankState& bank = banks_[req.coord.rank][req.coord.bank];
    if (!can_issue(bank, ranks_[req.coord.rank], chan_, cmd, now, base_, deltas_)) return false;
    apply_command(bank, ranks_[req.coord.rank], chan_, cmd, now, base_, deltas_);
    emit(cmd);
    if (req.first_issue < 0) req.first_issue = now;
    if (req.drove_pre) ++stats_.row_conflicts;
    else if (req.drove_act) ++stats_.row_misses;
    else ++stats_.row_hits;
    if (req.write) {
      ++stats_.writes;
      req.complete = now + base_.tcwl + base_.tbl;
    } else {
      ++stats_.reads;
      req.complete = now + base_.tcl + base_.tbl;
      std::uint64_t latency = static_cast<std::uint64_t>(req.complete - req.arrive);
      stats_.read_latency_sum += latency;
      ++stats_.read_latency_count;
      stats_.core_read_latency_sum[req.core] += latency;
      ++stats_.core_read_latency_count[req.core];
      completions_.push_back(ReadCompletion{req.complete, req.core, req.tag});
    }
    q.erase(q.begin() + static_cast<std::ptrdiff_t>(idx));
    return true;
  }

  bool try_issue_act(MemRequest& req, Cycle now) {
    DramCommand cmd;
    cmd.kind = CommandKind::Act;
    cmd.coord = req.coord;
    cmd.issue_time = now;
    BankState& bank = banks_[req.coord.rank][req.coord.bank];
    if (!can_issue(bank, ranks_[req.coord.rank], chan_, cmd, now, base_, deltas_)) return false;
    // Classify only once the command is known to issue; the lookup updates
    // policy state.
    cmd.timing_class = policy_->on_activate(req.core, req.coord, now);
    apply_command(bank, ranks_[req.coord.rank], chan_, cmd, now, base_, deltas_);
    bank.act_core = req.core;
    emit(cmd);
    if (req.first_issue < 0) req.first_issue = now;
    req.drove_act = true;
    if (cmd.timing_class == TimingClass::Reduced) {
      ++stats_.acts_reduced;
      ++stats_.core_acts_reduced[req.core];
    } else {
      ++stats_.acts_standard;
      ++stats_.core_acts_standard[req.core];
    }
    return true;
  }

  // Precharge for a waiting request (req != nullptr) or housekeeping
  // (closed-row/refresh). The closed row is credited to the core whose
  // request activated it.
  bool try_issue_pre(std::uint32_t rank, std::uint32_t bank_idx, MemRequest* req, Cycle now) {
    BankState& bank = banks_[rank][bank_idx];
    DramCommand cmd;
    cmd.kind = CommandKind::Pre;
    cmd.coord = DramCoord{channel_, rank, bank_idx, *bank.open_row, 0};
    cmd.issue_time = now;
    if (!can_issue(bank, ranks_[rank], chan_, cmd, now, base_, deltas_)) return false;
    std::uint32_t owner = bank.act_core;
    apply_command(bank, ranks_[rank], chan_, cmd, now, base_, deltas_);
    emit(cmd);
    ++stats_.precharges;
    if (req != nullptr) {
      req->drove_pre = true;
      if (req->first_issue < 0) req->first_issue = now;
    }
    policy_->on_precharge(owner, cmd.coord, now);
    return true;
  }

  void issue_ref(std::uint32_t rank, Cycle now) {
    DramCommand cmd;
    cmd.kind = CommandKind::Ref;
    cmd.coord = DramCoord{channel_, rank, 0, 0, 0};
    cmd.issue_time = now;
    apply_command(banks_[rank][0], ranks_[rank], chan_, cmd, now, base_, deltas_);
    emit(cmd);
    ++stats_.refreshes;
    last_ref_[rank] = now;
    std::uint32_t block = ref_block_[rank];
    policy_->on_refresh(rank, block * plan_.rows_per_ref, plan_.rows_per_ref, now);
    ref_block_[rank] = (block + 1) % plan_.num_blocks;
  }

  void emit(const DramCommand& cmd) {
    if (on_command) on_command(cmd);
  }

  std::uint32_t channel_;
  DramGeometry geom_;
  TimingParams base_;
  ReducedDeltas deltas_;
  ControllerConfig cfg_;
  LatencyPolicy* policy_;
  RefreshPlan plan_;

  std::vector<std::vector<BankState>> banks_;  // [rank][bank]
  std::vector<RankState> ranks_;
  ChannelTiming chan_;
  std::deque<MemRequest> readq_;
  std::deque<MemRequest> writeq_;
  std::vector<Cycle> last_ref_;
  std::vector<std::uint32_t> ref_block_;
  std::vector<ReadCompletion> completions_;
  ChannelStats stats_;
};

}  // namespace ccsim
