#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "ccsim/command.hpp"
#include "ccsim/timing.hpp"

namespace ccsim {

// Constraint set enforced by can_issue / apply_command. The command-trace
// verifier re-implements the same table independently as next-allowed-time
// bookkeeping; keep the two in agreement when touching either.
//
//   ACT: bank precharged; now-last_pre >= tRP; now-rank.last_act >= tRRD;
//        at most 4 ACTs per rank within tFAW; rank not refreshing.
//   RD : bank active with matching row; now-last_act >= tRCD(eff);
//        now-chan.last_col >= tCCD; now >= rank.last_wr+tCWL+tBL+tWTR.
//   WR : bank active with matching row; now-last_act >= tRCD(eff);
//        now-chan.last_col >= tCCD; now+tCWL >= chan.last_rd+tCL+tBL.
//   PRE: bank active; now-last_act >= tRAS(eff); now >= last_rd+tRTP;
//        now >= last_wr+tCWL+tBL+tWR.
//   REF: all banks of rank precharged with now-last_pre >= tRP;
//        now >= rank refresh completion.
// tRCD/tRAS come from the effective set of the bank's current activation
// (its recorded timing class); everything else uses the base set.

enum class BankPhase : std::uint8_t { Precharged, Activating, Active, Precharging };

struct BankState {
  std::optional<std::uint32_t> open_row;
  Cycle last_act = kNever;
  Cycle last_pre = kNever;
  Cycle last_rd = kNever;
  Cycle last_wr = kNever;
  TimingClass act_class = TimingClass::Standard;
  std::uint32_t act_core = 0;  // core whose request triggered the activation

  bool open() const { return open_row.has_value(); }

  BankPhase phase(Cycle now, const TimingParams& base, const ReducedDeltas& d) const {
    if (open_row) {
      int trcd_eff = effective_timings(base, d, act_class).trcd;
      return now - last_act < trcd_eff ? BankPhase::Activating : BankPhase::Active;
    }
    if (last_pre != kNever && now - last_pre < base.trp) return BankPhase::Precharging;
    return BankPhase::Precharged;
  }
};

struct RankState {
  Cycle last_act = kNever;   // most recent ACT on any bank of the rank
  Cycle last_wr = kNever;    // most recent WR on any bank of the rank
  Cycle ref_done = kNever;   // completion time of the most recent REF
  std::array<Cycle, 4> act_window{kNever, kNever, kNever, kNever};
  int act_count = 0;

  void record_act(Cycle now) {
    last_act = now;
    if (act_count < 4) {
      act_window[act_count++] = now;
    } else {
      for (int i = 1; i < 4; ++i) act_window[i - 1] = act_window[i];
      act_window[3] = now;
    }
  }

  bool faw_ok(Cycle now, int tfaw) const {
    if (act_count < 4) return true;
    return now - act_window[0] >= tfaw;
  }
};

struct ChannelTiming {
  Cycle last_col = kNever;  // most recent RD or WR on the channel
  Cycle last_rd = kNever;
  Cycle last_cmd = kNever;  // any command; one command per channel per cycle
};

inline bool can_issue(const BankState& bank, const RankState& rank, const ChannelTiming& chan,
                      const DramCommand& cmd, Cycle now, const TimingParams& base,
                      const ReducedDeltas& deltas) {
  if (chan.last_cmd != kNever && now <= chan.last_cmd) return false;
  const TimingParams eff = effective_timings(base, deltas, bank.act_class);
  switch (cmd.kind) {
    case CommandKind::Act:
      return !bank.open() && now - bank.last_pre >= base.trp && now >= rank.ref_done &&
             now - rank.last_act >= base.trrd && rank.faw_ok(now, base.tfaw);
    case CommandKind::Rd:
      return bank.open() && *bank.open_row == cmd.coord.row && now - bank.last_act >= eff.trcd &&
             now - chan.last_col >= base.tccd &&
             now >= rank.last_wr + base.tcwl + base.tbl + base.twtr;
    case CommandKind::Wr:
      return bank.open() && *bank.open_row == cmd.coord.row && now - bank.last_act >= eff.trcd &&
             now - chan.last_col >= base.tccd &&
             now + base.tcwl >= chan.last_rd + base.tcl + base.tbl;
    case CommandKind::Pre:
      return bank.open() && now - bank.last_act >= eff.tras && now >= bank.last_rd + base.trtp &&
             now >= bank.last_wr + base.tcwl + base.tbl + base.twr;
    case CommandKind::Ref:
      // Rank-level legality (all banks precharged) is the caller's job; this
      // checks the per-bank and occupancy parts.
      return !bank.open() && now - bank.last_pre >= base.trp && now >= rank.ref_done;
  }
  return false;
}

// Applies cmd to this bank's state. Caller must have validated with
// can_issue (and, for REF, rank-wide legality); violating that is a bug in
// the scheduler, not a recoverable condition.
inline void apply_command(BankState& bank, RankState& rank, ChannelTiming& chan,
                          const DramCommand& cmd, Cycle now, const TimingParams& base,
                          const ReducedDeltas& deltas) {
  if (!can_issue(bank, rank, chan, cmd, now, base, deltas))
    throw std::logic_error(std::string("illegal command applied: ") + format_command(cmd) +
                           " at cycle " + std::to_string(now));
  chan.last_cmd = now;
  switch (cmd.kind) {
    case CommandKind::Act:
      bank.open_row = cmd.coord.row;
      bank.last_act = now;
      bank.act_class = cmd.timing_class;
      rank.record_act(now);
      break;
    case CommandKind::Rd:
      bank.last_rd = now;
      chan.last_col = now;
      chan.last_rd = now;
      break;
    case CommandKind::Wr:
      bank.last_wr = now;
      chan.last_col = now;
      rank.last_wr = now;
      break;
    case CommandKind::Pre:
      bank.open_row.reset();
      bank.last_pre = now;
      break;
    case CommandKind::Ref:
      rank.ref_done = now + base.trfc;
      break;
  }
}

}  // namespace ccsim
