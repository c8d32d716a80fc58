#pragma once

#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccsim/command.hpp"
#include "ccsim/geometry.hpp"
#include "ccsim/timing.hpp"

namespace ccsim {

// Independent re-replay of an emitted command trace. This deliberately shares
// no decision logic with the scheduler or the bank state machine: constraints
// are tracked as per-target next-allowed times, updated when each command is
// accepted. It checks (a) every timing constraint from the table documented
// in bank.hpp and (b) the safety rule for reduced activations: a Reduced ACT
// must target a row whose most recent same-row PRE is at most
// caching_duration cycles old. Refreshes never extend that eligibility.

struct VerifierConfig {
  DramGeometry geometry;
  TimingParams base;
  ReducedDeltas deltas;
  Cycle caching_duration = 800000;
  bool check_safety = true;
};

struct Violation {
  enum class Kind : std::uint8_t { Timing, State, Safety };
  Kind kind;
  std::size_t command_index;  // 0-based position in the trace
  std::string detail;
};

struct VerifyReport {
  std::uint64_t commands = 0;
  std::uint64_t acts_standard = 0;
  std::uint64_t acts_reduced = 0;
  std::vector<Violation> violations;
  std::uint64_t timing_violations = 0;
  std::uint64_t safety_violations = 0;

  bool ok() const { return violations.empty(); }
  std::optional<std::size_t> first_violation_index() const {
    if (violations.empty()) return std::nullopt;
    std::size_t first = violations.front().command_index;
    for (const auto& v : violations)
      if (v.command_index < first) first = v.command_index;
    return first;
  }
};

namespace detail {

struct VBank {
  bool open = false;
  std::uint32_t open_row = 0;
  TimingClass act_class = TimingClass::Standard;
  // Next cycle at which each command kind may target this bank.
  Cycle next_act = kNever;
  Cycle next_rd = kNever;
  Cycle next_wr = kNever;
  Cycle next_pre = kNever;
};

struct VRank {
  Cycle next_act = kNever;  // tRRD / tRFC gate
  Cycle next_ref = kNever;
  Cycle next_rd = kNever;   // tWTR gate
  std::deque<Cycle> act_times;
};

struct VChannel {
  Cycle next_col = kNever;  // tCCD gate
  Cycle next_wr = kNever;   // read-to-write bus turnaround
  Cycle last_time = kNever;
};

}  // namespace detail

class TraceVerifier {
 public:
  explicit TraceVerifier(const VerifierConfig& cfg) : cfg_(cfg) {
    cfg_.geometry.validate();
    cfg_.base.validate();
    cfg_.deltas.validate(cfg_.base);
    banks_.resize(cfg_.geometry.channels,
                  std::vector<std::vector<detail::VBank>>(
                      cfg_.geometry.ranks_per_channel,
                      std::vector<detail::VBank>(cfg_.geometry.banks_per_rank)));
    ranks_.resize(cfg_.geometry.channels,
                  std::vector<detail::VRank>(cfg_.geometry.ranks_per_channel));
    channels_.resize(cfg_.geometry.channels);
  }

  VerifyReport run(std::span<const DramCommand> trace) {
    VerifyReport rep;
    for (std::size_t i = 0; i < trace.size(); ++i) check(trace[i], i, rep);
    rep.commands = trace.size();
    return rep;
  }

 private:
  void flag(VerifyReport& rep, Violation::Kind kind, std::size_t idx, std::string detail) {
    if (kind == Violation::Kind::Safety)
      ++rep.safety_violations;
    else
      ++rep.timing_violations;
    rep.violations.push_back({kind, idx, std::move(detail)});
  }

  void check(const DramCommand& c, std::size_t idx, VerifyReport& rep) {
    const Cycle t = c.issue_time;
    if (!coord_in_range(c.coord, cfg_.geometry) &&
        !(c.kind == CommandKind::Ref && c.coord.channel < cfg_.geometry.channels &&
          c.coord.rank < cfg_.geometry.ranks_per_channel)) {
      flag(rep, Violation::Kind::State, idx, "coordinate out of range: " + format_command(c));
      return;
    }
    auto& ch = channels_[c.coord.channel];
    auto& rk = ranks_[c.coord.channel][c.coord.rank];
    auto& bk = banks_[c.coord.channel][c.coord.rank][c.coord.bank];
    if (ch.last_time != kNever && t <= ch.last_time) {
      flag(rep, Violation::Kind::Timing, idx,
           "command time not strictly increasing on channel " + std::to_string(c.coord.channel) +
               " at cycle " + std::to_string(t));
    }
    ch.last_time = std::max(ch.last_time, t);

    const TimingParams& base = cfg_.base;

    switch (c.kind) {
      case CommandKind::Act: {
        if (c.timing_class == TimingClass::Reduced) ++rep.acts_reduced; else ++rep.acts_standard;
        if (bk.open)
          flag(rep, Violation::Kind::State, idx, "ACT on open bank: " + format_command(c));
        if (t < bk.next_act)
          flag(rep, Violation::Kind::Timing, idx,
               "ACT before bank ready (tRP/tRC): " + format_command(c));
        if (t < rk.next_act)
          flag(rep, Violation::Kind::Timing, idx,
               "ACT before rank ready (tRRD/tRFC): " + format_command(c));
        while (!rk.act_times.empty() && t - rk.act_times.front() >= base.tfaw)
          rk.act_times.pop_front();
        if (rk.act_times.size() >= 4)
          flag(rep, Violation::Kind::Timing, idx, "more than 4 ACTs within tFAW: " + format_command(c));
        if (cfg_.check_safety && c.timing_class == TimingClass::Reduced) {
          auto it = last_same_row_pre_.find(row_key(c.coord));
          if (it == last_same_row_pre_.end())
            flag(rep, Violation::Kind::Safety, idx,
                 "Reduced ACT with no prior same-row PRE: " + format_command(c));
          else if (t - it->second > cfg_.caching_duration)
            flag(rep, Violation::Kind::Safety, idx,
                 "Reduced ACT " + std::to_string(t - it->second) +
                     " cycles after same-row PRE (limit " + std::to_string(cfg_.caching_duration) +
                     "): " + format_command(c));
        }
        rk.act_times.push_back(t);
        bk.open = true;
        bk.open_row = c.coord.row;
        bk.act_class = c.timing_class;
        const TimingParams neweff = effective_timings(base, cfg_.deltas, c.timing_class);
        bk.next_rd = t + neweff.trcd;
        bk.next_wr = t + neweff.trcd;
        bk.next_pre = t + neweff.tras;
        bk.next_act = t + neweff.trc();
        for (auto& other : banks_[c.coord.channel][c.coord.rank])
          other.next_act = std::max(other.next_act, t + base.trrd);
        break;
      }
      case CommandKind::Rd: {
        if (!bk.open || bk.open_row != c.coord.row)
          flag(rep, Violation::Kind::State, idx, "RD without matching open row: " + format_command(c));
        if (t < bk.next_rd)
          flag(rep, Violation::Kind::Timing, idx, "RD before tRCD(eff): " + format_command(c));
        if (t < ch.next_col)
          flag(rep, Violation::Kind::Timing, idx, "RD violates tCCD: " + format_command(c));
        if (t < rk.next_rd)
          flag(rep, Violation::Kind::Timing, idx, "RD violates tWTR: " + format_command(c));
        bk.next_pre = std::max(bk.next_pre, t + base.trtp);
        ch.next_col = t + base.tccd;
        ch.next_wr = std::max(ch.next_wr, t + base.tcl + base.tbl - base.tcwl);
        break;
      }
      case CommandKind::Wr: {
        if (!bk.open || bk.open_row != c.coord.row)
          flag(rep, Violation::Kind::State, idx, "WR without matching open row: " + format_command(c));
        if (t < bk.next_wr)
          flag(rep, Violation::Kind::Timing, idx, "WR before tRCD(eff): " + format_command(c));
        if (t < ch.next_col)
          flag(rep, Violation::Kind::Timing, idx, "WR violates tCCD: " + format_command(c));
        if (t < ch.next_wr)
          flag(rep, Violation::Kind::Timing, idx,
               "WR violates read-to-write turnaround: " + format_command(c));
        bk.next_pre = std::max(bk.next_pre, t + base.tcwl + base.tbl + base.twr);
        rk.next_rd = std::max(rk.next_rd, t + base.tcwl + base.tbl + base.twtr);
        ch.next_col = t + base.tccd;
        break;
      }
      case CommandKind::Pre: {
        if (!bk.open) {
          flag(rep, Violation::Kind::State, idx, "PRE on precharged bank: " + format_command(c));
          break;
        }
        if (bk.open_row != c.coord.row)
          flag(rep, Violation::Kind::State, idx,
               "PRE row field does not match tracked open row: " + format_command(c));
        if (t < bk.next_pre)
          flag(rep, Violation::Kind::Timing, idx, "PRE before tRAS(eff)/tRTP/tWR: " + format_command(c));
        DramCoord closed = c.coord;
        closed.row = bk.open_row;
        last_same_row_pre_[row_key(closed)] = t;
        bk.open = false;
        bk.next_act = std::max(bk.next_act, t + base.trp);
        break;
      }
      case CommandKind::Ref: {
        auto& rbanks = banks_[c.coord.channel][c.coord.rank];
        for (std::size_t b = 0; b < rbanks.size(); ++b) {
          if (rbanks[b].open) {
            flag(rep, Violation::Kind::State, idx,
                 "REF with bank " + std::to_string(b) + " open: " + format_command(c));
          } else if (t < rbanks[b].next_act) {
            // next_act after PRE embeds the tRP the refresh must also respect
            flag(rep, Violation::Kind::Timing, idx,
                 "REF before bank " + std::to_string(b) + " precharge completes: " + format_command(c));
          }
        }
        if (t < rk.next_ref)
          flag(rep, Violation::Kind::Timing, idx, "REF violates tRFC: " + format_command(c));
        rk.next_ref = t + base.trfc;
        rk.next_act = std::max(rk.next_act, t + base.trfc);
        break;
      }
    }
  }

  std::uint64_t row_key(const DramCoord& c) const {
    std::uint64_t k = c.channel;
    k = k * cfg_.geometry.ranks_per_channel + c.rank;
    k = k * cfg_.geometry.banks_per_rank + c.bank;
    k = k * cfg_.geometry.rows_per_bank + c.row;
    return k;
  }

  VerifierConfig cfg_;
  std::vector<std::vector<std::vector<detail::VBank>>> banks_;
  std::vector<std::vector<detail::VRank>> ranks_;
  std::vector<detail::VChannel> channels_;
  std::unordered_map<std::uint64_t, Cycle> last_same_row_pre_;
};

inline VerifyReport verify_commands(std::span<const DramCommand> trace, const VerifierConfig& cfg) {
  TraceVerifier v(cfg);
  return v.run(trace);
}

inline VerifyReport verify_trace_file(const std::string& path, const VerifierConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open command trace '" + path + "'");
  auto cmds = parse_command_trace(in, path);
  return verify_commands(cmds, cfg);
}

}  // namespace ccsim
