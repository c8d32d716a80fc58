#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_set>
#include <vector>

#include "ccsim/command.hpp"
#include "ccsim/geometry.hpp"
#include "ccsim/hcrac.hpp"
#include "ccsim/rltl.hpp"

namespace ccsim {

// Classification-only replay: runs a fixed command schedule through a single
// shared HCRAC (insert on PRE, lookup on ACT) without re-simulating anything.
// Used to study how hit counts respond to table size and caching duration on
// an unchanged schedule.
struct ClassifyCounts {
  std::uint64_t activations = 0;
  std::uint64_t hits = 0;
};

inline ClassifyCounts classify_commands(std::span<const DramCommand> cmds,
                                        const HcracConfig& cfg) {
  // One table per channel, mirroring the per-channel policy structure.
  std::vector<HcracTable> tables;
  auto table_for = [&](std::uint32_t channel) -> HcracTable& {
    while (tables.size() <= channel) tables.emplace_back(cfg);
    return tables[channel];
  };
  ClassifyCounts counts;
  for (const auto& c : cmds) {
    if (c.kind == CommandKind::Act) {
      ++counts.activations;
      if (table_for(c.coord.channel).lookup(c.coord, c.issue_time)) ++counts.hits;
    } else if (c.kind == CommandKind::Pre) {
      table_for(c.coord.channel).insert(c.coord, c.issue_time);
    }
  }
  return counts;
}

// Same replay with no eviction and no expiry: one set large enough to hold
// every distinct row, effectively infinite duration. Hits then equal
// re-activations.
inline ClassifyCounts classify_commands_unbounded(std::span<const DramCommand> cmds) {
  std::unordered_set<std::uint64_t> rows;
  for (const auto& c : cmds)
    if (c.kind == CommandKind::Pre)
      rows.insert((static_cast<std::uint64_t>(c.coord.rank) << 52) |
                  (static_cast<std::uint64_t>(c.coord.bank) << 40) | c.coord.row);
  HcracConfig cfg;
  cfg.entries = static_cast<std::uint32_t>(std::max<std::size_t>(rows.size(), 1));
  cfg.associativity = cfg.entries;
  cfg.caching_duration = std::numeric_limits<Cycle>::max() / 2;
  return classify_commands(cmds, cfg);
}

// Extracts the activate/precharge event log a full simulation would have
// recorded, from an emitted command trace.
inline std::vector<RowEvent> row_events_from_commands(std::span<const DramCommand> cmds,
                                                      const DramGeometry& g) {
  std::vector<RowEvent> events;
  for (const auto& c : cmds) {
    if (c.kind == CommandKind::Act)
      events.push_back({c.issue_time, global_row_id(c.coord, g), true});
    else if (c.kind == CommandKind::Pre)
      events.push_back({c.issue_time, global_row_id(c.coord, g), false});
  }
  return events;
}

}  // namespace ccsim
