#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccsim/errors.hpp"
#include "ccsim/timing.hpp"

namespace ccsim {

// One activate/precharge event of a row, identified by its global row id.
struct RowEvent {
  Cycle cycle = 0;
  std::uint64_t row = 0;
  bool is_act = false;  // false: precharge of this row
};

// Row-level temporal locality curve: for each interval t, the fraction of
// activations that occur within t after a previous precharge of the same row.
struct RltlCurve {
  std::vector<double> intervals_ms;
  std::vector<std::uint64_t> qualifying;
  std::vector<double> fractions;
  std::uint64_t total_activations = 0;
};

inline std::vector<double> default_rltl_intervals() {
  return {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
}

inline RltlCurve rltl(std::span<const RowEvent> events, std::vector<double> intervals_ms,
                      double clock_period_ns) {
  RltlCurve curve;
  std::sort(intervals_ms.begin(), intervals_ms.end());
  curve.intervals_ms = intervals_ms;
  curve.qualifying.assign(intervals_ms.size(), 0);

  std::unordered_map<std::uint64_t, Cycle> last_pre;
  Cycle prev_cycle = std::numeric_limits<Cycle>::min();
  for (const auto& e : events) {
    if (e.cycle < prev_cycle)
      throw ConfigError("rltl: event log not sorted by time (cycle " + std::to_string(e.cycle) +
                        " after " + std::to_string(prev_cycle) + ")");
    prev_cycle = e.cycle;
    if (!e.is_act) {
      last_pre[e.row] = e.cycle;
      continue;
    }
    ++curve.total_activations;
    auto it = last_pre.find(e.row);
    if (it == last_pre.end()) continue;  // first-ever activation never qualifies
    double gap_ms = static_cast<double>(e.cycle - it->second) * clock_period_ns * 1e-6;
    for (std::size_t i = 0; i < intervals_ms.size(); ++i)
      if (gap_ms <= intervals_ms[i]) ++curve.qualifying[i];
  }
  curve.fractions.resize(intervals_ms.size());
  for (std::size_t i = 0; i < intervals_ms.size(); ++i)
    curve.fractions[i] = curve.total_activations == 0
                             ? 0.0
                             : static_cast<double>(curve.qualifying[i]) /
                                   static_cast<double>(curve.total_activations);
  return curve;
}

// Counts activations whose row saw at least one earlier precharge — the
// t -> infinity limit of the locality curve as exact integers.
struct ReactivationCounts {
  std::uint64_t reactivations = 0;
  std::uint64_t activations = 0;
};

inline ReactivationCounts count_reactivations(std::span<const RowEvent> events) {
  ReactivationCounts rc;
  std::unordered_map<std::uint64_t, bool> precharged;
  for (const auto& e : events) {
    if (!e.is_act) {
      precharged[e.row] = true;
      continue;
    }
    ++rc.activations;
    auto it = precharged.find(e.row);
    if (it != precharged.end() && it->second) ++rc.reactivations;
  }
  return rc;
}

inline std::string rltl_csv(const RltlCurve& c) {
  std::string out = "interval_ms,fraction,qualifying,total\n";
  char buf[96];
  for (std::size_t i = 0; i < c.intervals_ms.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%llu,%llu\n", c.intervals_ms[i], c.fractions[i],
                  static_cast<unsigned long long>(c.qualifying[i]),
                  static_cast<unsigned long long>(c.total_activations));
    out += buf;
  }
  return out;
}

}  // namespace ccsim
