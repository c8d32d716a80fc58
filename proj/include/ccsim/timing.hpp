#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "ccsim/errors.hpp"

namespace ccsim {

using Cycle = std::int64_t;

// Sentinel for "never happened"; far enough in the past that every
// subtraction against it satisfies any constraint without overflowing.
inline constexpr Cycle kNever = std::numeric_limits<Cycle>::min() / 4;

// Timing class attached to an activation. Reduced is chosen by a latency
// policy when the target row is known to hold high charge; the bank state
// machine itself never assigns it.
enum class TimingClass : std::uint8_t { Standard, Reduced };

inline const char* to_string(TimingClass c) {
  return c == TimingClass::Standard ? "S" : "R";
}

// DRAM timing constraints in memory-clock cycles.
struct TimingParams {
  int trcd = 11;    // ACT -> first column command
  int tras = 28;    // ACT -> PRE
  int trp = 11;     // PRE -> ACT
  int tcl = 11;     // RD -> first data beat
  int tcwl = 8;     // WR -> first data beat
  int tbl = 4;      // data burst length on the bus
  int tccd = 4;     // column command to column command
  int trtp = 6;     // RD -> PRE
  int twtr = 6;     // end of write data -> RD (same rank)
  int twr = 12;     // end of write data -> PRE (write recovery)
  int trrd = 5;     // ACT -> ACT, different banks of one rank
  int tfaw = 24;    // window containing at most four ACTs per rank
  int trfc = 208;   // REF occupancy
  int trefi = 6240; // average REF interval
  double clock_period_ns = 1.25;

  int trc() const { return tras + trp; }

  void validate() const {
    auto pos = [](int v, const char* name) {
      if (v <= 0)
        throw ConfigError(std::string("timing.") + name + " must be positive, got " + std::to_string(v));
    };
    pos(trcd, "trcd"); pos(tras, "tras"); pos(trp, "trp"); pos(tcl, "tcl");
    pos(tcwl, "tcwl"); pos(tbl, "tbl"); pos(tccd, "tccd"); pos(trtp, "trtp");
    pos(twtr, "twtr"); pos(twr, "twr"); pos(trrd, "trrd"); pos(tfaw, "tfaw");
    pos(trfc, "trfc"); pos(trefi, "trefi");
    if (clock_period_ns <= 0.0)
      throw ConfigError("timing.clock_period_ns must be positive");
    if (tras < trcd)
      throw ConfigError("timing.tras (" + std::to_string(tras) + ") must be >= trcd (" +
                        std::to_string(trcd) + ")");
  }
};

// DDR3-1600 11-11-11 at an 800MHz bus clock.
inline TimingParams ddr3_1600() { return TimingParams{}; }

// Cycle reductions applied to tRCD/tRAS for activations of highly-charged rows.
struct ReducedDeltas {
  int trcd = 4;
  int tras = 8;

  void validate(const TimingParams& base) const {
    if (trcd < 0 || tras < 0)
      throw ConfigError("reduced timing deltas must be non-negative");
    if (trcd >= base.trcd)
      throw ConfigError("reduced.trcd_delta (" + std::to_string(trcd) + ") must be < timing.trcd (" +
                        std::to_string(base.trcd) + ")");
    if (tras >= base.tras)
      throw ConfigError("reduced.tras_delta (" + std::to_string(tras) + ") must be < timing.tras (" +
                        std::to_string(base.tras) + ")");
  }
};

// The effective constraint set for one activation. Reduced shrinks only tRCD
// and tRAS (and the derived tRC); everything else is untouched.
inline TimingParams effective_timings(const TimingParams& base, const ReducedDeltas& d,
                                      TimingClass cls) {
  if (cls == TimingClass::Standard) return base;
  TimingParams t = base;
  t.trcd -= d.trcd;
  t.tras -= d.tras;
  return t;
}

inline Cycle ms_to_cycles(double ms, const TimingParams& t) {
  return static_cast<Cycle>(ms * 1e6 / t.clock_period_ns + 0.5);
}

inline double cycles_to_ms(Cycle c, const TimingParams& t) {
  return static_cast<double>(c) * t.clock_period_ns * 1e-6;
}

}  // namespace ccsim
