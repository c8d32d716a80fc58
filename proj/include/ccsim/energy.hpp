#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "ccsim/errors.hpp"
#include "ccsim/overhead.hpp"
#include "ccsim/timing.hpp"

namespace ccsim {

// IDD-based device currents (milliamps) for a representative DDR3-1600 4Gb
// part; all values are configuration-overridable.
struct PowerParams {
  double vdd = 1.5;
  double idd0 = 75.0;    // one-bank ACT/PRE cycling
  double idd2n = 32.0;   // precharged standby
  double idd3n = 38.0;   // active standby
  double idd4r = 157.0;  // read burst
  double idd4w = 165.0;  // write burst
  double idd5 = 235.0;   // refresh

  void validate() const {
    if (vdd <= 0 || idd0 <= 0 || idd2n <= 0 || idd3n <= 0 || idd4r <= 0 || idd4w <= 0 || idd5 <= 0)
      throw ConfigError("energy: all power parameters must be positive");
    if (idd3n < idd2n) throw ConfigError("energy: idd3n must be >= idd2n");
  }
};

// Command counts and state-residency durations of one measured run, the
// inputs the accounting needs. Durations are summed over all ranks; for each
// rank active + standby must equal the measured wall time.
struct EnergyInputs {
  std::uint64_t acts_standard = 0;
  std::uint64_t acts_reduced = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t refreshes = 0;
  std::uint64_t active_cycles = 0;   // cycles with at least one bank open, per rank, summed
  std::uint64_t standby_cycles = 0;  // all-banks-precharged cycles, per rank, summed
  std::uint64_t wall_cycles = 0;     // measured wall time of the run
  std::uint32_t ranks = 1;           // total ranks across channels
  bool hcrac_present = false;        // policy keeps row-address tables
};

struct EnergyReport {
  double act_pre_standard = 0.0;  // joules
  double act_pre_reduced = 0.0;
  double read = 0.0;
  double write = 0.0;
  double refresh = 0.0;
  double background = 0.0;
  double hcrac = 0.0;
  double total = 0.0;

  double act_pre() const { return act_pre_standard + act_pre_reduced; }
};

// Command-level accounting: each activate/precharge pair charges the excess
// of IDD0 over the standby blend across its effective row cycle, bursts
// charge their excess over active standby, refresh its excess over
// precharged standby, and the background term integrates standby currents
// over the state residencies. Reduced activations span a shorter active
// window (tRAS_eff), so they charge less than Standard ones.
inline EnergyReport energy_from_run(const EnergyInputs& in, const PowerParams& p,
                                    const TimingParams& t, const ReducedDeltas& d) {
  p.validate();
  if (in.active_cycles + in.standby_cycles !=
      static_cast<std::uint64_t>(in.ranks) * in.wall_cycles)
    throw ConfigError("energy: active + standby cycles (" +
                      std::to_string(in.active_cycles + in.standby_cycles) +
                      ") do not partition ranks * wall (" +
                      std::to_string(static_cast<std::uint64_t>(in.ranks) * in.wall_cycles) + ")");

  const double period_s = t.clock_period_ns * 1e-9;
  const double ma_cyc_to_j = 1e-3 * p.vdd * period_s;  // mA * cycles -> joules

  auto act_pre_pair = [&](TimingClass cls) {
    TimingParams eff = effective_timings(t, d, cls);
    double excess = p.idd0 * eff.trc() - p.idd3n * eff.tras - p.idd2n * eff.trp;
    return excess * ma_cyc_to_j;
  };

  EnergyReport r;
  r.act_pre_standard = static_cast<double>(in.acts_standard) * act_pre_pair(TimingClass::Standard);
  r.act_pre_reduced = static_cast<double>(in.acts_reduced) * act_pre_pair(TimingClass::Reduced);
  r.read = static_cast<double>(in.reads) * (p.idd4r - p.idd3n) * t.tbl * ma_cyc_to_j;
  r.write = static_cast<double>(in.writes) * (p.idd4w - p.idd3n) * t.tbl * ma_cyc_to_j;
  r.refresh = static_cast<double>(in.refreshes) * (p.idd5 - p.idd2n) * t.trfc * ma_cyc_to_j;
  r.background = (p.idd3n * static_cast<double>(in.active_cycles) +
                  p.idd2n * static_cast<double>(in.standby_cycles)) *
                 ma_cyc_to_j;
  if (in.hcrac_present)
    r.hcrac = kReferencePowerMw * 1e-3 * static_cast<double>(in.wall_cycles) * period_s;
  r.total = r.act_pre_standard + r.act_pre_reduced + r.read + r.write + r.refresh + r.background +
            r.hcrac;
  return r;
}

}  // namespace ccsim
