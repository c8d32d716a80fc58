#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ccsim/errors.hpp"

namespace ccsim {

// Published sense-amplification anchors the analytic model is calibrated to:
// a fully-charged cell reaches the ready-to-access bitline level in 10ns, a
// cell left leaking for the full 64ms retention period needs 14.5ns, and the
// corresponding full-charge timing headroom is 4.5ns of tRCD and 9.6ns of
// tRAS.
inline constexpr double kSenseFullNs = 10.0;
inline constexpr double kSenseWorstNs = 14.5;
inline constexpr double kMaxTrcdReductionNs = 4.5;
inline constexpr double kMaxTrasReductionNs = 9.6;

struct ChargeModelSpec {
  double vdd = 1.5;            // volts
  double v_ready_frac = 0.75;  // ready-to-access bitline level, fraction of vdd
  double retention_ms = 64.0;  // refresh retention period
  double restore_frac = 0.95;  // full-restore level, fraction of vdd

  void validate() const {
    if (!(0.5 < v_ready_frac && v_ready_frac < restore_frac && restore_frac <= 1.0))
      throw ConfigError("charge model requires 0.5 < v_ready_frac < restore_frac <= 1");
    if (vdd <= 0.0 || retention_ms <= 0.0)
      throw ConfigError("charge model vdd and retention must be positive");
  }
};

// Three-parameter analytic replacement for circuit-level simulation:
//   cell voltage   V(t)      = vdd * exp(-t / tau_leak)
//   charge sharing dV0(v)    = (v - vdd/2) / 2          (equal cell/bitline C)
//   sense time     s(v)      = t0 + tau_sense * ln(dV_ready / dV0(v))
// Calibration pins t0 at the full-charge anchor, tau_leak so the worst-case
// cell sits exactly at the ready-to-access level after one retention period,
// and tau_sense so that cell senses at the worst-case anchor.
struct CalibratedChargeModel {
  ChargeModelSpec spec;
  double tau_leak_ms = 0.0;
  double tau_sense_ns = 0.0;
  double t0_ns = kSenseFullNs;
};

inline double cell_voltage(double t_ms, const CalibratedChargeModel& m) {
  if (t_ms < 0.0) throw std::invalid_argument("cell_voltage: negative time");
  return m.spec.vdd * std::exp(-t_ms / m.tau_leak_ms);
}

// Nanoseconds for the sense amplifier to drive the bitline to the
// ready-to-access level, given the cell voltage at activation. Returns
// +infinity when the cell holds no usable charge (v <= vdd/2).
inline double sensing_time(double v_cell, const CalibratedChargeModel& m) {
  const double half = m.spec.vdd / 2.0;
  if (v_cell <= half) return std::numeric_limits<double>::infinity();
  const double dv0 = (v_cell - half) / 2.0;
  const double dv_ready = (m.spec.v_ready_frac - 0.5) * m.spec.vdd;
  return m.t0_ns + m.tau_sense_ns * std::log(dv_ready / dv0);
}

namespace detail {

// Deterministic bisection for a monotone root; f(lo) and f(hi) must bracket.
template <typename F>
double bisect(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw std::logic_error("bisect: interval does not bracket a root");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline CalibratedChargeModel calibrate_charge_model(const ChargeModelSpec& spec,
                                                    double tol = 1e-6) {
  spec.validate();
  CalibratedChargeModel m;
  m.spec = spec;
  m.t0_ns = kSenseFullNs;

  // tau_leak: the worst-case cell decays to the ready-to-access level over
  // one full retention period.
  const double target_v = spec.v_ready_frac * spec.vdd;
  m.tau_leak_ms = detail::bisect(
      [&](double tau) { return spec.vdd * std::exp(-spec.retention_ms / tau) - target_v; },
      spec.retention_ms / 50.0, spec.retention_ms * 1000.0, tol);

  // tau_sense: that worst-case cell senses at the published worst-case time.
  const double v_worst = cell_voltage(spec.retention_ms, m);
  const double half = spec.vdd / 2.0;
  const double dv0_worst = (v_worst - half) / 2.0;
  const double dv_ready = (spec.v_ready_frac - 0.5) * spec.vdd;
  const double lnratio = std::log(dv_ready / dv0_worst);
  m.tau_sense_ns = detail::bisect(
      [&](double tau) { return m.t0_ns + tau * lnratio - kSenseWorstNs; }, 1e-3, 1e3, tol);
  return m;
}

struct TimingReductionNs {
  double trcd = 0.0;
  double tras = 0.0;
};

// Achievable timing reduction for a row whose charge was last replenished
// t_ms ago: the sensing-time headroom versus the worst-case cell, clamped to
// the published full-charge endpoints, with the restore-side (tRAS) reduction
// scaled proportionally between its endpoints.
inline TimingReductionNs timing_reduction(double t_ms, const CalibratedChargeModel& m) {
  if (t_ms < 0.0) throw std::invalid_argument("timing_reduction: negative time");
  const double worst = sensing_time(cell_voltage(m.spec.retention_ms, m), m);
  const double now = sensing_time(cell_voltage(t_ms, m), m);
  double d_trcd = worst - now;
  if (!(d_trcd > 0.0)) d_trcd = 0.0;
  if (d_trcd > kMaxTrcdReductionNs) d_trcd = kMaxTrcdReductionNs;
  TimingReductionNs r;
  r.trcd = d_trcd;
  r.tras = kMaxTrasReductionNs * d_trcd / kMaxTrcdReductionNs;
  return r;
}

}  // namespace ccsim
