#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ccsim/charge_model.hpp"
#include "ccsim/errors.hpp"
#include "ccsim/io.hpp"
#include "ccsim/simulator.hpp"
#include "ccsim/trace.hpp"

namespace ccsim {

// Flat `key = value` configuration file with `#` comments. Dotted keys group
// by module; unknown keys are rejected. Defaults reproduce the reference
// system: DDR3-1600 with 2 channels, FR-FCFS with 64-entry queues, 3-wide
// cores with 8 MSHRs and a 128-entry window, and a 128-entry 2-way table per
// core per channel with a 1ms caching duration and 4/8-cycle reductions.

enum class WsMode : std::uint8_t { Auto, On, Off };

struct RunSpec {
  RunConfig config;
  std::string out_dir = "out";
  bool emit_cmd_trace = false;
  WsMode ws_mode = WsMode::Auto;
  bool compare_baseline = false;

  bool want_weighted_speedup() const {
    if (ws_mode == WsMode::On) return true;
    if (ws_mode == WsMode::Off) return false;
    return config.traces.size() > 1;
  }
};

inline std::map<std::string, std::string> parse_kv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string(), lineno, "expected 'key = value'");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(path.string(), lineno, "empty key");
    if (kv.count(key)) throw ParseError(path.string(), lineno, "duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

namespace detail {

class KvReader {
 public:
  explicit KvReader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    return it->second;
  }

  std::uint64_t u64(const std::string& key, std::uint64_t def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    try {
      std::size_t pos = 0;
      std::uint64_t v = std::stoull(it->second, &pos, 0);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': bad integer '" + it->second + "'");
    }
  }

  int i32(const std::string& key, int def) {
    return static_cast<int>(u64(key, static_cast<std::uint64_t>(def)));
  }

  double f64(const std::string& key, double def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': bad number '" + it->second + "'");
    }
  }

  bool boolean(const std::string& key, bool def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config key '" + key + "': bad boolean '" + it->second + "'");
  }

  std::vector<std::string> list(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return {};
    used_.insert(key);
    std::vector<std::string> out;
    std::string cur;
    for (char c : it->second) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(cur);
    for (auto& s : out) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      if (s.empty()) throw ConfigError("config key '" + key + "': empty list element");
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : kv_)
      if (!used_.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

}  // namespace detail

// Reduced-timing deltas must not promise more than the charge model says a
// row aged to the policy's eligibility limit can deliver. The reference
// 4/8-cycle deltas at 1.25ns slightly exceed the analytic reduction; that
// known configuration warns instead of failing.
inline void check_reduction_consistency(const RunConfig& cfg, std::vector<std::string>* warnings) {
  PolicyKind k = cfg.policy.kind;
  if (k == PolicyKind::Baseline || k == PolicyKind::LowLatencyDram) return;
  double t_ms = 0.0;
  if (k == PolicyKind::ChargeCache || k == PolicyKind::ChargeCachePlusNuat)
    t_ms = cycles_to_ms(cfg.policy.hcrac.caching_duration, cfg.timings);
  if (k == PolicyKind::NuatSimplified || k == PolicyKind::ChargeCachePlusNuat)
    t_ms = std::max(t_ms, cycles_to_ms(cfg.policy.nuat_window, cfg.timings));
  CalibratedChargeModel model = calibrate_charge_model(ChargeModelSpec{});
  TimingReductionNs avail = timing_reduction(t_ms, model);
  double trcd_ns = cfg.deltas.trcd * cfg.timings.clock_period_ns;
  double tras_ns = cfg.deltas.tras * cfg.timings.clock_period_ns;
  if (trcd_ns <= avail.trcd && tras_ns <= avail.tras) return;
  std::string msg = "configured reductions (" + fmt_f6(trcd_ns) + "ns tRCD, " + fmt_f6(tras_ns) +
                    "ns tRAS) exceed the analytic charge-model reduction (" + fmt_f6(avail.trcd) +
                    "ns, " + fmt_f6(avail.tras) + "ns) at eligibility age " + fmt_f6(t_ms) + "ms";
  const bool reference_deltas =
      cfg.deltas.trcd == 4 && cfg.deltas.tras == 8 && cfg.timings.clock_period_ns == 1.25;
  if (reference_deltas) {
    if (warnings) warnings->push_back("warning: " + msg + " (reference configuration, continuing)");
  } else {
    throw ConfigError(msg);
  }
}

// Loads a run specification. Trace files listed under run.traces are read
// eagerly (paths resolve relative to the config file); load_traces=false
// skips that for subcommands that only need geometry or timing sections.
inline RunSpec load_run_spec(const std::filesystem::path& path,
                             std::vector<std::string>* warnings = nullptr,
                             bool load_traces = true) {
  detail::KvReader r(parse_kv_file(path));
  RunSpec spec;
  RunConfig& c = spec.config;

  c.geometry.channels = static_cast<std::uint32_t>(r.u64("geometry.channels", 2));
  c.geometry.ranks_per_channel = static_cast<std::uint32_t>(r.u64("geometry.ranks_per_channel", 1));
  c.geometry.banks_per_rank = static_cast<std::uint32_t>(r.u64("geometry.banks_per_rank", 8));
  c.geometry.rows_per_bank = static_cast<std::uint32_t>(r.u64("geometry.rows_per_bank", 65536));
  c.geometry.row_buffer_bytes = static_cast<std::uint32_t>(r.u64("geometry.row_buffer_bytes", 8192));
  c.geometry.cacheline_bytes = static_cast<std::uint32_t>(r.u64("geometry.cacheline_bytes", 64));
  c.geometry.validate();

  c.timings.clock_period_ns = r.f64("timing.clock_period_ns", 1.25);
  c.timings.trcd = r.i32("timing.trcd", 11);
  c.timings.tras = r.i32("timing.tras", 28);
  c.timings.trp = r.i32("timing.trp", 11);
  c.timings.tcl = r.i32("timing.tcl", 11);
  c.timings.tcwl = r.i32("timing.tcwl", 8);
  c.timings.tbl = r.i32("timing.tbl", 4);
  c.timings.tccd = r.i32("timing.tccd", 4);
  c.timings.trtp = r.i32("timing.trtp", 6);
  c.timings.twtr = r.i32("timing.twtr", 6);
  c.timings.twr = r.i32("timing.twr", 12);
  c.timings.trrd = r.i32("timing.trrd", 5);
  c.timings.tfaw = r.i32("timing.tfaw", 24);
  c.timings.trfc = r.i32("timing.trfc", 208);
  c.timings.trefi = r.i32("timing.trefi", 6240);
  c.timings.validate();

  c.deltas.trcd = r.i32("reduced.trcd_delta", 4);
  c.deltas.tras = r.i32("reduced.tras_delta", 8);
  c.deltas.validate(c.timings);

  c.controller.row_policy = parse_row_policy(r.str("controller.row_policy", "open"));
  c.controller.queue_capacity = static_cast<std::uint32_t>(r.u64("controller.queue_capacity", 64));
  c.controller.refresh_enabled = r.boolean("controller.refresh_enabled", true);
  c.controller.validate();

  c.core.issue_width = static_cast<std::uint32_t>(r.u64("cpu.issue_width", 3));
  c.core.window_entries = static_cast<std::uint32_t>(r.u64("cpu.window_entries", 128));
  c.core.mshrs = static_cast<std::uint32_t>(r.u64("cpu.mshrs", 8));
  c.core.clock_multiplier = static_cast<std::uint32_t>(r.u64("cpu.clock_multiplier", 5));
  c.core.validate();

  c.policy.kind = parse_policy(r.str("policy", "chargecache"));
  c.policy.hcrac.entries = static_cast<std::uint32_t>(r.u64("hcrac.entries_per_core", 128));
  c.policy.hcrac.associativity = static_cast<std::uint32_t>(r.u64("hcrac.associativity", 2));
  c.policy.hcrac.caching_duration =
      ms_to_cycles(r.f64("hcrac.caching_duration_ms", 1.0), c.timings);
  c.policy.shared_table = r.boolean("hcrac.shared", false);
  c.policy.nuat_window = ms_to_cycles(r.f64("nuat.window_ms", 4.0), c.timings);

  c.power.vdd = r.f64("energy.vdd", 1.5);
  c.power.idd0 = r.f64("energy.idd0", 75.0);
  c.power.idd2n = r.f64("energy.idd2n", 32.0);
  c.power.idd3n = r.f64("energy.idd3n", 38.0);
  c.power.idd4r = r.f64("energy.idd4r", 157.0);
  c.power.idd4w = r.f64("energy.idd4w", 165.0);
  c.power.idd5 = r.f64("energy.idd5", 235.0);
  c.power.validate();

  c.instruction_budget = r.u64("run.instruction_budget", 1'000'000);
  c.warmup_core_cycles = r.u64("run.warmup_core_cycles", 200'000'000);
  c.max_memory_cycles = static_cast<Cycle>(r.u64("run.max_memory_cycles", 0));
  c.seed = r.u64("run.seed", 1);
  spec.out_dir = r.str("run.out_dir", "out");
  spec.emit_cmd_trace = r.boolean("run.emit_cmd_trace", false);
  spec.compare_baseline = r.boolean("run.compare_baseline", false);
  std::string ws = r.str("run.weighted_speedup", "auto");
  if (ws == "auto") spec.ws_mode = WsMode::Auto;
  else if (ws == "on") spec.ws_mode = WsMode::On;
  else if (ws == "off") spec.ws_mode = WsMode::Off;
  else throw ConfigError("run.weighted_speedup must be auto|on|off, got '" + ws + "'");

  std::vector<std::string> trace_paths = r.list("run.traces");
  r.reject_unknown();

  if (load_traces) {
    for (const auto& p : trace_paths) {
      std::filesystem::path tp(p);
      if (tp.is_relative() && path.has_parent_path()) tp = path.parent_path() / tp;
      std::ifstream in(tp);
      if (!in) throw ConfigError("trace file '" + tp.string() + "' does not exist");
      c.traces.push_back(parse_trace(in, tp.string()));
      c.trace_names.push_back(tp.string());
    }
  }

  check_reduction_consistency(c, warnings);
  return spec;
}

}  // namespace ccsim
