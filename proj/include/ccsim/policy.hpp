#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ccsim/errors.hpp"
#include "ccsim/geometry.hpp"
#include "ccsim/hcrac.hpp"
#include "ccsim/timing.hpp"

namespace ccsim {

enum class PolicyKind : std::uint8_t {
  Baseline,
  ChargeCache,
  NuatSimplified,
  LowLatencyDram,
  ChargeCachePlusNuat,
};

inline const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Baseline: return "baseline";
    case PolicyKind::ChargeCache: return "chargecache";
    case PolicyKind::NuatSimplified: return "nuat";
    case PolicyKind::LowLatencyDram: return "lldram";
    case PolicyKind::ChargeCachePlusNuat: return "chargecache+nuat";
  }
  return "?";
}

inline PolicyKind parse_policy(const std::string& s) {
  if (s == "baseline") return PolicyKind::Baseline;
  if (s == "chargecache") return PolicyKind::ChargeCache;
  if (s == "nuat") return PolicyKind::NuatSimplified;
  if (s == "lldram") return PolicyKind::LowLatencyDram;
  if (s == "chargecache+nuat") return PolicyKind::ChargeCachePlusNuat;
  throw ConfigError("unknown policy '" + s +
                    "' (expected baseline|chargecache|nuat|lldram|chargecache+nuat)");
}

// Shared convention for how refresh walks the row space: each REF covers
// rows_per_ref consecutive rows of every bank in the rank, and the block
// pointer wraps after num_blocks refreshes (8192 for a 64K-row bank, i.e. one
// full pass per 64ms retention period at the default tREFI).
struct RefreshPlan {
  Cycle trefi = 6240;
  std::uint32_t rows_per_ref = 8;
  std::uint32_t num_blocks = 8192;

  static RefreshPlan make(const DramGeometry& g, const TimingParams& t) {
    RefreshPlan p;
    p.trefi = t.trefi;
    p.rows_per_ref = std::max<std::uint32_t>(1, g.rows_per_bank / 8192);
    p.num_blocks = (g.rows_per_bank + p.rows_per_ref - 1) / p.rows_per_ref;
    return p;
  }
};

// Timing-class decision engine, one instance per channel. The controller
// consults on_activate for every ACT, reports every PRE (with the row that
// was closed and the core that owned the activation), and reports refreshes.
class LatencyPolicy {
 public:
  virtual ~LatencyPolicy() = default;
  virtual TimingClass on_activate(std::uint32_t core, const DramCoord& coord, Cycle now) = 0;
  virtual void on_precharge(std::uint32_t /*core*/, const DramCoord& /*coord*/, Cycle /*now*/) {}
  virtual void on_refresh(std::uint32_t /*rank*/, std::uint32_t /*row_begin*/,
                          std::uint32_t /*row_count*/, Cycle /*now*/) {}
  virtual void tick(Cycle /*now*/) {}
  virtual std::uint64_t expired_entries() const { return 0; }
  virtual std::uint64_t table_occupancy() const { return 0; }
};

class BaselinePolicy final : public LatencyPolicy {
 public:
  TimingClass on_activate(std::uint32_t, const DramCoord&, Cycle) override {
    return TimingClass::Standard;
  }
};

// Idealized comparison point: every activation runs with reduced timings.
class LldramPolicy final : public LatencyPolicy {
 public:
  TimingClass on_activate(std::uint32_t, const DramCoord&, Cycle) override {
    return TimingClass::Reduced;
  }
};

class ChargeCachePolicy final : public LatencyPolicy {
 public:
  ChargeCachePolicy(const HcracConfig& cfg, std::uint32_t num_cores, bool shared)
      : shared_(shared) {
    std::uint32_t n = shared ? 1 : num_cores;
    for (std::uint32_t i = 0; i < n; ++i) tables_.emplace_back(cfg);
    // Lookups check exact timestamps; the periodic sweep only keeps
    // occupancy statistics in line with a hardware invalidation pass.
    sweep_interval_ = std::max<Cycle>(1, cfg.caching_duration / 8);
    sweep_enabled_ = cfg.caching_duration > 0;
  }

  TimingClass on_activate(std::uint32_t core, const DramCoord& coord, Cycle now) override {
    return table(core).lookup(coord, now) ? TimingClass::Reduced : TimingClass::Standard;
  }

  void on_precharge(std::uint32_t core, const DramCoord& coord, Cycle now) override {
    table(core).insert(coord, now);
  }

  void tick(Cycle now) override {
    if (!sweep_enabled_ || now < next_sweep_) return;
    next_sweep_ = now + sweep_interval_;
    for (auto& t : tables_) expired_ += t.expire(now);
  }

  std::uint64_t expired_entries() const override { return expired_; }

  std::uint64_t table_occupancy() const override {
    std::uint64_t n = 0;
    for (const auto& t : tables_) n += t.occupancy();
    return n;
  }

  HcracTable& table(std::uint32_t core) { return tables_[shared_ ? 0 : core]; }

 private:
  std::vector<HcracTable> tables_;
  bool shared_;
  bool sweep_enabled_;
  Cycle sweep_interval_;
  Cycle next_sweep_ = 0;
  std::uint64_t expired_ = 0;
};

// Single-threshold simplification of refresh-proximity timing reduction: an
// activation is Reduced iff the target row's block was refreshed within the
// window. Before the first on_refresh for a block, a virtual steady-state
// schedule (one full pass ending at cycle 0) supplies its last-refresh time.
class NuatPolicy final : public LatencyPolicy {
 public:
  NuatPolicy(const RefreshPlan& plan, std::uint32_t ranks, Cycle window)
      : plan_(plan), window_(window) {
    block_last_ref_.resize(ranks);
    for (auto& blocks : block_last_ref_) {
      blocks.resize(plan.num_blocks);
      for (std::uint32_t b = 0; b < plan.num_blocks; ++b)
        blocks[b] = static_cast<Cycle>(b) * plan.trefi -
                    static_cast<Cycle>(plan.num_blocks) * plan.trefi;
    }
  }

  TimingClass on_activate(std::uint32_t, const DramCoord& coord, Cycle now) override {
    std::uint32_t block = coord.row / plan_.rows_per_ref;
    Cycle last = block_last_ref_[coord.rank][block];
    return now - last <= window_ ? TimingClass::Reduced : TimingClass::Standard;
  }

  void on_refresh(std::uint32_t rank, std::uint32_t row_begin, std::uint32_t row_count,
                  Cycle now) override {
    std::uint32_t first = row_begin / plan_.rows_per_ref;
    std::uint32_t last = (row_begin + row_count - 1) / plan_.rows_per_ref;
    for (std::uint32_t b = first; b <= last && b < plan_.num_blocks; ++b)
      block_last_ref_[rank][b] = now;
  }

 private:
  RefreshPlan plan_;
  Cycle window_;
  std::vector<std::vector<Cycle>> block_last_ref_;  // [rank][block]
};

class ChargeCachePlusNuatPolicy final : public LatencyPolicy {
 public:
  ChargeCachePlusNuatPolicy(const HcracConfig& cfg, std::uint32_t num_cores, bool shared,
                            const RefreshPlan& plan, std::uint32_t ranks, Cycle window)
      : cc_(cfg, num_cores, shared), nuat_(plan, ranks, window) {}

  TimingClass on_activate(std::uint32_t core, const DramCoord& coord, Cycle now) override {
    TimingClass a = cc_.on_activate(core, coord, now);
    TimingClass b = nuat_.on_activate(core, coord, now);
    return (a == TimingClass::Reduced || b == TimingClass::Reduced) ? TimingClass::Reduced
                                                                    : TimingClass::Standard;
  }

  void on_precharge(std::uint32_t core, const DramCoord& coord, Cycle now) override {
    cc_.on_precharge(core, coord, now);
  }

  void on_refresh(std::uint32_t rank, std::uint32_t row_begin, std::uint32_t row_count,
                  Cycle now) override {
    nuat_.on_refresh(rank, row_begin, row_count, now);
  }

  void tick(Cycle now) override { cc_.tick(now); }
  std::uint64_t expired_entries() const override { return cc_.expired_entries(); }
  std::uint64_t table_occupancy() const override { return cc_.table_occupancy(); }

 private:
  ChargeCachePolicy cc_;
  NuatPolicy nuat_;
};

struct PolicyParams {
  PolicyKind kind = PolicyKind::ChargeCache;
  HcracConfig hcrac;
  bool shared_table = false;
  Cycle nuat_window = 3200000;  // 4ms at 1.25ns per cycle
};

inline std::unique_ptr<LatencyPolicy> make_policy(const PolicyParams& p, std::uint32_t num_cores,
                                                  const DramGeometry& g, const TimingParams& t) {
  RefreshPlan plan = RefreshPlan::make(g, t);
  switch (p.kind) {
    case PolicyKind::Baseline:
      return std::make_unique<BaselinePolicy>();
    case PolicyKind::LowLatencyDram:
      return std::make_unique<LldramPolicy>();
    case PolicyKind::ChargeCache:
      return std::make_unique<ChargeCachePolicy>(p.hcrac, num_cores, p.shared_table);
    case PolicyKind::NuatSimplified:
      return std::make_unique<NuatPolicy>(plan, g.ranks_per_channel, p.nuat_window);
    case PolicyKind::ChargeCachePlusNuat:
      return std::make_unique<ChargeCachePlusNuatPolicy>(p.hcrac, num_cores, p.shared_table, plan,
                                                         g.ranks_per_channel, p.nuat_window);
  }
  throw ConfigError("unhandled policy kind");
}

}  // namespace ccsim
