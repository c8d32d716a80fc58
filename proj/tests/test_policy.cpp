#include <catch2/catch_amalgamated.hpp>

#include "ccsim/policy.hpp"

using namespace ccsim;

namespace {

DramCoord row(std::uint32_t r, std::uint32_t bank = 0) { return DramCoord{0, 0, bank, r, 0}; }

PolicyParams cc_params(Cycle duration = 800000, bool shared = false) {
  PolicyParams p;
  p.kind = PolicyKind::ChargeCache;
  p.hcrac.entries = 128;
  p.hcrac.associativity = 2;
  p.hcrac.caching_duration = duration;
  p.shared_table = shared;
  return p;
}

}  // namespace

TEST_CASE("chargecache reduces a reactivation within the duration", "[policy]") {
  auto p = make_policy(cc_params(), 1, DramGeometry{}, ddr3_1600());
  p->on_precharge(0, row(5), 100);
  CHECK(p->on_activate(0, row(5), 200) == TimingClass::Reduced);
}

TEST_CASE("chargecache returns standard for an expired entry and invalidates it", "[policy]") {
  auto p = make_policy(cc_params(), 1, DramGeometry{}, ddr3_1600());
  p->on_precharge(0, row(5), 100);
  CHECK(p->on_activate(0, row(5), 900200) == TimingClass::Standard);  // 900100 > 800000
  CHECK(p->table_occupancy() == 0);
}

TEST_CASE("cold rows always activate standard under chargecache", "[policy]") {
  auto p = make_policy(cc_params(), 1, DramGeometry{}, ddr3_1600());
  CHECK(p->on_activate(0, row(7), 50) == TimingClass::Standard);
}

TEST_CASE("baseline never reduces; lldram always does", "[policy]") {
  PolicyParams base;
  base.kind = PolicyKind::Baseline;
  auto b = make_policy(base, 1, DramGeometry{}, ddr3_1600());
  CHECK(b->on_activate(0, row(5), 10) == TimingClass::Standard);
  b->on_precharge(0, row(5), 20);
  CHECK(b->on_activate(0, row(5), 30) == TimingClass::Standard);

  PolicyParams ll;
  ll.kind = PolicyKind::LowLatencyDram;
  auto l = make_policy(ll, 1, DramGeometry{}, ddr3_1600());
  CHECK(l->on_activate(0, row(99), 0) == TimingClass::Reduced);
}

TEST_CASE("zero caching duration degenerates to baseline behaviour", "[policy]") {
  auto p = make_policy(cc_params(0), 1, DramGeometry{}, ddr3_1600());
  p->on_precharge(0, row(5), 100);
  CHECK(p->on_activate(0, row(5), 101) == TimingClass::Standard);
}

TEST_CASE("per-core tables are private unless shared", "[policy]") {
  SECTION("private: another core's precharge does not help") {
    auto p = make_policy(cc_params(), 2, DramGeometry{}, ddr3_1600());
    p->on_precharge(0, row(5), 100);
    CHECK(p->on_activate(1, row(5), 200) == TimingClass::Standard);
    CHECK(p->on_activate(0, row(5), 200) == TimingClass::Reduced);
  }
  SECTION("shared: one table serves every core") {
    auto p = make_policy(cc_params(800000, true), 2, DramGeometry{}, ddr3_1600());
    p->on_precharge(0, row(5), 100);
    CHECK(p->on_activate(1, row(5), 200) == TimingClass::Reduced);
  }
}

TEST_CASE("periodic sweep counts invalidated entries", "[policy]") {
  auto p = make_policy(cc_params(), 1, DramGeometry{}, ddr3_1600());
  p->on_precharge(0, row(5), 0);
  p->tick(0);
  CHECK(p->expired_entries() == 0);
  // One sweep interval (duration/8) past expiry drops the stale entry.
  p->tick(900000);
  CHECK(p->expired_entries() == 1);
  CHECK(p->table_occupancy() == 0);
}

TEST_CASE("nuat reduces only recently refreshed blocks", "[policy]") {
  PolicyParams p;
  p.kind = PolicyKind::NuatSimplified;
  p.nuat_window = 3200000;  // 4ms
  DramGeometry g;
  TimingParams t = ddr3_1600();
  auto nuat = make_policy(p, 1, g, t);
  RefreshPlan plan = RefreshPlan::make(g, t);
  REQUIRE(plan.rows_per_ref == 8);
  REQUIRE(plan.num_blocks == 8192);

  // Row in block 0: virtual last refresh one full sweep ago.
  CHECK(nuat->on_activate(0, row(0), 0) == TimingClass::Standard);
  // Row in the last block: virtually refreshed one tREFI before start.
  CHECK(nuat->on_activate(0, row(8191 * 8), 0) == TimingClass::Reduced);

  // A real refresh of block 0 makes its rows eligible within the window.
  nuat->on_refresh(0, 0, 8, 1000);
  CHECK(nuat->on_activate(0, row(3), 2000) == TimingClass::Reduced);
  CHECK(nuat->on_activate(0, row(3), 1000 + 3200000 + 1) == TimingClass::Standard);
  CHECK(nuat->on_activate(0, row(8), 2000) == TimingClass::Standard);  // other block
}

TEST_CASE("combined policy reduces when either mechanism qualifies", "[policy]") {
  PolicyParams p;
  p.kind = PolicyKind::ChargeCachePlusNuat;
  p.hcrac = cc_params().hcrac;
  p.nuat_window = 3200000;
  DramGeometry g;
  auto pol = make_policy(p, 1, g, ddr3_1600());

  // ChargeCache path
  pol->on_precharge(0, row(0), 100);
  CHECK(pol->on_activate(0, row(0), 200) == TimingClass::Reduced);
  // NUAT path, no table entry
  pol->on_refresh(0, 16, 8, 300);
  CHECK(pol->on_activate(0, row(17), 400) == TimingClass::Reduced);
  // Neither
  CHECK(pol->on_activate(0, row(64), 400) == TimingClass::Standard);
}

TEST_CASE("policy names parse and print consistently", "[policy]") {
  for (auto k : {PolicyKind::Baseline, PolicyKind::ChargeCache, PolicyKind::NuatSimplified,
                 PolicyKind::LowLatencyDram, PolicyKind::ChargeCachePlusNuat})
    CHECK(parse_policy(to_string(k)) == k);
  CHECK_THROWS_AS(parse_policy("nope"), ConfigError);
}
