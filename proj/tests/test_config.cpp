#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "ccsim/config.hpp"

using namespace ccsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ccsim_cfg_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path file(const std::string& name, const std::string& contents) {
    fs::path p = path / name;
    std::ofstream out(p);
    out << contents;
    return p;
  }
};

}  // namespace

TEST_CASE("defaults reproduce the reference system", "[config]") {
  TempDir dir;
  fs::path cfg = dir.file("a.cfg", "# empty: all defaults\n");
  RunSpec spec = load_run_spec(cfg, nullptr, false);
  const RunConfig& c = spec.config;
  CHECK(c.geometry.channels == 2);
  CHECK(c.geometry.banks_per_rank == 8);
  CHECK(c.geometry.rows_per_bank == 65536);
  CHECK(c.geometry.row_buffer_bytes == 8192);
  CHECK(c.timings.trcd == 11);
  CHECK(c.timings.tras == 28);
  CHECK(c.timings.clock_period_ns == 1.25);
  CHECK(c.deltas.trcd == 4);
  CHECK(c.deltas.tras == 8);
  CHECK(c.controller.queue_capacity == 64);
  CHECK(c.controller.row_policy == RowPolicy::Open);
  CHECK(c.core.issue_width == 3);
  CHECK(c.core.window_entries == 128);
  CHECK(c.core.mshrs == 8);
  CHECK(c.policy.kind == PolicyKind::ChargeCache);
  CHECK(c.policy.hcrac.entries == 128);
  CHECK(c.policy.hcrac.associativity == 2);
  CHECK(c.policy.hcrac.caching_duration == 800000);
  CHECK(c.instruction_budget == 1000000);
  CHECK(c.warmup_core_cycles == 200000000);
}

TEST_CASE("values parse and override the defaults", "[config]") {
  TempDir dir;
  fs::path cfg = dir.file("b.cfg",
                          "policy = lldram\n"
                          "geometry.channels = 1\n"
                          "controller.row_policy = closed\n"
                          "hcrac.caching_duration_ms = 0.5\n"
                          "run.instruction_budget = 5000\n");
  RunSpec spec = load_run_spec(cfg, nullptr, false);
  CHECK(spec.config.policy.kind == PolicyKind::LowLatencyDram);
  CHECK(spec.config.geometry.channels == 1);
  CHECK(spec.config.controller.row_policy == RowPolicy::Closed);
  CHECK(spec.config.policy.hcrac.caching_duration == 400000);
  CHECK(spec.config.instruction_budget == 5000);
}

TEST_CASE("unknown keys and syntax errors are rejected with positions", "[config]") {
  TempDir dir;
  SECTION("unknown key") {
    fs::path cfg = dir.file("c.cfg", "geometry.chanels = 2\n");
    CHECK_THROWS_WITH(load_run_spec(cfg, nullptr, false),
                      Catch::Matchers::ContainsSubstring("geometry.chanels"));
  }
  SECTION("missing equals") {
    fs::path cfg = dir.file("d.cfg", "geometry.channels 2\n");
    CHECK_THROWS_WITH(load_run_spec(cfg, nullptr, false),
                      Catch::Matchers::ContainsSubstring(":1"));
  }
  SECTION("duplicate key") {
    fs::path cfg = dir.file("e.cfg", "policy = baseline\npolicy = lldram\n");
    CHECK_THROWS_AS(load_run_spec(cfg, nullptr, false), ParseError);
  }
  SECTION("bad number") {
    fs::path cfg = dir.file("f.cfg", "timing.trcd = eleven\n");
    CHECK_THROWS_AS(load_run_spec(cfg, nullptr, false), ConfigError);
  }
}

TEST_CASE("missing trace files fail at load", "[config]") {
  TempDir dir;
  fs::path cfg = dir.file("g.cfg", "run.traces = nosuch.trace\n");
  CHECK_THROWS_WITH(load_run_spec(cfg),
                    Catch::Matchers::ContainsSubstring("nosuch.trace"));
}

TEST_CASE("trace paths resolve relative to the config file", "[config]") {
  TempDir dir;
  dir.file("t.trace", "1 0x40 R\n");
  fs::path cfg = dir.file("h.cfg", "run.traces = t.trace\nrun.warmup_core_cycles = 0\n");
  RunSpec spec = load_run_spec(cfg);
  REQUIRE(spec.config.traces.size() == 1);
  CHECK(spec.config.traces[0].size() == 1);
}

TEST_CASE("reference reductions warn instead of failing", "[config]") {
  TempDir dir;
  // 4/8 cycle deltas at 1.25ns exceed the analytic reduction at 1ms age.
  fs::path cfg = dir.file("i.cfg", "policy = chargecache\n");
  std::vector<std::string> warnings;
  RunSpec spec = load_run_spec(cfg, &warnings, false);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("exceed") != std::string::npos);
}

TEST_CASE("non-reference over-promising reductions are errors", "[config]") {
  TempDir dir;
  fs::path cfg = dir.file("j.cfg",
                          "policy = chargecache\n"
                          "reduced.trcd_delta = 5\n"
                          "reduced.tras_delta = 10\n");
  CHECK_THROWS_AS(load_run_spec(cfg, nullptr, false), ConfigError);
}

TEST_CASE("conservative reductions pass the consistency check", "[config]") {
  TempDir dir;
  fs::path cfg = dir.file("k.cfg",
                          "policy = chargecache\n"
                          "reduced.trcd_delta = 1\n"
                          "reduced.tras_delta = 2\n");
  std::vector<std::string> warnings;
  load_run_spec(cfg, &warnings, false);
  CHECK(warnings.empty());
}

TEST_CASE("baseline and lldram skip the reduction consistency check", "[config]") {
  TempDir dir;
  fs::path cfg = dir.file("l.cfg",
                          "policy = lldram\n"
                          "reduced.trcd_delta = 9\n"
                          "reduced.tras_delta = 20\n");
  std::vector<std::string> warnings;
  CHECK_NOTHROW(load_run_spec(cfg, &warnings, false));
  CHECK(warnings.empty());
}

TEST_CASE("nuat without refresh is rejected at validation", "[config]") {
  TempDir dir;
  dir.file("t.trace", "1 0x40 R\n");
  fs::path cfg = dir.file("m.cfg",
                          "policy = nuat\n"
                          "controller.refresh_enabled = false\n"
                          "run.traces = t.trace\n"
                          "run.warmup_core_cycles = 0\n");
  RunSpec spec = load_run_spec(cfg);
  CHECK_THROWS_AS(spec.config.validate(), ConfigError);
}
