#include <catch2/catch_amalgamated.hpp>

#include <deque>
#include <optional>
#include <vector>

#include "ccsim/cpu.hpp"

using namespace ccsim;

namespace {

// Memory that completes reads a fixed number of core ticks later.
class FixedLatencyPort : public MemoryPort {
 public:
  explicit FixedLatencyPort(std::uint64_t latency) : latency_(latency) {}

  bool try_read(std::uint32_t, std::uint64_t, std::uint64_t tag) override {
    if (read_limit_ && pending_.size() >= *read_limit_) return false;
    pending_.push_back({now_ + latency_, tag});
    ++reads;
    return true;
  }
  bool try_write(std::uint32_t, std::uint64_t) override {
    if (writes_blocked) return false;
    ++writes;
    return true;
  }

  void deliver(Core& core) {
    for (std::size_t i = 0; i < pending_.size();) {
      if (pending_[i].due <= now_) {
        core.on_read_complete(pending_[i].tag);
        pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
  }

  void step() { ++now_; }

  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  bool writes_blocked = false;
  std::optional<std::size_t> read_limit_;

 private:
  struct Pending {
    std::uint64_t due;
    std::uint64_t tag;
  };
  std::uint64_t now_ = 0;
  std::uint64_t latency_;
  std::deque<Pending> pending_;
};

}  // namespace

TEST_CASE("a pure-compute stretch retires at exactly the issue width", "[cpu]") {
  // One record: 300 non-memory instructions before a read. Budget 300 ends
  // the measurement before the read matters.
  std::vector<TraceRecord> trace = {{300, 0x40, false}};
  Core core(0, CoreConfig{}, &trace, 300, 0);
  FixedLatencyPort port(10);
  while (!core.finished()) {
    port.deliver(core);
    core.tick(port);
    port.step();
  }
  CHECK(core.measured_cycles() == 100);
  CHECK(core.ipc() == 3.0);
}

TEST_CASE("instant memory is bounded by the issue width", "[cpu]") {
  // Alternating 5 non-memory instructions and a read with zero latency:
  // IPC stays at the width bound.
  std::vector<TraceRecord> trace = {{5, 0x40, false}};
  Core core(0, CoreConfig{}, &trace, 6000, 0);
  FixedLatencyPort port(0);
  while (!core.finished()) {
    port.deliver(core);
    core.tick(port);
    port.step();
  }
  CHECK(core.ipc() == Catch::Approx(3.0).epsilon(0.01));
}

TEST_CASE("the MSHR count caps outstanding reads", "[cpu]") {
  // 16 back-to-back reads; a long latency keeps them all outstanding.
  std::vector<TraceRecord> trace;
  for (int i = 0; i < 16; ++i)
    trace.push_back({0, static_cast<std::uint64_t>(0x1000 + 0x40 * i), false});
  Core core(0, CoreConfig{}, &trace, 16, 0);
  FixedLatencyPort port(1000);

  core.tick(port);
  CHECK(core.outstanding_reads() == 8);
  CHECK(port.reads == 8);
  for (int i = 0; i < 100; ++i) {
    port.step();
    port.deliver(core);
    core.tick(port);
    CHECK(core.outstanding_reads() <= 8);
  }
  CHECK(core.max_outstanding() == 8);
}

TEST_CASE("the ninth read issues only after a completion frees an MSHR", "[cpu]") {
  std::vector<TraceRecord> trace;
  for (int i = 0; i < 16; ++i)
    trace.push_back({0, static_cast<std::uint64_t>(0x1000 + 0x40 * i), false});
  Core core(0, CoreConfig{}, &trace, 16, 0);
  FixedLatencyPort port(5);
  core.tick(port);
  REQUIRE(port.reads == 8);
  for (int t = 1; t <= 4; ++t) {
    port.step();
    port.deliver(core);
    core.tick(port);
    CHECK(port.reads == 8);  // nothing freed yet
  }
  port.step();
  port.deliver(core);  // completions at latency 5 arrive
  core.tick(port);
  CHECK(port.reads > 8);
}

TEST_CASE("writes post without occupying the window and retire immediately", "[cpu]") {
  std::vector<TraceRecord> trace = {{0, 0x40, true}};
  Core core(0, CoreConfig{}, &trace, 9, 0);
  FixedLatencyPort port(1000);
  core.tick(port);
  // issue_width writes per tick at most
  CHECK(port.writes == 3);
  CHECK(core.retired() == 3);
  CHECK(core.window_size() == 0);
  core.tick(port);
  CHECK(port.writes == 6);
  while (!core.finished()) core.tick(port);
  CHECK(core.measured_cycles() == 3);
}

TEST_CASE("a full write queue stalls the front end", "[cpu]") {
  std::vector<TraceRecord> trace = {{0, 0x40, true}};
  Core core(0, CoreConfig{}, &trace, 10, 0);
  FixedLatencyPort port(0);
  port.writes_blocked = true;
  for (int i = 0; i < 5; ++i) core.tick(port);
  CHECK(core.retired() == 0);
  port.writes_blocked = false;
  core.tick(port);
  CHECK(core.retired() == 3);
}

TEST_CASE("reads complete out of order but retire in trace order", "[cpu]") {
  // Two reads; the first completes later than the second.
  std::vector<TraceRecord> trace = {{0, 0x40, false}, {0, 0x80, false}, {1000, 0xc0, false}};
  Core core(0, CoreConfig{}, &trace, 2, 0);

  class ScriptedPort : public MemoryPort {
   public:
    bool try_read(std::uint32_t, std::uint64_t, std::uint64_t tag) override {
      tags.push_back(tag);
      return true;
    }
    bool try_write(std::uint32_t, std::uint64_t) override { return true; }
    std::vector<std::uint64_t> tags;
  } port;

  core.tick(port);
  REQUIRE(port.tags.size() >= 2);
  core.on_read_complete(port.tags[1]);  // second read first
  core.tick(port);
  CHECK(core.retired() == 0);  // head still outstanding
  core.on_read_complete(port.tags[0]);
  core.tick(port);
  CHECK(core.retired() == 3);  // both reads plus one trailing non-memory slot
}

TEST_CASE("window occupancy never exceeds the configured size", "[cpu]") {
  std::vector<TraceRecord> trace = {{10, 0x40, false}};
  CoreConfig cfg;
  cfg.window_entries = 16;
  Core core(0, cfg, &trace, 1000, 0);
  FixedLatencyPort port(10000);
  for (int i = 0; i < 50; ++i) {
    core.tick(port);
    CHECK(core.window_size() <= 16);
  }
}

TEST_CASE("an empty trace is rejected", "[cpu]") {
  std::vector<TraceRecord> empty;
  CHECK_THROWS_AS(Core(0, CoreConfig{}, &empty, 10, 0), ConfigError);
}
