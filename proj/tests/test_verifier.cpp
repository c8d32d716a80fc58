#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ccsim/verifier.hpp"

using namespace ccsim;

namespace {

VerifierConfig default_cfg() {
  VerifierConfig cfg;
  cfg.geometry = DramGeometry{};
  cfg.base = ddr3_1600();
  cfg.deltas = ReducedDeltas{4, 8};
  cfg.caching_duration = 800000;
  return cfg;
}

DramCommand mk(CommandKind k, Cycle t, std::uint32_t row,
               TimingClass cls = TimingClass::Standard) {
  DramCommand c;
  c.kind = k;
  c.coord = DramCoord{0, 0, 0, row, 0};
  c.issue_time = t;
  c.timing_class = cls;
  return c;
}

}  // namespace

TEST_CASE("reduced reactivation within the caching duration is clean", "[verifier]") {
  std::vector<DramCommand> trace = {
      mk(CommandKind::Act, 0, 5),
      mk(CommandKind::Pre, 28, 5),
      mk(CommandKind::Act, 39, 5, TimingClass::Reduced),
  };
  VerifyReport rep = verify_commands(trace, default_cfg());
  CHECK(rep.ok());
  CHECK(rep.commands == 3);
  CHECK(rep.acts_standard == 1);
  CHECK(rep.acts_reduced == 1);
}

TEST_CASE("reduced activation after the duration expires is a safety violation", "[verifier]") {
  std::vector<DramCommand> trace = {
      mk(CommandKind::Act, 0, 5),
      mk(CommandKind::Pre, 28, 5),
      mk(CommandKind::Act, 900000, 5, TimingClass::Reduced),  // 899972 > 800000
  };
  VerifyReport rep = verify_commands(trace, default_cfg());
  CHECK(rep.safety_violations == 1);
  CHECK(rep.timing_violations == 0);
  REQUIRE(rep.first_violation_index().has_value());
  CHECK(*rep.first_violation_index() == 2);
}

TEST_CASE("a cold row must be activated with standard timings", "[verifier]") {
  std::vector<DramCommand> trace = {mk(CommandKind::Act, 0, 5, TimingClass::Reduced)};
  VerifyReport rep = verify_commands(trace, default_cfg());
  CHECK(rep.safety_violations == 1);
}

TEST_CASE("refresh does not extend reduced-timing eligibility", "[verifier]") {
  std::vector<DramCommand> trace = {
      mk(CommandKind::Act, 0, 5),
      mk(CommandKind::Pre, 28, 5),
      mk(CommandKind::Ref, 800000, 0),
      mk(CommandKind::Act, 828001, 5, TimingClass::Reduced),  // 828001-28 > 800000
  };
  VerifyReport rep = verify_commands(trace, default_cfg());
  CHECK(rep.safety_violations == 1);
  CHECK(rep.timing_violations == 0);
}

TEST_CASE("early column and precharge commands are timing violations", "[verifier]") {
  SECTION("RD before tRCD") {
    std::vector<DramCommand> trace = {mk(CommandKind::Act, 0, 5), mk(CommandKind::Rd, 10, 5)};
    VerifyReport rep = verify_commands(trace, default_cfg());
    CHECK(rep.timing_violations == 1);
  }
  SECTION("RD at tRCD passes") {
    std::vector<DramCommand> trace = {mk(CommandKind::Act, 0, 5), mk(CommandKind::Rd, 11, 5)};
    CHECK(verify_commands(trace, default_cfg()).ok());
  }
  SECTION("PRE before reduced tRAS") {
    std::vector<DramCommand> trace = {
        mk(CommandKind::Act, 0, 5),  mk(CommandKind::Pre, 28, 5),
        mk(CommandKind::Act, 39, 5, TimingClass::Reduced), mk(CommandKind::Pre, 58, 5),
    };
    // 58 - 39 = 19 < tRAS_eff(20)
    CHECK(verify_commands(trace, default_cfg()).timing_violations == 1);
    trace[3].issue_time = 59;
    CHECK(verify_commands(trace, default_cfg()).ok());
  }
  SECTION("second ACT of a bank must respect tRC through the PRE path") {
    std::vector<DramCommand> trace = {
        mk(CommandKind::Act, 0, 5),
        mk(CommandKind::Pre, 28, 5),
        mk(CommandKind::Act, 38, 6),  // tRP not yet satisfied
    };
    CHECK(verify_commands(trace, default_cfg()).timing_violations == 1);
  }
}

TEST_CASE("state violations are reported", "[verifier]") {
  SECTION("RD without an open row") {
    std::vector<DramCommand> trace = {mk(CommandKind::Rd, 0, 5)};
    VerifyReport rep = verify_commands(trace, default_cfg());
    CHECK(rep.timing_violations == 1);  // state class counts with timing
    CHECK_FALSE(rep.ok());
  }
  SECTION("PRE row field must match the tracked open row") {
    std::vector<DramCommand> trace = {mk(CommandKind::Act, 0, 5), mk(CommandKind::Pre, 28, 7)};
    CHECK_FALSE(verify_commands(trace, default_cfg()).ok());
  }
  SECTION("REF with an open bank") {
    std::vector<DramCommand> trace = {mk(CommandKind::Act, 0, 5), mk(CommandKind::Ref, 50, 0)};
    CHECK_FALSE(verify_commands(trace, default_cfg()).ok());
  }
  SECTION("coordinate out of range") {
    DramCommand c = mk(CommandKind::Act, 0, 5);
    c.coord.bank = 64;
    CHECK_FALSE(verify_commands(std::vector<DramCommand>{c}, default_cfg()).ok());
  }
}

TEST_CASE("command times must strictly increase per channel", "[verifier]") {
  std::vector<DramCommand> trace = {mk(CommandKind::Act, 10, 5), mk(CommandKind::Act, 10, 6)};
  trace[1].coord.bank = 1;
  VerifyReport rep = verify_commands(trace, default_cfg());
  CHECK(rep.timing_violations >= 1);
}

TEST_CASE("commands on different channels are independent", "[verifier]") {
  std::vector<DramCommand> trace = {mk(CommandKind::Act, 10, 5), mk(CommandKind::Act, 10, 6)};
  trace[1].coord.channel = 1;
  CHECK(verify_commands(trace, default_cfg()).ok());
}

TEST_CASE("empty trace verifies clean", "[verifier]") {
  VerifyReport rep = verify_commands(std::vector<DramCommand>{}, default_cfg());
  CHECK(rep.ok());
  CHECK(rep.commands == 0);
}

TEST_CASE("safety checking can be disabled for idealized policies", "[verifier]") {
  std::vector<DramCommand> trace = {mk(CommandKind::Act, 0, 5, TimingClass::Reduced)};
  VerifierConfig cfg = default_cfg();
  cfg.check_safety = false;
  CHECK(verify_commands(trace, cfg).ok());
}

TEST_CASE("malformed command-trace files report the line", "[verifier]") {
  SECTION("bad field count") {
    std::istringstream in("0 ACT 0 0 0 5 -\n");
    CHECK_THROWS_WITH(parse_command_trace(in, "t.txt"),
                      Catch::Matchers::ContainsSubstring("t.txt:1"));
  }
  SECTION("unknown kind on line 2") {
    std::istringstream in("0 ACT 0 0 0 5 - S\n1 FOO 0 0 0 5 - S\n");
    CHECK_THROWS_WITH(parse_command_trace(in, "t.txt"),
                      Catch::Matchers::ContainsSubstring("t.txt:2"));
  }
  SECTION("round trip through format_command") {
    std::vector<DramCommand> trace = {
        mk(CommandKind::Act, 0, 5, TimingClass::Reduced),
        mk(CommandKind::Rd, 11, 5),
        mk(CommandKind::Pre, 28, 5),
        mk(CommandKind::Ref, 100, 0),
    };
    std::string text;
    for (const auto& c : trace) text += format_command(c) + "\n";
    std::istringstream in(text);
    auto parsed = parse_command_trace(in);
    REQUIRE(parsed.size() == trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
      CHECK(parsed[i].kind == trace[i].kind);
      CHECK(parsed[i].issue_time == trace[i].issue_time);
      CHECK(parsed[i].timing_class == trace[i].timing_class);
    }
  }
}
