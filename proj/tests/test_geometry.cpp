#include <catch2/catch_amalgamated.hpp>

#include "ccsim/geometry.hpp"

using namespace ccsim;

TEST_CASE("map_address zero maps to origin", "[geometry]") {
  DramGeometry g;
  DramCoord c = map_address(0, g);
  CHECK(c == DramCoord{0, 0, 0, 0, 0});
}

TEST_CASE("channel bit sits directly above the line offset", "[geometry]") {
  DramGeometry g;  // 2 channels, 64B lines: bit 6 selects the channel
  DramCoord c = map_address(0x40, g);
  CHECK(c.channel == 1);
  CHECK(c.rank == 0);
  CHECK(c.bank == 0);
  CHECK(c.row == 0);
  CHECK(c.column == 0);
  CHECK(encode_address(c, g) == 0x40);
}

TEST_CASE("map_address rejects addresses beyond capacity", "[geometry]") {
  DramGeometry g;
  CHECK_THROWS_AS(map_address(g.capacity_bytes(), g), ConfigError);
}

TEST_CASE("map_address and encode_address are inverse over a small geometry", "[geometry]") {
  DramGeometry g;
  g.channels = 2;
  g.ranks_per_channel = 2;
  g.banks_per_rank = 4;
  g.rows_per_bank = 8;
  g.row_buffer_bytes = 256;
  g.cacheline_bytes = 64;
  g.validate();
  for (std::uint64_t addr = 0; addr < g.capacity_bytes(); addr += g.cacheline_bytes) {
    DramCoord c = map_address(addr, g);
    CHECK(coord_in_range(c, g));
    CHECK(encode_address(c, g) == addr);
  }
}

TEST_CASE("addresses differing only in bank bits share the row index", "[geometry]") {
  DramGeometry g;
  g.channels = 1;
  g.ranks_per_channel = 1;
  g.banks_per_rank = 4;
  g.rows_per_bank = 16;
  g.row_buffer_bytes = 256;
  g.cacheline_bytes = 64;
  g.validate();
  for (std::uint32_t row = 0; row < g.rows_per_bank; ++row) {
    DramCoord base{0, 0, 0, row, 0};
    std::uint64_t addr0 = encode_address(base, g);
    for (std::uint32_t bank = 1; bank < g.banks_per_rank; ++bank) {
      DramCoord other = base;
      other.bank = bank;
      std::uint64_t addr = encode_address(other, g);
      DramCoord back = map_address(addr, g);
      CHECK(back.row == row);
      CHECK(back.bank == bank);
      CHECK(addr != addr0);
    }
  }
}

TEST_CASE("geometry invariants are enforced", "[geometry]") {
  DramGeometry g;
  g.channels = 3;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = DramGeometry{};
  g.row_buffer_bytes = 96;
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("global_row_id is dense and distinct per row", "[geometry]") {
  DramGeometry g;
  g.channels = 2;
  g.ranks_per_channel = 1;
  g.banks_per_rank = 2;
  g.rows_per_bank = 4;
  g.row_buffer_bytes = 128;
  g.cacheline_bytes = 64;
  std::vector<bool> seen(2 * 1 * 2 * 4, false);
  for (std::uint32_t ch = 0; ch < 2; ++ch)
    for (std::uint32_t b = 0; b < 2; ++b)
      for (std::uint32_t row = 0; row < 4; ++row) {
        std::uint64_t id = global_row_id(DramCoord{ch, 0, b, row, 0}, g);
        REQUIRE(id < seen.size());
        CHECK_FALSE(seen[id]);
        seen[id] = true;
      }
}
