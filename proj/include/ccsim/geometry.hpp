#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include "ccsim/errors.hpp"

namespace ccsim {

inline bool is_pow2(std::uint64_t v) { return v != 0 && std::has_single_bit(v); }

inline unsigned log2_exact(std::uint64_t v) {
  return static_cast<unsigned>(std::bit_width(v) - 1);
}

// Physical organization of the simulated memory system. All counts are
// powers of two so addresses decompose into bit fields.
struct DramGeometry {
  std::uint32_t channels = 2;
  std::uint32_t ranks_per_channel = 1;
  std::uint32_t banks_per_rank = 8;
  std::uint32_t rows_per_bank = 65536;
  std::uint32_t row_buffer_bytes = 8192;
  std::uint32_t cacheline_bytes = 64;

  std::uint32_t columns_per_row() const { return row_buffer_bytes / cacheline_bytes; }

  std::uint64_t capacity_bytes() const {
    return static_cast<std::uint64_t>(channels) * ranks_per_channel * banks_per_rank *
           rows_per_bank * row_buffer_bytes;
  }

  void validate() const {
    auto check_pow2 = [](std::uint64_t v, const char* name) {
      if (!is_pow2(v))
        throw ConfigError(std::string("geometry.") + name + " must be a power of two and >= 1, got " +
                          std::to_string(v));
    };
    check_pow2(channels, "channels");
    check_pow2(ranks_per_channel, "ranks_per_channel");
    check_pow2(banks_per_rank, "banks_per_rank");
    check_pow2(rows_per_bank, "rows_per_bank");
    check_pow2(row_buffer_bytes, "row_buffer_bytes");
    check_pow2(cacheline_bytes, "cacheline_bytes");
    if (row_buffer_bytes % cacheline_bytes != 0 || row_buffer_bytes < cacheline_bytes)
      throw ConfigError("geometry.row_buffer_bytes must be a multiple of cacheline_bytes");
  }
};

// Zero-based location of one cacheline-sized column within the system.
struct DramCoord {
  std::uint32_t channel = 0;
  std::uint32_t rank = 0;
  std::uint32_t bank = 0;
  std::uint32_t row = 0;
  std::uint32_t column = 0;

  bool operator==(const DramCoord&) const = default;
};

// Bit-slice address decode, low to high:
//   [cacheline offset][channel][column][bank][rank][row]
// The channel bits sit just above the line offset to interleave consecutive
// lines across channels; row bits are highest so a row sweep walks banks first.
inline DramCoord map_address(std::uint64_t address, const DramGeometry& g) {
  if (address >= g.capacity_bytes())
    throw ConfigError("address 0x" + std::to_string(address) + " outside capacity " +
                      std::to_string(g.capacity_bytes()));
  std::uint64_t v = address >> log2_exact(g.cacheline_bytes);
  DramCoord c;
  c.channel = static_cast<std::uint32_t>(v & (g.channels - 1));
  v >>= log2_exact(g.channels);
  c.column = static_cast<std::uint32_t>(v & (g.columns_per_row() - 1));
  v >>= log2_exact(g.columns_per_row());
  c.bank = static_cast<std::uint32_t>(v & (g.banks_per_rank - 1));
  v >>= log2_exact(g.banks_per_rank);
  c.rank = static_cast<std::uint32_t>(v & (g.ranks_per_channel - 1));
  v >>= log2_exact(g.ranks_per_channel);
  c.row = static_cast<std::uint32_t>(v);
  return c;
}

// Inverse of map_address over the geometry's capacity.
inline std::uint64_t encode_address(const DramCoord& c, const DramGeometry& g) {
  std::uint64_t v = c.row;
  v = (v << log2_exact(g.ranks_per_channel)) | c.rank;
  v = (v << log2_exact(g.banks_per_rank)) | c.bank;
  v = (v << log2_exact(g.columns_per_row())) | c.column;
  v = (v << log2_exact(g.channels)) | c.channel;
  return v << log2_exact(g.cacheline_bytes);
}

// Dense identifier of a (channel, rank, bank, row) tuple, used as the row
// identity for locality analysis.
inline std::uint64_t global_row_id(const DramCoord& c, const DramGeometry& g) {
  std::uint64_t id = c.channel;
  id = id * g.ranks_per_channel + c.rank;
  id = id * g.banks_per_rank + c.bank;
  id = id * g.rows_per_bank + c.row;
  return id;
}

inline bool coord_in_range(const DramCoord& c, const DramGeometry& g) {
  return c.channel < g.channels && c.rank < g.ranks_per_channel && c.bank < g.banks_per_rank &&
         c.row < g.rows_per_bank && c.column < g.columns_per_row();
}

}  // namespace ccsim
