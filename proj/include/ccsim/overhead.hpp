#pragma once

#include <cstdint>
#include <string>

#include "ccsim/errors.hpp"
#include "ccsim/geometry.hpp"

#include "json.hpp"

namespace ccsim {

// Published implementation-cost figures for the default 128-entry table at
// 22nm; reported alongside the computed storage numbers, never recomputed.
inline constexpr double kReferenceAreaMm2 = 0.022;
inline constexpr double kReferencePowerMw = 0.149;

struct OverheadInput {
  std::uint32_t cores = 8;
  std::uint32_t channels = 2;
  std::uint32_t entries = 128;
  std::uint32_t ranks = 1;
  std::uint32_t banks = 8;
  std::uint64_t rows = 65536;
  std::uint32_t lru_bits_per_entry = 1;
};

struct OverheadReport {
  OverheadInput input;
  std::uint32_t entry_size_bits = 0;
  std::uint64_t total_bits = 0;
  double total_bytes = 0.0;
  double bytes_per_core = 0.0;
};

// Storage cost of replicating the row-address table per core and per memory
// channel. An entry tags (rank, bank, row) plus a valid bit; LRU state is
// counted per entry.
inline OverheadReport storage_overhead(const OverheadInput& in) {
  if (!is_pow2(in.ranks) || !is_pow2(in.banks) || !is_pow2(in.rows))
    throw ConfigError("storage_overhead: ranks, banks and rows must be powers of two");
  OverheadReport rep;
  rep.input = in;
  rep.entry_size_bits = log2_exact(in.ranks) + log2_exact(in.banks) + log2_exact(in.rows) + 1;
  rep.total_bits = static_cast<std::uint64_t>(in.cores) * in.channels * in.entries *
                   (rep.entry_size_bits + in.lru_bits_per_entry);
  rep.total_bytes = static_cast<double>(rep.total_bits) / 8.0;
  rep.bytes_per_core = in.cores == 0 ? 0.0 : rep.total_bytes / in.cores;
  return rep;
}

inline nlohmann::json overhead_json(const OverheadReport& r) {
  nlohmann::json j;
  j["inputs"] = {{"cores", r.input.cores},
                 {"channels", r.input.channels},
                 {"entries_per_table", r.input.entries},
                 {"ranks", r.input.ranks},
                 {"banks", r.input.banks},
                 {"rows", r.input.rows},
                 {"lru_bits_per_entry", r.input.lru_bits_per_entry}};
  j["entry_size_bits"] = r.entry_size_bits;
  j["total_bits"] = r.total_bits;
  j["total_bytes"] = r.total_bytes;
  j["bytes_per_core"] = r.bytes_per_core;
  j["reference_constants"] = {
      {"area_mm2", {{"value", kReferenceAreaMm2}, {"source", "published 22nm synthesis estimate"}}},
      {"power_mw", {{"value", kReferencePowerMw}, {"source", "published 22nm synthesis estimate"}}},
  };
  return j;
}

}  // namespace ccsim
