#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccsim/errors.hpp"
#include "ccsim/geometry.hpp"

namespace ccsim {

// One CPU-trace line: <nonmem_count> <address_hex> <R|W>. Records are the
// stream of last-level-cache misses/writebacks; nonmem_count is the number of
// non-memory instructions preceding the memory operation.
struct TraceRecord {
  std::uint64_t nonmem = 0;
  std::uint64_t address = 0;
  bool write = false;

  bool operator==(const TraceRecord&) const = default;
};

inline std::vector<TraceRecord> parse_trace(std::istream& in,
                                            const std::string& source = "<stream>") {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    std::string nonmem, addr, kind;
    if (!(ls >> nonmem >> addr >> kind))
      throw ParseError(source, lineno, "expected '<nonmem_count> <address_hex> <R|W>'");
    std::string rest;
    if (ls >> rest) throw ParseError(source, lineno, "trailing fields after '" + kind + "'");
    TraceRecord r;
    try {
      std::size_t pos = 0;
      r.nonmem = std::stoull(nonmem, &pos, 10);
      if (pos != nonmem.size()) throw std::invalid_argument(nonmem);
    } catch (const std::exception&) {
      throw ParseError(source, lineno, "bad instruction count '" + nonmem + "'");
    }
    try {
      std::size_t pos = 0;
      r.address = std::stoull(addr, &pos, 16);
      if (pos != addr.size()) throw std::invalid_argument(addr);
    } catch (const std::exception&) {
      throw ParseError(source, lineno, "bad hex address '" + addr + "'");
    }
    if (kind == "R") r.write = false;
    else if (kind == "W") r.write = true;
    else throw ParseError(source, lineno, "bad kind '" + kind + "' (expected R or W)");
    out.push_back(r);
  }
  return out;
}

inline void write_trace(std::ostream& out, const std::vector<TraceRecord>& recs) {
  char buf[64];
  for (const auto& r : recs) {
    std::snprintf(buf, sizeof buf, "%llu 0x%llx %c\n", static_cast<unsigned long long>(r.nonmem),
                  static_cast<unsigned long long>(r.address), r.write ? 'W' : 'R');
    out << buf;
  }
}

// mt19937_64 with hand-rolled draw helpers so generated traces are
// byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  double next_double() {  // uniform in [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 eng_;
};

enum class SyntheticKind : std::uint8_t { BankPingPong, RowStream, UniformRandom, Zipf };

inline SyntheticKind parse_synthetic_kind(const std::string& s) {
  if (s == "pingpong") return SyntheticKind::BankPingPong;
  if (s == "rowstream") return SyntheticKind::RowStream;
  if (s == "uniform") return SyntheticKind::UniformRandom;
  if (s == "zipf") return SyntheticKind::Zipf;
  throw ConfigError("unknown trace kind '" + s + "' (expected pingpong|rowstream|uniform|zipf)");
}

struct SyntheticParams {
  SyntheticKind kind = SyntheticKind::BankPingPong;
  std::uint64_t requests = 1000;
  std::uint64_t rows = 1024;        // row-space size for uniform/zipf/rowstream
  std::uint64_t seed = 1;
  std::uint64_t nonmem = 0;         // non-memory instructions per record
  double write_fraction = 0.0;
  double zipf_s = 1.0;
  std::uint32_t channel = 0;        // target channel for all kinds
  std::uint32_t row_a = 5;          // ping-pong pair
  std::uint32_t row_b = 9;

  void validate(const DramGeometry& g) const {
    if (requests == 0) throw ConfigError("trace generator: requests must be >= 1");
    if (write_fraction < 0.0 || write_fraction > 1.0)
      throw ConfigError("trace generator: write fraction must be in [0,1]");
    if (channel >= g.channels) throw ConfigError("trace generator: channel out of range");
    switch (kind) {
      case SyntheticKind::BankPingPong:
        if (row_a == row_b) throw ConfigError("trace generator: ping-pong rows must differ");
        if (row_a >= g.rows_per_bank || row_b >= g.rows_per_bank)
          throw ConfigError("trace generator: ping-pong row out of range");
        break;
      case SyntheticKind::RowStream:
        if (requests > static_cast<std::uint64_t>(g.rows_per_bank) * g.banks_per_rank)
          throw ConfigError("trace generator: rowstream request count exceeds distinct rows");
        break;
      case SyntheticKind::UniformRandom:
        if (rows == 0 || rows > g.rows_per_bank)
          throw ConfigError("trace generator: rows must be in [1, rows_per_bank]");
        break;
      case SyntheticKind::Zipf:
        if (rows == 0 || rows > g.rows_per_bank)
          throw ConfigError("trace generator: rows must be in [1, rows_per_bank]");
        if (zipf_s <= 0.0) throw ConfigError("trace generator: zipf exponent must be > 0");
        break;
    }
  }
};

// Deterministic synthetic workloads:
//   BankPingPong  alternates two rows of one bank (maximal bank conflict).
//   RowStream     touches each (bank, row) once, so no row is ever reused.
//   UniformRandom samples rows uniformly within one bank.
//   Zipf          samples rows with probability proportional to 1/(rank+1)^s.
inline std::vector<TraceRecord> gen_synthetic(const SyntheticParams& p, const DramGeometry& g) {
  p.validate(g);
  Rng rng(p.seed);
  std::vector<TraceRecord> out;
  out.reserve(p.requests);

  auto make_addr = [&](std::uint32_t bank, std::uint32_t row) {
    DramCoord c;
    c.channel = p.channel;
    c.rank = 0;
    c.bank = bank;
    c.row = row;
    c.column = 0;
    return encode_address(c, g);
  };
  auto push = [&](std::uint64_t addr) {
    bool write = p.write_fraction > 0.0 && rng.next_double() < p.write_fraction;
    out.push_back(TraceRecord{p.nonmem, addr, write});
  };

  switch (p.kind) {
    case SyntheticKind::BankPingPong:
      for (std::uint64_t i = 0; i < p.requests; ++i)
        push(make_addr(0, i % 2 == 0 ? p.row_a : p.row_b));
      break;
    case SyntheticKind::RowStream:
      for (std::uint64_t i = 0; i < p.requests; ++i) {
        std::uint32_t bank = static_cast<std::uint32_t>(i % g.banks_per_rank);
        std::uint32_t row = static_cast<std::uint32_t>(i / g.banks_per_rank);
        push(make_addr(bank, row));
      }
      break;
    case SyntheticKind::UniformRandom:
      for (std::uint64_t i = 0; i < p.requests; ++i)
        push(make_addr(0, static_cast<std::uint32_t>(rng.below(p.rows))));
      break;
    case SyntheticKind::Zipf: {
      // CDF over row popularity ranks; row index == popularity rank.
      std::vector<double> cdf(p.rows);
      double sum = 0.0;
      for (std::uint64_t k = 0; k < p.rows; ++k) {
        sum += 1.0 / std::pow(static_cast<double>(k + 1), p.zipf_s);
        cdf[k] = sum;
      }
      for (auto& v : cdf) v /= sum;
      for (std::uint64_t i = 0; i < p.requests; ++i) {
        double u = rng.next_double();
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::uint64_t row = static_cast<std::uint64_t>(it - cdf.begin());
        if (row >= p.rows) row = p.rows - 1;
        push(make_addr(0, static_cast<std::uint32_t>(row)));
      }
      break;
    }
  }
  return out;
}

}  // namespace ccsim
