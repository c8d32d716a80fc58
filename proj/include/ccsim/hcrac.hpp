#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccsim/errors.hpp"
#include "ccsim/geometry.hpp"
#include "ccsim/timing.hpp"

namespace ccsim {

struct HcracConfig {
  std::uint32_t entries = 128;
  std::uint32_t associativity = 2;
  Cycle caching_duration = 800000;  // 1ms at 1.25ns per cycle

  std::uint32_t sets() const { return associativity == 0 ? 0 : entries / associativity; }

  void validate() const {
    if (entries == 0) throw ConfigError("hcrac.entries_per_core must be >= 1");
    if (associativity == 0 || associativity > entries)
      throw ConfigError("hcrac.associativity must be in [1, entries]");
    if (entries % associativity != 0)
      throw ConfigError("hcrac.entries_per_core must be divisible by associativity");
    if (caching_duration < 0) throw ConfigError("hcrac caching duration must be >= 0");
  }
};

// Set-associative, LRU-replaced table of recently-precharged row addresses.
// A tag is (rank, bank, row); the set index folds the row with the bank so
// rows that alias across banks spread over different sets. An entry counts as
// a hit only while its age is at most caching_duration (inclusive boundary);
// stale entries are dropped either by lookup or by a periodic sweep.
class HcracTable {
 public:
  explicit HcracTable(const HcracConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    sets_.resize(cfg_.sets());
    for (auto& s : sets_) s.reserve(cfg_.associativity);
  }

  void insert(const DramCoord& coord, Cycle now) {
    auto& set = sets_[set_index(coord)];
    const std::uint64_t t = tag(coord);
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (set[i].tag == t) {
        set[i].inserted_at = now;
        touch(set, i);
        return;
      }
    }
    if (set.size() < cfg_.associativity) {
      set.insert(set.begin(), Entry{t, now});
      return;
    }
    set.pop_back();  // back is LRU
    set.insert(set.begin(), Entry{t, now});
  }

  // True iff a fresh entry matches; refreshes LRU order on hit, drops the
  // entry when it matches but has expired.
  bool lookup(const DramCoord& coord, Cycle now) {
    auto& set = sets_[set_index(coord)];
    const std::uint64_t t = tag(coord);
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (set[i].tag != t) continue;
      if (now - set[i].inserted_at > cfg_.caching_duration) {
        set.erase(set.begin() + static_cast<std::ptrdiff_t>(i));
        return false;
      }
      touch(set, i);
      return true;
    }
    return false;
  }

  // Periodic invalidation of entries older than the caching duration.
  std::uint64_t expire(Cycle now) {
    std::uint64_t dropped = 0;
    for (auto& set : sets_) {
      for (std::size_t i = set.size(); i > 0; --i) {
        if (now - set[i - 1].inserted_at > cfg_.caching_duration) {
          set.erase(set.begin() + static_cast<std::ptrdiff_t>(i - 1));
          ++dropped;
        }
      }
    }
    return dropped;
  }

  std::uint64_t occupancy() const {
    std::uint64_t n = 0;
    for (const auto& s : sets_) n += s.size();
    return n;
  }

  const HcracConfig& config() const { return cfg_; }

  std::uint32_t set_index(const DramCoord& c) const {
    return (c.row ^ c.bank) % cfg_.sets();
  }

 private:
  struct Entry {
    std::uint64_t tag;
    Cycle inserted_at;
  };

  static std::uint64_t tag(const DramCoord& c) {
    return (static_cast<std::uint64_t>(c.rank) << 52) |
           (static_cast<std::uint64_t>(c.bank) << 40) | c.row;
  }

  void touch(std::vector<Entry>& set, std::size_t i) {
    if (i == 0) return;
    Entry e = set[i];
    set.erase(set.begin() + static_cast<std::ptrdiff_t>(i));
    set.insert(set.begin(), e);
  }

  HcracConfig cfg_;
  std::vector<std::vector<Entry>> sets_;  // front of each set is MRU
};

}  // namespace ccsim
