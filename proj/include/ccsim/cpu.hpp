#pragma once

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "ccsim/errors.hpp"
#include "ccsim/trace.hpp"

namespace ccsim {

struct CoreConfig {
  std::uint32_t issue_width = 3;
  std::uint32_t window_entries = 128;
  std::uint32_t mshrs = 8;
  std::uint32_t clock_multiplier = 5;  // core cycles per memory cycle

  void validate() const {
    if (issue_width == 0 || window_entries == 0 || mshrs == 0 || clock_multiplier == 0)
      throw ConfigError("cpu: issue_width, window_entries, mshrs and clock_multiplier must be >= 1");
  }
};

// Back-pressure interface to the memory system. Both calls return false when
// the target queue is full; the core retries on a later cycle.
class MemoryPort {
 public:
  virtual ~MemoryPort() = default;
  virtual bool try_read(std::uint32_t core, std::uint64_t addr, std::uint64_t tag) = 0;
  virtual bool try_write(std::uint32_t core, std::uint64_t addr) = 0;
};

// Trace-driven core. Each trace record expands to its non-memory instruction
// count followed by one memory operation. Reads occupy a window slot and an
// MSHR while outstanding; writes are posted to memory without occupying a
// window slot and retire at the moment they post, stalling only when the
// write queue is full. The window retires in order, up to issue_width
// instructions per cycle. A core whose trace runs out replays it from the
// start; it reports finished once it retires instruction_budget instructions
// after the measurement start.
class Core {
 public:
  Core(std::uint32_t id, const CoreConfig& cfg, const std::vector<TraceRecord>* trace,
       std::uint64_t instruction_budget, std::uint64_t measure_start_cycle)
      : id_(id),
        cfg_(cfg),
        trace_(trace),
        budget_(instruction_budget),
        measure_start_(measure_start_cycle) {
    cfg_.validate();
    if (trace_ == nullptr || trace_->empty()) throw ConfigError("core trace must be non-empty");
    nonmem_left_ = (*trace_)[0].nonmem;
    mem_pending_ = true;
  }

  void tick(MemoryPort& port) {
    if (ticks_ == measure_start_) {
      measuring_ = true;
      retired_at_measure_ = retired_;
    }
    refill(port);
    issue(port);
    retire();
    ++ticks_;
    if (measuring_ && !finished_ && retired_ - retired_at_measure_ >= budget_) {
      finished_ = true;
      cycles_at_budget_ = ticks_ - measure_start_;
    }
  }

  void on_read_complete(std::uint64_t tag) {
    auto it = inflight_.find(tag);
    if (it == inflight_.end())
      throw std::logic_error("core " + std::to_string(id_) + ": unknown read tag completion");
    it->second->complete = true;
    inflight_.erase(it);
    --outstanding_;
  }

  bool finished() const { return finished_; }
  std::uint64_t retired() const { return retired_; }
  std::uint64_t ticks() const { return ticks_; }
  std::uint32_t outstanding_reads() const { return outstanding_; }
  std::uint32_t max_outstanding() const { return max_outstanding_; }
  std::uint64_t reads_sent() const { return reads_sent_; }
  std::uint64_t writes_sent() const { return writes_sent_; }
  std::uint64_t window_size() const { return window_.size(); }

  std::uint64_t measured_retired() const {
    return measuring_ ? retired_ - retired_at_measure_ : 0;
  }
  std::uint64_t measured_cycles() const {
    if (!measuring_) return 0;
    return finished_ ? cycles_at_budget_ : ticks_ - measure_start_;
  }
  double ipc() const {
    std::uint64_t c = measured_cycles();
    return c == 0 ? 0.0 : static_cast<double>(measured_retired_capped()) / static_cast<double>(c);
  }

 private:
  struct Slot {
    bool is_read = false;
    bool issued = false;
    bool complete = true;
    std::uint64_t addr = 0;
    std::uint64_t tag = 0;
  };

  // Retirement past the budget within the crossing cycle is not counted, so
  // IPC is exactly budget / cycles for budget-bounded runs.
  std::uint64_t measured_retired_capped() const {
    std::uint64_t r = measured_retired();
    return finished_ && r > budget_ ? budget_ : r;
  }

  void refill(MemoryPort& port) {
    std::uint32_t writes_this_tick = 0;
    while (true) {
      if (nonmem_left_ > 0) {
        if (window_.size() >= cfg_.window_entries) return;
        window_.push_back(Slot{});
        --nonmem_left_;
        continue;
      }
      if (!mem_pending_) {
        advance_record();
        continue;
      }
      const TraceRecord& rec = (*trace_)[rec_idx_];
      if (rec.write) {
        if (writes_this_tick >= cfg_.issue_width) return;  // fetch bandwidth bound
        if (!port.try_write(id_, rec.address)) return;     // write queue full
        ++writes_this_tick;
        ++writes_sent_;
        ++retired_;  // posted write commits immediately
        mem_pending_ = false;
        continue;
      }
      if (window_.size() >= cfg_.window_entries) return;
      Slot s;
      s.is_read = true;
      s.complete = false;
      s.addr = rec.address;
      s.tag = next_tag_++;
      window_.push_back(s);
      unissued_.push_back(&window_.back());
      mem_pending_ = false;
    }
  }

  void issue(MemoryPort& port) {
    while (!unissued_.empty() && outstanding_ < cfg_.mshrs) {
      Slot* s = unissued_.front();
      if (!port.try_read(id_, s->addr, s->tag)) return;  // read queue full
      s->issued = true;
      inflight_[s->tag] = s;
      unissued_.pop_front();
      ++outstanding_;
      ++reads_sent_;
      if (outstanding_ > max_outstanding_) max_outstanding_ = outstanding_;
    }
  }

  void retire() {
    for (std::uint32_t n = 0; n < cfg_.issue_width && !window_.empty(); ++n) {
      if (!window_.front().complete) return;
      window_.pop_front();
      ++retired_;
    }
  }

  void advance_record() {
    rec_idx_ = (rec_idx_ + 1) % trace_->size();
    if (rec_idx_ == 0) ++trace_wraps_;
    nonmem_left_ = (*trace_)[rec_idx_].nonmem;
    mem_pending_ = true;
  }

  std::uint32_t id_;
  CoreConfig cfg_;
  const std::vector<TraceRecord>* trace_;
  std::size_t rec_idx_ = 0;
  std::uint64_t nonmem_left_ = 0;
  bool mem_pending_ = true;
  std::uint64_t trace_wraps_ = 0;

  std::deque<Slot> window_;
  std::deque<Slot*> unissued_;
  std::unordered_map<std::uint64_t, Slot*> inflight_;
  std::uint32_t outstanding_ = 0;
  std::uint32_t max_outstanding_ = 0;
  std::uint64_t next_tag_ = 0;

  std::uint64_t retired_ = 0;
  std::uint64_t ticks_ = 0;
  std::uint64_t reads_sent_ = 0;
  std::uint64_t writes_sent_ = 0;

  std::uint64_t budget_;
  std::uint64_t measure_start_;
  bool measuring_ = false;
  std::uint64_t retired_at_measure_ = 0;
  bool finished_ = false;
  std::uint64_t cycles_at_budget_ = 0;
};

}  // namespace ccsim
