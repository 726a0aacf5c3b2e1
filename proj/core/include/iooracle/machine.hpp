#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iooracle/trace.hpp"

namespace iooracle {

/// explicit_io: the kernel issues every transfer itself.
/// lru: an automatic one-word-line LRU cache decides transfers.
enum class Mode { explicit_io, lru };

std::string_view to_string(Mode mode) noexcept;
Mode parse_mode(std::string_view s);

struct MachineConfig {
  std::uint64_t fast_capacity_words = 0;
  Mode mode = Mode::explicit_io;
  bool record_trace = false;
};

struct Counters {
  std::uint64_t words_moved = 0;
  std::uint64_t messages = 0;
  std::uint64_t flops = 0;
  std::uint64_t g_ops = 0;

  friend bool operator==(const Counters&, const Counters&) = default;
};

/// Counters as the JSON object {words_moved, messages, flops, g_ops, M, mode}.
std::string counters_json(const Counters& c, const MachineConfig& config);

/// Sequential two-level memory: M fast words, unbounded slow memory.
///
/// Values live in the machine. Slow memory is an array of doubles addressed by
/// `Address`; a resident address has exactly one fast copy, and arithmetic is
/// only legal on fast copies or live scratch words. A kernel that touches a
/// non-resident operand gets `Errc::operand_not_resident`, so any run that
/// completes is a legal schedule in the model.
class DamMachine {
 public:
  explicit DamMachine(MachineConfig config);

  const MachineConfig& config() const { return config_; }
  std::uint64_t capacity() const { return config_.fast_capacity_words; }

  // Slow-memory address space. Host-side access is setup and read-back only;
  // it never counts as communication.
  Address allocate(std::uint64_t words);
  std::uint64_t address_space_size() const { return slow_.size(); }
  double slow_value(Address a) const;
  void set_slow_value(Address a, double v);

  // Explicit mode.
  void read_block(Address base, std::uint64_t len);
  void write_block(Address base, std::uint64_t len, bool evict);
  void evict(Address base, std::uint64_t len);
  /// Makes addresses resident without a transfer; their fast value starts at 0.
  void claim(Address base, std::uint64_t len);

  // LRU mode.
  void touch(Address a);
  /// Write access that overwrites the whole word: a miss allocates without fetching.
  void store(Address a);
  /// Writes back every dirty resident word.
  void flush();

  // Both modes.
  ScratchId alloc_scratch(std::uint64_t n);
  void free_scratch(ScratchId first, std::uint64_t n);

  void flop(const OpLabel& label, std::initializer_list<Operand> inputs, Operand output,
            bool is_g_op) {
    flop(label, std::span<const Operand>(inputs.begin(), inputs.size()), output, is_g_op);
  }
  void flop(const OpLabel& label, std::span<const Operand> inputs, Operand output, bool is_g_op);

  double& value(Operand op);
  double value(Operand op) const;
  double& value(Address a) { return value(Operand::slow(a)); }

  bool is_resident(Address a) const { return a < resident_.size() && resident_[a] != 0; }
  bool is_live(ScratchId id) const { return id < scratch_live_.size() && scratch_live_[id] != 0; }
  std::uint64_t resident_count() const { return resident_count_; }
  std::uint64_t scratch_count() const { return scratch_count_; }
  std::uint64_t dirty_count() const { return dirty_count_; }
  std::uint64_t occupancy() const { return resident_count_ + scratch_count_; }

  const Counters& counters() const { return counters_; }
  const Trace& trace() const { return trace_; }
  Trace take_trace() { return std::move(trace_); }

  /// Imposed one-word transfer on a live operand (used when replaying traces
  /// produced by impose_io).
  void imposed_transfer(Operand op, bool is_write);

 private:
  void require_mode(Mode m, const char* op) const;
  void ensure_address(Address a);
  void check_range(Address base, std::uint64_t len, const char* op) const;
  void make_resident(Address a);
  void drop_resident(Address a);
  void record(const TraceEvent& e);

  void lru_link_front(Address a);
  void lru_unlink(Address a);
  void lru_evict_one();
  void lru_make_room(std::uint64_t words);

  MachineConfig config_;
  Counters counters_;
  Trace trace_;

  std::vector<double> slow_;
  std::vector<double> fast_;
  std::vector<std::uint8_t> resident_;
  std::vector<std::uint8_t> dirty_;
  std::uint64_t resident_count_ = 0;
  std::uint64_t dirty_count_ = 0;

  std::vector<double> scratch_;
  std::vector<std::uint8_t> scratch_live_;
  std::uint64_t scratch_count_ = 0;

  static constexpr Address kNil = ~Address{0};
  std::vector<Address> lru_prev_;
  std::vector<Address> lru_next_;
  Address lru_head_ = kNil;  // most recent
  Address lru_tail_ = kNil;  // least recent
};

/// Replays a recorded trace through a fresh explicit-mode machine with the
/// given capacity and returns its counters. Any violation of the machine
/// invariants is reported as `Errc::trace_mismatch`.
Counters replay(const Trace& trace, std::uint64_t fast_capacity_words);

}  // namespace iooracle
