#include "iooracle/machine.hpp"

#include <string>

#include "iooracle/error.hpp"
#include "json.hpp"

namespace iooracle {

std::string_view to_string(Mode mode) noexcept {
  return mode == Mode::lru ? "lru" : "explicit";
}

Mode parse_mode(std::string_view s) {
  if (s == "explicit") return Mode::explicit_io;
  if (s == "lru") return Mode::lru;
  throw Error(Errc::invalid_config, "unknown machine mode '" + std::string(s) + "'");
}

std::string counters_json(const Counters& c, const MachineConfig& config) {
  nlohmann::ordered_json j;
  j["words_moved"] = c.words_moved;
  j["messages"] = c.messages;
  j["flops"] = c.flops;
  j["g_ops"] = c.g_ops;
  j["M"] = config.fast_capacity_words;
  j["mode"] = to_string(config.mode);
  return j.dump();
}

DamMachine::DamMachine(MachineConfig config) : config_(config) {
  if (config_.fast_capacity_words < 1) {
    throw Error(Errc::invalid_config, "fast memory capacity must be at least one word");
  }
}

Address DamMachine::allocate(std::uint64_t words) {
  const Address base = slow_.size();
  if (words > 0) ensure_address(base + words - 1);
  return base;
}

void DamMachine::ensure_address(Address a) {
  if (a < slow_.size()) return;
  const std::size_t n = static_cast<std::size_t>(a) + 1;
  slow_.resize(n, 0.0);
  fast_.resize(n, 0.0);
  resident_.resize(n, 0);
  dirty_.resize(n, 0);
  if (config_.mode == Mode::lru) {
    lru_prev_.resize(n, kNil);
    lru_next_.resize(n, kNil);
  }
}

double DamMachine::slow_value(Address a) const {
  return a < slow_.size() ? slow_[a] : 0.0;
}

void DamMachine::set_slow_value(Address a, double v) {
  ensure_address(a);
  slow_[a] = v;
}

void DamMachine::require_mode(Mode m, const char* op) const {
  if (config_.mode != m) {
    throw Error(Errc::wrong_mode, std::string(op) + " is not available in " +
                                      std::string(to_string(config_.mode)) + " mode");
  }
}

void DamMachine::check_range(Address base, std::uint64_t len, const char* op) const {
  if (len < 1) throw Error(Errc::invalid_params, std::string(op) + " of zero words");
  for (std::uint64_t w = 0; w < len; ++w) {
    if (!is_resident(base + w)) {
      throw Error(Errc::not_resident,
                  std::string(op) + ": address " + std::to_string(base + w) + " is not resident");
    }
  }
}

void DamMachine::record(const TraceEvent& e) {
  if (config_.record_trace) trace_.push_back(e);
}

void DamMachine::make_resident(Address a) {
  resident_[a] = 1;
  ++resident_count_;
  if (config_.mode == Mode::lru) lru_link_front(a);
}

void DamMachine::drop_resident(Address a) {
  if (dirty_[a]) {
    dirty_[a] = 0;
    --dirty_count_;
  }
  resident_[a] = 0;
  --resident_count_;
  if (config_.mode == Mode::lru) lru_unlink(a);
}

void DamMachine::read_block(Address base, std::uint64_t len) {
  require_mode(Mode::explicit_io, "read_block");
  if (len < 1) throw Error(Errc::invalid_params, "read_block of zero words");
  if (len > capacity()) {
    throw Error(Errc::oversized_message, "read_block of " + std::to_string(len) +
                                             " words exceeds M=" + std::to_string(capacity()));
  }
  ensure_address(base + len - 1);
  for (std::uint64_t w = 0; w < len; ++w) {
    if (resident_[base + w]) {
      throw Error(Errc::duplicate_residency,
                  "address " + std::to_string(base + w) + " already has a fast copy");
    }
  }
  if (occupancy() + len > capacity()) {
    throw Error(Errc::capacity_exceeded, "read_block of " + std::to_string(len) + " words with " +
                                             std::to_string(occupancy()) + "/" +
                                             std::to_string(capacity()) + " occupied");
  }
  for (std::uint64_t w = 0; w < len; ++w) {
    fast_[base + w] = slow_[base + w];
    make_resident(base + w);
  }
  counters_.words_moved += len;
  counters_.messages += 1;
  TraceEvent e;
  e.kind = EventKind::read;
  e.base = base;
  e.len = len;
  record(e);
}

void DamMachine::write_block(Address base, std::uint64_t len, bool evict_after) {
  require_mode(Mode::explicit_io, "write_block");
  if (len > capacity()) {
    throw Error(Errc::oversized_message, "write_block of " + std::to_string(len) + " words");
  }
  check_range(base, len, "write_block");
  for (std::uint64_t w = 0; w < len; ++w) {
    const Address a = base + w;
    slow_[a] = fast_[a];
    if (dirty_[a]) {
      dirty_[a] = 0;
      --dirty_count_;
    }
  }
  counters_.words_moved += len;
  counters_.messages += 1;
  TraceEvent e;
  e.kind = EventKind::write;
  e.base = base;
  e.len = len;
  record(e);
  if (evict_after) evict(base, len);
}

void DamMachine::evict(Address base, std::uint64_t len) {
  check_range(base, len, "evict");
  for (std::uint64_t w = 0; w < len; ++w) drop_resident(base + w);
  TraceEvent e;
  e.kind = EventKind::evict;
  e.base = base;
  e.len = len;
  record(e);
}

void DamMachine::claim(Address base, std::uint64_t len) {
  require_mode(Mode::explicit_io, "claim");
  if (len < 1) throw Error(Errc::invalid_params, "claim of zero words");
  ensure_address(base + len - 1);
  for (std::uint64_t w = 0; w < len; ++w) {
    if (resident_[base + w]) {
      throw Error(Errc::duplicate_residency,
                  "address " + std::to_string(base + w) + " already has a fast copy");
    }
  }
  if (occupancy() + len > capacity()) {
    throw Error(Errc::capacity_exceeded, "claim of " + std::to_string(len) + " words");
  }
  for (std::uint64_t w = 0; w < len; ++w) {
    fast_[base + w] = 0.0;
    make_resident(base + w);
    dirty_[base + w] = 1;
    ++dirty_count_;
  }
  TraceEvent e;
  e.kind = EventKind::claim;
  e.base = base;
  e.len = len;
  record(e);
}

void DamMachine::lru_link_front(Address a) {
  lru_prev_[a] = kNil;
  lru_next_[a] = lru_head_;
  if (lru_head_ != kNil) lru_prev_[lru_head_] = a;
  lru_head_ = a;
  if (lru_tail_ == kNil) lru_tail_ = a;
}

void DamMachine::lru_unlink(Address a) {
  const Address p = lru_prev_[a];
  const Address n = lru_next_[a];
  if (p != kNil) lru_next_[p] = n; else lru_head_ = n;
  if (n != kNil) lru_prev_[n] = p; else lru_tail_ = p;
  lru_prev_[a] = lru_next_[a] = kNil;
}

void DamMachine::lru_evict_one() {
  const Address victim = lru_tail_;
  if (victim == kNil) {
    throw Error(Errc::capacity_exceeded, "lru cache is full of scratch words");
  }
  if (dirty_[victim]) {
    slow_[victim] = fast_[victim];
    counters_.words_moved += 1;
    counters_.messages += 1;
    TraceEvent w;
    w.kind = EventKind::write;
    w.base = victim;
    w.len = 1;
    record(w);
  }
  drop_resident(victim);
  TraceEvent e;
  e.kind = EventKind::evict;
  e.base = victim;
  e.len = 1;
  record(e);
}

void DamMachine::lru_make_room(std::uint64_t words) {
  if (words > capacity()) {
    throw Error(Errc::capacity_exceeded, "request for " + std::to_string(words) + " words");
  }
  while (occupancy() + words > capacity()) lru_evict_one();
}

void DamMachine::touch(Address a) {
  require_mode(Mode::lru, "touch");
  ensure_address(a);
  if (resident_[a]) {
    lru_unlink(a);
    lru_link_front(a);
    return;
  }
  lru_make_room(1);
  fast_[a] = slow_[a];
  make_resident(a);
  counters_.words_moved += 1;
  counters_.messages += 1;
  TraceEvent e;
  e.kind = EventKind::read;
  e.base = a;
  e.len = 1;
  record(e);
}

void DamMachine::store(Address a) {
  require_mode(Mode::lru, "store");
  ensure_address(a);
  if (resident_[a]) {
    lru_unlink(a);
    lru_link_front(a);
  } else {
    lru_make_room(1);
    fast_[a] = 0.0;
    make_resident(a);
    TraceEvent e;
    e.kind = EventKind::claim;
    e.base = a;
    e.len = 1;
    record(e);
  }
  if (!dirty_[a]) {
    dirty_[a] = 1;
    ++dirty_count_;
  }
}

void DamMachine::flush() {
  require_mode(Mode::lru, "flush");
  for (Address a = lru_tail_; a != kNil; a = lru_prev_[a]) {
    if (!dirty_[a]) continue;
    slow_[a] = fast_[a];
    dirty_[a] = 0;
    --dirty_count_;
    counters_.words_moved += 1;
    counters_.messages += 1;
    TraceEvent e;
    e.kind = EventKind::write;
    e.base = a;
    e.len = 1;
    record(e);
  }
}

ScratchId DamMachine::alloc_scratch(std::uint64_t n) {
  if (n < 1) throw Error(Errc::invalid_params, "alloc_scratch of zero words");
  if (config_.mode == Mode::lru) {
    lru_make_room(n);
  } else if (occupancy() + n > capacity()) {
    throw Error(Errc::capacity_exceeded, "alloc_scratch(" + std::to_string(n) + ") with " +
                                             std::to_string(occupancy()) + "/" +
                                             std::to_string(capacity()) + " occupied");
  }
  const ScratchId first = scratch_.size();
  scratch_.resize(first + n, 0.0);
  scratch_live_.resize(first + n, 1);
  scratch_count_ += n;
  TraceEvent e;
  e.kind = EventKind::alloc;
  e.base = first;
  e.len = n;
  record(e);
  return first;
}

void DamMachine::free_scratch(ScratchId first, std::uint64_t n) {
  for (std::uint64_t w = 0; w < n; ++w) {
    if (!is_live(first + w)) {
      throw Error(Errc::not_resident, "scratch id " + std::to_string(first + w) + " is not live");
    }
  }
  for (std::uint64_t w = 0; w < n; ++w) scratch_live_[first + w] = 0;
  scratch_count_ -= n;
  TraceEvent e;
  e.kind = EventKind::release;
  e.base = first;
  e.len = n;
  record(e);
}

void DamMachine::flop(const OpLabel& label, std::span<const Operand> inputs, Operand output,
                      bool is_g_op) {
  if (inputs.size() > TraceEvent::kMaxInputs) {
    throw Error(Errc::invalid_params, "flop with more than 4 inputs");
  }
  auto check = [&](Operand op) {
    const bool ok = op.is_scratch() ? is_live(op.index()) : is_resident(op.index());
    if (!ok) {
      throw Error(Errc::operand_not_resident,
                  std::string(op.is_scratch() ? "scratch #" : "address @") +
                      std::to_string(op.index()) + " used by " + std::string(to_string(label.tag)) +
                      " flop (" + std::to_string(label.i) + "," + std::to_string(label.j) + "," +
                      std::to_string(label.k) + ") is not in fast memory");
    }
  };
  for (Operand op : inputs) check(op);
  check(output);
  if (!output.is_scratch() && !dirty_[output.index()]) {
    dirty_[output.index()] = 1;
    ++dirty_count_;
  }
  counters_.flops += 1;
  if (is_g_op) counters_.g_ops += 1;
  if (config_.record_trace) {
    TraceEvent e;
    e.kind = EventKind::flop;
    e.g_op = is_g_op;
    e.label = label;
    e.input_count = static_cast<std::uint8_t>(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) e.inputs[i] = inputs[i];
    e.output = output;
    trace_.push_back(e);
  }
}

double& DamMachine::value(Operand op) {
  if (op.is_scratch()) {
    if (!is_live(op.index())) {
      throw Error(Errc::operand_not_resident, "scratch #" + std::to_string(op.index()));
    }
    return scratch_[op.index()];
  }
  if (!is_resident(op.index())) {
    throw Error(Errc::operand_not_resident, "address @" + std::to_string(op.index()));
  }
  return fast_[op.index()];
}

double DamMachine::value(Operand op) const {
  return const_cast<DamMachine*>(this)->value(op);
}

void DamMachine::imposed_transfer(Operand op, bool is_write) {
  const bool ok = op.is_scratch() ? is_live(op.index()) : is_resident(op.index());
  if (!ok) throw Error(Errc::not_resident, "imposed transfer on a non-resident operand");
  counters_.words_moved += 1;
  counters_.messages += 1;
  TraceEvent e;
  e.kind = is_write ? EventKind::imposed_write : EventKind::imposed_read;
  e.output = op;
  record(e);
}

Counters replay(const Trace& trace, std::uint64_t fast_capacity_words) {
  DamMachine m(MachineConfig{fast_capacity_words, Mode::explicit_io, false});
  std::size_t index = 0;
  try {
    for (; index < trace.size(); ++index) {
      const TraceEvent& e = trace[index];
      switch (e.kind) {
        case EventKind::read: m.read_block(e.base, e.len); break;
        case EventKind::write: m.write_block(e.base, e.len, false); break;
        case EventKind::evict: m.evict(e.base, e.len); break;
        case EventKind::claim: m.claim(e.base, e.len); break;
        case EventKind::alloc:
          if (m.alloc_scratch(e.len) != e.base) {
            throw Error(Errc::trace_mismatch, "scratch ids are not allocated in trace order");
          }
          break;
        case EventKind::release: m.free_scratch(e.base, e.len); break;
        case EventKind::flop:
          m.flop(e.label, std::span<const Operand>(e.inputs.data(), e.input_count), e.output,
                 e.g_op);
          break;
        case EventKind::imposed_read: m.imposed_transfer(e.output, false); break;
        case EventKind::imposed_write: m.imposed_transfer(e.output, true); break;
      }
    }
  } catch (const Error& err) {
    if (err.code() == Errc::trace_mismatch) throw;
    throw Error(Errc::trace_mismatch,
                "event " + std::to_string(index) + " violates the machine: " + err.what());
  }
  return m.counters();
}

}  // namespace iooracle
