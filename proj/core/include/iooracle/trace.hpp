#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace iooracle {

using Address = std::uint64_t;
using ScratchId = std::uint64_t;

/// A fast-memory word: either the copy of a slow-memory address or a scratch
/// value that has no slow address (accumulators, created operands).
class Operand {
 public:
  constexpr Operand() = default;

  static constexpr Operand slow(Address a) { return Operand(a); }
  static constexpr Operand scratch(ScratchId id) { return Operand(id | kScratchBit); }

  constexpr bool is_scratch() const { return (raw_ & kScratchBit) != 0; }
  constexpr std::uint64_t index() const { return raw_ & ~kScratchBit; }
  constexpr std::uint64_t raw() const { return raw_; }

  constexpr auto operator<=>(const Operand&) const = default;

 private:
  static constexpr std::uint64_t kScratchBit = std::uint64_t{1} << 63;
  constexpr explicit Operand(std::uint64_t raw) : raw_(raw) {}
  std::uint64_t raw_ = 0;
};

enum class KernelTag : std::uint8_t {
  matmul,
  sparse,
  trsm,
  lu,
  cholesky,
  ldlt,
  qr,
  minplus,
  powers,
  multimul,
  frobenius,
  aux,
};

std::string_view to_string(KernelTag tag) noexcept;
std::optional<KernelTag> parse_kernel_tag(std::string_view s) noexcept;

/// Lattice label (i, j, k) of a compute event plus the kernel that issued it.
struct OpLabel {
  std::int32_t i = 0;
  std::int32_t j = 0;
  std::int32_t k = 0;
  KernelTag tag = KernelTag::aux;
};

enum class EventKind : std::uint8_t {
  read,           // R base len
  write,          // W base len
  evict,          // E base len
  claim,          // N base len   (resident without transfer: created value)
  alloc,          // A first n    (scratch ids)
  release,        // X first n
  flop,           // F tag i j k g : inputs > output
  imposed_read,   // IR operand
  imposed_write,  // IW operand
};

struct TraceEvent {
  static constexpr std::size_t kMaxInputs = 4;

  EventKind kind = EventKind::flop;
  bool g_op = false;
  std::uint8_t input_count = 0;
  OpLabel label;
  /// Transfers, evict and claim: base address. alloc/release: first scratch id.
  std::uint64_t base = 0;
  std::uint64_t len = 0;
  std::array<Operand, kMaxInputs> inputs{};
  /// Flop destination, or the operand of an imposed transfer.
  Operand output;

  bool is_transfer() const {
    return kind == EventKind::read || kind == EventKind::write ||
           kind == EventKind::imposed_read || kind == EventKind::imposed_write;
  }
  /// Words this event moves between fast and slow memory.
  std::uint64_t words() const {
    switch (kind) {
      case EventKind::read:
      case EventKind::write: return len;
      case EventKind::imposed_read:
      case EventKind::imposed_write: return 1;
      default: return 0;
    }
  }
};

using Trace = std::vector<TraceEvent>;

/// Newline-delimited text form. Lines: `R base len`, `W base len`,
/// `F tag i j k g : @a @b #s > @c`, plus E/N/A/X/IR/IW records.
void write_trace(std::ostream& out, const Trace& trace);
Trace read_trace(std::istream& in);

}  // namespace iooracle
