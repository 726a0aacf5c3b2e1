#pragma once

#include <functional>
#include <span>
#include <vector>

#include "iooracle/machine.hpp"
#include "iooracle/matrix.hpp"

namespace iooracle {

struct AddressRun {
  Address base = 0;
  std::uint64_t len = 0;
  friend bool operator==(const AddressRun&, const AddressRun&) = default;
};

/// Coalesces sorted addresses into contiguous runs of at most max_len words.
std::vector<AddressRun> coalesce(std::span<const Address> sorted, std::uint64_t max_len);

// Tile transfers for explicit-mode kernels. Each call touches only the words
// that need it, so aliased tiles (the same tile of the same handle used twice)
// are read once and released once.

/// Reads the non-resident words of the tile, one message per contiguous run,
/// and returns the addresses it brought in.
std::vector<Address> read_tile(DamMachine& m, const MatrixHandle& h, Rect r, Part part = Part::full);
/// Writes every word of the tile back; all of them must be resident.
void write_tile(DamMachine& m, const MatrixHandle& h, Rect r, Part part, bool evict);
/// Discards the resident words of the tile.
void evict_tile(DamMachine& m, const MatrixHandle& h, Rect r, Part part = Part::full);
/// Discards exactly these addresses (sorted).
void evict_addresses(DamMachine& m, std::span<const Address> sorted);
/// Makes the non-resident words resident as created values (no transfer).
void claim_tile(DamMachine& m, const MatrixHandle& h, Rect r, Part part = Part::full);

void read_range(DamMachine& m, Address base, std::uint64_t len);
void write_range(DamMachine& m, Address base, std::uint64_t len, bool evict);

/// Scratch words released on scope exit.
class ScratchBlock {
 public:
  ScratchBlock(DamMachine& m, std::uint64_t n) : m_(&m), first_(m.alloc_scratch(n)), n_(n) {}
  ScratchBlock(const ScratchBlock&) = delete;
  ScratchBlock& operator=(const ScratchBlock&) = delete;
  ScratchBlock(ScratchBlock&& o) noexcept : m_(o.m_), first_(o.first_), n_(o.n_) { o.n_ = 0; }
  ~ScratchBlock() {
    if (n_ > 0 && m_->is_live(first_)) m_->free_scratch(first_, n_);
  }

  Operand operator[](std::uint64_t i) const { return Operand::scratch(first_ + i); }
  std::uint64_t size() const { return n_; }
  void release() {
    if (n_ > 0) m_->free_scratch(first_, n_);
    n_ = 0;
  }

 private:
  DamMachine* m_;
  ScratchId first_;
  std::uint64_t n_;
};

}  // namespace iooracle
