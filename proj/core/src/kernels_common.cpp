#include "iooracle/tiles.hpp"

#include <algorithm>

#include "iooracle/error.hpp"

namespace iooracle {

std::vector<AddressRun> coalesce(std::span<const Address> sorted, std::uint64_t max_len) {
  std::vector<AddressRun> runs;
  for (Address a : sorted) {
    if (!runs.empty() && runs.back().base + runs.back().len == a && runs.back().len < max_len) {
      ++runs.back().len;
    } else {
      runs.push_back({a, 1});
    }
  }
  return runs;
}

std::vector<Address> read_tile(DamMachine& m, const MatrixHandle& h, Rect r, Part part) {
  std::vector<Address> need = h.addresses(r, part);
  std::erase_if(need, [&](Address a) { return m.is_resident(a); });
  for (const AddressRun& run : coalesce(need, m.capacity())) m.read_block(run.base, run.len);
  return need;
}

void evict_addresses(DamMachine& m, std::span<const Address> sorted) {
  for (const AddressRun& run : coalesce(sorted, m.capacity())) m.evict(run.base, run.len);
}

void write_tile(DamMachine& m, const MatrixHandle& h, Rect r, Part part, bool evict) {
  const std::vector<Address> all = h.addresses(r, part);
  for (const AddressRun& run : coalesce(all, m.capacity())) m.write_block(run.base, run.len, evict);
}

void evict_tile(DamMachine& m, const MatrixHandle& h, Rect r, Part part) {
  std::vector<Address> held = h.addresses(r, part);
  std::erase_if(held, [&](Address a) { return !m.is_resident(a); });
  for (const AddressRun& run : coalesce(held, m.capacity())) m.evict(run.base, run.len);
}

void claim_tile(DamMachine& m, const MatrixHandle& h, Rect r, Part part) {
  std::vector<Address> need = h.addresses(r, part);
  std::erase_if(need, [&](Address a) { return m.is_resident(a); });
  for (const AddressRun& run : coalesce(need, m.capacity())) m.claim(run.base, run.len);
}

void read_range(DamMachine& m, Address base, std::uint64_t len) {
  for (std::uint64_t off = 0; off < len; off += m.capacity()) {
    m.read_block(base + off, std::min<std::uint64_t>(m.capacity(), len - off));
  }
}

void write_range(DamMachine& m, Address base, std::uint64_t len, bool evict) {
  for (std::uint64_t off = 0; off < len; off += m.capacity()) {
    m.write_block(base + off, std::min<std::uint64_t>(m.capacity(), len - off), evict);
  }
}

}  // namespace iooracle
