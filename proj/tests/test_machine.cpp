#include <doctest.h>

#include <sstream>

#include "iooracle/error.hpp"
#include "iooracle/machine.hpp"
#include "iooracle/trace.hpp"

using namespace iooracle;

namespace {

DamMachine explicit_machine(std::uint64_t M, bool trace = false) {
  return DamMachine(MachineConfig{M, Mode::explicit_io, trace});
}
DamMachine lru_machine(std::uint64_t M) { return DamMachine(MachineConfig{M, Mode::lru, false}); }

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::invalid_config;
}

}  // namespace

TEST_CASE("create") {
  auto m = explicit_machine(64);
  CHECK(m.counters() == Counters{});
  CHECK(m.resident_count() == 0);
  CHECK_NOTHROW(lru_machine(1));
  CHECK(code_of([] { explicit_machine(0); }) == Errc::invalid_config);
}

TEST_CASE("read_block") {
  auto m = explicit_machine(16);
  m.allocate(200);
  m.read_block(0, 16);
  CHECK(m.counters().words_moved == 16);
  CHECK(m.counters().messages == 1);

  auto half = explicit_machine(16);
  half.allocate(200);
  half.read_block(0, 8);
  CHECK(code_of([&] { half.read_block(100, 16); }) == Errc::capacity_exceeded);

  auto small = explicit_machine(4);
  small.allocate(4);
  small.read_block(0, 2);
  CHECK(code_of([&] { small.read_block(1, 1); }) == Errc::duplicate_residency);
  CHECK(code_of([&] { small.read_block(2, 5); }) == Errc::oversized_message);
}

TEST_CASE("write_block and evict") {
  auto m = explicit_machine(16);
  m.allocate(32);
  m.read_block(0, 16);
  m.write_block(0, 16, false);
  CHECK(m.counters().messages == 2);
  CHECK(m.resident_count() == 16);
  m.write_block(0, 16, true);
  CHECK(m.counters().messages == 3);
  CHECK(m.resident_count() == 0);
  CHECK(code_of([&] { m.write_block(16, 4, true); }) == Errc::not_resident);

  m.read_block(0, 8);
  const auto before = m.counters().words_moved;
  m.evict(0, 8);
  CHECK(m.counters().words_moved == before);
  CHECK(code_of([&] { m.evict(0, 1); }) == Errc::not_resident);
  m.read_block(0, 8);
  CHECK(m.counters().words_moved == before + 8);
}

TEST_CASE("values travel with transfers") {
  auto m = explicit_machine(4);
  const Address a = m.allocate(2);
  m.set_slow_value(a, 3.0);
  m.read_block(a, 2);
  m.value(a) = 7.0;
  CHECK(m.slow_value(a) == 3.0);
  m.write_block(a, 1, true);
  CHECK(m.slow_value(a) == 7.0);
  m.evict(a + 1, 1);
}

TEST_CASE("claim makes created values without traffic") {
  auto m = explicit_machine(4);
  const Address a = m.allocate(4);
  m.set_slow_value(a, 9.0);
  m.claim(a, 2);
  CHECK(m.counters().words_moved == 0);
  CHECK(m.value(a) == 0.0);
  CHECK(code_of([&] { m.claim(a, 1); }) == Errc::duplicate_residency);
  CHECK(code_of([&] { m.claim(a + 2, 3); }) == Errc::capacity_exceeded);
}

TEST_CASE("lru touch") {
  SUBCASE("M=1 thrashes") {
    auto m = lru_machine(1);
    m.allocate(2);
    m.touch(0);
    m.touch(1);
    m.touch(0);
    CHECK(m.counters().words_moved == 3);
  }
  SUBCASE("M=2 hits") {
    auto m = lru_machine(2);
    m.allocate(2);
    m.touch(0);
    m.touch(1);
    m.touch(0);
    CHECK(m.counters().words_moved == 2);
  }
  SUBCASE("repeated touch") {
    auto m = lru_machine(3);
    m.allocate(1);
    for (int i = 0; i < 10; ++i) m.touch(0);
    CHECK(m.counters().words_moved == 1);
  }
  SUBCASE("dirty words are written back") {
    auto m = lru_machine(1);
    m.allocate(2);
    m.store(0);
    m.value(Address{0}) = 5.0;
    m.touch(1);
    CHECK(m.counters().words_moved == 2);
    CHECK(m.slow_value(0) == 5.0);
    m.flush();
    CHECK(m.dirty_count() == 0);
  }
  SUBCASE("explicit calls are rejected") {
    auto m = lru_machine(4);
    m.allocate(4);
    CHECK(code_of([&] { m.read_block(0, 1); }) == Errc::wrong_mode);
  }
}

TEST_CASE("flop") {
  auto m = explicit_machine(4);
  const Address a = m.allocate(3);
  m.read_block(a, 3);
  const Operand x = Operand::slow(a), y = Operand::slow(a + 1), z = Operand::slow(a + 2);
  m.flop(OpLabel{0, 0, 0, KernelTag::matmul}, {x, y, z}, z, true);
  CHECK(m.counters().flops == 1);
  CHECK(m.counters().g_ops == 1);
  m.flop(OpLabel{0, 0, 0, KernelTag::lu}, {x, y}, z, false);
  CHECK(m.counters().flops == 2);
  CHECK(m.counters().g_ops == 1);
  m.evict(a + 1, 1);
  CHECK(code_of([&] { m.flop(OpLabel{}, {x, y}, z, true); }) == Errc::operand_not_resident);
}

TEST_CASE("scratch") {
  auto m = explicit_machine(4);
  const ScratchId s = m.alloc_scratch(4);
  m.free_scratch(s, 4);
  const ScratchId t = m.alloc_scratch(2);
  CHECK(t != s);
  m.allocate(4);
  m.read_block(0, 2);
  CHECK(code_of([&] { m.alloc_scratch(1); }) == Errc::capacity_exceeded);
  m.free_scratch(t, 2);
  CHECK(m.occupancy() == 2);
}

TEST_CASE("replay reproduces counters") {
  auto m = explicit_machine(8, true);
  const Address a = m.allocate(8);
  m.read_block(a, 4);
  const ScratchId s = m.alloc_scratch(1);
  m.flop(OpLabel{1, 2, 3, KernelTag::matmul}, {Operand::slow(a), Operand::slow(a + 1)},
         Operand::scratch(s), true);
  m.flop(OpLabel{1, 2, 3, KernelTag::aux}, {Operand::scratch(s)}, Operand::slow(a + 2), false);
  m.free_scratch(s, 1);
  m.write_block(a, 4, true);
  CHECK(replay(m.trace(), 8) == m.counters());
  CHECK(code_of([&] { replay(m.trace(), 2); }) == Errc::trace_mismatch);

  std::stringstream ss;
  write_trace(ss, m.trace());
  const Trace back = read_trace(ss);
  CHECK(back.size() == m.trace().size());
  CHECK(replay(back, 8) == m.counters());
}

TEST_CASE("counter invariants") {
  auto m = explicit_machine(6);
  m.allocate(12);
  for (Address a = 0; a < 12; a += 3) {
    m.read_block(a, 3);
    m.write_block(a, 3, true);
  }
  const Counters c = m.counters();
  CHECK(c.words_moved >= c.messages);
  CHECK(c.g_ops <= c.flops);
}
