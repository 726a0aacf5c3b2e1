#include <doctest.h>

#include <random>

#include "iooracle/error.hpp"
#include "iooracle/kernels.hpp"
#include "iooracle/lattice.hpp"
#include "iooracle/machine.hpp"
#include "iooracle/matrix.hpp"

using namespace iooracle;
using namespace iooracle::lattice;

namespace {

LatticeSet box(int a, int b, int c) {
  LatticeSet v;
  for (int x = 0; x < a; ++x)
    for (int y = 0; y < b; ++y)
      for (int z = 0; z < c; ++z) v.insert({x, y, z});
  return v;
}

DamMachine traced(std::uint64_t M) { return DamMachine(MachineConfig{M, Mode::explicit_io, true}); }

}  // namespace

TEST_CASE("projections") {
  const Projections cube = projections(box(3, 3, 3));
  CHECK(cube.ax.size() == 9);
  CHECK(cube.ay.size() == 9);
  CHECK(cube.az.size() == 9);
  LatticeSet diag;
  for (int i = 0; i < 4; ++i) diag.insert({i, i, i});
  const Projections d = projections(diag);
  CHECK(d.ax.size() == 4);
  CHECK(d.ay.size() == 4);
  CHECK(d.az.size() == 4);
  const Projections e = projections(LatticeSet{});
  CHECK(e.ax.empty());
  CHECK(e.ay.empty());
  CHECK(e.az.empty());
}

TEST_CASE("lattice set keeps points unique") {
  LatticeSet v;
  v.insert({1, 2, 3});
  v.insert({1, 2, 3});
  CHECK(v.size() == 1);
  CHECK(v.contains({1, 2, 3}));
  CHECK_FALSE(v.contains({3, 2, 1}));
}

TEST_CASE("lw_check") {
  const LwResult cube = lw_check(box(3, 3, 3));
  CHECK(cube.size == 27);
  CHECK(cube.bound == 27);
  CHECK(cube.holds);
  LatticeSet diag;
  for (int i = 0; i < 4; ++i) diag.insert({i, i, i});
  const LwResult d = lw_check(diag);
  CHECK(d.bound == 8);
  CHECK(d.holds);
  CHECK(lw_check(box(2, 3, 5)).bound == 30);

  std::mt19937_64 rng(7);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 500; ++trial) {
    LatticeSet v;
    for (int x = 0; x < 6; ++x)
      for (int y = 0; y < 6; ++y)
        for (int z = 0; z < 6; ++z)
          if (coin(rng)) v.insert({x, y, z});
    REQUIRE(lw_check(v).holds);
  }
}

TEST_CASE("segment partition, hand traces") {
  SUBCASE("exactly M transfers") {
    auto m = traced(4);
    const Address a = m.allocate(4);
    m.read_block(a, 4);
    for (int f = 0; f < 5; ++f) {
      m.flop(OpLabel{f, 0, 0, KernelTag::matmul}, {Operand::slow(a), Operand::slow(a + 1)},
             Operand::slow(a + 2), true);
    }
    m.evict(a, 4);
    const auto segs = segment_partition(m.trace(), 4);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].complete);
    CHECK(segs[0].transfer_count == 4);
    CHECK(segs[0].flop_count == 5);
  }
  SUBCASE("no transfers") {
    auto m = traced(4);
    const ScratchId s = m.alloc_scratch(2);
    m.flop(OpLabel{}, {Operand::scratch(s)}, Operand::scratch(s + 1), false);
    m.free_scratch(s, 2);
    const auto segs = segment_partition(m.trace(), 4);
    REQUIRE(segs.size() == 1);
    CHECK_FALSE(segs[0].complete);
    CHECK(segs[0].transfer_count == 0);
    CHECK(segs[0].flop_count == 1);
  }
  SUBCASE("messages split across segments") {
    auto m = traced(4);
    const Address a = m.allocate(6);
    m.read_block(a, 3);
    m.evict(a, 3);
    m.read_block(a + 3, 3);
    m.evict(a + 3, 3);
    const auto segs = segment_partition(m.trace(), 4);
    REQUIRE(segs.size() == 2);
    CHECK(segs[0].transfer_count == 4);
    CHECK(segs[1].transfer_count == 2);
    CHECK_FALSE(segs[1].complete);
  }
  SUBCASE("illegal trace") {
    Trace t;
    TraceEvent e;
    e.kind = EventKind::write;
    e.base = 0;
    e.len = 1;
    t.push_back(e);
    CHECK_THROWS_AS(segment_partition(t, 4), Error);
  }
}

TEST_CASE("operand classes") {
  auto m = traced(4);
  const Address a = m.allocate(2);
  m.read_block(a, 2);  // a: S1
  const ScratchId s = m.alloc_scratch(1);
  m.flop(OpLabel{0, 0, 0, KernelTag::matmul}, {Operand::slow(a), Operand::slow(a + 1)},
         Operand::scratch(s), true);  // s: created
  m.flop(OpLabel{0, 0, 0, KernelTag::aux}, {Operand::scratch(s), Operand::slow(a)},
         Operand::slow(a), false);
  m.free_scratch(s, 1);        // s: discarded -> S2/D2
  m.write_block(a, 1, true);   // a: D1
  m.evict(a + 1, 1);           // a+1: D2
  const auto segs = segment_partition(m.trace(), 4, PartitionOptions{true, false});
  REQUIRE(segs.size() == 1);
  const ClassCounts c = segs[0].classes;
  CHECK(c.s1d1 == 1);
  CHECK(c.s1d2 == 1);
  CHECK(c.s2d2 == 1);
  CHECK(segs[0].s2d2_g == 1);
  CHECK(classify_operands(segs[0].periods) == c);
}

TEST_CASE("blocked matmul segments") {
  auto m = traced(768);
  const MatrixHandle A = allocate_matrix(m, 48, 48, 1.0), B = allocate_matrix(m, 48, 48, 1.0);
  kernels::matmul_blocked(m, A, B, 16);
  const auto segs = segment_partition(m.trace(), 768);
  const double cap = std::pow(4.0 * 768, 1.5);
  std::size_t complete = 0;
  for (const auto& s : segs) {
    if (s.complete) {
      ++complete;
      CHECK(double(s.g_op_count) <= cap);
    }
    CHECK(s.classes.s1() <= 2 * 768);
    CHECK(s.classes.d1() <= 2 * 768);
    CHECK(s.classes.non_s2d2() <= 4 * 768);
    CHECK(s.classes.s2d2 == 0);
  }
  CHECK(complete == 18432 / 768);
}

TEST_CASE("impose_io") {
  SUBCASE("nothing to impose") {
    auto m = traced(768);
    const MatrixHandle A = allocate_matrix(m, 16, 16, 1.0);
    kernels::matmul_blocked(m, A, A, 16);
    const ImposedTrace t = impose_io(m.trace());
    CHECK(t.imposed_reads == 0);
    CHECK(t.imposed_writes == 0);
    CHECK(t.trace.size() == m.trace().size());
  }
  SUBCASE("fused Frobenius, formulas evaluated once") {
    for (std::uint64_t M : {48u, 192u, 800u}) {
      auto m = traced(M);
      kernels::frobenius_fused(m, 16);
      const ImposedTrace t = impose_io(m.trace());
      CHECK(t.imposed_reads <= 2 * 256);
      CHECK(t.imposed_writes <= 256);
      CHECK(replay(t.trace, M).words_moved ==
            m.counters().words_moved + t.imposed_reads + t.imposed_writes);
      // after imposing, no g-participating S2/D2 remains
      for (const auto& s : segment_partition(t.trace, M)) CHECK(s.s2d2_g == 0);
    }
  }
  SUBCASE("fused powers keeps (t-2) n^2 intermediates") {
    auto m = traced(768);
    const MatrixHandle A = allocate_matrix(m, 16, 16, 0.5);
    kernels::matrix_powers(m, A, 3, kernels::PowersMode::fused, 0);
    const ImposedTrace t = impose_io(m.trace());
    CHECK(t.imposed_writes <= 256);
  }
}
