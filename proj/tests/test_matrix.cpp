#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "iooracle/error.hpp"
#include "iooracle/machine.hpp"
#include "iooracle/matrix.hpp"
#include "iooracle/matrix_io.hpp"
#include "iooracle/reference.hpp"
#include "iooracle/tiles.hpp"

using namespace iooracle;

TEST_CASE("layout addresses are a bijection") {
  for (Layout l : {Layout::row_major, Layout::col_major, Layout::recursive_block})
    for (auto [r, c, b] : {std::array<std::size_t, 3>{8, 8, 4}, {7, 5, 3}, {5, 9, 2}, {6, 6, 6}}) {
      const MatrixHandle h(r, c, 100, l, b);
      std::set<Address> seen;
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) seen.insert(h.address(i, j));
      CHECK(seen.size() == r * c);
      CHECK(*seen.begin() == 100);
      CHECK(*seen.rbegin() == 100 + r * c - 1);
    }
}

TEST_CASE("recursive blocks are contiguous and Morton ordered") {
  const MatrixHandle h(8, 8, 0, Layout::recursive_block, 2);
  for (std::size_t I = 0; I < 4; ++I)
    for (std::size_t J = 0; J < 4; ++J) {
      const auto addr = h.addresses(Rect{2 * I, 2 * I + 2, 2 * J, 2 * J + 2});
      CHECK(addr.back() - addr.front() == 3);
    }
  // Z order: (0,0) (0,1) (1,0) (1,1) (0,2) ...
  CHECK(h.address(0, 2) == 4);
  CHECK(h.address(2, 0) == 8);
  CHECK(h.address(2, 2) == 12);
  CHECK(h.address(0, 4) == 16);
}

TEST_CASE("row-major tile runs") {
  const MatrixHandle h(8, 8, 0, Layout::row_major);
  const auto addr = h.addresses(Rect{0, 2, 0, 4});
  const auto runs = coalesce(addr, 64);
  CHECK(runs.size() == 2);
  const auto full = coalesce(h.addresses(Rect{0, 2, 0, 8}), 64);
  CHECK(full.size() == 1);
  CHECK(coalesce(h.addresses(Rect{0, 2, 0, 8}), 5).size() == 4);
}

TEST_CASE("parts") {
  const MatrixHandle h(4, 4, 0, Layout::row_major);
  CHECK(h.addresses(Rect{0, 4, 0, 4}, Part::lower).size() == 10);
  CHECK(h.addresses(Rect{0, 4, 0, 4}, Part::upper).size() == 10);
  CHECK(h.addresses(Rect{0, 4, 0, 4}, Part::strict_lower).size() == 6);
}

TEST_CASE("store and load") {
  DamMachine m(MachineConfig{16, Mode::explicit_io, false});
  reference::Rng rng(3);
  const Matrix a = reference::random_uniform(5, 7, rng);
  for (Layout l : {Layout::row_major, Layout::col_major, Layout::recursive_block}) {
    const MatrixHandle h = store_matrix(m, a, l, 2);
    CHECK(load_matrix(m, h) == a);
  }
  CHECK(parse_layout("recursive_block") == Layout::recursive_block);
  CHECK(parse_layout("col") == Layout::col_major);
  CHECK_THROWS_AS(parse_layout("diagonal"), Error);
}

TEST_CASE("read_tile skips resident words") {
  DamMachine m(MachineConfig{16, Mode::explicit_io, false});
  const MatrixHandle h = allocate_matrix(m, 4, 4, 1.0);
  const auto first = read_tile(m, h, Rect{0, 2, 0, 2});
  CHECK(first.size() == 4);
  const auto again = read_tile(m, h, Rect{0, 2, 0, 4});
  CHECK(again.size() == 4);
  CHECK(m.counters().words_moved == 8);
  evict_tile(m, h, Rect{0, 4, 0, 4});
  CHECK(m.resident_count() == 0);
}

TEST_CASE("csr") {
  reference::Rng rng(5);
  const Matrix a = reference::random_sparse(9, 6, 0.3, rng);
  const CsrMatrix c = CsrMatrix::from_dense(a);
  CHECK(c.to_dense() == a);
  DamMachine m(MachineConfig{4, Mode::explicit_io, false});
  const CsrHandle h = store_csr(m, c);
  CHECK(load_csr(m, h).values == c.values);
}

TEST_CASE("damx round trip") {
  reference::Rng rng(11);
  const Matrix a = reference::random_uniform(3, 4, rng);
  std::stringstream ss;
  write_damx(ss, a);
  CHECK(ss.str().size() == 16 + 12 * 8);
  CHECK(ss.str().substr(0, 4) == "DAMX");
  CHECK(read_damx(ss) == a);
  std::stringstream bad("DAMY");
  CHECK_THROWS_AS(read_damx(bad), Error);
}

TEST_CASE("coordinate text") {
  std::stringstream in("% comment\n3 3 2\n1 1 2.5\n3 2 -1\n");
  const CsrMatrix c = read_coordinate(in);
  CHECK(c.rows == 3);
  CHECK(c.nnz() == 2);
  CHECK(c.to_dense()(0, 0) == 2.5);
  CHECK(c.to_dense()(2, 1) == -1);
  std::stringstream out;
  write_coordinate(out, c);
  CHECK(read_coordinate(out).to_dense() == c.to_dense());
  std::stringstream dup("2 2 2\n1 1 1\n1 1 2\n");
  CHECK_THROWS_AS(read_coordinate(dup), Error);
  std::stringstream range("2 2 1\n3 1 1\n");
  CHECK_THROWS_AS(read_coordinate(range), Error);
}
