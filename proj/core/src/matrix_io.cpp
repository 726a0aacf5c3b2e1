#include "iooracle/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "iooracle/error.hpp"

namespace iooracle {

namespace {

static_assert(std::endian::native == std::endian::little, "DAMX IO assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw Error(Errc::parse_error, "DAMX: truncated header");
  }
  return v;
}

}  // namespace

void write_damx(std::ostream& out, const Matrix& a) {
  out.write("DAMX", 4);
  put_u32(out, static_cast<std::uint32_t>(a.rows()));
  put_u32(out, static_cast<std::uint32_t>(a.cols()));
  put_u32(out, kDamxF64);
  out.write(reinterpret_cast<const char*>(a.data().data()),
            static_cast<std::streamsize>(a.data().size() * sizeof(double)));
  if (!out) throw Error(Errc::io_error, "DAMX: write failed");
}

Matrix read_damx(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || std::memcmp(magic.data(), "DAMX", 4) != 0) {
    throw Error(Errc::parse_error, "DAMX: bad magic");
  }
  const std::uint32_t rows = get_u32(in);
  const std::uint32_t cols = get_u32(in);
  const std::uint32_t dtype = get_u32(in);
  if (dtype != kDamxF64) throw Error(Errc::parse_error, "DAMX: unsupported dtype " + std::to_string(dtype));
  Matrix a(rows, cols);
  if (!in.read(reinterpret_cast<char*>(a.data().data()),
               static_cast<std::streamsize>(a.data().size() * sizeof(double)))) {
    throw Error(Errc::parse_error, "DAMX: truncated payload");
  }
  return a;
}

void write_damx(const std::filesystem::path& path, const Matrix& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string());
  write_damx(out, a);
}

Matrix read_damx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  return read_damx(in);
}

void write_coordinate(std::ostream& out, const CsrMatrix& a) {
  out << a.rows << ' ' << a.cols << ' ' << a.nnz() << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      out << i + 1 << ' ' << a.col_idx[p] + 1 << ' ' << a.values[p] << '\n';
}

CsrMatrix read_coordinate(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line[0] != '%') return true;
    }
    return false;
  };
  auto fail = [&](const char* why) {
    return Error(Errc::parse_error, "coordinate line " + std::to_string(lineno) + ": " + why);
  };
  if (!next()) throw Error(Errc::parse_error, "coordinate: missing size line");
  std::size_t rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> rows >> cols >> nnz)) throw fail("expected 'rows cols nnz'");
  }
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  entries.reserve(nnz);
  while (next()) {
    std::istringstream ls(line);
    std::size_t i = 0, j = 0;
    double v = 0;
    if (!(ls >> i >> j >> v)) throw fail("expected 'row col value'");
    if (i < 1 || j < 1 || i > rows || j > cols) throw fail("index out of range");
    entries.emplace_back(i - 1, j - 1, v);
  }
  if (entries.size() != nnz) throw fail("entry count does not match the size line");
  std::sort(entries.begin(), entries.end());
  CsrMatrix a;
  a.rows = rows;
  a.cols = cols;
  a.row_ptr.assign(rows + 1, 0);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto [i, j, v] = entries[e];
    if (e > 0 && std::get<0>(entries[e - 1]) == i && std::get<1>(entries[e - 1]) == j) {
      throw fail("duplicate entry");
    }
    ++a.row_ptr[i + 1];
    a.col_idx.push_back(j);
    a.values.push_back(v);
  }
  std::partial_sum(a.row_ptr.begin(), a.row_ptr.end(), a.row_ptr.begin());
  return a;
}

}  // namespace iooracle
