#pragma once

#include <filesystem>
#include <iosfwd>

#include "iooracle/matrix.hpp"

namespace iooracle {

/// Binary dense format: "DAMX", u32 rows, u32 cols, u32 dtype (1 = f64),
/// little-endian, then rows*cols f64 values in row-major order.
constexpr std::uint32_t kDamxF64 = 1;

void write_damx(std::ostream& out, const Matrix& a);
Matrix read_damx(std::istream& in);
void write_damx(const std::filesystem::path& path, const Matrix& a);
Matrix read_damx(const std::filesystem::path& path);

/// Coordinate text: optional "% comment" lines, a "rows cols nnz" size line,
/// then one "row col value" line per entry, 1-indexed.
void write_coordinate(std::ostream& out, const CsrMatrix& a);
CsrMatrix read_coordinate(std::istream& in);

}  // namespace iooracle
