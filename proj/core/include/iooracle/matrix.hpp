#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "iooracle/trace.hpp"

namespace iooracle {

class DamMachine;

/// Host-side dense matrix, row-major. Used for inputs, oracles and read-back.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double max_abs(const Matrix& a);
Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
/// max |a - b| over all entries; +inf entries compare equal to +inf.
double max_abs_diff(const Matrix& a, const Matrix& b);

enum class Layout { row_major, col_major, recursive_block };

std::string_view to_string(Layout layout) noexcept;
Layout parse_layout(std::string_view s);

/// Half-open index rectangle [r0, r1) x [c0, c1).
struct Rect {
  std::size_t r0 = 0;
  std::size_t r1 = 0;
  std::size_t c0 = 0;
  std::size_t c1 = 0;

  std::size_t rows() const { return r1 - r0; }
  std::size_t cols() const { return c1 - c0; }
  std::size_t size() const { return rows() * cols(); }
};

/// Which entries of a rectangle are meant, by global (i, j) index.
enum class Part { full, lower, upper, strict_lower };

/// A dense matrix bound to a slow-memory address range.
///
/// recursive_block stores b x b blocks contiguously, each block row-major,
/// blocks visited in Morton (Z) order of their block coordinates. Edge blocks
/// are stored compactly.
class MatrixHandle {
 public:
  MatrixHandle() = default;
  MatrixHandle(std::size_t rows, std::size_t cols, Address base, Layout layout,
               std::size_t block = 0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Address base() const { return base_; }
  Layout layout() const { return layout_; }
  std::size_t block() const { return block_; }
  std::uint64_t words() const { return std::uint64_t{rows_} * cols_; }

  Address address(std::size_t i, std::size_t j) const {
    switch (layout_) {
      case Layout::row_major: return base_ + i * cols_ + j;
      case Layout::col_major: return base_ + j * rows_ + i;
      case Layout::recursive_block: break;
    }
    const std::size_t bi = i / block_;
    const std::size_t bj = j / block_;
    const std::size_t width = std::min(block_, cols_ - bj * block_);
    return base_ + (*offsets_)[bi * block_cols_ + bj] + (i - bi * block_) * width +
           (j - bj * block_);
  }
  Operand at(std::size_t i, std::size_t j) const { return Operand::slow(address(i, j)); }

  /// Sorted addresses of the selected part of a rectangle.
  std::vector<Address> addresses(Rect r, Part part = Part::full) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Address base_ = 0;
  Layout layout_ = Layout::row_major;
  std::size_t block_ = 0;
  std::size_t block_cols_ = 0;
  std::shared_ptr<const std::vector<std::uint64_t>> offsets_;
};

/// Allocates address space for a rows x cols matrix and fills it (host side, free).
MatrixHandle store_matrix(DamMachine& m, const Matrix& a, Layout layout = Layout::row_major,
                          std::size_t block = 0);
MatrixHandle allocate_matrix(DamMachine& m, std::size_t rows, std::size_t cols, double fill,
                             Layout layout = Layout::row_major, std::size_t block = 0);
/// Host-side read-back of slow memory (free; fast copies are not consulted).
Matrix load_matrix(const DamMachine& m, const MatrixHandle& h);

/// Compressed sparse rows. Column indices are sorted within each row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return col_idx.size(); }
  static CsrMatrix from_dense(const Matrix& a);
  Matrix to_dense() const;
};

/// CSR values live in slow memory at base + position; the structure is free metadata.
struct CsrHandle {
  CsrMatrix structure;
  Address base = 0;

  Address address(std::size_t position) const { return base + position; }
};

CsrHandle store_csr(DamMachine& m, const CsrMatrix& a);
CsrMatrix load_csr(const DamMachine& m, const CsrHandle& h);

}  // namespace iooracle
