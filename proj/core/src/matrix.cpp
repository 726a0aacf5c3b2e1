#include "iooracle/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "iooracle/error.hpp"
#include "iooracle/machine.hpp"

namespace iooracle {

Matrix Matrix::identity(std::size_t n) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
  return a;
}

double max_abs(const Matrix& a) {
  double m = 0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::dimension_mismatch, "multiply: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  double m = 0;
  for (std::size_t p = 0; p < a.data().size(); ++p) {
    const double x = a.data()[p];
    const double y = b.data()[p];
    if (x == y) continue;
    m = std::max(m, std::abs(x - y));
  }
  return m;
}

std::string_view to_string(Layout layout) noexcept {
  switch (layout) {
    case Layout::row_major: return "row_major";
    case Layout::col_major: return "col_major";
    case Layout::recursive_block: return "recursive_block";
  }
  return "?";
}

Layout parse_layout(std::string_view s) {
  if (s == "row_major" || s == "row") return Layout::row_major;
  if (s == "col_major" || s == "col") return Layout::col_major;
  if (s == "recursive_block" || s == "recursive" || s == "block") return Layout::recursive_block;
  throw Error(Errc::invalid_params, "unknown layout '" + std::string(s) + "'");
}

namespace {

std::uint64_t morton(std::uint64_t r, std::uint64_t c) {
  std::uint64_t code = 0;
  for (int bit = 0; bit < 32; ++bit) {
    code |= ((c >> bit) & 1u) << (2 * bit);
    code |= ((r >> bit) & 1u) << (2 * bit + 1);
  }
  return code;
}

}  // namespace

MatrixHandle::MatrixHandle(std::size_t rows, std::size_t cols, Address base, Layout layout,
                           std::size_t block)
    : rows_(rows), cols_(cols), base_(base), layout_(layout), block_(block) {
  if (layout_ != Layout::recursive_block) return;
  if (block_ < 1) throw Error(Errc::invalid_params, "recursive_block layout needs a block size");
  const std::size_t br = (rows_ + block_ - 1) / block_;
  block_cols_ = (cols_ + block_ - 1) / block_;
  std::vector<std::size_t> order(br * block_cols_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return morton(x / block_cols_, x % block_cols_) < morton(y / block_cols_, y % block_cols_);
  });
  auto offsets = std::make_shared<std::vector<std::uint64_t>>(order.size());
  std::uint64_t next = 0;
  for (std::size_t id : order) {
    const std::size_t bi = id / block_cols_;
    const std::size_t bj = id % block_cols_;
    (*offsets)[id] = next;
    next += std::min(block_, rows_ - bi * block_) * std::min(block_, cols_ - bj * block_);
  }
  offsets_ = std::move(offsets);
}

std::vector<Address> MatrixHandle::addresses(Rect r, Part part) const {
  std::vector<Address> out;
  out.reserve(r.size());
  for (std::size_t i = r.r0; i < r.r1; ++i) {
    for (std::size_t j = r.c0; j < r.c1; ++j) {
      const bool take = part == Part::full || (part == Part::lower && i >= j) ||
                        (part == Part::upper && i <= j) || (part == Part::strict_lower && i > j);
      if (take) out.push_back(address(i, j));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

MatrixHandle allocate_matrix(DamMachine& m, std::size_t rows, std::size_t cols, double fill,
                             Layout layout, std::size_t block) {
  MatrixHandle h(rows, cols, m.allocate(std::uint64_t{rows} * cols), layout, block);
  if (fill != 0.0) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m.set_slow_value(h.address(i, j), fill);
  }
  return h;
}

MatrixHandle store_matrix(DamMachine& m, const Matrix& a, Layout layout, std::size_t block) {
  MatrixHandle h(a.rows(), a.cols(), m.allocate(std::uint64_t{a.rows()} * a.cols()), layout, block);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m.set_slow_value(h.address(i, j), a(i, j));
  return h;
}

Matrix load_matrix(const DamMachine& m, const MatrixHandle& h) {
  Matrix a(h.rows(), h.cols());
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) a(i, j) = m.slow_value(h.address(i, j));
  return a;
}

CsrMatrix CsrMatrix::from_dense(const Matrix& a) {
  CsrMatrix s;
  s.rows = a.rows();
  s.cols = a.cols();
  s.row_ptr.push_back(0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) {
        s.col_idx.push_back(j);
        s.values.push_back(a(i, j));
      }
    }
    s.row_ptr.push_back(s.col_idx.size());
  }
  return s;
}

Matrix CsrMatrix::to_dense() const {
  Matrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) a(i, col_idx[p]) = values[p];
  return a;
}

CsrHandle store_csr(DamMachine& m, const CsrMatrix& a) {
  CsrHandle h{a, m.allocate(a.nnz())};
  for (std::size_t p = 0; p < a.nnz(); ++p) m.set_slow_value(h.address(p), a.values[p]);
  return h;
}

CsrMatrix load_csr(const DamMachine& m, const CsrHandle& h) {
  CsrMatrix a = h.structure;
  a.values.resize(a.nnz());
  for (std::size_t p = 0; p < a.nnz(); ++p) a.values[p] = m.slow_value(h.address(p));
  return a;
}

}  // namespace iooracle
