#include <cmath>
#include <limits>

#include "iooracle/kernels.hpp"
#include "kernel_util.hpp"

namespace iooracle::kernels {

using namespace detail;

std::size_t auto_block(std::uint64_t M) {
  return static_cast<std::size_t>(std::sqrt(static_cast<double>(M) / 3.0));
}

MatrixHandle matmul_naive(DamMachine& m, const MatrixHandle& A, const MatrixHandle& B) {
  if (m.config().mode != Mode::lru) throw Error(Errc::wrong_mode, "matmul_naive runs in lru mode");
  if (A.cols() != B.rows()) throw Error(Errc::dimension_mismatch, "matmul_naive: A.cols != B.rows");
  if (m.capacity() < 3) throw Error(Errc::capacity_too_small, "matmul_naive needs M >= 3");
  const MatrixHandle C = allocate_matrix(m, A.rows(), B.cols(), 0.0, A.layout(), A.block());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < B.cols(); ++j) {
      const Operand c = C.at(i, j);
      m.store(c.index());
      m.value(c) = 0.0;
      for (std::size_t k = 0; k < A.cols(); ++k) {
        const Operand a = A.at(i, k);
        const Operand b = B.at(k, j);
        m.touch(a.index());
        m.touch(b.index());
        m.touch(c.index());
        m.flop(label(i, j, k, KernelTag::matmul), {a, b, c}, c, true);
        m.value(c) += m.value(a) * m.value(b);
      }
    }
  }
  m.flush();
  return C;
}

void matmul_blocked_into(DamMachine& m, const MatrixHandle& A, const MatrixHandle& B,
                         const MatrixHandle& C, std::size_t b, BlockedOptions options) {
  require_explicit(m, "matmul_blocked");
  if (A.cols() != B.rows() || C.rows() != A.rows() || C.cols() != B.cols()) {
    throw Error(Errc::dimension_mismatch, "matmul_blocked: operand shapes do not conform");
  }
  if (b < 1) throw Error(Errc::invalid_params, "matmul_blocked: block size must be >= 1");
  const std::uint64_t extra = options.discard_extra_products ? 1 : 0;
  require_tiles(3 * std::uint64_t{b} * b + extra, m.capacity(), "matmul_blocked");

  const bool minplus = options.semiring == Semiring::min_plus;
  const std::size_t n = A.rows(), r = A.cols(), q = B.cols();
  for (std::size_t I = 0; I < blocks(n, b); ++I) {
    for (std::size_t J = 0; J < blocks(q, b); ++J) {
      const Rect rc = tile(I, J, b, b, n, q);
      read_tile(m, C, rc);
      for (std::size_t K = 0; K < blocks(r, b); ++K) {
        const Rect ra = tile(I, K, b, b, n, r);
        const Rect rb = tile(K, J, b, b, r, q);
        const std::vector<Address> la = read_tile(m, A, ra);
        const std::vector<Address> lb = read_tile(m, B, rb);
        for (std::size_t i = ra.r0; i < ra.r1; ++i) {
          for (std::size_t j = rb.c0; j < rb.c1; ++j) {
            const Operand c = C.at(i, j);
            for (std::size_t k = ra.c0; k < ra.c1; ++k) {
              const Operand a = A.at(i, k);
              const Operand bb = B.at(k, j);
              m.flop(label(i, j, k, options.tag), {a, bb, c}, c, true);
              if (minplus) {
                m.value(c) = std::min(m.value(c), m.value(a) + m.value(bb));
              } else {
                m.value(c) += m.value(a) * m.value(bb);
              }
            }
            if (extra && K == 0) {
              // an extra product per C entry, never stored
              const Operand a = A.at(i, ra.c0);
              const Operand bb = B.at(ra.c0, j);
              ScratchBlock s(m, 1);
              m.flop(label(i, j, ra.c0, KernelTag::aux), {a, bb}, s[0], false);
              m.value(s[0]) = m.value(a) * m.value(bb);
            }
          }
        }
        evict_addresses(m, la);
        evict_addresses(m, lb);
      }
      write_tile(m, C, rc, Part::full, true);
    }
  }
}

MatrixHandle matmul_blocked(DamMachine& m, const MatrixHandle& A, const MatrixHandle& B,
                            std::size_t b, BlockedOptions options) {
  const double zero =
      options.semiring == Semiring::min_plus ? std::numeric_limits<double>::infinity() : 0.0;
  const MatrixHandle C = allocate_matrix(m, A.rows(), B.cols(), zero, A.layout(), A.block());
  matmul_blocked_into(m, A, B, C, b, options);
  return C;
}

MatrixHandle minplus_matmul(DamMachine& m, const MatrixHandle& A, const MatrixHandle& B,
                            std::size_t b) {
  return matmul_blocked(m, A, B, b, BlockedOptions{Semiring::min_plus, KernelTag::minplus, false});
}

CsrMatrix sparse_product_structure(const CsrMatrix& A, const CsrMatrix& B) {
  if (A.cols != B.rows) throw Error(Errc::dimension_mismatch, "sparse product: A.cols != B.rows");
  CsrMatrix C;
  C.rows = A.rows;
  C.cols = B.cols;
  C.row_ptr.push_back(0);
  std::vector<std::size_t> mark(B.cols, std::size_t(-1));
  std::vector<std::size_t> row;
  for (std::size_t i = 0; i < A.rows; ++i) {
    row.clear();
    for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
      const std::size_t k = A.col_idx[p];
      for (std::size_t q = B.row_ptr[k]; q < B.row_ptr[k + 1]; ++q) {
        const std::size_t j = B.col_idx[q];
        if (mark[j] != i) {
          mark[j] = i;
          row.push_back(j);
        }
      }
    }
    std::sort(row.begin(), row.end());
    C.col_idx.insert(C.col_idx.end(), row.begin(), row.end());
    C.row_ptr.push_back(C.col_idx.size());
  }
  C.values.assign(C.nnz(), 0.0);
  return C;
}

CsrHandle matmul_sparse(DamMachine& m, const CsrHandle& Ah, const CsrHandle& Bh) {
  require_explicit(m, "matmul_sparse");
  const CsrMatrix& A = Ah.structure;
  const CsrMatrix& B = Bh.structure;
  if (A.cols != B.rows) throw Error(Errc::dimension_mismatch, "matmul_sparse: A.cols != B.rows");
  if (m.capacity() < 3) throw Error(Errc::capacity_too_small, "matmul_sparse needs M >= 3");
  if (Ah.base == Bh.base && A.nnz() > 0) {
    throw Error(Errc::invalid_params, "matmul_sparse: A and B must be distinct stored copies");
  }
  const CsrHandle Ch = store_csr(m, sparse_product_structure(A, B));
  const CsrMatrix& C = Ch.structure;

  const std::uint64_t chunk_cap = std::max<std::uint64_t>(1, (m.capacity() - 1) / 2);
  std::vector<std::size_t> where(B.cols, 0);
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t s = C.row_ptr[i]; s < C.row_ptr[i + 1]; s += chunk_cap) {
      const std::size_t e = std::min<std::size_t>(C.row_ptr[i + 1], s + chunk_cap);
      const std::size_t col_lo = C.col_idx[s];
      const std::size_t col_hi = C.col_idx[e - 1];
      for (std::size_t p = s; p < e; ++p) where[C.col_idx[p]] = p;
      m.claim(Ch.address(s), e - s);
      const std::uint64_t piece_cap = m.capacity() - 1 - (e - s);
      for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
        const std::size_t k = A.col_idx[p];
        const auto first = B.col_idx.begin();
        const std::size_t q0 = std::lower_bound(first + B.row_ptr[k], first + B.row_ptr[k + 1], col_lo) - first;
        const std::size_t q1 = std::upper_bound(first + q0, first + B.row_ptr[k + 1], col_hi) - first;
        if (q0 == q1) continue;
        const Operand a = Operand::slow(Ah.address(p));
        m.read_block(a.index(), 1);
        for (std::size_t piece = q0; piece < q1; piece += piece_cap) {
          const std::size_t pend = std::min<std::size_t>(q1, piece + piece_cap);
          m.read_block(Bh.address(piece), pend - piece);
          for (std::size_t q = piece; q < pend; ++q) {
            const std::size_t j = B.col_idx[q];
            const Operand bb = Operand::slow(Bh.address(q));
            const Operand c = Operand::slow(Ch.address(where[j]));
            m.flop(label(i, j, k, KernelTag::sparse), {a, bb, c}, c, true);
            m.value(c) += m.value(a) * m.value(bb);
          }
          m.evict(Bh.address(piece), pend - piece);
        }
        m.evict(a.index(), 1);
      }
      m.write_block(Ch.address(s), e - s, true);
    }
  }
  return Ch;
}

}  // namespace iooracle::kernels
