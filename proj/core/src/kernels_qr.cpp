#include <cmath>
#include <stdexcept>

#include "iooracle/kernels.hpp"
#include "kernel_util.hpp"

namespace iooracle::kernels {

using namespace detail;

std::size_t qr_default_panel(std::uint64_t M) {
  return std::max<std::size_t>(1, auto_block(M) / 2);
}

namespace {

class QrKernel {
 public:
  QrKernel(DamMachine& m, const MatrixHandle& A, std::size_t p)
      : m_(m), A_(A), p_(p), rows_(A.rows()), cols_(A.cols()),
        tau_(allocate_matrix(m, 1, A.cols(), 0.0)) {}

  MatrixHandle run() {
    const std::uint64_t M = m_.capacity();
    const std::uint64_t p = p_;
    // fast-memory budgets of the three streaming phases, in rows per chunk
    if (M < 2 * p + 4 + p || M < 2 * p * p + 2 * p + p || M < 3 * p * p + 2 * p) {
      throw Error(Errc::capacity_too_small,
                  "qr: M=" + std::to_string(M) + " too small for panel " + std::to_string(p));
    }
    reflector_rows_ = (M - 2 * p - 4) / p;
    gram_rows_ = (M - 2 * p * p - 2 * p) / p;
    update_rows_ = (M - 3 * p * p) / (2 * p);

    for (std::size_t k0 = 0; k0 < cols_; k0 += p_) {
      const std::size_t k1 = std::min(cols_, k0 + p_);
      for (std::size_t j = k0; j < k1; ++j) reflector(j, k1);
      if (k1 < cols_) trailing(k0, k1);
    }
    return tau_;
  }

 private:
  static constexpr KernelTag tag = KernelTag::qr;

  // g-op target: zeros below the diagonal of finished columns are never refilled
  void guard(std::size_t i, std::size_t c) const {
    if (c < finished_ && i > c) {
      throw std::logic_error("qr: update targets zeroed entry (" + std::to_string(i) + "," +
                             std::to_string(c) + ")");
    }
  }

  void reflector(std::size_t j, std::size_t k1) {
    const Rect row{j, j + 1, j, k1};
    read_tile(m_, A_, row);
    ScratchBlock s(m_, 3);  // sum of squares, tau, scale
    const Operand ss = s[0], tau = s[1], scale = s[2];
    m_.value(ss) = 0.0;
    for (std::size_t i0 = j + 1; i0 < rows_; i0 += reflector_rows_) {
      const Rect col{i0, std::min(rows_, i0 + reflector_rows_), j, j + 1};
      const auto loaded = read_tile(m_, A_, col);
      for (std::size_t i = col.r0; i < col.r1; ++i) {
        const Operand a = A_.at(i, j);
        m_.flop(label(i, j, j, tag), {a, ss}, ss, false);
        m_.value(ss) += m_.value(a) * m_.value(a);
      }
      evict_addresses(m_, loaded);
    }

    const Operand ajj = A_.at(j, j);
    const double alpha = m_.value(ajj);
    const double sum = m_.value(ss);
    m_.flop(label(j, j, j, tag), {ajj, ss}, tau, false);
    if (sum == 0.0) {
      m_.value(tau) = 0.0;
    } else {
      const double beta = -std::copysign(std::sqrt(alpha * alpha + sum), alpha);
      m_.value(tau) = (beta - alpha) / beta;
      m_.flop(label(j, j, j, tag), {ajj, ss}, scale, false);
      m_.value(scale) = 1.0 / (alpha - beta);
      m_.flop(label(j, j, j, tag), {ajj, ss}, ajj, false);
      m_.value(ajj) = beta;
    }
    const Rect tr{0, 1, j, j + 1};
    claim_tile(m_, tau_, tr);
    m_.flop(label(j, j, j, tag), {tau}, tau_.at(0, j), false);
    m_.value(tau_.at(0, j)) = m_.value(tau);
    write_tile(m_, tau_, tr, Part::full, true);

    if (sum != 0.0) {
      const std::size_t width = k1 - j - 1;
      if (width > 0) {
        ScratchBlock w(m_, width);
        for (std::size_t c = 0; c < width; ++c) {
          m_.flop(label(j, j + 1 + c, j, tag), {A_.at(j, j + 1 + c)}, w[c], false);
          m_.value(w[c]) = m_.value(A_.at(j, j + 1 + c));
        }
        // scale v below the diagonal and accumulate w = v^T A
        for (std::size_t i0 = j + 1; i0 < rows_; i0 += reflector_rows_) {
          const Rect chunk{i0, std::min(rows_, i0 + reflector_rows_), j, k1};
          const auto loaded = read_tile(m_, A_, chunk);
          for (std::size_t i = chunk.r0; i < chunk.r1; ++i) {
            const Operand v = A_.at(i, j);
            m_.flop(label(i, j, j, tag), {v, scale}, v, false);
            m_.value(v) *= m_.value(scale);
            for (std::size_t c = 0; c < width; ++c) {
              const Operand a = A_.at(i, j + 1 + c);
              m_.flop(label(i, j + 1 + c, j, tag), {v, a, w[c]}, w[c], false);
              m_.value(w[c]) += m_.value(v) * m_.value(a);
            }
          }
          write_tile(m_, A_, Rect{chunk.r0, chunk.r1, j, j + 1}, Part::full, false);
          evict_addresses(m_, loaded);
        }
        for (std::size_t c = 0; c < width; ++c) {
          m_.flop(label(j, j + 1 + c, j, tag), {w[c], tau}, w[c], false);
          m_.value(w[c]) *= m_.value(tau);
          const Operand a = A_.at(j, j + 1 + c);
          m_.flop(label(j, j + 1 + c, j, tag), {w[c], a}, a, false);
          m_.value(a) -= m_.value(w[c]);
        }
        finished_ = j;
        for (std::size_t i0 = j + 1; i0 < rows_; i0 += reflector_rows_) {
          const Rect chunk{i0, std::min(rows_, i0 + reflector_rows_), j, k1};
          const auto loaded = read_tile(m_, A_, chunk);
          for (std::size_t i = chunk.r0; i < chunk.r1; ++i) {
            const Operand v = A_.at(i, j);
            if (m_.value(v) == 0.0) continue;
            for (std::size_t c = 0; c < width; ++c) {
              const Operand a = A_.at(i, j + 1 + c);
              guard(i, j + 1 + c);
              m_.flop(label(i, j + 1 + c, j, tag), {v, w[c], a}, a, true);
              m_.value(a) -= m_.value(v) * m_.value(w[c]);
            }
          }
          write_tile(m_, A_, Rect{chunk.r0, chunk.r1, j + 1, k1}, Part::full, false);
          evict_addresses(m_, loaded);
        }
      } else {
        for (std::size_t i0 = j + 1; i0 < rows_; i0 += reflector_rows_) {
          const Rect col{i0, std::min(rows_, i0 + reflector_rows_), j, j + 1};
          read_tile(m_, A_, col);
          for (std::size_t i = col.r0; i < col.r1; ++i) {
            const Operand v = A_.at(i, j);
            m_.flop(label(i, j, j, tag), {v, scale}, v, false);
            m_.value(v) *= m_.value(scale);
          }
          write_tile(m_, A_, col, Part::full, true);
        }
      }
    }
    finished_ = j + 1;
    write_tile(m_, A_, row, Part::full, true);
  }

  // v_a(i) for panel column a (global column k0 + a): 1 on the diagonal, stored below
  void trailing(std::size_t k0, std::size_t k1) {
    const std::size_t pw = k1 - k0;
    ScratchBlock T(m_, pw * pw);
    form_t(k0, k1, T);
    for (std::size_t c0 = k1; c0 < cols_; c0 += p_) {
      const std::size_t c1 = std::min(cols_, c0 + p_);
      const std::size_t cw = c1 - c0;
      ScratchBlock Z(m_, pw * cw);
      {
        ScratchBlock Y(m_, pw * cw);
        for (std::size_t e = 0; e < pw * cw; ++e) m_.value(Y[e]) = 0.0;
        for (std::size_t i0 = k0; i0 < rows_; i0 += update_rows_) {
          const std::size_t i1 = std::min(rows_, i0 + update_rows_);
          const auto lv = read_tile(m_, A_, Rect{i0, i1, k0, k1}, Part::strict_lower);
          const auto la = read_tile(m_, A_, Rect{i0, i1, c0, c1});
          for (std::size_t i = i0; i < i1; ++i)
            for (std::size_t a = 0; a < pw && k0 + a <= i; ++a)
              for (std::size_t q = 0; q < cw; ++q) {
                const Operand x = A_.at(i, c0 + q), y = Y[a * cw + q];
                if (k0 + a == i) {
                  m_.flop(label(i, c0 + q, i, tag), {x, y}, y, false);
                  m_.value(y) += m_.value(x);
                } else {
                  const Operand v = A_.at(i, k0 + a);
                  m_.flop(label(i, c0 + q, k0 + a, tag), {v, x, y}, y, false);
                  m_.value(y) += m_.value(v) * m_.value(x);
                }
              }
          evict_addresses(m_, lv);
          evict_addresses(m_, la);
        }
        // Z = T^T Y
        for (std::size_t a = 0; a < pw; ++a)
          for (std::size_t q = 0; q < cw; ++q) {
            const Operand z = Z[a * cw + q];
            m_.value(z) = 0.0;
            for (std::size_t e = 0; e <= a; ++e) {
              m_.flop(label(k0 + a, c0 + q, k0 + e, tag), {T[e * pw + a], Y[e * cw + q], z}, z, false);
              m_.value(z) += m_.value(T[e * pw + a]) * m_.value(Y[e * cw + q]);
            }
          }
      }
      for (std::size_t i0 = k0; i0 < rows_; i0 += update_rows_) {
        const std::size_t i1 = std::min(rows_, i0 + update_rows_);
        const Rect ra{i0, i1, c0, c1};
        const auto lv = read_tile(m_, A_, Rect{i0, i1, k0, k1}, Part::strict_lower);
        read_tile(m_, A_, ra);
        for (std::size_t i = i0; i < i1; ++i)
          for (std::size_t a = 0; a < pw && k0 + a <= i; ++a) {
            if (k0 + a == i) {
              for (std::size_t q = 0; q < cw; ++q) {
                const Operand x = A_.at(i, c0 + q), z = Z[a * cw + q];
                m_.flop(label(i, c0 + q, i, tag), {z, x}, x, false);
                m_.value(x) -= m_.value(z);
              }
              continue;
            }
            const Operand v = A_.at(i, k0 + a);
            if (m_.value(v) == 0.0) continue;
            for (std::size_t q = 0; q < cw; ++q) {
              const Operand x = A_.at(i, c0 + q), z = Z[a * cw + q];
              guard(i, c0 + q);
              m_.flop(label(i, c0 + q, k0 + a, tag), {v, z, x}, x, true);
              m_.value(x) -= m_.value(v) * m_.value(z);
            }
          }
        write_tile(m_, A_, ra, Part::full, true);
        evict_addresses(m_, lv);
      }
    }
  }

  // T upper triangular with H_k0 ... H_k1-1 = I - V T V^T
  void form_t(std::size_t k0, std::size_t k1, const ScratchBlock& T) {
    const std::size_t pw = k1 - k0;
    ScratchBlock S(m_, pw * pw);  // S(a, c) = v_a^T v_c for a < c
    for (std::size_t e = 0; e < pw * pw; ++e) {
      m_.value(S[e]) = 0.0;
      m_.value(T[e]) = 0.0;
    }
    for (std::size_t i0 = k0 + 1; i0 < rows_ && pw > 1; i0 += gram_rows_) {
      const std::size_t i1 = std::min(rows_, i0 + gram_rows_);
      const auto lv = read_tile(m_, A_, Rect{i0, i1, k0, k1}, Part::strict_lower);
      for (std::size_t i = i0; i < i1; ++i)
        for (std::size_t c = 1; c < pw && k0 + c <= i; ++c)
          for (std::size_t a = 0; a < c; ++a) {
            const Operand s = S[a * pw + c], va = A_.at(i, k0 + a);
            if (k0 + c == i) {
              m_.flop(label(k0 + a, k0 + c, i, tag), {va, s}, s, false);
              m_.value(s) += m_.value(va);
            } else {
              const Operand vc = A_.at(i, k0 + c);
              m_.flop(label(k0 + a, k0 + c, i, tag), {va, vc, s}, s, false);
              m_.value(s) += m_.value(va) * m_.value(vc);
            }
          }
      evict_addresses(m_, lv);
    }
    const Rect tr{0, 1, k0, k1};
    read_tile(m_, tau_, tr);
    ScratchBlock tmp(m_, pw);
    for (std::size_t c = 0; c < pw; ++c) {
      const Operand tc = tau_.at(0, k0 + c);
      m_.flop(label(k0 + c, k0 + c, k0 + c, tag), {tc}, T[c * pw + c], false);
      m_.value(T[c * pw + c]) = m_.value(tc);
      for (std::size_t a = 0; a < c; ++a) {
        m_.value(tmp[a]) = 0.0;
        for (std::size_t e = a; e < c; ++e) {
          m_.flop(label(k0 + a, k0 + c, k0 + e, tag), {T[a * pw + e], S[e * pw + c], tmp[a]}, tmp[a],
                  false);
          m_.value(tmp[a]) += m_.value(T[a * pw + e]) * m_.value(S[e * pw + c]);
        }
      }
      for (std::size_t a = 0; a < c; ++a) {
        m_.flop(label(k0 + a, k0 + c, k0 + c, tag), {tmp[a], tc}, T[a * pw + c], false);
        m_.value(T[a * pw + c]) = -m_.value(tc) * m_.value(tmp[a]);
      }
    }
    evict_tile(m_, tau_, tr);
  }

  DamMachine& m_;
  const MatrixHandle& A_;
  std::size_t p_;
  std::size_t rows_;
  std::size_t cols_;
  MatrixHandle tau_;
  std::size_t finished_ = 0;
  std::size_t reflector_rows_ = 1;
  std::size_t gram_rows_ = 1;
  std::size_t update_rows_ = 1;
};

}  // namespace

MatrixHandle qr_householder(DamMachine& m, const MatrixHandle& A, std::size_t panel) {
  require_explicit(m, "qr_householder");
  if (A.rows() < A.cols()) throw Error(Errc::dimension_mismatch, "qr: needs rows >= cols");
  if (panel < 1) throw Error(Errc::invalid_params, "qr: panel width must be >= 1");
  return QrKernel(m, A, panel).run();
}

}  // namespace iooracle::kernels
