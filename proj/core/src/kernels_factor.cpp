#include <cmath>

#include "iooracle/kernels.hpp"
#include "kernel_util.hpp"

namespace iooracle::kernels {

using namespace detail;

void trsm(DamMachine& m, const MatrixHandle& A, const MatrixHandle& X, std::size_t b) {
  require_explicit(m, "trsm");
  require_square(A, "trsm");
  if (X.rows() != A.rows()) throw Error(Errc::dimension_mismatch, "trsm: B must have n rows");
  if (b < 1) throw Error(Errc::invalid_params, "trsm: block size must be >= 1");
  require_tiles(3 * std::uint64_t{b} * b, m.capacity(), "trsm");
  const std::size_t n = A.rows(), q = X.cols();
  const std::size_t nb = blocks(n, b);
  const KernelTag tag = KernelTag::trsm;

  for (std::size_t J = 0; J < blocks(q, b); ++J) {
    for (std::size_t I = nb; I-- > 0;) {
      const Rect rx = tile(I, J, b, b, n, q);
      read_tile(m, X, rx);
      for (std::size_t K = I + 1; K < nb; ++K) {
        const Rect ra = tile(I, K, b, b, n, n);
        const Rect rk = tile(K, J, b, b, n, q);
        const auto la = read_tile(m, A, ra);
        const auto lk = read_tile(m, X, rk);
        for (std::size_t i = ra.r0; i < ra.r1; ++i)
          for (std::size_t k = ra.c0; k < ra.c1; ++k) {
            const Operand a = A.at(i, k);
            if (m.value(a) == 0.0) continue;
            for (std::size_t j = rx.c0; j < rx.c1; ++j) {
              const Operand x = X.at(i, j), xk = X.at(k, j);
              m.flop(label(i, j, k, tag), {a, xk, x}, x, true);
              m.value(x) -= m.value(a) * m.value(xk);
            }
          }
        evict_addresses(m, la);
        evict_addresses(m, lk);
      }
      const Rect rd = tile(I, I, b, b, n, n);
      const auto ld = read_tile(m, A, rd, Part::upper);
      for (std::size_t i = rd.r1; i-- > rd.r0;) {
        for (std::size_t k = i + 1; k < rd.c1; ++k) {
          const Operand a = A.at(i, k);
          if (m.value(a) == 0.0) continue;
          for (std::size_t j = rx.c0; j < rx.c1; ++j) {
            const Operand x = X.at(i, j), xk = X.at(k, j);
            m.flop(label(i, j, k, tag), {a, xk, x}, x, true);
            m.value(x) -= m.value(a) * m.value(xk);
          }
        }
        const Operand d = A.at(i, i);
        if (m.value(d) == 0.0) {
          throw Error(Errc::singular_diagonal, "trsm: A(" + std::to_string(i) + "," +
                                                   std::to_string(i) + ") is zero");
        }
        for (std::size_t j = rx.c0; j < rx.c1; ++j) {
          const Operand x = X.at(i, j);
          m.flop(label(i, j, i, tag), {d, x}, x, false);
          m.value(x) /= m.value(d);
        }
      }
      evict_addresses(m, ld);
      write_tile(m, X, rx, Part::full, true);
    }
  }
}

void lu_blocked(DamMachine& m, const MatrixHandle& A, std::size_t b) {
  require_explicit(m, "lu_blocked");
  require_square(A, "lu_blocked");
  if (b < 1) throw Error(Errc::invalid_params, "lu_blocked: block size must be >= 1");
  require_tiles(3 * std::uint64_t{b} * b, m.capacity(), "lu_blocked");
  const std::size_t n = A.rows(), nb = blocks(n, b);
  const KernelTag tag = KernelTag::lu;

  // a_ij -= l_ik * u_kj, skipped when l_ik is exactly zero
  auto update = [&](std::size_t i, std::size_t j, std::size_t k) {
    const Operand l = A.at(i, k), u = A.at(k, j), a = A.at(i, j);
    m.flop(label(i, j, k, tag), {l, u, a}, a, true);
    m.value(a) -= m.value(l) * m.value(u);
  };
  auto divide = [&](std::size_t i, std::size_t k) {
    const Operand l = A.at(i, k), p = A.at(k, k);
    if (m.value(p) == 0.0) {
      throw Error(Errc::zero_pivot, "lu: zero pivot at " + std::to_string(k));
    }
    m.flop(label(i, k, k, tag), {l, p}, l, false);
    m.value(l) /= m.value(p);
  };

  for (std::size_t K = 0; K < nb; ++K) {
    const Rect rkk = tile(A, K, K, b);
    read_tile(m, A, rkk);
    for (std::size_t k = rkk.r0; k < rkk.r1; ++k) {
      for (std::size_t i = k + 1; i < rkk.r1; ++i) {
        divide(i, k);
        if (m.value(A.at(i, k)) == 0.0) continue;
        for (std::size_t j = k + 1; j < rkk.c1; ++j) update(i, j, k);
      }
    }
    if (rkk.r1 == n && m.value(A.at(n - 1, n - 1)) == 0.0) {
      throw Error(Errc::zero_pivot, "lu: zero pivot at " + std::to_string(n - 1));
    }
    for (std::size_t J = K + 1; J < nb; ++J) {
      const Rect r = tile(A, K, J, b);
      read_tile(m, A, r);
      for (std::size_t k = rkk.r0; k < rkk.r1; ++k)
        for (std::size_t i = k + 1; i < rkk.r1; ++i) {
          if (m.value(A.at(i, k)) == 0.0) continue;
          for (std::size_t j = r.c0; j < r.c1; ++j) update(i, j, k);
        }
      write_tile(m, A, r, Part::full, true);
    }
    for (std::size_t I = K + 1; I < nb; ++I) {
      const Rect r = tile(A, I, K, b);
      read_tile(m, A, r);
      for (std::size_t i = r.r0; i < r.r1; ++i)
        for (std::size_t k = rkk.c0; k < rkk.c1; ++k) {
          divide(i, k);
          if (m.value(A.at(i, k)) == 0.0) continue;
          for (std::size_t j = k + 1; j < rkk.c1; ++j) update(i, j, k);
        }
      write_tile(m, A, r, Part::full, true);
    }
    write_tile(m, A, rkk, Part::full, true);

    for (std::size_t I = K + 1; I < nb; ++I) {
      const Rect rl = tile(A, I, K, b);
      read_tile(m, A, rl);
      for (std::size_t J = K + 1; J < nb; ++J) {
        const Rect ru = tile(A, K, J, b);
        const Rect ra = tile(A, I, J, b);
        read_tile(m, A, ra);
        const auto lu = read_tile(m, A, ru);
        for (std::size_t i = ra.r0; i < ra.r1; ++i)
          for (std::size_t k = rl.c0; k < rl.c1; ++k) {
            if (m.value(A.at(i, k)) == 0.0) continue;
            for (std::size_t j = ra.c0; j < ra.c1; ++j) update(i, j, k);
          }
        evict_addresses(m, lu);
        write_tile(m, A, ra, Part::full, true);
      }
      evict_tile(m, A, rl);
    }
  }
}

void cholesky_blocked(DamMachine& m, const MatrixHandle& A, std::size_t b) {
  require_explicit(m, "cholesky_blocked");
  require_square(A, "cholesky_blocked");
  if (b < 1) throw Error(Errc::invalid_params, "cholesky_blocked: block size must be >= 1");
  require_tiles(3 * std::uint64_t{b} * b, m.capacity(), "cholesky_blocked");
  const std::size_t n = A.rows(), nb = blocks(n, b);
  const KernelTag tag = KernelTag::cholesky;

  auto update = [&](std::size_t i, std::size_t j, std::size_t k) {
    const Operand li = A.at(i, k), lj = A.at(j, k), a = A.at(i, j);
    m.flop(label(i, j, k, tag), {li, lj, a}, a, true);
    m.value(a) -= m.value(li) * m.value(lj);
  };
  auto divide = [&](std::size_t i, std::size_t k) {
    const Operand l = A.at(i, k), d = A.at(k, k);
    m.flop(label(i, k, k, tag), {l, d}, l, false);
    m.value(l) /= m.value(d);
  };

  for (std::size_t K = 0; K < nb; ++K) {
    const Rect rkk = tile(A, K, K, b);
    read_tile(m, A, rkk, Part::lower);
    for (std::size_t k = rkk.r0; k < rkk.r1; ++k) {
      const Operand d = A.at(k, k);
      if (!(m.value(d) > 0.0)) {
        throw Error(Errc::not_spd, "cholesky: non-positive pivot at " + std::to_string(k));
      }
      m.flop(label(k, k, k, tag), {d}, d, false);
      m.value(d) = std::sqrt(m.value(d));
      for (std::size_t i = k + 1; i < rkk.r1; ++i) divide(i, k);
      for (std::size_t i = k + 1; i < rkk.r1; ++i) {
        if (m.value(A.at(i, k)) == 0.0) continue;
        for (std::size_t j = k + 1; j <= i; ++j) update(i, j, k);
      }
    }
    for (std::size_t I = K + 1; I < nb; ++I) {
      const Rect r = tile(A, I, K, b);
      read_tile(m, A, r);
      for (std::size_t i = r.r0; i < r.r1; ++i)
        for (std::size_t k = rkk.c0; k < rkk.c1; ++k) {
          divide(i, k);
          if (m.value(A.at(i, k)) == 0.0) continue;
          for (std::size_t j = k + 1; j < rkk.c1; ++j) update(i, j, k);
        }
      write_tile(m, A, r, Part::full, true);
    }
    write_tile(m, A, rkk, Part::lower, true);

    for (std::size_t J = K + 1; J < nb; ++J) {
      const Rect rj = tile(A, J, K, b);
      read_tile(m, A, rj);
      for (std::size_t I = J; I < nb; ++I) {
        const Rect ri = tile(A, I, K, b);
        const Rect ra = tile(A, I, J, b);
        const Part part = I == J ? Part::lower : Part::full;
        const auto li = read_tile(m, A, ri);
        read_tile(m, A, ra, part);
        for (std::size_t i = ra.r0; i < ra.r1; ++i)
          for (std::size_t k = ri.c0; k < ri.c1; ++k) {
            if (m.value(A.at(i, k)) == 0.0) continue;
            const std::size_t jend = I == J ? i + 1 : ra.c1;
            for (std::size_t j = ra.c0; j < jend; ++j) update(i, j, k);
          }
        write_tile(m, A, ra, part, true);
        evict_addresses(m, li);
      }
      evict_tile(m, A, rj);
    }
  }
}

std::size_t ldlt_block(std::uint64_t M) {
  std::size_t b = 0;
  while (3 * (b + 1) * (b + 1) + (b + 1) <= M) ++b;
  return b;
}

MatrixHandle ldlt(DamMachine& m, const MatrixHandle& A, std::size_t b) {
  require_explicit(m, "ldlt");
  require_square(A, "ldlt");
  if (b < 1) throw Error(Errc::invalid_params, "ldlt: block size must be >= 1");
  require_tiles(3 * std::uint64_t{b} * b + b, m.capacity(), "ldlt");
  const std::size_t n = A.rows(), nb = blocks(n, b);
  const KernelTag tag = KernelTag::ldlt;
  const MatrixHandle D = allocate_matrix(m, 1, n, 0.0);

  // a_ij -= l_ik d_k l_jk; the g-op is l_ik * l_jk
  auto update = [&](std::size_t i, std::size_t j, std::size_t k) {
    const Operand li = A.at(i, k), lj = A.at(j, k), d = D.at(0, k), a = A.at(i, j);
    m.flop(label(i, j, k, tag), {li, lj, d, a}, a, true);
    m.value(a) -= m.value(li) * m.value(d) * m.value(lj);
  };
  auto divide = [&](std::size_t i, std::size_t k) {
    const Operand l = A.at(i, k), d = D.at(0, k);
    m.flop(label(i, k, k, tag), {l, d}, l, false);
    m.value(l) /= m.value(d);
  };

  for (std::size_t K = 0; K < nb; ++K) {
    const Rect rkk = tile(A, K, K, b);
    const Rect rd{0, 1, rkk.c0, rkk.c1};
    read_tile(m, A, rkk, Part::lower);
    claim_tile(m, D, rd);
    for (std::size_t k = rkk.r0; k < rkk.r1; ++k) {
      const Operand a = A.at(k, k), d = D.at(0, k);
      m.flop(label(k, k, k, tag), {a}, d, false);
      m.value(d) = m.value(a);
      if (m.value(d) == 0.0) throw Error(Errc::zero_pivot, "ldlt: zero pivot at " + std::to_string(k));
      for (std::size_t i = k + 1; i < rkk.r1; ++i) divide(i, k);
      for (std::size_t i = k + 1; i < rkk.r1; ++i) {
        if (m.value(A.at(i, k)) == 0.0) continue;
        for (std::size_t j = k + 1; j <= i; ++j) update(i, j, k);
      }
    }
    write_tile(m, D, rd, Part::full, false);
    for (std::size_t I = K + 1; I < nb; ++I) {
      const Rect r = tile(A, I, K, b);
      read_tile(m, A, r);
      for (std::size_t i = r.r0; i < r.r1; ++i)
        for (std::size_t k = rkk.c0; k < rkk.c1; ++k) {
          divide(i, k);
          if (m.value(A.at(i, k)) == 0.0) continue;
          for (std::size_t j = k + 1; j < rkk.c1; ++j) update(i, j, k);
        }
      write_tile(m, A, r, Part::full, true);
    }
    write_tile(m, A, rkk, Part::lower, true);

    for (std::size_t J = K + 1; J < nb; ++J) {
      const Rect rj = tile(A, J, K, b);
      read_tile(m, A, rj);
      for (std::size_t I = J; I < nb; ++I) {
        const Rect ri = tile(A, I, K, b);
        const Rect ra = tile(A, I, J, b);
        const Part part = I == J ? Part::lower : Part::full;
        const auto li = read_tile(m, A, ri);
        read_tile(m, A, ra, part);
        for (std::size_t i = ra.r0; i < ra.r1; ++i)
          for (std::size_t k = ri.c0; k < ri.c1; ++k) {
            if (m.value(A.at(i, k)) == 0.0) continue;
            const std::size_t jend = I == J ? i + 1 : ra.c1;
            for (std::size_t j = ra.c0; j < jend; ++j) update(i, j, k);
          }
        write_tile(m, A, ra, part, true);
        evict_addresses(m, li);
      }
      evict_tile(m, A, rj);
    }
    evict_tile(m, D, rd);
  }
  return D;
}

}  // namespace iooracle::kernels
