#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "iooracle/kernels.hpp"
#include "kernel_util.hpp"

namespace iooracle::kernels {

using namespace detail;

namespace {

double semiring_zero(Semiring s) {
  return s == Semiring::min_plus ? std::numeric_limits<double>::infinity() : 0.0;
}

MatrixHandle powers_phased(DamMachine& m, const MatrixHandle& A, std::size_t t, std::size_t b,
                           Semiring semiring) {
  const BlockedOptions opts{semiring,
                            semiring == Semiring::min_plus ? KernelTag::minplus : KernelTag::powers,
                            false};
  MatrixHandle X = A;
  for (std::size_t s = 2; s <= t; ++s) X = matmul_blocked(m, X, A, b, opts);
  return X;
}

MatrixHandle powers_fused(DamMachine& m, const MatrixHandle& A, std::size_t t, Semiring semiring) {
  const std::size_t n = A.rows();
  const FusedShape shape = fused_powers_shape(n, m.capacity());
  const std::size_t w = shape.tile;
  const bool minplus = semiring == Semiring::min_plus;
  const KernelTag tag = minplus ? KernelTag::minplus : KernelTag::powers;
  const double zero = semiring_zero(semiring);
  const MatrixHandle C = allocate_matrix(m, n, n, zero, A.layout(), A.block());

  for (std::size_t p0 = 0; p0 < n; p0 += shape.rows) {
    const std::size_t p1 = std::min(n, p0 + shape.rows);
    const std::size_t h = p1 - p0;
    const Rect panel{p0, p1, 0, n};
    // stage 1 is the panel of A itself
    const std::vector<Address> pinned = read_tile(m, A, panel);
    std::optional<ScratchBlock> cur;
    bool cur_is_a = true;
    for (std::size_t s = 2; s <= t; ++s) {
      const bool last = s == t;
      std::optional<ScratchBlock> next;
      if (last) {
        claim_tile(m, C, panel);
        for (std::size_t i = p0; i < p1; ++i)
          for (std::size_t j = 0; j < n; ++j) m.value(C.at(i, j)) = zero;
      } else {
        next.emplace(m, h * n);
        for (std::size_t e = 0; e < h * n; ++e) m.value((*next)[e]) = zero;
      }
      auto src = [&](std::size_t i, std::size_t k) {
        return cur_is_a ? A.at(i, k) : (*cur)[(i - p0) * n + k];
      };
      auto dst = [&](std::size_t i, std::size_t j) {
        return last ? C.at(i, j) : (*next)[(i - p0) * n + j];
      };
      for (std::size_t J = 0; J < blocks(n, w); ++J)
        for (std::size_t K = 0; K < blocks(n, w); ++K) {
          const Rect ra = tile(K, J, w, w, n, n);
          const auto loaded = read_tile(m, A, ra);
          for (std::size_t i = p0; i < p1; ++i)
            for (std::size_t j = ra.c0; j < ra.c1; ++j) {
              const Operand c = dst(i, j);
              for (std::size_t k = ra.r0; k < ra.r1; ++k) {
                const Operand x = src(i, k), a = A.at(k, j);
                m.flop(label(i, j, k, tag), {x, a, c}, c, true);
                if (minplus) {
                  m.value(c) = std::min(m.value(c), m.value(x) + m.value(a));
                } else {
                  m.value(c) += m.value(x) * m.value(a);
                }
              }
            }
          evict_addresses(m, loaded);
        }
      if (cur_is_a) {
        evict_addresses(m, pinned);
        cur_is_a = false;
      } else {
        cur.reset();
      }
      if (!last) cur.emplace(std::move(*next));
    }
    write_tile(m, C, panel, Part::full, true);
  }
  return C;
}

}  // namespace

FusedShape fused_powers_shape(std::size_t n, std::uint64_t M) {
  if (n == 0 || M < 2 * n + 1) return FusedShape{0, 0};
  const std::size_t rows = std::min<std::size_t>(n, (M - 1) / (2 * n));
  const std::size_t tile = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::sqrt(static_cast<double>(M - 2 * rows * n))));
  return FusedShape{rows, tile};
}

MatrixHandle matrix_powers(DamMachine& m, const MatrixHandle& A, std::size_t t, PowersMode mode,
                           std::size_t b, Semiring semiring) {
  require_explicit(m, "matrix_powers");
  require_square(A, "matrix_powers");
  if (t < 2) throw Error(Errc::invalid_params, "matrix_powers: t must be >= 2");
  if (mode == PowersMode::phased) return powers_phased(m, A, t, b, semiring);
  const FusedShape shape = fused_powers_shape(A.rows(), m.capacity());
  if (shape.rows == 0 || shape.tile == 0) {
    throw Error(Errc::capacity_too_small, "fused powers: two rows of n=" + std::to_string(A.rows()) +
                                              " do not fit in M=" + std::to_string(m.capacity()));
  }
  return powers_fused(m, A, t, semiring);
}

MultimulBlocks multimul_blocks(std::uint64_t M, std::size_t t) {
  if (t < 1) throw Error(Errc::invalid_params, "multimul: t must be >= 1");
  const double Md = static_cast<double>(M), td = static_cast<double>(t);
  return MultimulBlocks{static_cast<std::size_t>(std::sqrt(Md / (3.0 * td))),
                        static_cast<std::size_t>(std::sqrt(Md * td / 3.0))};
}

namespace {

// C^(s) += A * B^(1/s) for every s in `which`, tiles b1 x b2 (A), b2 x b1 (B), b1 x b1 (C).
void multimul_tiles(DamMachine& m, const MatrixHandle& A, const MatrixHandle& B,
                    const std::vector<MatrixHandle>& C, const std::vector<std::size_t>& which,
                    std::size_t b1, std::size_t b2) {
  const std::size_t n = A.rows(), r = A.cols(), q = B.cols();
  for (std::size_t I = 0; I < blocks(n, b1); ++I)
    for (std::size_t J = 0; J < blocks(q, b1); ++J) {
      const Rect rc = tile(I, J, b1, b1, n, q);
      for (std::size_t s : which) read_tile(m, C[s - 1], rc);
      for (std::size_t K = 0; K < blocks(r, b2); ++K) {
        const Rect ra = tile(I, K, b1, b2, n, r);
        const Rect rb = tile(K, J, b2, b1, r, q);
        const auto la = read_tile(m, A, ra);
        const auto lb = read_tile(m, B, rb);
        for (std::size_t s : which) {
          const double root = 1.0 / static_cast<double>(s);
          for (std::size_t i = rc.r0; i < rc.r1; ++i)
            for (std::size_t j = rc.c0; j < rc.c1; ++j) {
              const Operand c = C[s - 1].at(i, j);
              for (std::size_t k = ra.c0; k < ra.c1; ++k) {
                const Operand a = A.at(i, k), bb = B.at(k, j);
                m.flop(label(i, j, k, KernelTag::multimul), {a, bb, c}, c, true);
                m.value(c) += m.value(a) * std::pow(m.value(bb), root);
              }
            }
        }
        evict_addresses(m, la);
        evict_addresses(m, lb);
      }
      for (std::size_t s : which) write_tile(m, C[s - 1], rc, Part::full, true);
    }
}

}  // namespace

std::vector<MatrixHandle> multimul(DamMachine& m, const MatrixHandle& A, const MatrixHandle& B,
                                   std::size_t t, MultimulMode mode) {
  require_explicit(m, "multimul");
  if (A.cols() != B.rows()) throw Error(Errc::dimension_mismatch, "multimul: A.cols != B.rows");
  if (t < 1) throw Error(Errc::invalid_params, "multimul: t must be >= 1");
  if (m.capacity() < 3 * t) {
    throw Error(Errc::capacity_too_small, "multimul: M must be >= 3t");
  }
  std::vector<MatrixHandle> C;
  for (std::size_t s = 1; s <= t; ++s) {
    C.push_back(allocate_matrix(m, A.rows(), B.cols(), 0.0, A.layout(), A.block()));
  }
  if (mode == MultimulMode::phased) {
    const std::size_t b = auto_block(m.capacity());
    for (std::size_t s = 1; s <= t; ++s) multimul_tiles(m, A, B, C, {s}, b, b);
  } else {
    const MultimulBlocks bl = multimul_blocks(m.capacity(), t);
    std::vector<std::size_t> all(t);
    for (std::size_t s = 1; s <= t; ++s) all[s - 1] = s;
    multimul_tiles(m, A, B, C, all, bl.b1, bl.b2);
  }
  return C;
}

namespace {

double formula_a(std::size_t i, std::size_t k) { return 1.0 / static_cast<double>(i + k + 2); }
double formula_b(std::size_t k, std::size_t j) {
  return std::pow(static_cast<double>(k + 1), 1.0 / static_cast<double>(j + 1));
}

}  // namespace

Address frobenius_fused(DamMachine& m, std::size_t n) {
  require_explicit(m, "frobenius_fused");
  if (n < 1) throw Error(Errc::invalid_params, "frobenius: n must be >= 1");
  const std::uint64_t M = m.capacity();
  const KernelTag tag = KernelTag::frobenius;
  const Address r = m.allocate(1);
  const std::uint64_t nn = std::uint64_t{n} * n;

  auto square_into = [&](Operand acc, Operand c, std::size_t i, std::size_t j) {
    m.flop(label(i, j, 0, KernelTag::aux), {c, acc}, acc, false);
    m.value(acc) += m.value(c) * m.value(c);
  };
  auto finish = [&](Operand acc) {
    m.claim(r, 1);
    m.flop(label(0, 0, 0, KernelTag::aux), {acc}, Operand::slow(r), false);
    m.value(Operand::slow(r)) = m.value(acc);
    m.write_block(r, 1, true);
  };

  if (3 * nn + 2 <= M) {
    // everything fits: each formula value is created once in scratch
    ScratchBlock Av(m, nn), Bv(m, nn), Cv(m, nn), acc(m, 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        m.flop(label(i, 0, k, tag), std::span<const Operand>{}, Av[i * n + k], false);
        m.value(Av[i * n + k]) = formula_a(i, k);
        m.flop(label(0, i, k, tag), std::span<const Operand>{}, Bv[k * n + i], false);
        m.value(Bv[k * n + i]) = formula_b(k, i);
        m.value(Cv[i * n + k]) = 0.0;
      }
    m.value(acc[0]) = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Operand c = Cv[i * n + j];
        for (std::size_t k = 0; k < n; ++k) {
          m.flop(label(i, j, k, tag), {Av[i * n + k], Bv[k * n + j], c}, c, true);
          m.value(c) += m.value(Av[i * n + k]) * m.value(Bv[k * n + j]);
        }
        square_into(acc[0], c, i, j);
      }
    finish(acc[0]);
    return r;
  }

  // blocked: formula values are cached in slow memory after their first evaluation
  const std::size_t b = static_cast<std::size_t>(std::sqrt(static_cast<double>(M - 2) / 3.0));
  if (M < 5 || b < 1) throw Error(Errc::capacity_too_small, "frobenius: M too small");
  const MatrixHandle Ac = allocate_matrix(m, n, n, 0.0);
  const MatrixHandle Bc = allocate_matrix(m, n, n, 0.0);
  std::vector<char> a_done(blocks(n, b) * blocks(n, b), 0), b_done(a_done.size(), 0);
  const std::size_t nb = blocks(n, b);
  ScratchBlock acc(m, 1);
  m.value(acc[0]) = 0.0;

  auto bring = [&](const MatrixHandle& h, std::vector<char>& done, std::size_t I, std::size_t K,
                   bool is_a) {
    const Rect rt = tile(h, I, K, b);
    if (done[I * nb + K]) {
      read_tile(m, h, rt);
      return false;
    }
    claim_tile(m, h, rt);
    for (std::size_t x = rt.r0; x < rt.r1; ++x)
      for (std::size_t y = rt.c0; y < rt.c1; ++y) {
        m.flop(is_a ? label(x, 0, y, tag) : label(0, y, x, tag), std::span<const Operand>{},
               h.at(x, y), false);
        m.value(h.at(x, y)) = is_a ? formula_a(x, y) : formula_b(x, y);
      }
    done[I * nb + K] = 1;
    return true;
  };

  for (std::size_t I = 0; I < nb; ++I)
    for (std::size_t J = 0; J < nb; ++J) {
      const Rect rc = tile(I, J, b, b, n, n);
      ScratchBlock Cv(m, rc.size());
      for (std::size_t e = 0; e < rc.size(); ++e) m.value(Cv[e]) = 0.0;
      for (std::size_t K = 0; K < nb; ++K) {
        const bool fresh_a = bring(Ac, a_done, I, K, true);
        const bool fresh_b = bring(Bc, b_done, K, J, false);
        const Rect ra = tile(Ac, I, K, b);
        const Rect rb = tile(Bc, K, J, b);
        for (std::size_t i = rc.r0; i < rc.r1; ++i)
          for (std::size_t j = rc.c0; j < rc.c1; ++j) {
            const Operand c = Cv[(i - rc.r0) * rc.cols() + (j - rc.c0)];
            for (std::size_t k = ra.c0; k < ra.c1; ++k) {
              const Operand a = Ac.at(i, k), bb = Bc.at(k, j);
              m.flop(label(i, j, k, tag), {a, bb, c}, c, true);
              m.value(c) += m.value(a) * m.value(bb);
            }
          }
        if (fresh_a) write_tile(m, Ac, ra, Part::full, true); else evict_tile(m, Ac, ra);
        if (fresh_b) write_tile(m, Bc, rb, Part::full, true); else evict_tile(m, Bc, rb);
      }
      for (std::size_t i = rc.r0; i < rc.r1; ++i)
        for (std::size_t j = rc.c0; j < rc.c1; ++j)
          square_into(acc[0], Cv[(i - rc.r0) * rc.cols() + (j - rc.c0)], i, j);
    }
  finish(acc[0]);
  return r;
}

}  // namespace iooracle::kernels
