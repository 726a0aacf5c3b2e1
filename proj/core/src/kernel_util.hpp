#pragma once

#include <algorithm>
#include <string>

#include "iooracle/error.hpp"
#include "iooracle/machine.hpp"
#include "iooracle/matrix.hpp"
#include "iooracle/tiles.hpp"

namespace iooracle::kernels::detail {

inline std::size_t blocks(std::size_t n, std::size_t b) { return (n + b - 1) / b; }
inline std::size_t lo(std::size_t I, std::size_t b) { return I * b; }
inline std::size_t hi(std::size_t I, std::size_t b, std::size_t n) { return std::min(n, I * b + b); }

/// Tile (I, J) of an rows x cols matrix cut into br x bc tiles.
inline Rect tile(std::size_t I, std::size_t J, std::size_t br, std::size_t bc, std::size_t rows,
                 std::size_t cols) {
  return Rect{lo(I, br), hi(I, br, rows), lo(J, bc), hi(J, bc, cols)};
}
inline Rect tile(const MatrixHandle& h, std::size_t I, std::size_t J, std::size_t b) {
  return tile(I, J, b, b, h.rows(), h.cols());
}

inline OpLabel label(std::size_t i, std::size_t j, std::size_t k, KernelTag tag) {
  return OpLabel{static_cast<std::int32_t>(i), static_cast<std::int32_t>(j),
                 static_cast<std::int32_t>(k), tag};
}

inline void require_square(const MatrixHandle& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw Error(Errc::dimension_mismatch, std::string(who) + ": matrix must be square");
  }
}

inline void require_tiles(std::uint64_t need, std::uint64_t M, const char* who) {
  if (need > M) {
    throw Error(Errc::block_too_large, std::string(who) + ": tiles need " + std::to_string(need) +
                                           " words but M=" + std::to_string(M));
  }
}

inline void require_explicit(const DamMachine& m, const char* who) {
  if (m.config().mode != Mode::explicit_io) {
    throw Error(Errc::wrong_mode, std::string(who) + " runs in explicit mode");
  }
}

}  // namespace iooracle::kernels::detail
