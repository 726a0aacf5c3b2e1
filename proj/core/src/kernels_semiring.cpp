#include <cmath>
#include <limits>

#include "iooracle/kernels.hpp"
#include "kernel_util.hpp"

namespace iooracle::kernels {

using namespace detail;

namespace {

void check_weights(const DamMachine& m, const MatrixHandle& W) {
  require_square(W, "apsp");
  for (std::size_t i = 0; i < W.rows(); ++i)
    for (std::size_t j = 0; j < W.cols(); ++j) {
      const double w = m.slow_value(W.address(i, j));
      if (w < 0.0) {
        throw Error(Errc::negative_weight, "apsp: w(" + std::to_string(i) + "," +
                                               std::to_string(j) + ") is negative");
      }
      if (i == j && w != 0.0) throw Error(Errc::invalid_params, "apsp: diagonal weights must be 0");
    }
}

std::size_t ceil_log2(std::size_t x) {
  std::size_t r = 0;
  while ((std::size_t{1} << r) < x) ++r;
  return r;
}

MatrixHandle square_rounds(DamMachine& m, const MatrixHandle& W, std::size_t rounds, std::size_t b) {
  MatrixHandle L = W;
  for (std::size_t r = 0; r < rounds; ++r) L = minplus_matmul(m, L, L, b);
  return L;
}

}  // namespace

MatrixHandle apsp(DamMachine& m, const MatrixHandle& W, ApspVariant variant, std::size_t b) {
  require_explicit(m, "apsp");
  check_weights(m, W);
  const std::size_t n = W.rows();
  if (n < 2) return W;
  if (variant == ApspVariant::naive) {
    return matrix_powers(m, W, n, PowersMode::phased, b, Semiring::min_plus);
  }
  return square_rounds(m, W, ceil_log2(n - 1), b);
}

HopResult apsp_hops(DamMachine& m, const MatrixHandle& W, std::size_t t, std::size_t b) {
  require_explicit(m, "apsp_hops");
  check_weights(m, W);
  if (t < 1) throw Error(Errc::invalid_params, "apsp_hops: t must be >= 1");
  const std::size_t rounds = ceil_log2(t);
  return HopResult{square_rounds(m, W, rounds, b), rounds};
}

}  // namespace iooracle::kernels
