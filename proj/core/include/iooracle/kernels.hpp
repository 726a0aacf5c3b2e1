#pragma once

#include <cstdint>
#include <vector>

#include "iooracle/machine.hpp"
#include "iooracle/matrix.hpp"

namespace iooracle::kernels {

/// floor(sqrt(M / 3)): three b x b tiles fill fast memory.
std::size_t auto_block(std::uint64_t M);

enum class Semiring { plus_times, min_plus };

// ---- matrix multiplication -------------------------------------------------

/// Three-loop i-j-k product under the automatic LRU cache. Needs M >= 3.
MatrixHandle matmul_naive(DamMachine& m, const MatrixHandle& A, const MatrixHandle& B);

struct BlockedOptions {
  Semiring semiring = Semiring::plus_times;
  KernelTag tag = KernelTag::matmul;
  /// Also compute one product per C entry into a scratch word and drop it.
  /// These are not g-ops; the tile size leaves one word for the scratch.
  bool discard_extra_products = false;
};

/// C (op)= A * B with b x b tiles; C keeps its slow-memory values as the
/// starting accumulator. A and B may be the same handle.
void matmul_blocked_into(DamMachine& m, const MatrixHandle& A, const MatrixHandle& B,
                         const MatrixHandle& C, std::size_t b, BlockedOptions options = {});

/// Allocates a zero C in A's layout and multiplies into it.
MatrixHandle matmul_blocked(DamMachine& m, const MatrixHandle& A, const MatrixHandle& B,
                            std::size_t b, BlockedOptions options = {});

/// (min, +) product, C starts at +inf.
MatrixHandle minplus_matmul(DamMachine& m, const MatrixHandle& A, const MatrixHandle& B,
                            std::size_t b);

/// Row-by-row sparse product; the structure of C is computed symbolically.
/// A and B must be distinct stored copies.
CsrHandle matmul_sparse(DamMachine& m, const CsrHandle& A, const CsrHandle& B);

/// Structure of A*B without values (free metadata).
CsrMatrix sparse_product_structure(const CsrMatrix& A, const CsrMatrix& B);

// ---- triangular solve and factorizations (in place) -----------------------

/// Overwrites X (n x m, holding B) with C solving A C = B, A upper triangular n x n.
void trsm(DamMachine& m, const MatrixHandle& A, const MatrixHandle& X, std::size_t b);

/// A = L U without pivoting; L (unit, strictly lower) and U share A's storage.
void lu_blocked(DamMachine& m, const MatrixHandle& A, std::size_t b);

/// A = L L^T; L overwrites the lower triangle, the strict upper part is untouched.
void cholesky_blocked(DamMachine& m, const MatrixHandle& A, std::size_t b);

/// Largest b with 3 b^2 + b <= M.
std::size_t ldlt_block(std::uint64_t M);

/// A = L D L^T with 1x1 pivots; unit L overwrites the strict lower triangle.
/// Returns the 1 x n handle holding D.
MatrixHandle ldlt(DamMachine& m, const MatrixHandle& A, std::size_t b);

/// max(1, floor(sqrt(M/3)) / 2)
std::size_t qr_default_panel(std::uint64_t M);

/// Householder QR, compact WY panels. R overwrites the upper triangle, the
/// reflectors (unit diagonal implicit) the strict lower part. Returns the
/// 1 x n handle of reflector scalars tau.
MatrixHandle qr_householder(DamMachine& m, const MatrixHandle& A, std::size_t panel);

// ---- (min, +) paths --------------------------------------------------------

enum class ApspVariant { naive, squaring };

/// All-pairs shortest paths. W holds non-negative weights, +inf for no edge.
/// naive: n-1 products L <- L (x) W; squaring: ceil(log2(n-1)) products L <- L (x) L.
MatrixHandle apsp(DamMachine& m, const MatrixHandle& W, ApspVariant variant, std::size_t b);

struct HopResult {
  MatrixHandle dist;
  std::size_t rounds = 0;
};

/// Distances over paths of at most 2^ceil(log2 t) >= t hops, by squaring.
HopResult apsp_hops(DamMachine& m, const MatrixHandle& W, std::size_t t, std::size_t b);

// ---- compositions ----------------------------------------------------------

enum class PowersMode { phased, fused };

/// A^t. phased runs t-1 blocked products and stores every intermediate;
/// fused pipelines row panels through all t-1 products and keeps the
/// intermediates in scratch. fused raises capacity_too_small when not even a
/// one-row panel fits.
MatrixHandle matrix_powers(DamMachine& m, const MatrixHandle& A, std::size_t t, PowersMode mode,
                           std::size_t b, Semiring semiring = Semiring::plus_times);

/// Row-panel height and tile width chosen by fused powers for (n, M).
struct FusedShape {
  std::size_t rows = 0;
  std::size_t tile = 0;
};
FusedShape fused_powers_shape(std::size_t n, std::uint64_t M);

enum class MultimulMode { phased, interleaved };

struct MultimulBlocks {
  std::size_t b1 = 0;
  std::size_t b2 = 0;
};
/// b1 = floor(sqrt(M / 3t)), b2 = floor(sqrt(M t / 3)).
MultimulBlocks multimul_blocks(std::uint64_t M, std::size_t t);

/// C^(s) = A * B^(s) for s = 1..t, where B^(s)_ij = B_ij^(1/s) is formed on the fly.
std::vector<MatrixHandle> multimul(DamMachine& m, const MatrixHandle& A, const MatrixHandle& B,
                                   std::size_t t, MultimulMode mode);

/// r = ||A B||_F^2 with A_ik = 1/(i+k) and B_kj = k^(1/j) (1-based), no stored inputs.
/// Formula values are evaluated once each. Returns the address of r.
Address frobenius_fused(DamMachine& m, std::size_t n);

}  // namespace iooracle::kernels
