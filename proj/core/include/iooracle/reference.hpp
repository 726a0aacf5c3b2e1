#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "iooracle/matrix.hpp"

// Direct host-side computations used to check kernel output, and the input
// generators shared by tests and the harness.
namespace iooracle::reference {

using Rng = std::mt19937_64;

/// Entries uniform in [lo, hi].
Matrix random_uniform(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                      double hi = 1.0);
/// A^T A + n I for a uniform A.
Matrix random_spd(std::size_t n, Rng& rng);
/// Uniform plus n on the diagonal; no pivoting needed.
Matrix random_diag_dominant(std::size_t n, Rng& rng);
/// Upper triangular, uniform above the diagonal, diagonal in [n, n+1].
Matrix random_upper(std::size_t n, Rng& rng);
/// Integer weights in [0, max_weight], 0 diagonal, each off-diagonal edge
/// missing (+inf) with probability `missing`.
Matrix random_digraph(std::size_t n, Rng& rng, double missing = 0.0, int max_weight = 100);
/// Uniform entries kept with probability `density`, zero otherwise.
Matrix random_sparse(std::size_t rows, std::size_t cols, double density, Rng& rng);

Matrix minplus_multiply(const Matrix& a, const Matrix& b);
Matrix floyd_warshall(const Matrix& w);
Matrix power(const Matrix& a, std::size_t t);
Matrix minplus_power(const Matrix& a, std::size_t t);
/// C^(s) = A * B^(1/s) entrywise root, s = 1..t.
std::vector<Matrix> multimul(const Matrix& a, const Matrix& b, std::size_t t);
/// ||A B||_F^2 with A_ik = 1/(i+k), B_kj = k^(1/j), 1-based.
double frobenius(std::size_t n);
/// Number of scalar products a_ij b_jk with both factors nonzero.
std::uint64_t sparse_pair_count(const Matrix& a, const Matrix& b);

// Residuals, max-abs norm.

/// |L U - A| with L (unit) and U packed in lu.
double lu_residual(const Matrix& a, const Matrix& lu);
/// |L L^T - A| with L in the lower triangle of l.
double cholesky_residual(const Matrix& a, const Matrix& l);
/// |L D L^T - A| with unit L in the strict lower triangle of l, d as 1 x n.
double ldlt_residual(const Matrix& a, const Matrix& l, const Matrix& d);
/// |A C - B| with A upper triangular.
double trsm_residual(const Matrix& a, const Matrix& c, const Matrix& b);
/// Applies the stored reflectors to A and returns |Q^T A - R| including the
/// part below the diagonal, which must vanish.
double qr_residual(const Matrix& a, const Matrix& packed, const Matrix& tau);

// Multiply counts of dense inputs.

/// sum over i, j of min(i, j), 0-based.
std::uint64_t lu_g_count(std::uint64_t n);
/// sum over j of j (n - j); LDL^T has the same count.
std::uint64_t cholesky_g_count(std::uint64_t n);
std::uint64_t ldlt_g_count(std::uint64_t n);
/// n (n - 1) / 2 per right-hand side column.
std::uint64_t trsm_g_count(std::uint64_t n, std::uint64_t m);

}  // namespace iooracle::reference
