#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace iooracle::bounds {

/// Lower bounds attached to one kernel run or one formula evaluation.
/// All quantities are clamped at zero.
struct BoundReport {
  double g_count = 0;
  std::uint64_t fast_capacity = 0;
  double bandwidth_lb = 0;  // words
  double latency_lb = 0;    // messages
  std::optional<double> trivial_lb;  // #inputs + #outputs
  double combined_lb = 0;   // max(bandwidth_lb, trivial_lb)
  std::string formula_tag;
  /// Asymptotic companion value reported next to a finite form (parallel dense case).
  std::optional<double> companion;
};

struct ParallelParams {
  std::uint64_t processors = 1;
  double total_nonzeros = 0;  // nnz(A) + nnz(B) + nnz(C)
};

enum class ApspVariant { naive_n4, squaring_n3logn };

/// max(G / (8 sqrt M) - M, 0)
double general_bandwidth_lb(double G, std::uint64_t M);
/// max(G / (8 M^{3/2}) - 1, 0)
double latency_lb(double G, std::uint64_t M);
/// max(G / sqrt(128 M) - M, 0)
double qr_bandwidth_lb(double G, std::uint64_t M);
/// max(G / sqrt(1152 M) - M, 0)
double two_sided_lb(double G, std::uint64_t M);
/// max(G / sqrt(8M) - M - (t-2) n^2, 0), t >= 2
double powers_lb(double G, std::uint64_t M, std::uint64_t t, std::uint64_t n);
/// max(sqrt(t) n^3 / (8 sqrt M) - M, 0), t >= 1
double interleaved_multimul_lb(std::uint64_t n, std::uint64_t t, std::uint64_t M);
/// max(sum B_i - 2 (t-1) M, 0) over t = per_phase.size() phases
double phased_sequence_lb(std::span<const double> per_phase, std::uint64_t M);
/// naive: n^4/(8 sqrt M) - M - n^3; squaring: n^3 log2 n/(8 sqrt M) - M - n^2 log2 n
double apsp_lb(std::uint64_t n, std::uint64_t M, ApspVariant variant);
/// max(c n^3 / sqrt M - M, 0); the Omega constant c is the caller's choice.
double stencil_cholesky_lb(std::uint64_t n, std::uint64_t M, double c = 1.0 / 8.0);

/// max(G / sqrt(P * NNZ) - NNZ / P, 0); `dense_n` adds the n^2/sqrt(P) companion.
BoundReport parallel_matmul_lb(double G, const ParallelParams& p,
                               std::optional<std::uint64_t> dense_n = std::nullopt);

/// Dense n x r times r x m product: n r m / sqrt(8M) - M, trivial n r + r m + n m.
BoundReport matmul_dense_lb(std::uint64_t n, std::uint64_t r, std::uint64_t m, std::uint64_t M);

/// Assembles a report from an unclamped bandwidth formula value. The latency
/// bound is that value divided by the largest message size M.
BoundReport make_report(std::string formula_tag, double G, std::uint64_t M,
                        double raw_bandwidth, std::optional<double> trivial);

/// General-bound report for a measured G.
BoundReport general_report(double G, std::uint64_t M, std::optional<double> trivial);

std::string to_json(const BoundReport& r);

}  // namespace iooracle::bounds
