#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iooracle/lattice.hpp"
#include "iooracle/matrix.hpp"
#include "iooracle/trace.hpp"

namespace iooracle::harness {

enum class KernelId {
  matmul_naive,
  matmul_blocked,
  matmul_discard,  // blocked, plus one dropped product per C entry
  matmul_sparse,
  trsm,
  lu,
  cholesky,
  ldlt,
  qr,
  minplus,
  apsp,
  powers,
  multimul,
  frobenius,
};

std::string_view to_string(KernelId k) noexcept;
KernelId parse_kernel(std::string_view s);
std::span<const KernelId> all_kernels();

/// apsp: naive | squaring; powers: phased | fused; multimul: phased | interleaved;
/// every other kernel has the single mode "-".
std::string_view default_mode(KernelId k) noexcept;
bool valid_mode(KernelId k, std::string_view mode);
/// t used when an experiment leaves it at 0: 4 for powers and multimul, else 0.
std::size_t default_t(KernelId k) noexcept;

struct ExperimentSpec {
  KernelId kernel = KernelId::matmul_blocked;
  std::vector<std::size_t> ns;
  std::vector<std::uint64_t> Ms;
  std::vector<std::size_t> bs;  // empty: automatic block size per M
  std::size_t t = 0;
  std::string mode;  // empty: default_mode
  Layout layout = Layout::row_major;
  std::uint64_t seed = 1;
  std::size_t reps = 1;
  bool timing = false;
};

struct PointSpec {
  KernelId kernel = KernelId::matmul_blocked;
  std::size_t n = 0;
  std::uint64_t M = 0;
  std::size_t b = 0;  // 0: automatic
  std::size_t t = 0;
  std::string mode;
  Layout layout = Layout::row_major;
  std::uint64_t seed = 1;
  std::size_t rep = 0;
  bool timing = false;
  bool record_trace = false;
};

struct ResultRow {
  std::string kernel;
  std::string mode;
  std::string layout;
  std::size_t n = 0;
  std::uint64_t M = 0;
  std::size_t b = 0;
  std::size_t t = 0;
  std::size_t rep = 0;
  std::uint64_t words_moved = 0;
  std::uint64_t messages = 0;
  std::uint64_t flops = 0;
  std::uint64_t g_ops = 0;
  double bandwidth_lb = 0;
  double latency_lb = 0;
  double trivial_lb = 0;
  double combined_lb = 0;
  double ratio = 0;  // words_moved / combined_lb, +inf when combined_lb == 0
  std::uint64_t imposed = 0;
  double residual = 0;
  bool verified = false;
  double wall_time = 0;  // seconds, 0 unless timing was requested
  std::string formula;
  std::string error;

  bool ok() const { return error.empty(); }
};

struct PointResult {
  ResultRow row;
  Trace trace;  // empty unless PointSpec::record_trace
};

/// Expands an experiment into grid points, (n, M, b, rep) in row-major order.
/// Raises spec_invalid for empty lists or an unknown mode.
std::vector<PointSpec> expand(const ExperimentSpec& spec);

/// Runs one point on its own machine. Kernel errors land in row.error.
PointResult run_point(const PointSpec& p);

/// Worker count: IOORACLE_THREADS when set, else hardware concurrency.
unsigned worker_count();
/// Runs points on a worker pool; the rows come back in input order.
std::vector<ResultRow> run_points(std::span<const PointSpec> points, unsigned threads = 0);
std::vector<ResultRow> run(const ExperimentSpec& spec, unsigned threads = 0);

/// Whether the kernel can run at (n, M) with automatic parameters.
bool feasible(KernelId k, std::string_view mode, std::size_t n, std::uint64_t M);

/// Every kernel and mode over n in {16, 32, 48, 64, 96}, M in {48, 192, 768},
/// skipping infeasible points.
std::vector<PointSpec> default_grid(std::uint64_t seed = 1);

// ---- output -----------------------------------------------------------------

std::string_view csv_header();
void write_csv(std::ostream& out, std::span<const ResultRow> rows);
std::vector<ResultRow> read_csv(std::istream& in);
std::string to_json(std::span<const ResultRow> rows);

// ---- scaling fit ------------------------------------------------------------

/// Least-squares slope of log y against log x.
double fit_exponent(std::span<const double> x, std::span<const double> y);
/// x in {n, M}; y in {words_moved, messages, g_ops, flops}. The rows must
/// agree on the other parameter.
double fit_scaling(std::span<const ResultRow> rows, std::string_view x, std::string_view y);

// ---- property suites --------------------------------------------------------

struct Assertion {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CheckReport {
  std::vector<Assertion> assertions;
  bool passed() const;
  void add(std::string suite, std::string name, bool ok, std::string detail = {});
  void merge(const CheckReport& other);
};

/// Reasons a row breaks soundness: an error, words below combined_lb,
/// messages below either latency bound. Empty when sound.
std::vector<std::string> soundness_violations(const ResultRow& r);

enum class Suite { lw, segments, soundness, numerics, all };
Suite parse_suite(std::string_view s);

struct CheckOptions {
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

CheckReport check(Suite suite, const CheckOptions& options = {});
std::string to_json(const CheckReport& report);

/// Per-segment caps of the trace audit.
struct AuditLimits {
  double g_cap = 0;   // flops with g set, per complete segment
  double s1_cap = 0;  // 2M
  double d1_cap = 0;  // 2M
};
/// (4M)^{3/2}, or sqrt(128 M^3) for Householder traces.
AuditLimits audit_limits(std::uint64_t M, bool householder);

struct AuditReport {
  std::vector<lattice::SegmentStats> segments;
  std::size_t violations = 0;
  std::string first_violation;
  bool passed() const { return violations == 0; }
};
AuditReport audit_trace(const Trace& trace, std::uint64_t M, const AuditLimits& limits);
std::string to_json(const AuditReport& report, const AuditLimits& limits);

}  // namespace iooracle::harness
