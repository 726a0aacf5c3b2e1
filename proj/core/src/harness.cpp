#include "iooracle/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "iooracle/bounds.hpp"
#include "iooracle/error.hpp"
#include "iooracle/kernels.hpp"
#include "iooracle/machine.hpp"
#include "iooracle/reference.hpp"

namespace iooracle::harness {

namespace ref = iooracle::reference;
namespace kn = iooracle::kernels;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct KernelName {
  KernelId id;
  std::string_view name;
};

constexpr std::array<KernelName, 14> kNames{{
    {KernelId::matmul_naive, "matmul_naive"},
    {KernelId::matmul_blocked, "matmul_blocked"},
    {KernelId::matmul_discard, "matmul_discard"},
    {KernelId::matmul_sparse, "matmul_sparse"},
    {KernelId::trsm, "trsm"},
    {KernelId::lu, "lu"},
    {KernelId::cholesky, "cholesky"},
    {KernelId::ldlt, "ldlt"},
    {KernelId::qr, "qr"},
    {KernelId::minplus, "minplus"},
    {KernelId::apsp, "apsp"},
    {KernelId::powers, "powers"},
    {KernelId::multimul, "multimul"},
    {KernelId::frobenius, "frobenius"},
}};

constexpr std::array<KernelId, 14> kAll{
    KernelId::matmul_naive, KernelId::matmul_blocked, KernelId::matmul_discard,
    KernelId::matmul_sparse, KernelId::trsm, KernelId::lu, KernelId::cholesky, KernelId::ldlt,
    KernelId::qr, KernelId::minplus, KernelId::apsp, KernelId::powers, KernelId::multimul,
    KernelId::frobenius};

std::vector<std::string_view> modes_of(KernelId k) {
  switch (k) {
    case KernelId::apsp: return {"naive", "squaring"};
    case KernelId::powers: return {"phased", "fused"};
    case KernelId::multimul: return {"phased", "interleaved"};
    default: return {"-"};
  }
}

std::uint64_t point_seed(const PointSpec& p) {
  std::seed_seq seq{static_cast<std::uint32_t>(p.seed), static_cast<std::uint32_t>(p.seed >> 32),
                    static_cast<std::uint32_t>(p.kernel), static_cast<std::uint32_t>(p.n),
                    static_cast<std::uint32_t>(p.M), static_cast<std::uint32_t>(p.b),
                    static_cast<std::uint32_t>(p.t), static_cast<std::uint32_t>(p.rep)};
  std::array<std::uint64_t, 1> out{};
  seq.generate(out.begin(), out.end());
  return out[0];
}

std::size_t discard_block(std::uint64_t M) {
  return static_cast<std::size_t>(std::sqrt(static_cast<double>(M - 1) / 3.0));
}

std::size_t frobenius_block(std::size_t n, std::uint64_t M) {
  if (3 * std::uint64_t{n} * n + 2 <= M) return n;
  return static_cast<std::size_t>(std::sqrt(static_cast<double>(M - 2) / 3.0));
}

// What a kernel run hands back besides the counters.
struct Outcome {
  double residual = 0;
  double tolerance = 0;
  std::optional<std::uint64_t> expected_g;
  double trivial = 0;
  std::uint64_t imposed = 0;
};

double dense_tol(std::size_t n, double scale) { return 1e-10 * static_cast<double>(n) * scale; }

MatrixHandle put(DamMachine& m, const Matrix& a, const PointSpec& p, std::size_t block) {
  return store_matrix(m, a, p.layout, p.layout == Layout::recursive_block ? std::max<std::size_t>(1, block) : 0);
}

Outcome run_matmul(const PointSpec& p, DamMachine& m, ref::Rng& rng, ResultRow& row) {
  const std::size_t n = p.n;
  const Matrix A = ref::random_uniform(n, n, rng), B = ref::random_uniform(n, n, rng);
  MatrixHandle C;
  if (p.kernel == KernelId::matmul_naive) {
    const std::size_t blk = std::max<std::size_t>(1, kn::auto_block(p.M));
    C = kn::matmul_naive(m, put(m, A, p, blk), put(m, B, p, blk));
  } else {
    const bool discard = p.kernel == KernelId::matmul_discard;
    row.b = p.b ? p.b : (discard ? discard_block(p.M) : kn::auto_block(p.M));
    kn::BlockedOptions opts;
    opts.discard_extra_products = discard;
    C = kn::matmul_blocked(m, put(m, A, p, row.b), put(m, B, p, row.b), row.b, opts);
  }
  Outcome o;
  o.residual = max_abs_diff(load_matrix(m, C), multiply(A, B));
  o.tolerance = dense_tol(n, 1.0);
  o.expected_g = std::uint64_t{n} * n * n;
  o.trivial = 3.0 * n * n;
  return o;
}

Outcome run_sparse(const PointSpec& p, DamMachine& m, ref::Rng& rng, ResultRow&) {
  const std::size_t n = p.n;
  const Matrix A = ref::random_sparse(n, n, 0.1, rng), B = ref::random_sparse(n, n, 0.1, rng);
  const CsrMatrix a = CsrMatrix::from_dense(A), b = CsrMatrix::from_dense(B);
  const CsrHandle C = kn::matmul_sparse(m, store_csr(m, a), store_csr(m, b));
  Outcome o;
  o.residual = max_abs_diff(load_csr(m, C).to_dense(), multiply(A, B));
  o.tolerance = dense_tol(n, 1.0);
  o.expected_g = ref::sparse_pair_count(A, B);
  // entries that take part in some product, plus the outputs
  double used = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double col = static_cast<double>(std::count_if(a.col_idx.begin(), a.col_idx.end(),
                                                          [k](std::size_t c) { return c == k; }));
    const double row_k = static_cast<double>(b.row_ptr[k + 1] - b.row_ptr[k]);
    if (col > 0 && row_k > 0) used += col + row_k;
  }
  o.trivial = used + static_cast<double>(C.structure.nnz());
  return o;
}

Outcome run_trsm(const PointSpec& p, DamMachine& m, ref::Rng& rng, ResultRow& row) {
  const std::size_t n = p.n;
  const Matrix A = ref::random_upper(n, rng), B = ref::random_uniform(n, n, rng);
  row.b = p.b ? p.b : kn::auto_block(p.M);
  const MatrixHandle X = put(m, B, p, row.b);
  kn::trsm(m, put(m, A, p, row.b), X, row.b);
  Outcome o;
  o.residual = ref::trsm_residual(A, load_matrix(m, X), B);
  o.tolerance = dense_tol(n, max_abs(B));
  o.expected_g = ref::trsm_g_count(n, n);
  o.trivial = n * (n + 1) / 2.0 + 2.0 * n * n;
  return o;
}

Outcome run_factor(const PointSpec& p, DamMachine& m, ref::Rng& rng, ResultRow& row) {
  const std::size_t n = p.n;
  Outcome o;
  if (p.kernel == KernelId::lu) {
    const Matrix A = ref::random_diag_dominant(n, rng);
    row.b = p.b ? p.b : kn::auto_block(p.M);
    const MatrixHandle h = put(m, A, p, row.b);
    kn::lu_blocked(m, h, row.b);
    o.residual = ref::lu_residual(A, load_matrix(m, h));
    o.tolerance = 1e-8 * n * max_abs(A);
    o.expected_g = ref::lu_g_count(n);
    o.trivial = 2.0 * n * n;
    return o;
  }
  const Matrix A = ref::random_spd(n, rng);
  o.tolerance = 1e-8 * n * max_abs(A);
  o.trivial = static_cast<double>(n) * (n + 1);
  if (p.kernel == KernelId::cholesky) {
    row.b = p.b ? p.b : kn::auto_block(p.M);
    const MatrixHandle h = put(m, A, p, row.b);
    kn::cholesky_blocked(m, h, row.b);
    o.residual = ref::cholesky_residual(A, load_matrix(m, h));
    o.expected_g = ref::cholesky_g_count(n);
  } else {
    row.b = p.b ? p.b : kn::ldlt_block(p.M);
    const MatrixHandle h = put(m, A, p, row.b);
    const MatrixHandle D = kn::ldlt(m, h, row.b);
    o.residual = ref::ldlt_residual(A, load_matrix(m, h), load_matrix(m, D));
    o.expected_g = ref::ldlt_g_count(n);
  }
  return o;
}

Outcome run_qr(const PointSpec& p, DamMachine& m, ref::Rng& rng, ResultRow& row) {
  const std::size_t n = p.n;
  const Matrix A = ref::random_uniform(n, n, rng);
  row.b = p.b ? p.b : kn::qr_default_panel(p.M);
  const MatrixHandle h = put(m, A, p, row.b);
  const MatrixHandle tau = kn::qr_householder(m, h, row.b);
  Outcome o;
  o.residual = ref::qr_residual(A, load_matrix(m, h), load_matrix(m, tau));
  o.tolerance = 1e-8 * n * max_abs(A);
  o.trivial = 2.0 * n * n + n;
  return o;
}

Outcome run_semiring(const PointSpec& p, DamMachine& m, ref::Rng& rng, ResultRow& row) {
  const std::size_t n = p.n;
  row.b = p.b ? p.b : kn::auto_block(p.M);
  Outcome o;
  o.tolerance = 0.0;
  const Matrix W = ref::random_digraph(n, rng, 0.25);
  if (p.kernel == KernelId::minplus) {
    const Matrix V = ref::random_digraph(n, rng, 0.25);
    const MatrixHandle C = kn::minplus_matmul(m, put(m, W, p, row.b), put(m, V, p, row.b), row.b);
    o.residual = max_abs_diff(load_matrix(m, C), ref::minplus_multiply(W, V));
    o.expected_g = std::uint64_t{n} * n * n;
    o.trivial = 3.0 * n * n;
    return o;
  }
  const bool naive = p.mode == "naive";
  const MatrixHandle D =
      kn::apsp(m, put(m, W, p, row.b), naive ? kn::ApspVariant::naive : kn::ApspVariant::squaring, row.b);
  o.residual = max_abs_diff(load_matrix(m, D), ref::floyd_warshall(W));
  std::uint64_t products = 0;
  if (n >= 2) {
    if (naive) {
      products = n - 1;
    } else {
      while ((std::uint64_t{1} << products) < n - 1) ++products;
    }
  }
  o.expected_g = products * n * n * n;
  o.trivial = 2.0 * n * n;
  return o;
}

Outcome run_powers(const PointSpec& p, DamMachine& m, ref::Rng& rng, ResultRow& row) {
  const std::size_t n = p.n;
  row.t = p.t ? p.t : default_t(p.kernel);
  const bool fused = p.mode == "fused";
  row.b = fused ? kn::fused_powers_shape(n, p.M).tile : (p.b ? p.b : kn::auto_block(p.M));
  const Matrix A = ref::random_uniform(n, n, rng);
  const MatrixHandle C = kn::matrix_powers(m, put(m, A, p, std::max<std::size_t>(1, row.b)), row.t,
                                           fused ? kn::PowersMode::fused : kn::PowersMode::phased,
                                           row.b);
  Outcome o;
  o.residual = max_abs_diff(load_matrix(m, C), ref::power(A, row.t));
  o.tolerance = 1e-15 * static_cast<double>(row.t) * std::pow(static_cast<double>(n), row.t);
  o.expected_g = (row.t - 1) * std::uint64_t{n} * n * n;
  o.trivial = 2.0 * n * n;
  return o;
}

Outcome run_multimul(const PointSpec& p, DamMachine& m, ref::Rng& rng, ResultRow& row) {
  const std::size_t n = p.n;
  row.t = p.t ? p.t : default_t(p.kernel);
  const bool inter = p.mode == "interleaved";
  row.b = inter ? kn::multimul_blocks(p.M, row.t).b1 : kn::auto_block(p.M);
  const Matrix A = ref::random_uniform(n, n, rng), B = ref::random_uniform(n, n, rng, 0.0, 1.0);
  const std::size_t blk = std::max<std::size_t>(1, row.b);
  const auto C = kn::multimul(m, put(m, A, p, blk), put(m, B, p, blk), row.t,
                              inter ? kn::MultimulMode::interleaved : kn::MultimulMode::phased);
  const auto R = ref::multimul(A, B, row.t);
  Outcome o;
  for (std::size_t s = 0; s < row.t; ++s) {
    const double scale = std::max(1.0, max_abs(R[s]));
    o.residual = std::max(o.residual, max_abs_diff(load_matrix(m, C[s]), R[s]) / scale);
  }
  o.tolerance = 1e-10;
  o.expected_g = row.t * std::uint64_t{n} * n * n;
  o.trivial = 2.0 * n * n + static_cast<double>(row.t) * n * n;
  return o;
}

Outcome run_frobenius(const PointSpec& p, DamMachine& m, ResultRow& row) {
  row.b = frobenius_block(p.n, p.M);
  const Address r = kn::frobenius_fused(m, p.n);
  const double want = ref::frobenius(p.n);
  Outcome o;
  o.residual = std::abs(m.slow_value(r) - want) / std::abs(want);
  o.tolerance = 1e-10;
  o.expected_g = std::uint64_t{p.n} * p.n * p.n;
  o.trivial = 1.0;
  const auto imposed = lattice::impose_io(m.trace());
  o.imposed = imposed.imposed_reads + imposed.imposed_writes;
  return o;
}

Outcome dispatch(const PointSpec& p, DamMachine& m, ref::Rng& rng, ResultRow& row) {
  switch (p.kernel) {
    case KernelId::matmul_naive:
    case KernelId::matmul_blocked:
    case KernelId::matmul_discard: return run_matmul(p, m, rng, row);
    case KernelId::matmul_sparse: return run_sparse(p, m, rng, row);
    case KernelId::trsm: return run_trsm(p, m, rng, row);
    case KernelId::lu:
    case KernelId::cholesky:
    case KernelId::ldlt: return run_factor(p, m, rng, row);
    case KernelId::qr: return run_qr(p, m, rng, row);
    case KernelId::minplus:
    case KernelId::apsp: return run_semiring(p, m, rng, row);
    case KernelId::powers: return run_powers(p, m, rng, row);
    case KernelId::multimul: return run_multimul(p, m, rng, row);
    case KernelId::frobenius: return run_frobenius(p, m, row);
  }
  throw Error(Errc::spec_invalid, "unknown kernel");
}

bounds::BoundReport bound_for(const PointSpec& p, const ResultRow& row, const Outcome& o) {
  const double G = static_cast<double>(row.g_ops);
  const std::uint64_t M = p.M;
  const double sqrtM = std::sqrt(static_cast<double>(M));
  const double n = static_cast<double>(p.n);
  switch (p.kernel) {
    case KernelId::matmul_naive:
    case KernelId::matmul_blocked:
    case KernelId::matmul_discard:
    case KernelId::matmul_sparse:
      return bounds::make_report("seq_mm", G, M, G / std::sqrt(8.0 * M) - M, o.trivial);
    case KernelId::qr:
      return bounds::make_report("qr", G, M, bounds::qr_bandwidth_lb(G, M), o.trivial);
    case KernelId::apsp: {
      const auto v = p.mode == "naive" ? bounds::ApspVariant::naive_n4
                                       : bounds::ApspVariant::squaring_n3logn;
      return bounds::make_report(p.mode == "naive" ? "apsp_n4" : "apsp_n3logn", G, M,
                                 p.n >= 2 ? bounds::apsp_lb(p.n, M, v) : 0.0, o.trivial);
    }
    case KernelId::powers:
      return bounds::make_report("powers", G, M, bounds::powers_lb(G, M, row.t, p.n), o.trivial);
    case KernelId::multimul:
      return bounds::make_report("multimul", G, M,
                                 bounds::interleaved_multimul_lb(p.n, row.t, M), o.trivial);
    case KernelId::frobenius:
      return bounds::make_report("general_imposed", G, M,
                                 G / (8.0 * sqrtM) - M - static_cast<double>(o.imposed), o.trivial);
    default:
      (void)n;
      return bounds::general_report(G, M, o.trivial);
  }
}

}  // namespace

std::string_view to_string(KernelId k) noexcept {
  for (const auto& e : kNames)
    if (e.id == k) return e.name;
  return "?";
}

KernelId parse_kernel(std::string_view s) {
  for (const auto& e : kNames)
    if (e.name == s) return e.id;
  throw Error(Errc::spec_invalid, "unknown kernel '" + std::string(s) + "'");
}

std::span<const KernelId> all_kernels() { return kAll; }

std::string_view default_mode(KernelId k) noexcept { return modes_of(k).front(); }

bool valid_mode(KernelId k, std::string_view mode) {
  const auto modes = modes_of(k);
  return std::find(modes.begin(), modes.end(), mode) != modes.end();
}

std::size_t default_t(KernelId k) noexcept {
  return k == KernelId::powers || k == KernelId::multimul ? 4 : 0;
}

std::vector<PointSpec> expand(const ExperimentSpec& spec) {
  if (spec.ns.empty()) throw Error(Errc::spec_invalid, "dimension list is empty");
  if (spec.Ms.empty()) throw Error(Errc::spec_invalid, "M list is empty");
  if (spec.reps == 0) throw Error(Errc::spec_invalid, "repetitions must be >= 1");
  const std::string mode = spec.mode.empty() ? std::string(default_mode(spec.kernel)) : spec.mode;
  if (!valid_mode(spec.kernel, mode)) {
    throw Error(Errc::spec_invalid, "mode '" + mode + "' does not apply to " +
                                        std::string(to_string(spec.kernel)));
  }
  const std::vector<std::size_t> bs = spec.bs.empty() ? std::vector<std::size_t>{0} : spec.bs;
  std::vector<PointSpec> out;
  for (std::size_t n : spec.ns)
    for (std::uint64_t M : spec.Ms)
      for (std::size_t b : bs)
        for (std::size_t rep = 0; rep < spec.reps; ++rep) {
          if (n == 0) throw Error(Errc::spec_invalid, "n must be >= 1");
          if (M == 0) throw Error(Errc::spec_invalid, "M must be >= 1");
          PointSpec p;
          p.kernel = spec.kernel;
          p.n = n;
          p.M = M;
          p.b = b;
          p.t = spec.t;
          p.mode = mode;
          p.layout = spec.layout;
          p.seed = spec.seed;
          p.rep = rep;
          p.timing = spec.timing;
          out.push_back(p);
        }
  return out;
}

PointResult run_point(const PointSpec& p) {
  PointResult out;
  ResultRow& row = out.row;
  row.kernel = to_string(p.kernel);
  row.mode = p.mode.empty() ? std::string(default_mode(p.kernel)) : p.mode;
  row.layout = to_string(p.layout);
  row.n = p.n;
  row.M = p.M;
  row.b = p.b;
  row.t = p.t;
  row.rep = p.rep;
  PointSpec q = p;
  q.mode = row.mode;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (!valid_mode(p.kernel, q.mode)) throw Error(Errc::spec_invalid, "bad mode " + q.mode);
    MachineConfig cfg;
    cfg.fast_capacity_words = p.M;
    cfg.mode = p.kernel == KernelId::matmul_naive ? Mode::lru : Mode::explicit_io;
    cfg.record_trace = p.record_trace || p.kernel == KernelId::frobenius;
    DamMachine m(cfg);
    ref::Rng rng(point_seed(q));
    const Outcome o = dispatch(q, m, rng, row);
    const bool written_back = cfg.mode == Mode::lru
                                  ? m.dirty_count() == 0 && m.scratch_count() == 0
                                  : m.occupancy() == 0;
    if (!written_back) throw Error(Errc::invalid_config, "outputs not written back at termination");
    const Counters& c = m.counters();
    row.words_moved = c.words_moved;
    row.messages = c.messages;
    row.flops = c.flops;
    row.g_ops = c.g_ops;
    row.imposed = o.imposed;
    row.residual = o.residual;
    row.verified = o.residual <= o.tolerance && (!o.expected_g || *o.expected_g == c.g_ops);
    const bounds::BoundReport r = bound_for(q, row, o);
    row.bandwidth_lb = r.bandwidth_lb;
    row.latency_lb = r.latency_lb;
    row.trivial_lb = r.trivial_lb.value_or(0.0);
    row.combined_lb = r.combined_lb;
    row.formula = r.formula_tag;
    row.ratio = r.combined_lb > 0 ? static_cast<double>(c.words_moved) / r.combined_lb : kInf;
    if (p.record_trace) out.trace = m.take_trace();
  } catch (const Error& e) {
    row.error = e.what();
  } catch (const std::exception& e) {
    row.error = std::string("internal: ") + e.what();
  }
  if (p.timing) {
    row.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return out;
}

unsigned worker_count() {
  if (const char* env = std::getenv("IOORACLE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ResultRow> run_points(std::span<const PointSpec> points, unsigned threads) {
  std::vector<ResultRow> rows(points.size());
  const unsigned workers =
      std::min<unsigned>(threads ? threads : worker_count(), std::max<std::size_t>(1, points.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      PointSpec p = points[i];
      p.record_trace = false;
      rows[i] = run_point(p).row;
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  return rows;
}

std::vector<ResultRow> run(const ExperimentSpec& spec, unsigned threads) {
  const auto points = expand(spec);
  return run_points(points, threads);
}

bool feasible(KernelId k, std::string_view mode, std::size_t n, std::uint64_t M) {
  if (n == 0 || M < 3) return false;
  switch (k) {
    case KernelId::powers:
      if (mode == "fused") return kn::fused_powers_shape(n, M).rows >= 1;
      return kn::auto_block(M) >= 1;
    case KernelId::multimul: return M >= 3 * default_t(k);
    case KernelId::ldlt: return kn::ldlt_block(M) >= 1;
    case KernelId::matmul_discard: return discard_block(M) >= 1;
    case KernelId::frobenius: return M >= 5;
    case KernelId::matmul_naive:
    case KernelId::matmul_sparse: return true;
    default: return kn::auto_block(M) >= 1;
  }
}

std::vector<PointSpec> default_grid(std::uint64_t seed) {
  std::vector<PointSpec> out;
  for (KernelId k : kAll) {
    if (k == KernelId::frobenius) continue;
    for (std::string_view mode : modes_of(k))
      for (std::size_t n : {16, 32, 48, 64, 96})
        for (std::uint64_t M : {48, 192, 768}) {
          if (!feasible(k, mode, n, M)) continue;
          PointSpec p;
          p.kernel = k;
          p.n = n;
          p.M = M;
          p.t = default_t(k);
          p.mode = mode;
          p.seed = seed;
          out.push_back(p);
        }
  }
  return out;
}

// ---- output -----------------------------------------------------------------

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string clean(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

double parse_double(const std::string& s) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw Error(Errc::parse_error, "csv: bad number '" + s + "'");
  }
}

std::uint64_t parse_uint(const std::string& s) {
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw Error(Errc::parse_error, "csv: bad integer '" + s + "'");
  }
}

}  // namespace

std::string_view csv_header() {
  return "kernel,mode,layout,n,M,b,t,rep,words_moved,messages,flops,g_ops,bandwidth_lb,"
         "latency_lb,trivial_lb,combined_lb,ratio,imposed,residual,verified,wall_time,formula,"
         "error";
}

void write_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << csv_header() << '\n';
  for (const ResultRow& r : rows) {
    out << r.kernel << ',' << r.mode << ',' << r.layout << ',' << r.n << ',' << r.M << ',' << r.b
        << ',' << r.t << ',' << r.rep << ',' << r.words_moved << ',' << r.messages << ','
        << r.flops << ',' << r.g_ops << ',' << num(r.bandwidth_lb) << ',' << num(r.latency_lb)
        << ',' << num(r.trivial_lb) << ',' << num(r.combined_lb) << ',' << num(r.ratio) << ','
        << r.imposed << ',' << num(r.residual) << ',' << (r.verified ? 1 : 0) << ','
        << num(r.wall_time) << ',' << r.formula << ',' << clean(r.error) << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) {
    throw Error(Errc::parse_error, "csv: header does not match");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 23) throw Error(Errc::parse_error, "csv: expected 23 fields");
    ResultRow r;
    r.kernel = f[0];
    r.mode = f[1];
    r.layout = f[2];
    r.n = parse_uint(f[3]);
    r.M = parse_uint(f[4]);
    r.b = parse_uint(f[5]);
    r.t = parse_uint(f[6]);
    r.rep = parse_uint(f[7]);
    r.words_moved = parse_uint(f[8]);
    r.messages = parse_uint(f[9]);
    r.flops = parse_uint(f[10]);
    r.g_ops = parse_uint(f[11]);
    r.bandwidth_lb = parse_double(f[12]);
    r.latency_lb = parse_double(f[13]);
    r.trivial_lb = parse_double(f[14]);
    r.combined_lb = parse_double(f[15]);
    r.ratio = parse_double(f[16]);
    r.imposed = parse_uint(f[17]);
    r.residual = parse_double(f[18]);
    r.verified = f[19] == "1";
    r.wall_time = parse_double(f[20]);
    r.formula = f[21];
    r.error = f[22];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string to_json(std::span<const ResultRow> rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ResultRow& r : rows) {
    nlohmann::ordered_json j;
    j["kernel"] = r.kernel;
    j["mode"] = r.mode;
    j["layout"] = r.layout;
    j["n"] = r.n;
    j["M"] = r.M;
    j["b"] = r.b;
    j["t"] = r.t;
    j["rep"] = r.rep;
    j["words_moved"] = r.words_moved;
    j["messages"] = r.messages;
    j["flops"] = r.flops;
    j["g_ops"] = r.g_ops;
    j["bandwidth_lb"] = r.bandwidth_lb;
    j["latency_lb"] = r.latency_lb;
    j["trivial_lb"] = r.trivial_lb;
    j["combined_lb"] = r.combined_lb;
    j["ratio"] = std::isinf(r.ratio) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.ratio);
    j["imposed"] = r.imposed;
    j["residual"] = r.residual;
    j["verified"] = r.verified;
    j["wall_time"] = r.wall_time;
    j["formula"] = r.formula;
    j["error"] = r.error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.error);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

// ---- scaling fit ------------------------------------------------------------

double fit_exponent(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::invalid_params, "fit: x and y differ in length");
  if (x.size() < 3) throw Error(Errc::insufficient_points, "fit: need at least 3 points");
  double sx = 0, sy = 0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw Error(Errc::invalid_params, "fit: values must be positive");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0) throw Error(Errc::degenerate, "fit: x is constant");
  return sxy / sxx;
}

double fit_scaling(std::span<const ResultRow> rows, std::string_view x, std::string_view y) {
  if (x != "n" && x != "M") throw Error(Errc::invalid_params, "fit: x must be n or M");
  std::vector<double> xs, ys;
  for (const ResultRow& r : rows) {
    if (!r.ok()) throw Error(Errc::invalid_params, "fit: row carries an error");
    const double other = x == "n" ? static_cast<double>(r.M) : static_cast<double>(r.n);
    const double first = x == "n" ? static_cast<double>(rows[0].M) : static_cast<double>(rows[0].n);
    if (other != first) throw Error(Errc::invalid_params, "fit: rows vary in more than x");
    xs.push_back(x == "n" ? static_cast<double>(r.n) : static_cast<double>(r.M));
    if (y == "words_moved") ys.push_back(static_cast<double>(r.words_moved));
    else if (y == "messages") ys.push_back(static_cast<double>(r.messages));
    else if (y == "g_ops") ys.push_back(static_cast<double>(r.g_ops));
    else if (y == "flops") ys.push_back(static_cast<double>(r.flops));
    else throw Error(Errc::invalid_params, "fit: unknown y '" + std::string(y) + "'");
  }
  return fit_exponent(xs, ys);
}

}  // namespace iooracle::harness
