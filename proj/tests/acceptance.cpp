// One PASS/FAIL line per acceptance criterion; exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "iooracle/bounds.hpp"
#include "iooracle/harness.hpp"
#include "iooracle/kernels.hpp"
#include "iooracle/lattice.hpp"
#include "iooracle/machine.hpp"
#include "iooracle/reference.hpp"

using namespace iooracle;
namespace h = iooracle::harness;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

int failures = 0;

void report(int id, const Outcome& o) {
  std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string first_failure(const h::CheckReport& r) {
  for (const auto& a : r.assertions)
    if (!a.passed) return a.suite + "/" + a.name + ": " + a.detail;
  return {};
}

h::ResultRow point(h::KernelId k, std::size_t n, std::uint64_t M, std::string mode = {},
                   std::size_t t = 0, Layout layout = Layout::row_major, std::size_t b = 0) {
  h::PointSpec p;
  p.kernel = k;
  p.n = n;
  p.M = M;
  p.b = b;
  p.t = t ? t : h::default_t(k);
  p.mode = mode.empty() ? std::string(h::default_mode(k)) : mode;
  p.layout = layout;
  return h::run_point(p).row;
}

// ---------------------------------------------------------------------------

Outcome loomis_whitney() {
  const auto t0 = Clock::now();
  const auto r = h::check(h::Suite::lw);
  const double s = seconds_since(t0);
  Outcome o;
  if (!r.passed()) o.fail(first_failure(r));
  if (s >= 5.0) o.fail(fmt("runtime %.2f s", s));
  if (o.pass) o.detail = fmt("%zu assertions, %.2f s", r.assertions.size(), s);
  return o;
}

Outcome soundness(const std::vector<h::ResultRow>& grid, double secs) {
  Outcome o;
  std::size_t bad = 0;
  for (const auto& r : grid) {
    auto v = h::soundness_violations(r);
    const double lat = bounds::latency_lb(double(r.g_ops), r.M);
    if (double(r.messages) < lat) v.push_back(fmt("messages %llu < latency_lb %g", (unsigned long long)r.messages, lat));
    if (!v.empty()) {
      ++bad;
      o.fail(fmt("%s/%s n=%zu M=%llu: %s", r.kernel.c_str(), r.mode.c_str(), r.n,
                 (unsigned long long)r.M, v.front().c_str()));
    }
  }
  if (secs >= 600) o.fail(fmt("runtime %.0f s", secs));
  o.detail = fmt("%zu rows, %zu violations, %.1f s%s%s", grid.size(), bad, secs,
                 o.pass ? "" : "; first: ", o.pass ? "" : o.detail.c_str());
  return o;
}

Outcome segment_audit() {
  const auto r = h::check(h::Suite::segments);
  Outcome o;
  if (!r.passed()) o.fail(first_failure(r));
  if (o.pass) o.detail = fmt("%zu traces audited", r.assertions.size());
  return o;
}

Outcome attainment(const std::vector<h::ResultRow>& grid) {
  Outcome o;
  std::size_t checked = 0;
  for (const auto& r : grid) {
    if (r.kernel != "matmul_blocked" || r.layout != "row_major" || r.n < 4 * r.b) continue;
    ++checked;
    const double cap = 8.0 * std::pow(double(r.n), 3) / std::sqrt(double(r.M));
    if (double(r.words_moved) > cap)
      o.fail(fmt("n=%zu M=%llu words %llu > %g", r.n, (unsigned long long)r.M,
                 (unsigned long long)r.words_moved, cap));
  }
  if (checked == 0) o.fail("no grid point with n >= 4b");

  h::ExperimentSpec over_m;
  over_m.kernel = h::KernelId::matmul_blocked;
  over_m.ns = {96};
  over_m.Ms = {48, 192, 768};
  const double em = h::fit_scaling(h::run(over_m), "M", "words_moved");

  h::ExperimentSpec over_n = over_m;
  over_n.ns = {64, 96, 128, 192, 256};
  over_n.Ms = {192};
  const double en = h::fit_scaling(h::run(over_n), "n", "words_moved");

  if (std::abs(em + 0.5) > 0.1) o.fail(fmt("exponent over M %.3f", em));
  if (std::abs(en - 3.0) > 0.1) o.fail(fmt("exponent over n %.3f", en));
  const std::string d = fmt("%zu points with n >= 4b; exponent over M %.3f, over n %.3f", checked, em, en);
  o.detail = o.pass ? d : o.detail + "; " + d;
  return o;
}

Outcome latency_attainment() {
  Outcome o;
  std::size_t checked = 0;
  double worst = 0;
  for (std::uint64_t M : {48u, 192u, 768u})
    for (std::size_t n : {16u, 32u, 48u, 64u, 96u}) {
      const std::size_t b = kernels::auto_block(M);
      if (n < 4 * b) continue;
      ++checked;
      const auto rec = point(h::KernelId::matmul_blocked, n, M, {}, 0, Layout::recursive_block);
      const auto row = point(h::KernelId::matmul_blocked, n, M, {}, 0, Layout::row_major);
      const double x = double(n) / double(b);
      const double cap = 8.0 * std::pow(double(n), 3) / std::pow(double(M), 1.5) + 3 * x * x;
      worst = std::max(worst, double(rec.messages) / cap);
      if (double(rec.messages) > cap)
        o.fail(fmt("n=%zu M=%llu recursive messages %llu > %.1f", n, (unsigned long long)M,
                   (unsigned long long)rec.messages, cap));
      if (rec.messages >= row.messages)
        o.fail(fmt("n=%zu M=%llu recursive %llu not below row-major %llu", n, (unsigned long long)M,
                   (unsigned long long)rec.messages, (unsigned long long)row.messages));
    }
  const std::string d = fmt("%zu points, worst messages/cap %.3f", checked, worst);
  o.detail = o.pass ? d : o.detail + "; " + d;
  return o;
}

Outcome interleaving() {
  Outcome o;
  std::string d;
  for (std::size_t t : {1u, 4u, 16u}) {
    const auto ph = point(h::KernelId::multimul, 64, 768, "phased", t);
    const auto in = point(h::KernelId::multimul, 64, 768, "interleaved", t);
    if (!ph.ok() || !in.ok()) {
      o.fail(ph.ok() ? in.error : ph.error);
      continue;
    }
    const double ratio = double(ph.words_moved) / double(in.words_moved);
    const double need = 0.6 * std::sqrt(double(t));
    const double lb = bounds::interleaved_multimul_lb(64, t, 768);
    if (ratio < need) o.fail(fmt("t=%zu ratio %.3f < %.3f", t, ratio, need));
    if (double(in.words_moved) < lb) o.fail(fmt("t=%zu interleaved %llu < lb %g", t, (unsigned long long)in.words_moved, lb));
    d += fmt("%st=%zu %llu/%llu=%.3f", d.empty() ? "" : ", ", t, (unsigned long long)ph.words_moved,
             (unsigned long long)in.words_moved, ratio);
  }
  o.detail = o.pass ? d : o.detail + "; " + d;
  return o;
}

Outcome consecutive_powers() {
  Outcome o;
  const std::size_t n = 32, t = 4;
  const std::uint64_t M = 256;
  const auto ph = point(h::KernelId::powers, n, M, "phased", t);
  const auto fu = point(h::KernelId::powers, n, M, "fused", t);
  if (!ph.ok() || !fu.ok()) {
    o.fail(ph.ok() ? fu.error : ph.error);
    return o;
  }
  const double saving = double(ph.words_moved) - double(fu.words_moved);
  const double need = double((t - 2) * n * n);
  for (const auto* r : {&ph, &fu}) {
    const double lb = bounds::powers_lb(double(r->g_ops), M, t, n);
    if (double(r->words_moved) < lb) o.fail(fmt("%s words %llu < powers_lb %g", r->mode.c_str(), (unsigned long long)r->words_moved, lb));
  }
  if (saving < need) o.fail(fmt("fused saves %.0f words, needs >= %.0f", saving, need));
  const std::string d = fmt("phased %llu, fused %llu", (unsigned long long)ph.words_moved, (unsigned long long)fu.words_moved);
  o.detail = o.pass ? d : o.detail + "; " + d;
  return o;
}

Outcome numerics() {
  Outcome o;
  const auto r = h::check(h::Suite::numerics);
  if (!r.passed()) o.fail(first_failure(r));
  const std::size_t n = 64;
  const std::uint64_t M = 768;
  const std::uint64_t n3 = n * n * n;
  const std::vector<std::tuple<h::KernelId, std::uint64_t>> exact{
      {h::KernelId::matmul_blocked, n3},
      {h::KernelId::matmul_naive, n3},
      {h::KernelId::lu, reference::lu_g_count(n)},
      {h::KernelId::cholesky, reference::cholesky_g_count(n)},
  };
  for (auto [k, expect] : exact) {
    const auto row = point(k, n, M);
    if (row.g_ops != expect)
      o.fail(fmt("%s n=64 g_ops %llu != %llu", row.kernel.c_str(), (unsigned long long)row.g_ops, (unsigned long long)expect));
    if (!row.verified) o.fail(fmt("%s n=64 residual %g", row.kernel.c_str(), row.residual));
  }
  const auto ld = point(h::KernelId::ldlt, n, M);
  const double sixth = double(n3) / 6.0;
  if (std::abs(double(ld.g_ops) - sixth) > 0.2 * sixth) o.fail(fmt("ldlt g_ops %llu vs n^3/6", (unsigned long long)ld.g_ops));
  if (o.pass) o.detail = fmt("%zu assertions; n=64 counts exact, ldlt g/(n^3/6) = %.3f", r.assertions.size(), double(ld.g_ops) / sixth);
  return o;
}

Outcome careful_counting(const std::vector<h::ResultRow>& grid) {
  Outcome o;
  std::map<std::pair<std::size_t, std::uint64_t>, std::uint64_t> dense;
  for (const auto& r : grid)
    if (r.kernel == "matmul_blocked" && r.layout == "row_major") dense[{r.n, r.M}] = r.g_ops;
  std::size_t checked = 0;
  for (const auto& r : grid) {
    if (r.kernel != "matmul_discard") continue;
    ++checked;
    const auto it = dense.find({r.n, r.M});
    if (it == dense.end() || it->second != r.g_ops || r.g_ops != r.n * r.n * r.n)
      o.fail(fmt("n=%zu M=%llu g_ops %llu", r.n, (unsigned long long)r.M, (unsigned long long)r.g_ops));
    if (r.flops < r.g_ops + r.n * r.n) o.fail(fmt("n=%zu M=%llu missing discarded products", r.n, (unsigned long long)r.M));
    if (!h::soundness_violations(r).empty()) o.fail(h::soundness_violations(r).front());
  }
  if (checked == 0) o.fail("no discard rows in the grid");
  if (o.pass) o.detail = fmt("%zu rows, g_ops unchanged, all sound", checked);
  return o;
}

Outcome impose_io() {
  Outcome o;
  const std::size_t n = 16;
  const std::uint64_t M = 768;
  DamMachine m(MachineConfig{M, Mode::explicit_io, true});
  kernels::frobenius_fused(m, n);
  const auto imposed = lattice::impose_io(m.trace());
  const auto& c = m.counters();
  const double lb = bounds::general_bandwidth_lb(double(c.g_ops), M) -
                    double(imposed.imposed_reads + imposed.imposed_writes);
  if (imposed.imposed_reads > 2 * n * n) o.fail(fmt("imposed reads %llu", (unsigned long long)imposed.imposed_reads));
  if (imposed.imposed_writes > n * n) o.fail(fmt("imposed writes %llu", (unsigned long long)imposed.imposed_writes));
  if (lb > double(c.words_moved)) o.fail(fmt("corrected bound %g > words %llu", lb, (unsigned long long)c.words_moved));
  const std::string d = fmt("imposed reads %llu, writes %llu, words %llu, corrected bound %g",
                            (unsigned long long)imposed.imposed_reads, (unsigned long long)imposed.imposed_writes,
                            (unsigned long long)c.words_moved, lb);
  o.detail = o.pass ? d : o.detail + "; " + d;
  return o;
}

}  // namespace

int main() {
  report(1, loomis_whitney());

  const auto t0 = Clock::now();
  const auto points = h::default_grid(1);
  const auto grid = h::run_points(points);
  const double grid_secs = seconds_since(t0);

  report(2, soundness(grid, grid_secs));
  report(3, segment_audit());
  report(4, attainment(grid));
  report(5, latency_attainment());
  report(6, interleaving());
  report(7, consecutive_powers());
  report(8, numerics());
  report(9, careful_counting(grid));
  report(10, impose_io());

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
