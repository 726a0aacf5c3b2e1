#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include <json.hpp>

#include "iooracle/bounds.hpp"
#include "iooracle/error.hpp"
#include "iooracle/harness.hpp"
#include "iooracle/kernels.hpp"
#include "iooracle/reference.hpp"

namespace iooracle::harness {

bool CheckReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

void CheckReport::add(std::string suite, std::string name, bool ok, std::string detail) {
  assertions.push_back(Assertion{std::move(suite), std::move(name), ok, std::move(detail)});
}

void CheckReport::merge(const CheckReport& other) {
  assertions.insert(assertions.end(), other.assertions.begin(), other.assertions.end());
}

Suite parse_suite(std::string_view s) {
  if (s == "lw") return Suite::lw;
  if (s == "segments") return Suite::segments;
  if (s == "soundness") return Suite::soundness;
  if (s == "numerics") return Suite::numerics;
  if (s == "all") return Suite::all;
  throw Error(Errc::spec_invalid, "unknown suite '" + std::string(s) + "'");
}

AuditLimits audit_limits(std::uint64_t M, bool householder) {
  const double m = static_cast<double>(M);
  AuditLimits l;
  l.g_cap = householder ? std::sqrt(128.0 * m * m * m) : std::pow(4.0 * m, 1.5);
  l.s1_cap = 2.0 * m;
  l.d1_cap = 2.0 * m;
  return l;
}

AuditReport audit_trace(const Trace& trace, std::uint64_t M, const AuditLimits& limits) {
  AuditReport r;
  r.segments = lattice::segment_partition(trace, M);
  for (const auto& s : r.segments) {
    std::string why;
    if (s.complete && static_cast<double>(s.g_op_count) > limits.g_cap) {
      why = "g_ops " + std::to_string(s.g_op_count);
    } else if (static_cast<double>(s.classes.s1()) > limits.s1_cap) {
      why = "S1 " + std::to_string(s.classes.s1());
    } else if (static_cast<double>(s.classes.d1()) > limits.d1_cap) {
      why = "D1 " + std::to_string(s.classes.d1());
    }
    if (!why.empty()) {
      if (r.violations++ == 0) r.first_violation = "segment " + std::to_string(s.index) + ": " + why;
    }
  }
  return r;
}

std::string to_json(const AuditReport& report, const AuditLimits& limits) {
  nlohmann::ordered_json segs = nlohmann::ordered_json::array();
  std::size_t complete = 0;
  for (const auto& s : report.segments) {
    complete += s.complete;
    nlohmann::ordered_json j;
    j["index"] = s.index;
    j["complete"] = s.complete;
    j["transfers"] = s.transfer_count;
    j["flops"] = s.flop_count;
    j["g_ops"] = s.g_op_count;
    j["s1d1"] = s.classes.s1d1;
    j["s1d2"] = s.classes.s1d2;
    j["s2d1"] = s.classes.s2d1;
    j["s2d2"] = s.classes.s2d2;
    j["s2d2_g"] = s.s2d2_g;
    j["pass"] = (!s.complete || static_cast<double>(s.g_op_count) <= limits.g_cap) &&
                static_cast<double>(s.classes.s1()) <= limits.s1_cap &&
                static_cast<double>(s.classes.d1()) <= limits.d1_cap;
    segs.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["segments"] = std::move(segs);
  nlohmann::ordered_json sum;
  sum["segment_count"] = report.segments.size();
  sum["complete"] = complete;
  sum["g_cap"] = limits.g_cap;
  sum["s1_cap"] = limits.s1_cap;
  sum["d1_cap"] = limits.d1_cap;
  sum["violations"] = report.violations;
  if (!report.first_violation.empty()) sum["first_violation"] = report.first_violation;
  sum["passed"] = report.passed();
  out["summary"] = std::move(sum);
  return out.dump(2);
}

std::string to_json(const CheckReport& report) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Assertion& a : report.assertions) {
    nlohmann::ordered_json j;
    j["suite"] = a.suite;
    j["name"] = a.name;
    j["passed"] = a.passed;
    j["detail"] = a.detail;
    arr.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["assertions"] = std::move(arr);
  out["passed"] = report.passed();
  return out.dump(2);
}

namespace {

CheckReport check_lw(std::uint64_t seed) {
  CheckReport rep;
  const auto start = std::chrono::steady_clock::now();
  std::size_t bad = 0;
  for (unsigned mask = 0; mask < 256; ++mask) {
    lattice::LatticeSet v;
    for (int p = 0; p < 8; ++p)
      if (mask >> p & 1u) v.insert({p & 1, p >> 1 & 1, p >> 2 & 1});
    bad += !lattice::lw_check(v).holds;
  }
  rep.add("lw", "cube2_exhaustive", bad == 0, std::to_string(256 - bad) + "/256 subsets hold");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bad = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double density = unit(rng);
    lattice::LatticeSet v;
    for (int x = 0; x < 6; ++x)
      for (int y = 0; y < 6; ++y)
        for (int z = 0; z < 6; ++z)
          if (unit(rng) < density) v.insert({x, y, z});
    bad += !lattice::lw_check(v).holds;
  }
  rep.add("lw", "cube6_random", bad == 0, std::to_string(10000 - bad) + "/10000 subsets hold");

  bool equal = true;
  for (int k = 1; k <= 6; ++k) {
    lattice::LatticeSet v;
    for (int x = 0; x < k; ++x)
      for (int y = 0; y < k; ++y)
        for (int z = 0; z < k; ++z) v.insert({x, y, z});
    const auto r = lattice::lw_check(v);
    equal = equal && r.bound == static_cast<double>(r.size);
  }
  rep.add("lw", "full_cube_equality", equal, "k = 1..6");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.add("lw", "runtime", secs < 5.0, std::to_string(secs) + " s");
  return rep;
}

CheckReport check_segments(std::uint64_t seed) {
  CheckReport rep;
  const KernelId kinds[] = {KernelId::matmul_blocked, KernelId::lu, KernelId::cholesky,
                            KernelId::ldlt, KernelId::qr};
  for (KernelId k : kinds)
    for (std::size_t n : {32, 64})
      for (std::uint64_t M : {48, 192}) {
        PointSpec p;
        p.kernel = k;
        p.n = n;
        p.M = M;
        p.mode = std::string(default_mode(k));
        p.seed = seed;
        p.record_trace = true;
        const PointResult res = run_point(p);
        const std::string name =
            std::string(to_string(k)) + "/n=" + std::to_string(n) + "/M=" + std::to_string(M);
        if (!res.row.ok()) {
          rep.add("segments", name, false, res.row.error);
          continue;
        }
        const AuditLimits lim = audit_limits(M, k == KernelId::qr);
        const AuditReport a = audit_trace(res.trace, M, lim);
        std::uint64_t max_g = 0, max_s1 = 0, max_d1 = 0;
        for (const auto& s : a.segments) {
          if (s.complete) max_g = std::max(max_g, s.g_op_count);
          max_s1 = std::max(max_s1, s.classes.s1());
          max_d1 = std::max(max_d1, s.classes.d1());
        }
        rep.add("segments", name, a.passed(),
                std::to_string(a.segments.size()) + " segments, max g " + std::to_string(max_g) +
                    " (cap " + std::to_string(lim.g_cap) + "), max S1 " + std::to_string(max_s1) +
                    ", max D1 " + std::to_string(max_d1) +
                    (a.passed() ? "" : "; " + a.first_violation));
      }
  return rep;
}

}  // namespace

std::vector<std::string> soundness_violations(const ResultRow& r) {
  std::vector<std::string> why;
  if (!r.ok()) {
    why.push_back("error " + r.error);
    return why;
  }
  const double w = static_cast<double>(r.words_moved), msg = static_cast<double>(r.messages);
  if (w < r.combined_lb) why.push_back("words " + std::to_string(r.words_moved) + " < combined_lb");
  if (msg < r.latency_lb) why.push_back("messages < report latency_lb");
  if (msg < bounds::latency_lb(static_cast<double>(r.g_ops), r.M)) {
    why.push_back("messages < latency_lb(g_ops, M)");
  }
  if (r.combined_lb > 0 && r.ratio < 1.0) why.push_back("ratio < 1");
  return why;
}

namespace {

CheckReport check_soundness(const CheckOptions& opt) {
  CheckReport rep;
  const auto grid = default_grid(opt.seed);
  const auto rows = run_points(grid, opt.threads);
  std::map<std::string, std::pair<std::size_t, std::vector<std::string>>> groups;
  for (const ResultRow& r : rows) {
    auto& g = groups[r.kernel + "/" + r.mode];
    ++g.first;
    for (const auto& why : soundness_violations(r)) {
      g.second.push_back("n=" + std::to_string(r.n) + " M=" + std::to_string(r.M) + ": " + why);
    }
  }
  for (const auto& [name, g] : groups) {
    std::string detail = std::to_string(g.first) + " rows, " + std::to_string(g.second.size()) +
                         " violations";
    if (!g.second.empty()) detail += "; first: " + g.second.front();
    rep.add("soundness", name, g.second.empty(), detail);
  }
  rep.add("soundness", "grid_rows", rows.size() == grid.size() && !rows.empty(),
          std::to_string(rows.size()) + " rows");
  return rep;
}

CheckReport check_numerics(const CheckOptions& opt) {
  CheckReport rep;
  std::vector<PointSpec> pts;
  for (KernelId k : all_kernels()) {
    const std::vector<std::string_view> modes =
        k == KernelId::apsp       ? std::vector<std::string_view>{"naive", "squaring"}
        : k == KernelId::powers   ? std::vector<std::string_view>{"phased", "fused"}
        : k == KernelId::multimul ? std::vector<std::string_view>{"phased", "interleaved"}
                                  : std::vector<std::string_view>{default_mode(k)};
    for (std::string_view mode : modes)
      for (std::size_t n : {17, 32, 48}) {
        PointSpec p;
        p.kernel = k;
        p.n = n;
        p.M = 192;
        p.t = default_t(k);
        p.mode = std::string(mode);
        p.seed = opt.seed;
        pts.push_back(p);
      }
  }
  const auto rows = run_points(pts, opt.threads);
  for (const ResultRow& r : rows) {
    const std::string name = r.kernel + "/" + r.mode + "/n=" + std::to_string(r.n);
    rep.add("numerics", name, r.ok() && r.verified,
            r.ok() ? "residual " + std::to_string(r.residual) + ", g_ops " + std::to_string(r.g_ops)
                   : r.error);
    if (r.kernel == "ldlt" && r.ok()) {
      const double target = std::pow(static_cast<double>(r.n), 3) / 6.0;
      const double rel = std::abs(static_cast<double>(r.g_ops) - target) / target;
      rep.add("numerics", name + "/g_near_n3_over_6", r.n < 32 || rel <= 0.2,
              "relative gap " + std::to_string(rel));
    }
  }

  // APSP against Floyd-Warshall on random digraphs
  std::mt19937_64 rng(opt.seed ^ 0x5eed);
  std::uniform_int_distribution<std::size_t> size(2, 32);
  std::size_t exact = 0;
  std::string first_bad;
  for (int g = 0; g < 50; ++g) {
    const std::size_t n = size(rng);
    const Matrix W = reference::random_digraph(n, rng, 0.3);
    const Matrix want = reference::floyd_warshall(W);
    bool ok = true;
    for (auto variant : {kernels::ApspVariant::naive, kernels::ApspVariant::squaring}) {
      DamMachine m(MachineConfig{192, Mode::explicit_io, false});
      const MatrixHandle D = kernels::apsp(m, store_matrix(m, W), variant, kernels::auto_block(192));
      ok = ok && load_matrix(m, D) == want;
    }
    exact += ok;
    if (!ok && first_bad.empty()) first_bad = "graph " + std::to_string(g) + " n=" + std::to_string(n);
  }
  rep.add("numerics", "apsp_floyd_warshall_50", exact == 50,
          std::to_string(exact) + "/50 exact" + (first_bad.empty() ? "" : "; " + first_bad));
  return rep;
}

}  // namespace

CheckReport check(Suite suite, const CheckOptions& options) {
  CheckReport rep;
  if (suite == Suite::lw || suite == Suite::all) rep.merge(check_lw(options.seed));
  if (suite == Suite::segments || suite == Suite::all) rep.merge(check_segments(options.seed));
  if (suite == Suite::soundness || suite == Suite::all) rep.merge(check_soundness(options));
  if (suite == Suite::numerics || suite == Suite::all) rep.merge(check_numerics(options));
  return rep;
}

}  // namespace iooracle::harness
