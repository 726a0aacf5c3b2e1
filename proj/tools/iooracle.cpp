#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iooracle/bounds.hpp"
#include "iooracle/error.hpp"
#include "iooracle/harness.hpp"
#include "iooracle/lattice.hpp"
#include "iooracle/trace.hpp"

namespace h = iooracle::harness;
namespace bd = iooracle::bounds;
using iooracle::Errc;
using iooracle::Error;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct RunFlags {
  std::string kernel = "matmul_blocked";
  std::vector<std::size_t> n;
  std::vector<std::uint64_t> M;
  std::vector<std::size_t> b;
  std::size_t t = 0;
  std::string mode;
  std::string layout = "row_major";
  std::uint64_t seed = 1;
  std::size_t reps = 1;
  bool timing = false;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--kernel", f.kernel, "kernel id");
  app->add_option("--n", f.n, "matrix dimensions")->delimiter(',');
  app->add_option("--M", f.M, "fast-memory capacities in words")->delimiter(',');
  app->add_option("--b", f.b, "block sizes (default: automatic)")->delimiter(',');
  app->add_option("--t", f.t, "powers / multiplies count");
  app->add_option("--mode", f.mode, "kernel mode");
  app->add_option("--layout", f.layout, "row_major | col_major | recursive_block");
  app->add_option("--seed", f.seed, "input seed");
  app->add_option("--reps", f.reps, "repetitions per point");
  app->add_flag("--timing", f.timing, "fill wall_time");
}

h::ExperimentSpec to_spec(const RunFlags& f) {
  h::ExperimentSpec s;
  s.kernel = h::parse_kernel(f.kernel);
  s.ns = f.n;
  s.Ms = f.M;
  s.bs = f.b;
  s.t = f.t;
  s.mode = f.mode;
  s.layout = iooracle::parse_layout(f.layout);
  s.seed = f.seed;
  s.reps = f.reps;
  s.timing = f.timing;
  return s;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << text;
}

std::string format_rows(const std::vector<h::ResultRow>& rows, const std::string& format) {
  if (format == "json") return h::to_json(rows) + "\n";
  std::ostringstream os;
  h::write_csv(os, rows);
  return os.str();
}

int cmd_run(const RunFlags& f, const std::string& out, const std::string& format,
            const std::string& trace_out) {
  const h::ExperimentSpec spec = to_spec(f);
  std::vector<h::ResultRow> rows;
  if (!trace_out.empty()) {
    auto points = h::expand(spec);
    if (points.size() != 1) throw Error(Errc::spec_invalid, "--trace-out needs exactly one grid point");
    points[0].record_trace = true;
    h::PointResult r = h::run_point(points[0]);
    std::ofstream tf(trace_out);
    if (!tf) throw Error(Errc::io_error, "cannot write " + trace_out);
    iooracle::write_trace(tf, r.trace);
    rows.push_back(std::move(r.row));
  } else {
    rows = h::run(spec);
  }
  emit(out, format_rows(rows, format));
  std::size_t bad = 0;
  for (const auto& r : rows) bad += !r.verified || !h::soundness_violations(r).empty();
  if (bad) std::cerr << bad << " of " << rows.size() << " rows failed verification or soundness\n";
  return bad ? kFail : kPass;
}

struct BoundFlags {
  std::string formula = "general";
  std::optional<double> G;
  std::optional<std::uint64_t> n;
  std::uint64_t t = 2;
  std::uint64_t M = 0;
  std::uint64_t P = 1;
  std::optional<double> NNZ;
  std::vector<double> phases;
  double c = 1.0 / 8.0;
};

int cmd_bounds(const BoundFlags& f) {
  auto need_G = [&] {
    if (!f.G) throw Error(Errc::spec_invalid, "--G is required for " + f.formula);
    return *f.G;
  };
  auto need_n = [&] {
    if (!f.n) throw Error(Errc::spec_invalid, "--n is required for " + f.formula);
    return *f.n;
  };
  bd::BoundReport r;
  const std::string& x = f.formula;
  if (x == "general") {
    r = bd::general_report(need_G(), f.M, std::nullopt);
  } else if (x == "latency") {
    const double G = need_G();
    r = bd::make_report("latency", G, f.M, G / (8.0 * std::sqrt(double(f.M))) - double(f.M), std::nullopt);
    r.latency_lb = bd::latency_lb(G, f.M);
  } else if (x == "seq_mm") {
    if (f.G) {
      r = bd::make_report("seq_mm", *f.G, f.M, *f.G / std::sqrt(8.0 * f.M) - double(f.M), std::nullopt);
    } else {
      r = bd::matmul_dense_lb(need_n(), need_n(), need_n(), f.M);
    }
  } else if (x == "par_mm") {
    if (!f.NNZ) throw Error(Errc::spec_invalid, "--NNZ is required for par_mm");
    r = bd::parallel_matmul_lb(need_G(), bd::ParallelParams{f.P, *f.NNZ}, f.n);
  } else if (x == "qr") {
    r = bd::make_report("qr", need_G(), f.M, bd::qr_bandwidth_lb(need_G(), f.M), std::nullopt);
  } else if (x == "two_sided") {
    r = bd::make_report("two_sided", need_G(), f.M, bd::two_sided_lb(need_G(), f.M), std::nullopt);
  } else if (x == "powers") {
    r = bd::make_report("powers", need_G(), f.M, bd::powers_lb(need_G(), f.M, f.t, need_n()), std::nullopt);
  } else if (x == "multimul") {
    const double n = double(need_n());
    r = bd::make_report("multimul", std::sqrt(double(f.t)) * n * n * n, f.M,
                        bd::interleaved_multimul_lb(need_n(), f.t, f.M), std::nullopt);
  } else if (x == "phased") {
    r = bd::make_report("phased", 0, f.M, bd::phased_sequence_lb(f.phases, f.M), std::nullopt);
  } else if (x == "apsp_naive" || x == "apsp_squaring") {
    const auto v = x == "apsp_naive" ? bd::ApspVariant::naive_n4 : bd::ApspVariant::squaring_n3logn;
    r = bd::make_report(x, 0, f.M, bd::apsp_lb(need_n(), f.M, v), std::nullopt);
  } else if (x == "stencil") {
    r = bd::make_report("stencil", 0, f.M, bd::stencil_cholesky_lb(need_n(), f.M, f.c), std::nullopt);
  } else {
    throw Error(Errc::spec_invalid, "unknown formula '" + x + "'");
  }
  std::cout << bd::to_json(r) << "\n";
  return kPass;
}

int cmd_audit(const std::string& path, std::uint64_t M, bool householder, bool impose,
              const std::string& out) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  const iooracle::Trace trace = iooracle::read_trace(in);
  const h::AuditLimits lim = h::audit_limits(M, householder);
  const h::AuditReport rep = h::audit_trace(trace, M, lim);
  std::string text = h::to_json(rep, lim);
  if (impose) {
    const auto imp = iooracle::lattice::impose_io(trace);
    std::ostringstream os;
    os << "{\"imposed_reads\": " << imp.imposed_reads << ", \"imposed_writes\": " << imp.imposed_writes
       << "}";
    text += "\n" + os.str();
  }
  emit(out, text + "\n");
  std::cerr << (rep.passed() ? "audit: pass" : "audit: FAIL, " + rep.first_violation) << "\n";
  return rep.passed() ? kPass : kFail;
}

int cmd_check(const std::string& suite, std::uint64_t seed, const std::string& out) {
  const h::CheckReport rep = h::check(h::parse_suite(suite), h::CheckOptions{seed, 0});
  emit(out, h::to_json(rep) + "\n");
  for (const auto& a : rep.assertions) {
    std::cerr << (a.passed ? "PASS " : "FAIL ") << a.suite << "/" << a.name << "  " << a.detail << "\n";
  }
  return rep.passed() ? kPass : kFail;
}

int cmd_fit(const RunFlags& f, const std::string& in_path, const std::string& x, const std::string& y,
            std::optional<double> expect, double tol) {
  std::vector<h::ResultRow> rows;
  if (!in_path.empty()) {
    std::ifstream in(in_path);
    if (!in) throw Error(Errc::io_error, "cannot read " + in_path);
    rows = h::read_csv(in);
  } else {
    rows = h::run(to_spec(f));
  }
  const double e = h::fit_scaling(rows, x, y);
  std::cout << "{\"x\": \"" << x << "\", \"y\": \"" << y << "\", \"points\": " << rows.size()
            << ", \"exponent\": " << e << "}\n";
  if (expect && std::abs(e - *expect) > tol) {
    std::cerr << "fit: exponent " << e << " outside " << *expect << " +/- " << tol << "\n";
    return kFail;
  }
  return kPass;
}

bool usage_error(Errc c) {
  return c == Errc::spec_invalid || c == Errc::invalid_params || c == Errc::parse_error ||
         c == Errc::io_error || c == Errc::insufficient_points || c == Errc::degenerate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DAM-model I/O counting and lower-bound checks"};
  app.require_subcommand(1);

  RunFlags run_flags;
  std::string out, format = "csv", trace_out;
  CLI::App* run = app.add_subcommand("run", "run a kernel over a grid");
  add_run_flags(run, run_flags);
  run->add_option("--out", out, "output path (default stdout)");
  run->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--trace-out", trace_out, "write the trace of a single-point run");

  BoundFlags bf;
  CLI::App* bounds = app.add_subcommand("bounds", "evaluate a lower-bound formula");
  bounds->add_option("--formula", bf.formula,
                     "general latency seq_mm par_mm qr two_sided powers multimul phased "
                     "apsp_naive apsp_squaring stencil");
  bounds->add_option("--G", bf.G, "multiply count");
  bounds->add_option("--n", bf.n, "dimension");
  bounds->add_option("--t", bf.t, "count");
  bounds->add_option("--M", bf.M, "fast memory words")->required();
  bounds->add_option("--P", bf.P, "processors");
  bounds->add_option("--NNZ", bf.NNZ, "total nonzeros");
  bounds->add_option("--phases", bf.phases, "per-phase bounds")->delimiter(',');
  bounds->add_option("--c", bf.c, "stencil constant");

  std::string trace_path;
  std::uint64_t audit_M = 0;
  bool householder = false, impose = false;
  std::string audit_out;
  CLI::App* audit = app.add_subcommand("audit", "segment audit of a trace file");
  audit->add_option("--trace", trace_path, "trace file")->required();
  audit->add_option("--M", audit_M, "fast memory words")->required();
  audit->add_flag("--householder", householder, "use the Householder per-segment cap");
  audit->add_flag("--impose", impose, "also report imposed reads and writes");
  audit->add_option("--out", audit_out, "output path (default stdout)");

  std::string suite = "all", check_out;
  std::uint64_t check_seed = 1;
  CLI::App* check = app.add_subcommand("check", "run property suites");
  check->add_option("suite", suite, "lw | segments | soundness | numerics | all")
      ->check(CLI::IsMember({"lw", "segments", "soundness", "numerics", "all"}));
  check->add_option("--seed", check_seed, "seed");
  check->add_option("--out", check_out, "JSON report path (default stdout)");

  RunFlags fit_flags;
  std::string fit_in, fit_x = "n", fit_y = "words_moved";
  std::optional<double> expect;
  double tol = 0.1;
  CLI::App* fit = app.add_subcommand("fit", "fit a scaling exponent");
  add_run_flags(fit, fit_flags);
  fit->add_option("--in", fit_in, "CSV produced by run");
  fit->add_option("--x", fit_x, "n | M")->check(CLI::IsMember({"n", "M"}));
  fit->add_option("--y", fit_y, "words_moved | messages | g_ops | flops");
  fit->add_option("--expect", expect, "expected exponent");
  fit->add_option("--tol", tol, "tolerance on the expected exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*run) return cmd_run(run_flags, out, format, trace_out);
    if (*bounds) return cmd_bounds(bf);
    if (*audit) return cmd_audit(trace_path, audit_M, householder, impose, audit_out);
    if (*check) return cmd_check(suite, check_seed, check_out);
    if (*fit) return cmd_fit(fit_flags, fit_in, fit_x, fit_y, expect, tol);
  } catch (const Error& e) {
    std::cerr << "iooracle: " << e.what() << "\n";
    return usage_error(e.code()) ? kUsage : kFail;
  }
  return kUsage;
}
