#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "iooracle/error.hpp"
#include "iooracle/harness.hpp"

using namespace iooracle;
namespace h = iooracle::harness;

namespace {

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::invalid_config;
}

std::string csv(const std::vector<h::ResultRow>& rows) {
  std::ostringstream out;
  h::write_csv(out, rows);
  return out.str();
}

}  // namespace

TEST_CASE("csv header is stable") {
  CHECK(h::csv_header() ==
        "kernel,mode,layout,n,M,b,t,rep,words_moved,messages,flops,g_ops,bandwidth_lb,latency_lb,"
        "trivial_lb,combined_lb,ratio,imposed,residual,verified,wall_time,formula,error");
}

TEST_CASE("kernel names round trip") {
  for (h::KernelId k : h::all_kernels()) CHECK(h::parse_kernel(h::to_string(k)) == k);
  CHECK(code_of([] { h::parse_kernel("nope"); }) == Errc::spec_invalid);
  CHECK(h::valid_mode(h::KernelId::powers, "fused"));
  CHECK_FALSE(h::valid_mode(h::KernelId::lu, "fused"));
}

TEST_CASE("expand") {
  h::ExperimentSpec s;
  s.kernel = h::KernelId::matmul_blocked;
  s.ns = {16, 32};
  s.Ms = {192, 768};
  s.reps = 2;
  CHECK(h::expand(s).size() == 8);
  s.ns.clear();
  CHECK(code_of([&] { h::expand(s); }) == Errc::spec_invalid);
  s.ns = {16};
  s.mode = "squaring";
  CHECK(code_of([&] { h::expand(s); }) == Errc::spec_invalid);
}

TEST_CASE("same seed, same csv") {
  h::ExperimentSpec s;
  s.kernel = h::KernelId::lu;
  s.ns = {16, 32};
  s.Ms = {192};
  s.seed = 42;
  const auto a = csv(h::run(s, 1)), b = csv(h::run(s, 4));
  CHECK(a == b);
}

TEST_CASE("blocked matmul grid stays above the bound") {
  h::ExperimentSpec s;
  s.kernel = h::KernelId::matmul_blocked;
  s.ns = {24, 48, 96};
  s.Ms = {192, 768};
  const auto rows = h::run(s);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.ok());
    CHECK(r.verified);
    CHECK(r.ratio >= 1.0);
    CHECK(h::soundness_violations(r).empty());
  }
  const auto spot = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.n == 48 && r.M == 768; });
  REQUIRE(spot != rows.end());
  CHECK(spot->words_moved == 18432);
}

TEST_CASE("kernel errors land in the row") {
  h::PointSpec p;
  p.kernel = h::KernelId::matmul_blocked;
  p.n = 16;
  p.M = 192;
  p.b = 9;
  const auto r = h::run_point(p).row;
  CHECK_FALSE(r.ok());
  CHECK(r.error.rfind("block_too_large", 0) == 0);
  CHECK_FALSE(h::soundness_violations(r).empty());
}

TEST_CASE("csv round trip") {
  h::ExperimentSpec s;
  s.kernel = h::KernelId::cholesky;
  s.ns = {16, 32};
  s.Ms = {48, 192};
  const auto rows = h::run(s);
  std::istringstream in(csv(rows));
  const auto back = h::read_csv(in);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].kernel == rows[i].kernel);
    CHECK(back[i].n == rows[i].n);
    CHECK(back[i].M == rows[i].M);
    CHECK(back[i].words_moved == rows[i].words_moved);
    CHECK(back[i].g_ops == rows[i].g_ops);
    CHECK(back[i].verified == rows[i].verified);
  }
  CHECK(csv(back) == csv(rows));
}

TEST_CASE("json rows") {
  h::PointSpec p;
  p.kernel = h::KernelId::minplus;
  p.n = 16;
  p.M = 192;
  const std::vector<h::ResultRow> rows{h::run_point(p).row};
  const auto j = nlohmann::json::parse(h::to_json(rows));
  REQUIRE(j.is_array());
  CHECK(j[0]["kernel"] == "minplus");
  CHECK(j[0]["g_ops"] == 4096);
  CHECK(j[0]["error"].is_null());
}

TEST_CASE("exponent fit") {
  const std::vector<double> x{16, 32, 64, 128};
  std::vector<double> cube, root;
  for (double v : x) {
    cube.push_back(5 * v * v * v);
    root.push_back(3 / std::sqrt(v));
  }
  CHECK(std::abs(h::fit_exponent(x, cube) - 3.0) < 1e-9);
  CHECK(std::abs(h::fit_exponent(x, root) + 0.5) < 1e-9);
  const std::vector<double> one{4}, y1{1};
  CHECK(code_of([&] { h::fit_exponent(one, y1); }) == Errc::insufficient_points);
  const std::vector<double> same{4, 4, 4}, y3{1, 2, 3};
  CHECK(code_of([&] { h::fit_exponent(same, y3); }) == Errc::degenerate);
}

TEST_CASE("fit over a run") {
  h::ExperimentSpec s;
  s.kernel = h::KernelId::matmul_blocked;
  s.ns = {32, 64, 128};
  s.Ms = {192};
  const auto rows = h::run(s);
  CHECK(std::abs(h::fit_scaling(rows, "n", "g_ops") - 3.0) < 1e-9);
}

TEST_CASE("lw suite") {
  const auto report = h::check(h::Suite::lw);
  CHECK(report.passed());
  CHECK_FALSE(report.assertions.empty());
  const auto j = nlohmann::json::parse(h::to_json(report));
  CHECK(j["passed"] == true);
}

TEST_CASE("trace audit of a blocked product") {
  h::PointSpec p;
  p.kernel = h::KernelId::matmul_blocked;
  p.n = 48;
  p.M = 768;
  p.record_trace = true;
  const auto res = h::run_point(p);
  const auto limits = h::audit_limits(768, false);
  const auto audit = h::audit_trace(res.trace, 768, limits);
  CHECK(audit.passed());
  CHECK(audit.segments.size() == 24);
  CHECK(limits.s1_cap == 1536);
}
