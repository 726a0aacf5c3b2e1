#include <doctest.h>

#include <cmath>
#include <vector>

#include "iooracle/bounds.hpp"
#include "iooracle/error.hpp"

using namespace iooracle;
using namespace iooracle::bounds;
using doctest::Approx;

TEST_CASE("general and latency") {
  CHECK(general_bandwidth_lb(512000, 64) == Approx(7936));
  CHECK(general_bandwidth_lb(0, 64) == 0);
  CHECK(general_bandwidth_lb(100, 10000) == 0);
  CHECK(latency_lb(512000, 64) == Approx(124));
  CHECK(latency_lb(8 * std::pow(64.0, 1.5), 64) == Approx(0).epsilon(1e-12));
  CHECK(latency_lb(0, 7) == 0);
  CHECK_THROWS_AS(general_bandwidth_lb(10, 0), Error);
  CHECK_THROWS_AS(general_bandwidth_lb(-1, 4), Error);
}

TEST_CASE("dense matmul") {
  const BoundReport a = matmul_dense_lb(8, 8, 8, 16);
  CHECK(a.bandwidth_lb == Approx(512 / std::sqrt(128.0) - 16));
  CHECK(a.bandwidth_lb == Approx(29.25).epsilon(1e-3));
  CHECK(*a.trivial_lb == 192);
  CHECK(a.combined_lb == 192);
  const BoundReport b = matmul_dense_lb(80, 80, 80, 64);
  CHECK(b.bandwidth_lb == Approx(22563.5).epsilon(1e-5));
  CHECK(*b.trivial_lb == 19200);
  CHECK(b.combined_lb == Approx(b.bandwidth_lb));
  const BoundReport c = matmul_dense_lb(1, 1, 1, 1);
  CHECK(c.bandwidth_lb == 0);
  CHECK(c.combined_lb == 3);
  CHECK_THROWS_AS(matmul_dense_lb(0, 1, 1, 1), Error);
}

TEST_CASE("parallel") {
  const double n = 64;
  const BoundReport a = parallel_matmul_lb(n * n * n, ParallelParams{4, 3 * n * n});
  CHECK(a.bandwidth_lb == 0);
  const double N = 1024;
  const BoundReport b = parallel_matmul_lb(N * N * N, ParallelParams{4, 3 * N * N}, 1024);
  CHECK(b.bandwidth_lb == 0);
  REQUIRE(b.companion);
  CHECK(*b.companion == Approx(524288));
  CHECK(parallel_matmul_lb(1e6, ParallelParams{1, 1e4}).bandwidth_lb == 0);
  CHECK_THROWS_AS(parallel_matmul_lb(1, ParallelParams{0, 1}), Error);
}

TEST_CASE("qr and two-sided") {
  CHECK(qr_bandwidth_lb(1e6, 100) == Approx(8738.834764831843).epsilon(1e-12));
  CHECK(qr_bandwidth_lb(1000, 25) == 0);
  CHECK(qr_bandwidth_lb(0, 25) == 0);
  CHECK(two_sided_lb(1e6, 100) == Approx(2846.278254943948).epsilon(1e-12));
  CHECK(two_sided_lb(100 * std::sqrt(1152.0 * 100), 100) == Approx(0).epsilon(1e-9));
  CHECK(two_sided_lb(1e4, 1) == Approx(1e4 / std::sqrt(1152.0) - 1));
}

TEST_CASE("powers") {
  CHECK(powers_lb(8192, 64, 3, 16) == Approx(42.04).epsilon(1e-4));
  CHECK(powers_lb(32768, 64, 2, 32) == Approx(1384.1546878700492).epsilon(1e-12));
  CHECK(powers_lb(1e6, 64, 2, 999) == Approx(1e6 / std::sqrt(512.0) - 64));
  CHECK_THROWS_AS(powers_lb(1, 4, 1, 2), Error);
}

TEST_CASE("multimul and phased") {
  CHECK(interleaved_multimul_lb(64, 4, 256) == Approx(3840));
  CHECK(interleaved_multimul_lb(40, 1, 64) == Approx(general_bandwidth_lb(40.0 * 40 * 40, 64)));
  const std::vector<double> two{1000, 1000};
  CHECK(phased_sequence_lb(two, 100) == Approx(1800));
  const std::vector<double> one{1234};
  CHECK(phased_sequence_lb(one, 100) == Approx(1234));
  const std::vector<double> five(5, 200);
  CHECK(phased_sequence_lb(five, 100) == Approx(200));
  try {
    phased_sequence_lb({}, 100);
    FAIL("expected empty_sequence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_sequence);
  }
}

TEST_CASE("apsp and stencil") {
  CHECK(apsp_lb(32, 64, ApspVariant::naive_n4) == 0);
  CHECK(apsp_lb(256, 64, ApspVariant::naive_n4) == Approx(50331584));
  CHECK(apsp_lb(2, 64, ApspVariant::naive_n4) == 0);
  CHECK(apsp_lb(2, 64, ApspVariant::squaring_n3logn) == 0);
  CHECK(stencil_cholesky_lb(64, 64) == Approx(4032));
  const double a = stencil_cholesky_lb(64, 64, 1.0) + 64, b = stencil_cholesky_lb(128, 64, 1.0) + 64;
  CHECK(b / a == Approx(8));
  const double c = stencil_cholesky_lb(256, 256, 1.0) + 256, d = stencil_cholesky_lb(256, 1024, 1.0) + 1024;
  CHECK(d / c == Approx(0.5));
}

TEST_CASE("monotone in G, antitone in M") {
  for (double G : {1e5, 1e6, 1e7}) {
    CHECK(general_bandwidth_lb(G, 64) <= general_bandwidth_lb(2 * G, 64));
    CHECK(general_bandwidth_lb(G, 64) >= general_bandwidth_lb(G, 128));
    CHECK(qr_bandwidth_lb(G, 64) >= qr_bandwidth_lb(G, 128));
  }
}

TEST_CASE("latency is bandwidth over M, plus at most one") {
  for (double G : {0.0, 1e3, 1e5, 1e7, 1e9})
    for (std::uint64_t M : {1u, 16u, 64u, 1000u}) {
      CHECK(latency_lb(G, M) <= general_bandwidth_lb(G, M) / double(M) + 1 + 1e-9);
    }
}

TEST_CASE("report") {
  const BoundReport r = general_report(512000, 64, 100.0);
  CHECK(r.formula_tag == "general");
  CHECK(r.bandwidth_lb == Approx(7936));
  CHECK(r.latency_lb == Approx(latency_lb(512000, 64)));
  CHECK(r.combined_lb >= r.bandwidth_lb);
  CHECK(r.combined_lb >= *r.trivial_lb);
  const BoundReport z = general_report(10, 64, 5.0);
  CHECK(z.bandwidth_lb == 0);
  CHECK(z.combined_lb == 5);
  CHECK(to_json(r).find("\"combined_lb\"") != std::string::npos);
}
