#include "iooracle/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iooracle/error.hpp"
#include "json.hpp"

namespace iooracle::bounds {

namespace {

void require_memory(std::uint64_t M) {
  if (M < 1) throw Error(Errc::invalid_params, "fast memory size M must be >= 1");
}

void require_count(double G) {
  if (!(G >= 0) || !std::isfinite(G)) throw Error(Errc::invalid_params, "G must be finite and >= 0");
}

double clamp0(double v) { return v > 0 ? v : 0.0; }

double md(std::uint64_t v) { return static_cast<double>(v); }

}  // namespace

double general_bandwidth_lb(double G, std::uint64_t M) {
  require_memory(M);
  require_count(G);
  return clamp0(G / (8.0 * std::sqrt(md(M))) - md(M));
}

double latency_lb(double G, std::uint64_t M) {
  require_memory(M);
  require_count(G);
  return clamp0(G / (8.0 * std::pow(md(M), 1.5)) - 1.0);
}

double qr_bandwidth_lb(double G, std::uint64_t M) {
  require_memory(M);
  require_count(G);
  return clamp0(G / std::sqrt(128.0 * md(M)) - md(M));
}

double two_sided_lb(double G, std::uint64_t M) {
  require_memory(M);
  require_count(G);
  return clamp0(G / std::sqrt(1152.0 * md(M)) - md(M));
}

double powers_lb(double G, std::uint64_t M, std::uint64_t t, std::uint64_t n) {
  require_memory(M);
  require_count(G);
  if (t < 2) throw Error(Errc::invalid_params, "matrix powers need t >= 2");
  return clamp0(G / std::sqrt(8.0 * md(M)) - md(M) - md(t - 2) * md(n) * md(n));
}

double interleaved_multimul_lb(std::uint64_t n, std::uint64_t t, std::uint64_t M) {
  require_memory(M);
  if (t < 1) throw Error(Errc::invalid_params, "multimul needs t >= 1");
  const double n3 = md(n) * md(n) * md(n);
  return clamp0(std::sqrt(md(t)) * n3 / (8.0 * std::sqrt(md(M))) - md(M));
}

double phased_sequence_lb(std::span<const double> per_phase, std::uint64_t M) {
  require_memory(M);
  if (per_phase.empty()) throw Error(Errc::empty_sequence, "phased sequence with no phases");
  const double sum = std::accumulate(per_phase.begin(), per_phase.end(), 0.0);
  return clamp0(sum - 2.0 * md(per_phase.size() - 1) * md(M));
}

double apsp_lb(std::uint64_t n, std::uint64_t M, ApspVariant variant) {
  require_memory(M);
  if (n < 2) throw Error(Errc::invalid_params, "APSP bound needs n >= 2");
  const double nn = md(n);
  const double root = 8.0 * std::sqrt(md(M));
  if (variant == ApspVariant::naive_n4) {
    return clamp0(nn * nn * nn * nn / root - md(M) - nn * nn * nn);
  }
  const double lg = std::log2(nn);
  return clamp0(nn * nn * nn * lg / root - md(M) - nn * nn * lg);
}

double stencil_cholesky_lb(std::uint64_t n, std::uint64_t M, double c) {
  require_memory(M);
  if (n < 1 || !(c > 0)) throw Error(Errc::invalid_params, "stencil bound needs n >= 1, c > 0");
  const double nn = md(n);
  return clamp0(c * nn * nn * nn / std::sqrt(md(M)) - md(M));
}

BoundReport make_report(std::string formula_tag, double G, std::uint64_t M, double raw_bandwidth,
                        std::optional<double> trivial) {
  require_memory(M);
  BoundReport r;
  r.g_count = G;
  r.fast_capacity = M;
  r.bandwidth_lb = clamp0(raw_bandwidth);
  r.latency_lb = clamp0(raw_bandwidth / md(M));
  r.trivial_lb = trivial;
  r.combined_lb = std::max(r.bandwidth_lb, trivial.value_or(0.0));
  r.formula_tag = std::move(formula_tag);
  return r;
}

BoundReport general_report(double G, std::uint64_t M, std::optional<double> trivial) {
  require_memory(M);
  require_count(G);
  return make_report("general", G, M, G / (8.0 * std::sqrt(md(M))) - md(M), trivial);
}

BoundReport matmul_dense_lb(std::uint64_t n, std::uint64_t r, std::uint64_t m, std::uint64_t M) {
  require_memory(M);
  if (n < 1 || r < 1 || m < 1) throw Error(Errc::invalid_params, "matrix dimensions must be >= 1");
  const double G = md(n) * md(r) * md(m);
  const double trivial = md(n) * md(r) + md(r) * md(m) + md(n) * md(m);
  return make_report("seq_mm_dense", G, M, G / std::sqrt(8.0 * md(M)) - md(M), trivial);
}

BoundReport parallel_matmul_lb(double G, const ParallelParams& p,
                               std::optional<std::uint64_t> dense_n) {
  require_count(G);
  if (p.processors < 1 || !(p.total_nonzeros >= 1)) {
    throw Error(Errc::invalid_params, "parallel bound needs P >= 1 and NNZ >= 1");
  }
  const double P = md(p.processors);
  BoundReport r;
  r.g_count = G;
  r.bandwidth_lb = clamp0(G / std::sqrt(P * p.total_nonzeros) - p.total_nonzeros / P);
  r.combined_lb = r.bandwidth_lb;
  r.formula_tag = "par_mm";
  if (dense_n) r.companion = md(*dense_n) * md(*dense_n) / std::sqrt(P);
  return r;
}

std::string to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["formula"] = r.formula_tag;
  j["G"] = r.g_count;
  j["M"] = r.fast_capacity;
  j["bandwidth_lb"] = r.bandwidth_lb;
  j["latency_lb"] = r.latency_lb;
  j["trivial_lb"] = r.trivial_lb ? nlohmann::ordered_json(*r.trivial_lb) : nlohmann::ordered_json();
  j["combined_lb"] = r.combined_lb;
  if (r.companion) j["dense_companion"] = *r.companion;
  return j.dump();
}

}  // namespace iooracle::bounds
