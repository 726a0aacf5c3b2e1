#include "iooracle/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iooracle::reference {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Matrix random_uniform(std::size_t rows, std::size_t cols, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix a(rows, cols);
  for (double& x : a.data()) x = dist(rng);
  return a;
}

Matrix random_spd(std::size_t n, Rng& rng) {
  const Matrix a = random_uniform(n, n, rng);
  Matrix s = multiply(transpose(a), a);
  for (std::size_t i = 0; i < n; ++i) s(i, i) += static_cast<double>(n);
  return s;
}

Matrix random_diag_dominant(std::size_t n, Rng& rng) {
  Matrix a = random_uniform(n, n, rng);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);
  return a;
}

Matrix random_upper(std::size_t n, Rng& rng) {
  Matrix a = random_uniform(n, n, rng);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) a(i, j) = 0.0;
    a(i, i) = static_cast<double>(n) + std::abs(a(i, i));
  }
  return a;
}

Matrix random_digraph(std::size_t n, Rng& rng, double missing, int max_weight) {
  std::uniform_int_distribution<int> weight(0, max_weight);
  std::bernoulli_distribution drop(missing);
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double x = weight(rng);
      w(i, j) = drop(rng) ? kInf : x;
    }
  return w;
}

Matrix random_sparse(std::size_t rows, std::size_t cols, double density, Rng& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  Matrix a(rows, cols);
  for (double& x : a.data()) {
    const double v = dist(rng);
    if (keep(rng)) x = v == 0.0 ? 0.5 : v;
  }
  return a;
}

Matrix minplus_multiply(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols(), kInf);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = std::min(c(i, j), a(i, k) + b(k, j));
  return c;
}

Matrix floyd_warshall(const Matrix& w) {
  Matrix d = w;
  const std::size_t n = w.rows();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

Matrix power(const Matrix& a, std::size_t t) {
  Matrix x = a;
  for (std::size_t s = 2; s <= t; ++s) x = multiply(x, a);
  return x;
}

Matrix minplus_power(const Matrix& a, std::size_t t) {
  Matrix x = a;
  for (std::size_t s = 2; s <= t; ++s) x = minplus_multiply(x, a);
  return x;
}

std::vector<Matrix> multimul(const Matrix& a, const Matrix& b, std::size_t t) {
  std::vector<Matrix> out;
  for (std::size_t s = 1; s <= t; ++s) {
    Matrix bs = b;
    for (double& x : bs.data()) x = std::pow(x, 1.0 / static_cast<double>(s));
    out.push_back(multiply(a, bs));
  }
  return out;
}

double frobenius(std::size_t n) {
  Matrix a(n, n), b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = 1.0 / static_cast<double>(i + j + 2);
      b(i, j) = std::pow(static_cast<double>(i + 1), 1.0 / static_cast<double>(j + 1));
    }
  const Matrix c = multiply(a, b);
  double r = 0.0;
  for (double x : c.data()) r += x * x;
  return r;
}

std::uint64_t sparse_pair_count(const Matrix& a, const Matrix& b) {
  std::uint64_t count = 0;
  for (std::size_t k = 0; k < a.cols(); ++k) {
    std::uint64_t col = 0, row = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) col += a(i, k) != 0.0;
    for (std::size_t j = 0; j < b.cols(); ++j) row += b(k, j) != 0.0;
    count += col * row;
  }
  return count;
}

double lu_residual(const Matrix& a, const Matrix& lu) {
  const std::size_t n = a.rows();
  Matrix l = Matrix::identity(n), u(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) (j < i ? l(i, j) : u(i, j)) = lu(i, j);
  return max_abs_diff(multiply(l, u), a);
}

double cholesky_residual(const Matrix& a, const Matrix& packed) {
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) l(i, j) = packed(i, j);
  return max_abs_diff(multiply(l, transpose(l)), a);
}

double ldlt_residual(const Matrix& a, const Matrix& packed, const Matrix& d) {
  const std::size_t n = a.rows();
  Matrix l = Matrix::identity(n), ld(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) l(i, j) = packed(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ld(i, j) = l(i, j) * d(0, j);
  return max_abs_diff(multiply(ld, transpose(l)), a);
}

double trsm_residual(const Matrix& a, const Matrix& c, const Matrix& b) {
  return max_abs_diff(multiply(a, c), b);
}

double qr_residual(const Matrix& a, const Matrix& packed, const Matrix& tau) {
  const std::size_t m = a.rows(), n = a.cols();
  Matrix x = a;
  std::vector<double> v(m);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < m; ++i) v[i] = i < k ? 0.0 : (i == k ? 1.0 : packed(i, k));
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i] * x(i, j);
      dot *= tau(0, k);
      for (std::size_t i = k; i < m; ++i) x(i, j) -= dot * v[i];
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double r = i <= j ? packed(i, j) : 0.0;
      worst = std::max(worst, std::abs(x(i, j) - r));
    }
  return worst;
}

std::uint64_t lu_g_count(std::uint64_t n) { return n == 0 ? 0 : (n - 1) * n * (2 * n - 1) / 6; }

std::uint64_t cholesky_g_count(std::uint64_t n) { return n == 0 ? 0 : (n - 1) * n * (n + 1) / 6; }

std::uint64_t ldlt_g_count(std::uint64_t n) { return cholesky_g_count(n); }

std::uint64_t trsm_g_count(std::uint64_t n, std::uint64_t m) { return n == 0 ? 0 : m * n * (n - 1) / 2; }

}  // namespace iooracle::reference
