#include "duality/algebra.hpp"
#include "duality/exact.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <vector>

namespace duality {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;
using RationalMatrix = std::vector<std::vector<cpp_rational>>;

RationalMatrix zeros(int n) { return RationalMatrix(n, std::vector<cpp_rational>(n, 0)); }

cpp_int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  cpp_int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

RationalMatrix multiply(const RationalMatrix& A, const RationalMatrix& B) {
  const size_t n = A.size();
  RationalMatrix C = zeros(static_cast<int>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < n; ++l) {
      if (A[i][l] == 0) continue;
      for (size_t j = 0; j < n; ++j) C[i][j] += A[i][l] * B[l][j];
    }
  return C;
}

}  // namespace

bool finite_heisenberg_exact(int N, double* max_abs_residual) {
  if (N < 1) throw std::invalid_argument("finite_heisenberg_exact: N must be >= 1");
  const int n = N + 1;
  RationalMatrix a = zeros(n), ad = zeros(n), D = zeros(n);
  for (int k = 0; k <= N; ++k) {
    if (k + 1 <= N) a[k][k + 1] = N - k;
    a[k][k] = 2 * k - N;
    if (k >= 1) a[k][k - 1] = -k;
    for (int r = 0; r < k; ++r) {
      const cpp_rational v(binom(N, r), binom(N, k));
      ad[k][r] = (k - 1 - r) % 2 == 0 ? v : cpp_rational(-v);
    }
    for (int m = 0; m <= N; ++m) D[k][m] = cpp_rational(binom(k, m), binom(N, m));
  }
  const RationalMatrix lhs = multiply(a, multiply(ad, D));
  const RationalMatrix rhs = multiply(ad, multiply(a, D));
  bool zero = true;
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < N; ++j) {  // D_N-degree <= N - 1
      const cpp_rational r = lhs[i][j] - rhs[i][j] - D[i][j];
      if (r != 0) {
        zero = false;
        worst = std::max(worst, std::abs(r.convert_to<double>()));
      }
    }
  if (max_abs_residual) *max_abs_residual = worst;
  return zero;
}

bool moran_kingman_exact(int N, double* max_abs_residual) {
  if (N < 1) throw std::invalid_argument("moran_kingman_exact: N must be >= 1");
  const int n = N + 1;

  // Moran on k = 0..N: k -> k +- 1 at rate k(N - k) each.
  RationalMatrix K = zeros(n);
  for (int k = 0; k <= N; ++k) {
    const cpp_rational r = cpp_rational(k) * (N - k);
    if (k > 0) K[k][k - 1] = r;
    if (k < N) K[k][k + 1] = r;
    K[k][k] = -2 * r;
  }
  // Kingman block counting on n = 0..N: n -> n - 1 at rate n(n - 1).
  RationalMatrix Kh = zeros(n);
  for (int m = 1; m <= N; ++m) {
    const cpp_rational r = cpp_rational(m) * (m - 1);
    Kh[m][m - 1] = r;
    Kh[m][m] = -r;
  }
  RationalMatrix D = zeros(n);
  for (int k = 0; k <= N; ++k)
    for (int m = 0; m <= N; ++m) D[k][m] = cpp_rational(binom(k, m), binom(N, m));

  bool zero = true;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cpp_rational r = 0;
      for (int l = 0; l < n; ++l) r += K[i][l] * D[l][j] - D[i][l] * Kh[j][l];
      if (r != 0) {
        zero = false;
        worst = std::max(worst, std::abs(r.convert_to<double>()));
      }
    }
  }
  if (max_abs_residual) *max_abs_residual = worst;
  return zero;
}

}  // namespace duality
