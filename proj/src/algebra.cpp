#include "duality/algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace duality {

Basis Basis::monomial(int M) { return {BasisKind::MonomialInX, M + 1, 0}; }
Basis Basis::discrete(int M) { return {BasisKind::DiscreteIndexN, M + 1, 0}; }
Basis Basis::finite(int N) { return {BasisKind::FiniteDN, N + 1, N}; }

std::string to_string(RepresentationFamily family) {
  switch (family) {
    case RepresentationFamily::HeisenbergContinuous: return "heisenberg-continuous";
    case RepresentationFamily::HeisenbergDiscrete: return "heisenberg-discrete";
    case RepresentationFamily::HeisenbergFiniteN: return "heisenberg-finite-N";
    case RepresentationFamily::Su11Continuous: return "su11-continuous";
    case RepresentationFamily::Su11Discrete: return "su11-discrete";
  }
  return "?";
}

RepresentationFamily representation_family_from_string(const std::string& name) {
  for (auto f : {RepresentationFamily::HeisenbergContinuous,
                 RepresentationFamily::HeisenbergDiscrete,
                 RepresentationFamily::HeisenbergFiniteN,
                 RepresentationFamily::Su11Continuous, RepresentationFamily::Su11Discrete})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown representation family: " + name);
}

const Matrix& OperatorSet::at(const std::string& symbol) const {
  auto it = ops.find(symbol);
  if (it == ops.end())
    throw std::out_of_range(to_string(family) + " has no operator " + symbol);
  return it->second;
}

Matrix finite_lowering(int N) {
  if (N < 1) throw std::invalid_argument("finite_lowering: N must be >= 1");
  Matrix a = Matrix::Zero(N + 1, N + 1);
  for (int k = 0; k <= N; ++k) {
    if (k + 1 <= N) a(k, k + 1) = N - k;
    a(k, k) = 2 * k - N;
    if (k >= 1) a(k, k - 1) = -k;
  }
  return a;
}

Matrix finite_raising(int N) {
  if (N < 1) throw std::invalid_argument("finite_raising: N must be >= 1");
  Matrix ad = Matrix::Zero(N + 1, N + 1);
  for (int k = 1; k <= N; ++k) {
    // ratio = C(N, r) / C(N, k), walked down from r = k - 1
    double ratio = static_cast<double>(k) / static_cast<double>(N - k + 1);
    double sign = 1.0;
    for (int r = k - 1; r >= 0; --r) {
      ad(k, r) = sign * ratio;
      ratio *= static_cast<double>(r) / static_cast<double>(N - r + 1);
      sign = -sign;
    }
  }
  return ad;
}

OperatorSet build_representation(RepresentationFamily family,
                                 const RepresentationParams& params, int M) {
  if (M < 1) throw std::invalid_argument("build_representation: M must be >= 1");
  const bool su11 = family == RepresentationFamily::Su11Continuous ||
                    family == RepresentationFamily::Su11Discrete;
  if (su11 && !(params.m > 0.0))
    throw std::invalid_argument("build_representation: SU(1,1) needs m > 0");
  if (family == RepresentationFamily::HeisenbergFiniteN && params.N != M)
    throw std::invalid_argument("build_representation: finite-N needs M == N");

  OperatorSet set{family, params, Basis::monomial(M), {}};
  const Eigen::Index n = M + 1;
  const double m = params.m;

  switch (family) {
    case RepresentationFamily::HeisenbergContinuous: {
      Matrix A = Matrix::Zero(n, n), Ad = Matrix::Zero(n, n);
      for (int j = 0; j < M; ++j) {
        A(j, j + 1) = j + 1;  // d/dx x^{j+1} = (j+1) x^j
        Ad(j + 1, j) = 1.0;   // x * x^j
      }
      set.ops = {{"A", A}, {"A+", Ad}};
      break;
    }
    case RepresentationFamily::HeisenbergDiscrete: {
      set.basis = Basis::discrete(M);
      Matrix a = Matrix::Zero(n, n), ad = Matrix::Zero(n, n);
      for (int k = 0; k < M; ++k) {
        a(k + 1, k) = k + 1;  // a f(n) = n f(n-1)
        ad(k, k + 1) = 1.0;   // a+ f(n) = f(n+1)
      }
      set.ops = {{"A", a}, {"A+", ad}};
      break;
    }
    case RepresentationFamily::HeisenbergFiniteN:
      set.basis = Basis::finite(M);
      set.ops = {{"A", finite_lowering(M)}, {"A+", finite_raising(M)}};
      break;
    case RepresentationFamily::Su11Continuous: {
      Matrix Kp = Matrix::Zero(n, n), Km = Matrix::Zero(n, n), K0 = Matrix::Zero(n, n);
      for (int j = 0; j <= M; ++j) {
        if (j < M) Kp(j + 1, j) = 1.0;
        if (j >= 1) Km(j - 1, j) = j * (j - 1 + m / 2.0);
        K0(j, j) = j + m / 4.0;
      }
      set.ops = {{"K+", Kp}, {"K-", Km}, {"K0", K0}};
      break;
    }
    case RepresentationFamily::Su11Discrete: {
      set.basis = Basis::discrete(M);
      Matrix Kp = Matrix::Zero(n, n), Km = Matrix::Zero(n, n), K0 = Matrix::Zero(n, n);
      for (int k = 0; k <= M; ++k) {
        if (k < M) Kp(k, k + 1) = m / 2.0 + k;
        if (k >= 1) Km(k, k - 1) = k;
        K0(k, k) = m / 4.0 + k;
      }
      set.ops = {{"K+", Kp}, {"K-", Km}, {"K0", K0}};
      break;
    }
  }
  return set;
}

Matrix commutator(const Matrix& P, const Matrix& Q) {
  if (P.rows() != P.cols() || Q.rows() != Q.cols() || P.rows() != Q.rows())
    throw std::invalid_argument("commutator: operands must be square and of equal size");
  return P * Q - Q * P;
}

namespace {

double max_abs_block(const Matrix& R, IndexRange rows, IndexRange cols) {
  if (rows.empty() || cols.empty()) return 0.0;
  return R.block(rows.begin, cols.begin, rows.size(), cols.size()).cwiseAbs().maxCoeff();
}

ResidualReport block_report(std::string label, const Matrix& R, Eigen::Index safe) {
  IndexRange block{0, safe};
  return {std::move(label), max_abs_block(R, block, block), block, block};
}

Matrix hypergeometric_matrix(int N, Eigen::Index cols) {
  const auto family = DualityFamily::hypergeometric(N);
  Matrix D(N + 1, cols);
  for (int k = 0; k <= N; ++k)
    for (Eigen::Index n = 0; n < cols; ++n)
      D(k, n) = evaluate(family, EvalPoint{{}, {k, static_cast<long>(n)}});
  return D;
}

}  // namespace

std::vector<ResidualReport> check_commutation_relations(const OperatorSet& set) {
  const Eigen::Index n = set.basis.size;
  const Matrix I = Matrix::Identity(n, n);
  // Indices 0..M-2 never see a dropped overflow term.
  const Eigen::Index safe = n - 2;
  std::vector<ResidualReport> out;

  switch (set.family) {
    case RepresentationFamily::HeisenbergContinuous:
      out.push_back(block_report("[A,A+] - I", commutator(set.at("A"), set.at("A+")) - I, safe));
      break;
    case RepresentationFamily::HeisenbergDiscrete:
      out.push_back(block_report("[A,A+] + I", commutator(set.at("A"), set.at("A+")) + I, safe));
      break;
    case RepresentationFamily::HeisenbergFiniteN: {
      // The relation holds on span{D_N(., r) : r <= N-1}; the raising
      // operator sends D_N(., N) to D_N(., N+1) = 0.
      const int N = set.basis.N;
      const Matrix D = hypergeometric_matrix(N, N);
      // Applying the operators to the columns of D_N first keeps the
      // intermediates at the size of D_N; the commutator matrix itself has
      // large entries that cancel.
      const Matrix &A = set.at("A"), &Ap = set.at("A+");
      const Matrix R = A * (Ap * D) - Ap * (A * D) - D;
      IndexRange rows{0, N + 1}, cols{0, N};
      out.push_back({"([A,A+] - I) D_N(., r), r <= N-1", max_abs_block(R, rows, cols), rows, cols});
      break;
    }
    case RepresentationFamily::Su11Continuous: {
      const Matrix &Kp = set.at("K+"), &Km = set.at("K-"), &K0 = set.at("K0");
      out.push_back(block_report("[K0,K+] - K+", commutator(K0, Kp) - Kp, safe));
      out.push_back(block_report("[K0,K-] + K-", commutator(K0, Km) + Km, safe));
      out.push_back(block_report("[K-,K+] - 2 K0", commutator(Km, Kp) - 2.0 * K0, safe));
      break;
    }
    case RepresentationFamily::Su11Discrete: {
      // dual relations: signs reversed
      const Matrix &Kp = set.at("K+"), &Km = set.at("K-"), &K0 = set.at("K0");
      out.push_back(block_report("[K0,K+] + K+", commutator(K0, Kp) + Kp, safe));
      out.push_back(block_report("[K0,K-] - K-", commutator(K0, Km) - Km, safe));
      out.push_back(block_report("[K-,K+] + 2 K0", commutator(Km, Kp) + 2.0 * K0, safe));
      break;
    }
  }
  return out;
}

Matrix duality_matrix(const DualityFamily& family, const Basis& rows, const Basis& cols) {
  const auto kind = family.kind();
  const bool poly_rows = rows.kind == BasisKind::MonomialInX;
  const bool index_cols = cols.kind == BasisKind::DiscreteIndexN;

  if ((kind == DualityKind::Monomial || kind == DualityKind::GammaWeighted) && poly_rows &&
      index_cols) {
    if (cols.size > rows.size)
      throw std::invalid_argument("duality_matrix: D(., n) has degree above the row basis");
    Matrix D = Matrix::Zero(rows.size, cols.size);
    for (Eigen::Index j = 0; j < cols.size; ++j)
      D(j, j) = kind == DualityKind::Monomial
                    ? 1.0
                    : evaluate(family, EvalPoint{{1.0}, {static_cast<long>(j)}});
    return D;
  }
  if (kind == DualityKind::HypergeometricFinite && rows.kind == BasisKind::FiniteDN &&
      index_cols) {
    if (rows.N != family.N())
      throw std::invalid_argument("duality_matrix: basis N differs from family N");
    if (cols.size > rows.size)
      throw std::invalid_argument("duality_matrix: n exceeds N");
    return hypergeometric_matrix(rows.N, cols.size);
  }
  throw std::invalid_argument("duality_matrix: " + family.describe() +
                              " is not expressible in the requested bases");
}

ResidualReport check_intertwiner(const Matrix& K, const Matrix& Khat, const Matrix& D,
                                 IndexRange rows, IndexRange cols, std::string label) {
  if (K.rows() != K.cols() || Khat.rows() != Khat.cols() || K.cols() != D.rows() ||
      Khat.cols() != D.cols())
    throw std::invalid_argument("check_intertwiner: dimension mismatch");
  if (rows.empty()) rows = {0, D.rows()};
  if (cols.empty()) cols = {0, D.cols()};
  if (rows.end > D.rows() || cols.end > D.cols() || rows.begin < 0 || cols.begin < 0)
    throw std::invalid_argument("check_intertwiner: block outside the matrix");
  const Matrix R = K * D - D * Khat.transpose();
  return {std::move(label), max_abs_block(R, rows, cols), rows, cols};
}

Vector binomial_transform(const Vector& f, int N) {
  if (f.size() != N + 1)
    throw std::invalid_argument("binomial_transform: f must have N + 1 entries");
  // D_N(k, r) = 0 for r > k, so the expansion is a forward substitution.
  const Matrix D = hypergeometric_matrix(N, N + 1);
  return D.triangularView<Eigen::Lower>().solve(f);
}

double binomial_pmf(int N, double rho, int k) {
  if (k < 0 || k > N) return 0.0;
  if (rho == 0.0) return k == 0 ? 1.0 : 0.0;
  if (rho == 1.0) return k == N ? 1.0 : 0.0;
  const double lc = std::lgamma(N + 1.0) - std::lgamma(k + 1.0) - std::lgamma(N - k + 1.0);
  return std::exp(lc + k * std::log(rho) + (N - k) * std::log1p(-rho));
}

double binomial_transform_at(const Vector& f, int N, double rho) {
  if (f.size() != N + 1)
    throw std::invalid_argument("binomial_transform_at: f must have N + 1 entries");
  double s = 0.0;
  for (int k = 0; k <= N; ++k) s += f(k) * binomial_pmf(N, rho, k);
  return s;
}

int dn_degree(const Vector& f, int N, double tol) {
  const Vector c = binomial_transform(f, N);
  for (Eigen::Index r = c.size() - 1; r >= 0; --r)
    if (std::fabs(c(r)) > tol) return static_cast<int>(r);
  return -1;
}

}  // namespace duality
