#pragma once

// Truncated matrix representations of the Heisenberg and SU(1,1) algebras,
// together with the intertwining checks that turn a change of
// representation into a duality function.
//
// Coefficient conventions:
//  - monomial-in-x: a vector c represents sum_j c_j x^j, j = 0..M.
//    Operators that raise the degree drop the overflow term x^{M+1}.
//  - discrete-index-n: a vector f represents f(0..M). f(M+1) is taken as 0.
//  - finite-D_N: a vector f represents f(0..N) on {0,...,N}, with the
//    convention f(-1) = f(N+1) = 0.

#include "duality/dualities.hpp"
#include "duality/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace duality {

enum class BasisKind { MonomialInX, DiscreteIndexN, FiniteDN };

struct Basis {
  BasisKind kind = BasisKind::MonomialInX;
  Eigen::Index size = 2;
  int N = 0;  // population size, FiniteDN only

  static Basis monomial(int M);
  static Basis discrete(int M);
  static Basis finite(int N);
};

enum class RepresentationFamily {
  HeisenbergContinuous,
  HeisenbergDiscrete,
  HeisenbergFiniteN,
  Su11Continuous,
  Su11Discrete,
};

std::string to_string(RepresentationFamily family);
RepresentationFamily representation_family_from_string(const std::string& name);

struct RepresentationParams {
  double m = 0.0;  // SU(1,1) ladder parameter
  int N = 0;       // finite-N population size
};

/// Named operators realizing one representation on a truncated basis.
/// Heisenberg families expose "A" (lowering) and "A+" (raising);
/// SU(1,1) families expose "K+", "K-" and "K0".
struct OperatorSet {
  RepresentationFamily family;
  RepresentationParams params;
  Basis basis;
  std::map<std::string, Matrix> ops;

  const Matrix& at(const std::string& symbol) const;
};

/// Build the operators of `family` on a basis of truncation order M
/// (M + 1 basis elements). For HeisenbergFiniteN, M must equal N.
OperatorSet build_representation(RepresentationFamily family,
                                 const RepresentationParams& params, int M);

/// The finite-N lowering operator a_N acting on f(0..N).
Matrix finite_lowering(int N);
/// The finite-N raising operator a_N^dagger acting on f(0..N). Binomial
/// ratios are accumulated as running products so no factorial is formed.
Matrix finite_raising(int N);

/// [a_N, a_N^dagger] = I on D_N-degree <= N - 1, evaluated in exact
/// rationals. Returns true iff the residual vanishes identically;
/// `max_abs_residual` receives the largest entry converted to double.
/// The floating-point check loses about C(N, N/2) ulps to cancellation.
bool finite_heisenberg_exact(int N, double* max_abs_residual = nullptr);

/// PQ - QP.
Matrix commutator(const Matrix& P, const Matrix& Q);

/// Max abs residual of every defining relation of the set's family over
/// the block unaffected by truncation.
std::vector<ResidualReport> check_commutation_relations(const OperatorSet& set);

/// Matrix of a duality function between two bases: entry (i, n) holds the
/// i-th row-basis coordinate of D(., n). Throws std::invalid_argument when
/// D(., n) cannot be written exactly in the row basis.
Matrix duality_matrix(const DualityFamily& family, const Basis& rows,
                      const Basis& cols);

/// Max abs entry of K D - D Khat^T, optionally restricted to a block.
/// Empty ranges mean the full extent.
ResidualReport check_intertwiner(const Matrix& K, const Matrix& Khat,
                                 const Matrix& D, IndexRange rows = {},
                                 IndexRange cols = {},
                                 std::string label = "K D - D Khat^T");

/// Coefficients c of the binomial transform: (T f)(rho) = sum_r c_r rho^r.
/// Obtained by expanding f in the D_N(., r) basis (triangular solve).
Vector binomial_transform(const Vector& f, int N);

/// Direct evaluation of sum_k f(k) Binomial(N, rho)(k).
double binomial_transform_at(const Vector& f, int N, double rho);

/// Probability mass of Binomial(N, rho) at k.
double binomial_pmf(int N, double rho, int k);

/// Degree of f in the D_N basis (index of the highest nonzero coefficient
/// up to `tol`), or -1 for f == 0.
int dn_degree(const Vector& f, int N, double tol = 1e-12);

}  // namespace duality
