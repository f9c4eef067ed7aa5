#pragma once

// Catalog of duality functions D(left, right).
//
// Arguments are passed as an EvalPoint whose continuous and discrete parts
// are filled left argument first, then right argument:
//
//   Monomial            D(x, n)   = prod x_i^{n_i}
//   ComplementMonomial  D(x, n)   = prod (1 - x_i)^{n_i}
//   Exponential         D(x, y)   = exp(sum x_i y_i)          continuous = x ++ y
//   HermiteWeighted     D(x, n)   = exp(-x^2/2) H_n(x)        physicists' H_n
//   HypergeometricFinite D(k, n)  = C(k, n) / C(N, n)         discrete = {k, n}
//   GammaWeighted       D(z, n)   = z^n Gamma(m/2) / Gamma(m/2 + n)
//   ProductGamma        D(x, k)   = prod x_i^{k_i} / Gamma(2 theta/(d-1) + k_i)
//   MoranSelfDual       D(k, xi)  = prod k_i!/(k_i - xi_i)! Gamma(c)/Gamma(c + xi_i),
//                                   c = 2 theta/(d-1), discrete = k ++ xi
//   LimitingSip         D(x, xi)  = prod_{xi_i >= 1} x_i^{xi_i} / (xi_i - 1)!
//   LimitingSelfDual    D(eta, xi)= prod_{xi_i >= 1} eta_i!/((eta_i - xi_i)! (xi_i - 1)!)
//
// Multi-type arguments are full d-vectors (x_d and k_d included).

#include "duality/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace duality {

enum class DualityKind {
  Monomial,
  ComplementMonomial,
  Exponential,
  HermiteWeighted,
  HypergeometricFinite,
  GammaWeighted,
  ProductGamma,
  MoranSelfDual,
  LimitingSip,
  LimitingSelfDual,
};

std::string to_string(DualityKind kind);
DualityKind duality_kind_from_string(const std::string& name);

class DualityFamily {
 public:
  static DualityFamily monomial();
  static DualityFamily complement_monomial();
  static DualityFamily exponential();
  static DualityFamily hermite_weighted();
  static DualityFamily hypergeometric(int N);
  static DualityFamily gamma_weighted(double m);
  static DualityFamily product_gamma(double theta, int d);
  static DualityFamily moran_self_dual(int N, double theta, int d);
  static DualityFamily limiting_sip();
  static DualityFamily limiting_self_dual();

  DualityKind kind() const { return kind_; }
  int N() const { return N_; }
  double m() const { return m_; }
  double theta() const { return theta_; }
  int d() const { return d_; }

  /// Shape parameter shared by the gamma-weighted families:
  /// m/2 for GammaWeighted, 2 theta/(d-1) otherwise.
  double gamma_shape() const;

  /// True when the function has a continuous argument that the analytic
  /// derivative routine can differentiate.
  bool differentiable() const;

  std::string describe() const;

 private:
  DualityFamily(DualityKind kind) : kind_(kind) {}

  DualityKind kind_;
  int N_ = 0;
  double m_ = 0.0;
  double theta_ = 0.0;
  int d_ = 0;
};

struct EvalPoint {
  std::vector<double> continuous;
  std::vector<long> discrete;
};

/// Signed log-magnitude: value = sign * exp(log_abs). sign == 0 encodes 0.
struct SignedLog {
  int sign = 0;
  double log_abs = 0.0;

  double value() const;
};

/// Evaluate the duality function. Uses direct products and falls back to
/// log-space accumulation when a partial product leaves [1e-300, 1e300].
/// Throws std::domain_error on arguments outside the function's domain.
double evaluate(const DualityFamily& family, const EvalPoint& p);

/// Direct (linear-space) evaluation. May overflow.
double evaluate_direct(const DualityFamily& family, const EvalPoint& p);

/// Log-space evaluation with sign tracking.
SignedLog evaluate_log(const DualityFamily& family, const EvalPoint& p);

/// Value, gradient and Hessian in all continuous coordinates of p.
struct ValueDerivatives {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

ValueDerivatives continuous_derivatives(const DualityFamily& family,
                                        const EvalPoint& p);

/// Physicists' Hermite polynomials H_0..H_n at x.
std::vector<double> hermite_polynomials(int n, double x);

/// Diagonal self-duality function delta_{x,y} / mu(x) for a chain
/// reversible with respect to mu.
Matrix cheap_self_duality(const Vector& mu);

/// New duality function S D from a symmetry S commuting with K.
Matrix transform_by_symmetry(const Matrix& S, const Matrix& D);

}  // namespace duality
