#include "duality/dualities.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace duality {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

void require_nonnegative(const std::vector<long>& v, size_t begin, size_t end,
                         const char* what) {
  for (size_t i = begin; i < end; ++i)
    require(v[i] >= 0, std::string(what) + ": negative count");
}

// x^e for integer e >= 0, and 0 for e < 0. The negative branch only shows up
// multiplied by a vanishing prefactor in derivative formulas.
double ipow(double x, long e) {
  if (e < 0) return 0.0;
  double r = 1.0;
  double b = x;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

double log_factorial(long n) { return std::lgamma(static_cast<double>(n) + 1.0); }

struct LogAccumulator {
  int sign = 1;
  double log_abs = 0.0;

  void mul_log(double l) { log_abs += l; }
  // multiply by x^e
  void mul_pow(double x, long e) {
    if (e == 0) return;
    if (x == 0.0) {
      sign = 0;
      return;
    }
    if (x < 0.0 && (e & 1)) sign = -sign;
    log_abs += static_cast<double>(e) * std::log(std::fabs(x));
  }
  void mul_value(double v) {
    if (v == 0.0) {
      sign = 0;
      return;
    }
    if (v < 0.0) sign = -sign;
    log_abs += std::log(std::fabs(v));
  }
  SignedLog result() const {
    if (sign == 0) return {0, 0.0};
    return {sign, log_abs};
  }
};

void check_arity(const DualityFamily& f, const EvalPoint& p) {
  const auto nc = p.continuous.size();
  const auto nd = p.discrete.size();
  switch (f.kind()) {
    case DualityKind::Monomial:
    case DualityKind::ComplementMonomial:
      require(nc == nd && nc >= 1, "monomial: need one exponent per coordinate");
      require_nonnegative(p.discrete, 0, nd, "monomial");
      break;
    case DualityKind::Exponential:
      require(nc >= 2 && nc % 2 == 0 && nd == 0,
              "exponential: need continuous = x ++ y of equal length");
      break;
    case DualityKind::HermiteWeighted:
      require(nc == 1 && nd == 1, "hermite-weighted: need (x, n)");
      require_nonnegative(p.discrete, 0, 1, "hermite-weighted");
      break;
    case DualityKind::HypergeometricFinite: {
      require(nc == 0 && nd == 2, "hypergeometric-finite: need (k, n)");
      const long k = p.discrete[0], n = p.discrete[1];
      require(k >= 0 && k <= f.N(), "hypergeometric-finite: k outside {0..N}");
      require(n >= 0 && n <= f.N(), "hypergeometric-finite: n outside {0..N}");
      break;
    }
    case DualityKind::GammaWeighted:
      require(nc == 1 && nd == 1, "gamma-weighted: need (z, n)");
      require(p.continuous[0] >= 0.0, "gamma-weighted: z must be >= 0");
      require_nonnegative(p.discrete, 0, 1, "gamma-weighted");
      break;
    case DualityKind::ProductGamma: {
      const auto d = static_cast<size_t>(f.d());
      require(nc == d && nd == d, "product-gamma: need d coordinates and d counts");
      require_nonnegative(p.discrete, 0, d, "product-gamma");
      double s = 0.0;
      for (double x : p.continuous) {
        require(x >= 0.0, "product-gamma: negative simplex coordinate");
        s += x;
      }
      require(std::fabs(s - 1.0) <= 1e-12, "product-gamma: point not on the simplex");
      break;
    }
    case DualityKind::MoranSelfDual: {
      const auto d = static_cast<size_t>(f.d());
      require(nc == 0 && nd == 2 * d, "moran-self-dual: need k ++ xi");
      require_nonnegative(p.discrete, 0, 2 * d, "moran-self-dual");
      const long sk = std::accumulate(p.discrete.begin(), p.discrete.begin() + d, 0L);
      const long sx = std::accumulate(p.discrete.begin() + d, p.discrete.end(), 0L);
      require(sk == f.N(), "moran-self-dual: k must hold N individuals");
      require(sx <= f.N(), "moran-self-dual: xi holds more than N individuals");
      break;
    }
    case DualityKind::LimitingSip:
      require(nc == nd && nc >= 1, "limiting-sip: need (x, xi) of equal length");
      require_nonnegative(p.discrete, 0, nd, "limiting-sip");
      break;
    case DualityKind::LimitingSelfDual:
      require(nc == 0 && nd >= 2 && nd % 2 == 0, "limiting-self-dual: need eta ++ xi");
      require_nonnegative(p.discrete, 0, nd, "limiting-self-dual");
      break;
  }
}

// Shared structure of the monomial-like families: D = C * prod g_i^{e_i}
// with g_i = x_i or 1 - x_i.
struct MonomialForm {
  double log_const = 0.0;  // log C, C > 0
  std::vector<long> exponents;
  bool complement = false;
};

MonomialForm monomial_form(const DualityFamily& f, const EvalPoint& p) {
  MonomialForm form;
  form.exponents = p.discrete;
  switch (f.kind()) {
    case DualityKind::Monomial:
      break;
    case DualityKind::ComplementMonomial:
      form.complement = true;
      break;
    case DualityKind::GammaWeighted: {
      const double a = f.gamma_shape();
      form.log_const = std::lgamma(a) - std::lgamma(a + p.discrete[0]);
      break;
    }
    case DualityKind::ProductGamma: {
      const double c = f.gamma_shape();
      for (long k : p.discrete) form.log_const -= std::lgamma(c + static_cast<double>(k));
      break;
    }
    case DualityKind::LimitingSip:
      for (long xi : p.discrete)
        if (xi >= 1) form.log_const -= log_factorial(xi - 1);
      break;
    default:
      throw std::logic_error("monomial_form: not a monomial-like family");
  }
  return form;
}

bool monomial_like(DualityKind k) {
  return k == DualityKind::Monomial || k == DualityKind::ComplementMonomial ||
         k == DualityKind::GammaWeighted || k == DualityKind::ProductGamma ||
         k == DualityKind::LimitingSip;
}

// Direct-space constant for the monomial-like families. Kept separate from
// log_const so the two evaluation paths stay independent.
double monomial_const_direct(const DualityFamily& f, const EvalPoint& p) {
  switch (f.kind()) {
    case DualityKind::GammaWeighted: {
      // Gamma(a)/Gamma(a+n) = 1 / (a (a+1) ... (a+n-1))
      const double a = f.gamma_shape();
      double c = 1.0;
      for (long j = 0; j < p.discrete[0]; ++j) c /= a + static_cast<double>(j);
      return c;
    }
    case DualityKind::ProductGamma: {
      const double c = f.gamma_shape();
      double r = 1.0;
      for (long k : p.discrete) r /= std::tgamma(c + static_cast<double>(k));
      return r;
    }
    case DualityKind::LimitingSip: {
      double r = 1.0;
      for (long xi : p.discrete)
        for (long j = 2; j < xi; ++j) r /= static_cast<double>(j);
      return r;
    }
    default:
      return 1.0;
  }
}

double base_of(const MonomialForm& form, double x) {
  return form.complement ? 1.0 - x : x;
}

}  // namespace

double SignedLog::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_abs);
}

std::string to_string(DualityKind kind) {
  switch (kind) {
    case DualityKind::Monomial: return "monomial";
    case DualityKind::ComplementMonomial: return "complement-monomial";
    case DualityKind::Exponential: return "exponential";
    case DualityKind::HermiteWeighted: return "hermite-weighted";
    case DualityKind::HypergeometricFinite: return "hypergeometric-finite";
    case DualityKind::GammaWeighted: return "gamma-weighted";
    case DualityKind::ProductGamma: return "product-gamma";
    case DualityKind::MoranSelfDual: return "moran-self-dual";
    case DualityKind::LimitingSip: return "limiting-sip";
    case DualityKind::LimitingSelfDual: return "limiting-self-dual";
  }
  return "?";
}

DualityKind duality_kind_from_string(const std::string& name) {
  for (auto k : {DualityKind::Monomial, DualityKind::ComplementMonomial,
                 DualityKind::Exponential, DualityKind::HermiteWeighted,
                 DualityKind::HypergeometricFinite, DualityKind::GammaWeighted,
                 DualityKind::ProductGamma, DualityKind::MoranSelfDual,
                 DualityKind::LimitingSip, DualityKind::LimitingSelfDual})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown duality family: " + name);
}

DualityFamily DualityFamily::monomial() { return DualityFamily(DualityKind::Monomial); }
DualityFamily DualityFamily::complement_monomial() {
  return DualityFamily(DualityKind::ComplementMonomial);
}
DualityFamily DualityFamily::exponential() { return DualityFamily(DualityKind::Exponential); }
DualityFamily DualityFamily::hermite_weighted() {
  return DualityFamily(DualityKind::HermiteWeighted);
}

DualityFamily DualityFamily::hypergeometric(int N) {
  if (N < 1) throw std::invalid_argument("hypergeometric-finite: N must be >= 1");
  DualityFamily f(DualityKind::HypergeometricFinite);
  f.N_ = N;
  return f;
}

DualityFamily DualityFamily::gamma_weighted(double m) {
  if (!(m > 0.0)) throw std::invalid_argument("gamma-weighted: m must be > 0");
  DualityFamily f(DualityKind::GammaWeighted);
  f.m_ = m;
  return f;
}

DualityFamily DualityFamily::product_gamma(double theta, int d) {
  if (!(theta > 0.0)) throw std::invalid_argument("product-gamma: theta must be > 0");
  if (d < 2) throw std::invalid_argument("product-gamma: d must be >= 2");
  DualityFamily f(DualityKind::ProductGamma);
  f.theta_ = theta;
  f.d_ = d;
  return f;
}

DualityFamily DualityFamily::moran_self_dual(int N, double theta, int d) {
  if (N < 1) throw std::invalid_argument("moran-self-dual: N must be >= 1");
  if (!(theta > 0.0)) throw std::invalid_argument("moran-self-dual: theta must be > 0");
  if (d < 2) throw std::invalid_argument("moran-self-dual: d must be >= 2");
  DualityFamily f(DualityKind::MoranSelfDual);
  f.N_ = N;
  f.theta_ = theta;
  f.d_ = d;
  return f;
}

DualityFamily DualityFamily::limiting_sip() { return DualityFamily(DualityKind::LimitingSip); }
DualityFamily DualityFamily::limiting_self_dual() {
  return DualityFamily(DualityKind::LimitingSelfDual);
}

double DualityFamily::gamma_shape() const {
  if (kind_ == DualityKind::GammaWeighted) return m_ / 2.0;
  return 2.0 * theta_ / static_cast<double>(d_ - 1);
}

bool DualityFamily::differentiable() const {
  return monomial_like(kind_) || kind_ == DualityKind::Exponential ||
         kind_ == DualityKind::HermiteWeighted;
}

std::string DualityFamily::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  switch (kind_) {
    case DualityKind::HypergeometricFinite: os << "(N=" << N_ << ")"; break;
    case DualityKind::GammaWeighted: os << "(m=" << m_ << ")"; break;
    case DualityKind::ProductGamma: os << "(theta=" << theta_ << ",d=" << d_ << ")"; break;
    case DualityKind::MoranSelfDual:
      os << "(N=" << N_ << ",theta=" << theta_ << ",d=" << d_ << ")";
      break;
    default: break;
  }
  return os.str();
}

std::vector<double> hermite_polynomials(int n, double x) {
  std::vector<double> h(static_cast<size_t>(std::max(n, 0)) + 1);
  h[0] = 1.0;
  if (n >= 1) h[1] = 2.0 * x;
  for (int j = 1; j < n; ++j) h[j + 1] = 2.0 * x * h[j] - 2.0 * j * h[j - 1];
  return h;
}

double evaluate_direct(const DualityFamily& f, const EvalPoint& p) {
  check_arity(f, p);
  const auto kind = f.kind();
  if (monomial_like(kind)) {
    const MonomialForm form = monomial_form(f, p);
    double r = monomial_const_direct(f, p);
    for (size_t i = 0; i < p.continuous.size(); ++i)
      r *= ipow(base_of(form, p.continuous[i]), form.exponents[i]);
    return r;
  }
  switch (kind) {
    case DualityKind::Exponential: {
      const size_t L = p.continuous.size() / 2;
      double s = 0.0;
      for (size_t i = 0; i < L; ++i) s += p.continuous[i] * p.continuous[L + i];
      return std::exp(s);
    }
    case DualityKind::HermiteWeighted: {
      const double x = p.continuous[0];
      const int n = static_cast<int>(p.discrete[0]);
      return std::exp(-0.5 * x * x) * hermite_polynomials(n, x)[n];
    }
    case DualityKind::HypergeometricFinite: {
      const long k = p.discrete[0], n = p.discrete[1];
      if (n > k) return 0.0;
      double r = 1.0;
      for (long j = 0; j < n; ++j)
        r *= static_cast<double>(k - j) / static_cast<double>(f.N() - j);
      return r;
    }
    case DualityKind::MoranSelfDual: {
      const size_t d = static_cast<size_t>(f.d());
      const double c = f.gamma_shape();
      double r = 1.0;
      for (size_t i = 0; i < d; ++i) {
        const long k = p.discrete[i], xi = p.discrete[d + i];
        if (xi > k) return 0.0;
        // k!/(k-xi)! * Gamma(c)/Gamma(c+xi) = prod_{j<xi} (k-j)/(c+j)
        for (long j = 0; j < xi; ++j)
          r *= static_cast<double>(k - j) / (c + static_cast<double>(j));
      }
      return r;
    }
    case DualityKind::LimitingSelfDual: {
      const size_t d = p.discrete.size() / 2;
      double r = 1.0;
      for (size_t i = 0; i < d; ++i) {
        const long eta = p.discrete[i], xi = p.discrete[d + i];
        if (xi == 0) continue;
        if (xi > eta) return 0.0;
        // eta!/((eta-xi)! (xi-1)!) = xi * C(eta, xi)
        double c = static_cast<double>(xi);
        for (long j = 0; j < xi; ++j)
          c *= static_cast<double>(eta - j) / static_cast<double>(xi - j);
        r *= c;
      }
      return r;
    }
    default:
      break;
  }
  throw std::logic_error("evaluate_direct: unhandled family");
}

SignedLog evaluate_log(const DualityFamily& f, const EvalPoint& p) {
  check_arity(f, p);
  const auto kind = f.kind();
  LogAccumulator acc;
  if (monomial_like(kind)) {
    const MonomialForm form = monomial_form(f, p);
    acc.mul_log(form.log_const);
    for (size_t i = 0; i < p.continuous.size(); ++i)
      acc.mul_pow(base_of(form, p.continuous[i]), form.exponents[i]);
    return acc.result();
  }
  switch (kind) {
    case DualityKind::Exponential: {
      const size_t L = p.continuous.size() / 2;
      double s = 0.0;
      for (size_t i = 0; i < L; ++i) s += p.continuous[i] * p.continuous[L + i];
      return {1, s};
    }
    case DualityKind::HermiteWeighted: {
      const double x = p.continuous[0];
      const int n = static_cast<int>(p.discrete[0]);
      acc.mul_log(-0.5 * x * x);
      acc.mul_value(hermite_polynomials(n, x)[n]);
      return acc.result();
    }
    case DualityKind::HypergeometricFinite: {
      const long k = p.discrete[0], n = p.discrete[1];
      if (n > k) return {0, 0.0};
      acc.mul_log(log_factorial(k) - log_factorial(k - n) - log_factorial(f.N()) +
                  log_factorial(f.N() - n));
      return acc.result();
    }
    case DualityKind::MoranSelfDual: {
      const size_t d = static_cast<size_t>(f.d());
      const double c = f.gamma_shape();
      for (size_t i = 0; i < d; ++i) {
        const long k = p.discrete[i], xi = p.discrete[d + i];
        if (xi > k) return {0, 0.0};
        acc.mul_log(log_factorial(k) - log_factorial(k - xi) + std::lgamma(c) -
                    std::lgamma(c + static_cast<double>(xi)));
      }
      return acc.result();
    }
    case DualityKind::LimitingSelfDual: {
      const size_t d = p.discrete.size() / 2;
      for (size_t i = 0; i < d; ++i) {
        const long eta = p.discrete[i], xi = p.discrete[d + i];
        if (xi == 0) continue;
        if (xi > eta) return {0, 0.0};
        acc.mul_log(log_factorial(eta) - log_factorial(eta - xi) - log_factorial(xi - 1));
      }
      return acc.result();
    }
    default:
      break;
  }
  throw std::logic_error("evaluate_log: unhandled family");
}

double evaluate(const DualityFamily& f, const EvalPoint& p) {
  const double direct = evaluate_direct(f, p);
  const bool suspicious = !std::isfinite(direct) || std::fabs(direct) < 1e-300 ||
                          std::fabs(direct) > 1e300;
  if (!suspicious) return direct;
  return evaluate_log(f, p).value();
}

ValueDerivatives continuous_derivatives(const DualityFamily& f, const EvalPoint& p) {
  check_arity(f, p);
  const auto L = static_cast<Eigen::Index>(p.continuous.size());
  ValueDerivatives out;
  out.gradient = Vector::Zero(L);
  out.hessian = Matrix::Zero(L, L);
  const auto kind = f.kind();

  if (monomial_like(kind)) {
    const MonomialForm form = monomial_form(f, p);
    const double C = monomial_const_direct(f, p);
    const double s = form.complement ? -1.0 : 1.0;  // dg/dx
    std::vector<double> g(static_cast<size_t>(L));
    for (Eigen::Index i = 0; i < L; ++i) g[i] = base_of(form, p.continuous[i]);
    const auto& e = form.exponents;
    // product of g_j^{e_j} over j not in `skip`
    auto rest = [&](Eigen::Index a, Eigen::Index b) {
      double r = 1.0;
      for (Eigen::Index j = 0; j < L; ++j)
        if (j != a && j != b) r *= ipow(g[j], e[j]);
      return r;
    };
    out.value = C * rest(-1, -1);
    for (Eigen::Index i = 0; i < L; ++i) {
      const double ei = static_cast<double>(e[i]);
      out.gradient(i) = C * s * ei * ipow(g[i], e[i] - 1) * rest(i, -1);
      out.hessian(i, i) = C * ei * (ei - 1.0) * ipow(g[i], e[i] - 2) * rest(i, -1);
      for (Eigen::Index j = i + 1; j < L; ++j) {
        const double h = C * ei * static_cast<double>(e[j]) * ipow(g[i], e[i] - 1) *
                         ipow(g[j], e[j] - 1) * rest(i, j);
        out.hessian(i, j) = h;
        out.hessian(j, i) = h;
      }
    }
    return out;
  }

  switch (kind) {
    case DualityKind::Exponential: {
      const Eigen::Index n = L / 2;
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) s += p.continuous[i] * p.continuous[n + i];
      const double D = std::exp(s);
      out.value = D;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = p.continuous[i], yi = p.continuous[n + i];
        out.gradient(i) = yi * D;
        out.gradient(n + i) = xi * D;
        for (Eigen::Index j = 0; j < n; ++j) {
          const double xj = p.continuous[j], yj = p.continuous[n + j];
          out.hessian(i, j) = yi * yj * D;
          out.hessian(n + i, n + j) = xi * xj * D;
          out.hessian(i, n + j) = ((i == j ? 1.0 : 0.0) + yi * xj) * D;
          out.hessian(n + j, i) = out.hessian(i, n + j);
        }
      }
      return out;
    }
    case DualityKind::HermiteWeighted: {
      const double x = p.continuous[0];
      const int n = static_cast<int>(p.discrete[0]);
      const auto H = hermite_polynomials(n, x);
      const double w = std::exp(-0.5 * x * x);
      const double hn = H[n];
      const double hn1 = n >= 1 ? H[n - 1] : 0.0;
      const double hn2 = n >= 2 ? H[n - 2] : 0.0;
      out.value = w * hn;
      out.gradient(0) = w * (2.0 * n * hn1 - x * hn);
      out.hessian(0, 0) =
          w * ((x * x - 1.0) * hn - 4.0 * n * x * hn1 + 4.0 * n * (n - 1.0) * hn2);
      return out;
    }
    default:
      break;
  }
  throw std::invalid_argument("continuous_derivatives: " + to_string(kind) +
                              " has no continuous argument");
}

Matrix cheap_self_duality(const Vector& mu) {
  if (mu.size() == 0) throw std::invalid_argument("cheap_self_duality: empty measure");
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (!(mu(i) > 0.0))
      throw std::invalid_argument("cheap_self_duality: measure must be strictly positive");
  if (std::fabs(mu.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("cheap_self_duality: measure must sum to 1");
  return mu.cwiseInverse().asDiagonal();
}

Matrix transform_by_symmetry(const Matrix& S, const Matrix& D) {
  if (S.cols() != D.rows())
    throw std::invalid_argument("transform_by_symmetry: dimension mismatch");
  return S * D;
}

}  // namespace duality
