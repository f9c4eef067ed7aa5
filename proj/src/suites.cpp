#include "suites.hpp"

#include "duality/algebra.hpp"
#include "duality/cli.hpp"
#include "duality/exact.hpp"
#include "duality/processes.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace duality::cli {

namespace {

class Rows {
 public:
  void add(std::string check, std::string subject, std::string identity, std::string params,
           double residual, double tolerance) {
    rows_.push_back({std::move(check), std::move(subject), std::move(identity), std::move(params),
                     residual, tolerance, residual <= tolerance});
  }
  void add_exact(std::string check, std::string subject, std::string identity,
                 std::string params, double residual, bool pass) {
    rows_.push_back({std::move(check), std::move(subject), std::move(identity), std::move(params),
                     residual, 0.0, pass});
  }
  std::vector<CheckRow> take() { return std::move(rows_); }

 private:
  std::vector<CheckRow> rows_;
};

template <class T>
T get(const nlohmann::ordered_json& cfg, const char* key) {
  return cfg.at(key).get<T>();
}

int get_int(const nlohmann::ordered_json& cfg, const char* key, int lo, int hi) {
  const long long v = cfg.at(key).get<long long>();
  if (v < lo || v > hi) {
    std::ostringstream os;
    os << key << " must lie in [" << lo << ", " << hi << "], got " << v;
    throw ConfigError(os.str());
  }
  return static_cast<int>(v);
}

double get_positive(const nlohmann::ordered_json& cfg, const char* key) {
  const double v = cfg.at(key).get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be > 0");
  return v;
}

double get_nonnegative(const nlohmann::ordered_json& cfg, const char* key) {
  const double v = cfg.at(key).get<double>();
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be >= 0");
  return v;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double max_abs(const Matrix& R) { return R.size() ? R.cwiseAbs().maxCoeff() : 0.0; }

Matrix moran_operator_form(int N) {
  const Matrix up = finite_raising(N), lo = finite_lowering(N);
  const Matrix I = Matrix::Identity(N + 1, N + 1);
  return up * (I - up) * lo * lo;
}

Matrix dn_matrix(int N) {
  return duality_matrix(DualityFamily::hypergeometric(N), Basis::finite(N), Basis::discrete(N));
}

// Stationary law of an irreducible generator from Q^T pi = 0, sum pi = 1.
Vector stationary(const Matrix& Q) {
  const Eigen::Index n = Q.rows();
  Matrix A = Q.transpose();
  A.row(n - 1).setOnes();
  Vector b = Vector::Zero(n);
  b(n - 1) = 1.0;
  return A.fullPivLu().solve(b);
}

std::vector<double> random_simplex_point(int d, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(static_cast<size_t>(d));
  double s = 0.0;
  for (double& v : x) s += (v = e(rng));
  for (double& v : x) v /= s;
  double rest = 1.0;
  for (int i = 0; i + 1 < d; ++i) rest -= x[static_cast<size_t>(i)];
  x.back() = rest;
  return x;
}

}  // namespace

// ----------------------------------------------------------------- algebra

std::vector<CheckRow> algebra_suite(const nlohmann::ordered_json& cfg) {
  const int M = get_int(cfg, "M", 2, 64);
  const int N = get_int(cfg, "N", 1, 64);
  const double m = get_positive(cfg, "m");
  const int float_max = get_int(cfg, "float_N_max", 2, 40);
  const int rational_max = get_int(cfg, "rational_N_max", 2, 30);
  const int binom_max = get_int(cfg, "binomial_N_max", 1, 60);
  const double tol = get_positive(cfg, "tolerance");
  std::mt19937_64 rng(get<std::uint64_t>(cfg, "seed"));
  std::normal_distribution<double> gauss;
  Rows rows;

  const std::string mp = "M=" + std::to_string(M);
  for (auto fam : {RepresentationFamily::HeisenbergContinuous, RepresentationFamily::HeisenbergDiscrete,
                   RepresentationFamily::Su11Continuous, RepresentationFamily::Su11Discrete}) {
    const OperatorSet set = build_representation(fam, {m, 0}, M);
    const bool su11 = fam == RepresentationFamily::Su11Continuous ||
                      fam == RepresentationFamily::Su11Discrete;
    for (const auto& rep : check_commutation_relations(set))
      rows.add("commutation", to_string(fam), rep.identity, su11 ? mp + ";m=" + num(m) : mp,
               rep.max_abs_residual, tol);
  }
  {
    // a_N^dagger is an alternating sum with coefficients up to C(N, N/2),
    // so the float residual is judged against that conditioning; the
    // rational rows below are the exact statement.
    const OperatorSet set = build_representation(RepresentationFamily::HeisenbergFiniteN, {0, N}, N);
    const double cond =
        std::exp(std::lgamma(N + 1.0) - std::lgamma(N / 2 + 1.0) - std::lgamma(N - N / 2 + 1.0));
    for (const auto& rep : check_commutation_relations(set))
      rows.add("commutation", to_string(set.family), rep.identity, "N=" + std::to_string(N),
               rep.max_abs_residual, tol * std::max(1.0, cond));
    for (int n = 1; n <= M; ++n) {
      double res = 0.0;
      const bool zero = finite_heisenberg_exact(n, &res);
      rows.add_exact("commutation-rational", to_string(set.family),
                     "([A,A+] - I) D_N(., r) == 0, r <= N-1", "N=" + std::to_string(n), res, zero);
    }
  }

  // Continuous and discrete SU(1,1) intertwined by d(z, n).
  {
    const OperatorSet cont = build_representation(RepresentationFamily::Su11Continuous, {m, 0}, M);
    const OperatorSet disc = build_representation(RepresentationFamily::Su11Discrete, {m, 0}, M);
    const Matrix D = duality_matrix(DualityFamily::gamma_weighted(m), Basis::monomial(M),
                                    Basis::discrete(M));
    const IndexRange safe{0, M - 1};
    for (const char* op : {"K+", "K-", "K0"}) {
      const auto rep = check_intertwiner(cont.at(op), disc.at(op), D, safe, safe);
      rows.add("intertwiner", "su11-continuous ~ su11-discrete",
               std::string(op) + " D - D " + op + "^T", mp + ";m=" + num(m), rep.max_abs_residual,
               tol);
    }
  }

  // Neutral WF in operator form against block counting on monomials.
  {
    const OperatorSet h = build_representation(RepresentationFamily::HeisenbergContinuous, {}, M);
    const Matrix I = Matrix::Identity(M + 1, M + 1);
    const Matrix K = h.at("A+") * (I - h.at("A+")) * h.at("A") * h.at("A");
    const Matrix Kh = generator_matrix(ProcessSpec::kingman_block(0, 0, M)).Q;
    const auto rep = check_intertwiner(K, Kh, I, {}, {0, M - 1});
    rows.add("intertwiner", "wf-neutral ~ kingman", "A+(1-A+)A^2 I - I Khat^T, n <= M-2", mp,
             rep.max_abs_residual, tol);
  }

  for (int n = 2; n <= float_max; ++n) {
    const Matrix D = dn_matrix(n);
    const Matrix Kmoran = generator_matrix(ProcessSpec::moran_multitype(n, 2, 0.0, 2.0)).Q;
    const Matrix Kh = generator_matrix(ProcessSpec::kingman_block(0, 0, n)).Q;
    const std::string p = "N=" + std::to_string(n);
    rows.add("intertwiner", "moran ~ kingman", "K D_N - D_N Khat^T", p,
             check_intertwiner(Kmoran, Kh, D).max_abs_residual, tol);
    const Matrix Kop = moran_operator_form(n);
    // The product passes through entries far larger than Q itself.
    const Matrix up = finite_raising(n), lo = finite_lowering(n);
    const double scale =
        max_abs(up * (Matrix::Identity(n + 1, n + 1) - up)) * max_abs(lo * lo) * (n + 1);
    rows.add("operator-form", "moran", "a+(1-a+)a^2 - Q_moran", p, max_abs(Kop - Kmoran),
             tol * std::max(1.0, scale));
  }
  for (int n = 2; n <= rational_max; ++n) {
    double res = 0.0;
    const bool zero = moran_kingman_exact(n, &res);
    rows.add_exact("intertwiner-rational", "moran ~ kingman", "K D_N - D_N Khat^T == 0",
                   "N=" + std::to_string(n), res, zero);
  }

  for (double rho : {0.1, 0.5, 0.9}) {
    double direct = 0.0, coeff = 0.0;
    for (int n = 1; n <= binom_max; ++n) {
      const Matrix D = dn_matrix(n);
      for (int r = 0; r <= n; ++r) {
        direct = std::max(direct,
                          std::fabs(binomial_transform_at(D.col(r), n, rho) - std::pow(rho, r)));
        coeff = std::max(coeff, max_abs(binomial_transform(D.col(r), n) - Vector::Unit(n + 1, r)));
      }
    }
    const std::string p = "N<=" + std::to_string(binom_max) + ";rho=" + num(rho);
    rows.add("binomial-transform", "D_N", "sum_k D_N(k,n) Bin(N,rho)(k) - rho^n", p, direct, tol);
    rows.add("binomial-transform", "D_N", "coefficients of T D_N(., n) - e_n", p, coeff, tol);
  }

  // T(a_N f) = (T f)' and T(a_N+ f) = rho T f for D_N-degree <= N-1.
  {
    double lo_res = 0.0, up_res = 0.0;
    for (int n = 2; n <= std::min(N, 20); ++n) {
      Vector c = Vector::Zero(n + 1);
      for (int r = 0; r < n; ++r) c(r) = gauss(rng);
      const Vector f = dn_matrix(n) * c;
      Vector deriv = Vector::Zero(n + 1), shift = Vector::Zero(n + 1);
      for (int r = 1; r <= n; ++r) deriv(r - 1) = r * c(r);
      for (int r = 0; r < n; ++r) shift(r + 1) = c(r);
      lo_res = std::max(lo_res, max_abs(binomial_transform(finite_lowering(n) * f, n) - deriv));
      up_res = std::max(up_res, max_abs(binomial_transform(finite_raising(n) * f, n) - shift));
    }
    const std::string p = "2<=N<=" + std::to_string(std::min(N, 20));
    rows.add("binomial-intertwining", "a_N", "T(a_N f) - d/drho T f", p, lo_res, 1e3 * tol);
    rows.add("binomial-intertwining", "a_N+", "T(a_N+ f) - rho T f", p, up_res, 1e3 * tol);
  }

  // D_N invertibility via solve residual.
  {
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n) {
      const Matrix D = dn_matrix(n);
      Vector b(n + 1);
      for (Eigen::Index i = 0; i <= n; ++i) b(i) = gauss(rng);
      const Vector x = D.partialPivLu().solve(b);
      worst = std::max(worst, max_abs(D * x - b));
    }
    rows.add("invertibility", "D_N", "|D_N solve(b) - b|", "N<=20", worst, 1e-6);
  }

  // Symmetries: with K D = D Khat^T and K D' = D' Khat^T, S = D' D^-1
  // commutes with K.
  {
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      Matrix D(5, 5), Kh(5, 5), C(5, 5);
      for (Eigen::Index i = 0; i < 25; ++i) {
        D.data()[i] = gauss(rng);
        Kh.data()[i] = gauss(rng);
        C.data()[i] = gauss(rng);
      }
      D += 5.0 * Matrix::Identity(5, 5);
      const Matrix Dinv = D.inverse();
      const Matrix K = D * Kh.transpose() * Dinv;
      const Matrix S0 = K * K + 2.0 * K + Matrix::Identity(5, 5);  // commutes with K
      const Matrix D2 = transform_by_symmetry(S0, D);
      if (check_intertwiner(K, Kh, D2).max_abs_residual > 1e-8 * std::max(1.0, max_abs(D2)))
        worst = std::max(worst, 1.0);
      const Matrix S = D2 * Dinv;
      worst = std::max(worst, max_abs(commutator(K, S)) / std::max(1.0, max_abs(S) * max_abs(K)));
    }
    rows.add("symmetry", "random 5x5", "[K, D' D^-1] relative", "instances=20", worst, 1e-10);
  }
  return rows.take();
}

// ------------------------------------------------------------------- exact

std::vector<CheckRow> exact_suite(const nlohmann::ordered_json& cfg) {
  const int moranN = get_int(cfg, "moran_N", 2, 40);
  const int sipN = get_int(cfg, "sip_N_max", 1, 12);
  const double tol = get_positive(cfg, "tolerance");
  const double stol = get_positive(cfg, "semigroup_tolerance");
  const double itol = get_positive(cfg, "identity_tolerance");
  const int instances = get_int(cfg, "instances", 1, 100000);
  const double sigma = get_nonnegative(cfg, "kingman_sigma");
  const int nmax = get_int(cfg, "kingman_n_max", 2, 2000);
  const int n0 = get_int(cfg, "kingman_n0", 1, 2000);
  const double leak_t = get_nonnegative(cfg, "leak_t");
  if (n0 > nmax) throw ConfigError("kingman_n0 must not exceed kingman_n_max");
  std::mt19937_64 rng(get<std::uint64_t>(cfg, "seed"));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Rows rows;
  const std::vector<double> times{0.1, 1.0, 5.0};

  // Moran against block counting, generator and semigroup level.
  {
    const Matrix D = dn_matrix(moranN);
    const Matrix K = generator_matrix(ProcessSpec::moran_multitype(moranN, 2, 0.0, 2.0)).Q;
    const Matrix Kh = generator_matrix(ProcessSpec::kingman_block(0, 0, moranN)).Q;
    const std::string p = "N=" + std::to_string(moranN);
    const auto g = check_generator_duality(K, Kh, D, "moran(time_scale=2)", "kingman");
    rows.add("generator-duality", g.identity, "K D_N - D_N Khat^T", p, g.max_abs_residual, tol);
    for (double t : times) {
      const auto s = check_semigroup_duality(K, Kh, D, t);
      rows.add("semigroup-duality", g.identity, "e^{tK} D_N - D_N e^{tKhat^T}", p + ";t=" + num(t),
               s.max_abs_residual, stol);
    }
    const Matrix K1 = generator_matrix(ProcessSpec::moran_multitype(moranN, 2, 0.0)).Q;
    const auto h = check_generator_duality(K1, 0.5 * Kh, D, "moran", "kingman/2");
    rows.add("generator-duality", h.identity, "K D_N - D_N (Khat/2)^T", p, h.max_abs_residual, tol);
    const Matrix S = K;  // any generator commutes with itself
    const auto sym = check_intertwiner(K, Kh, transform_by_symmetry(S, D));
    rows.add("symmetry", "moran(time_scale=2) ~ kingman", "K (S D_N) - (S D_N) Khat^T, S = K", p,
             sym.max_abs_residual, tol * std::max(1.0, max_abs(K)));
  }

  // SIP(m) / Moran self-duality: conserved rows, all totals <= N as columns.
  for (double m : {1.0, 2.0, 3.0}) {
    const ProcessSpec sip = ProcessSpec::sip(2, m);
    for (int N = 1; N <= sipN; ++N) {
      const GeneratorMatrix K = generator_matrix(sip, N);
      const GeneratorMatrix Kh = generator_matrix_down_closed(sip, N);
      const Matrix D =
          duality_matrix(DualityFamily::moran_self_dual(N, m / 4.0, 2), K.index, Kh.index);
      const std::string p = "d=2;N=" + std::to_string(N) + ";m=" + num(m);
      rows.add("self-duality", "sip", "K Dbar - Dbar Khat^T", p,
               check_generator_duality(K.Q, Kh.Q, D, "sip", "sip").max_abs_residual, tol);
      if (N == sipN)
        for (double t : times)
          rows.add("semigroup-duality", "sip", "e^{tK} Dbar - Dbar e^{tKhat^T}",
                   p + ";t=" + num(t), check_semigroup_duality(K.Q, Kh.Q, D, t).max_abs_residual,
                   stol);
    }
  }

  // Cheap self-duality of a reversible chain.
  {
    const GeneratorMatrix Q = generator_matrix(ProcessSpec::moran_multitype(4, 2, 0.5));
    const Vector pi = stationary(Q.Q);
    const Matrix D = cheap_self_duality(pi);
    rows.add("cheap-self-duality", "moran", "Q diag(1/pi) - diag(1/pi) Q^T", "N=4;d=2;theta=0.5",
             check_intertwiner(Q.Q, Q.Q, D).max_abs_residual, tol);
  }

  // Probability conservation under the exponential.
  {
    std::vector<std::pair<std::string, GeneratorMatrix>> gens;
    gens.emplace_back("moran(N=6,d=3,theta=0.7)", generator_matrix(ProcessSpec::moran_multitype(6, 3, 0.7)));
    gens.emplace_back("sip(d=3,m=1.5,N=5)", generator_matrix(ProcessSpec::sip(3, 1.5), 5));
    gens.emplace_back("kingman(theta=0.4,sigma=1,n_max=30)",
                      generator_matrix(ProcessSpec::kingman_block(0.4, 1.0, 30)));
    Matrix p(3, 3);
    p << 0.0, 0.7, 0.3, 0.2, 0.0, 0.8, 0.5, 0.5, 0.0;
    gens.emplace_back("stepping-stone-dual(|S|=3,total=4)",
                      generator_matrix(ProcessSpec::stepping_stone_dual(p), 4));
    for (const auto& [name, g] : gens) {
      double ones = 0.0, neg = 0.0;
      for (double t : times) {
        const Vector one = Vector::Ones(g.Q.rows());
        ones = std::max(ones, max_abs(matrix_exponential_apply(g, one, t) - one));
        const Vector start = Vector::Unit(g.Q.rows(), 0);
        const Vector law = matrix_exponential_apply(g, start, t, ExpDirection::Distribution);
        neg = std::max(neg, std::max(0.0, -law.minCoeff()));
      }
      rows.add("stochasticity", name, "e^{tQ} 1 - 1", "t in {0.1,1,5}", ones, tol);
      rows.add("positivity", name, "max(0, -min e^{tQ^T} delta)", "t in {0.1,1,5}", neg, 1e-12);
      double rowsum = 0.0;
      for (Eigen::Index i = 0; i < g.Q.rows(); ++i) rowsum = std::max(rowsum, std::fabs(g.Q.row(i).sum()));
      rows.add("row-sums", name, "sum_j Q(i,j)", "", rowsum, itol);
    }
  }

  // Identification identities on random instances.
  {
    double worst = 0.0;
    for (int rep = 0; rep < std::max(1, instances / 10); ++rep) {
      const int d = 2 + static_cast<int>(rep % 3);
      const int N = 1 + static_cast<int>(rep % 5);
      const double m = 4.0 * unif(rng);
      const Matrix A = generator_matrix(ProcessSpec::sip(d, m), N).Q;
      const Matrix B = generator_matrix(ProcessSpec::moran_multitype(N, d, m * (d - 1) / 4.0)).Q;
      worst = std::max(worst, max_abs(A - B));
    }
    rows.add("identification", "sip(m) = moran(theta=m(d-1)/4)", "Q_sip - Q_moran",
             "d in {2,3,4};N<=5;random m", worst, itol);

    const Matrix A = generator_matrix(ProcessSpec::sip(2, 0.0), 2).Q;
    const Matrix B = generator_matrix(ProcessSpec::moran_multitype(2, 2, 0.0)).Q;
    rows.add("identification", "sip(0) = moran(theta=0)", "Q_sip - Q_moran", "d=2;N=2",
             max_abs(A - B), itol);

    double dd = 0.0;
    for (int rep = 0; rep < instances; ++rep) {
      const int d = 2 + rep % 3;
      const double m = 4.0 * unif(rng);
      const std::vector<double> x = random_simplex_point(d, rng);
      const DriftDiffusion bep = restrict_to_simplex(drift_diffusion(ProcessSpec::bep(d, m), x));
      const DriftDiffusion wf =
          drift_diffusion(ProcessSpec::wf_multitype(d, m * (d - 1) / 4.0), x);
      dd = std::max({dd, max_abs(bep.drift - wf.drift), max_abs(bep.diffusion - wf.diffusion)});
    }
    rows.add("identification", "bep(m) on simplex = wf(theta=m(d-1)/4)", "drift and diffusion",
             "d in {2,3,4};points=" + std::to_string(instances), dd, itol);
  }

  // Truncated selection chain: mass leaving through n_max.
  {
    const GeneratorMatrix g = generator_matrix(ProcessSpec::kingman_block(0.0, sigma, nmax));
    rows.add("truncation-leak", "kingman(sigma=" + num(sigma) + ")", "P(escape through n_max)",
             "n_max=" + std::to_string(nmax) + ";n0=" + std::to_string(n0) + ";t=" + num(leak_t),
             truncation_leak(g, {n0}, leak_t), tol);
  }

  // Closed-form transition probabilities.
  {
    const GeneratorMatrix k = generator_matrix(ProcessSpec::kingman_block(0, 0, 2));
    const auto e = exact_expectation(k, Vector::Unit(3, 2), {2}, 0.5);
    rows.add("closed-form", "kingman", "P_2(N_t = 2) - e^{-2t}", "t=0.5",
             std::fabs(e.value - std::exp(-1.0)), tol);
    const GeneratorMatrix s = generator_matrix(ProcessSpec::sip(2, 0.0), 2);
    Vector f = Vector::Zero(s.index.size());
    f(s.index.index_of({1, 1})) = 1.0;
    const auto e2 = exact_expectation(s, f, {1, 1}, 1.0);
    rows.add("closed-form", "sip(0)", "P_(1,1)(xi_t = (1,1)) - e^{-t}", "t=1",
             std::fabs(e2.value - std::exp(-1.0)), tol);
  }
  return rows.take();
}

// --------------------------------------------------------------- pointwise

std::vector<CheckRow> pointwise_suite(const nlohmann::ordered_json& cfg) {
  const int nmax = get_int(cfg, "n_max", 1, 40);
  const double theta = get_positive(cfg, "theta");
  const double sigma = get_nonnegative(cfg, "sigma");
  const double tol = get_positive(cfg, "tolerance");
  const double c1 = get_positive(cfg, "c1");
  const double c2 = get_nonnegative(cfg, "c2");
  const double c3 = get<double>(cfg, "c3");
  const int d = get_int(cfg, "d", 2, 6);
  const int N = get_int(cfg, "N", 1, 8);
  PointwiseOptions opt;
  opt.h = get_positive(cfg, "h");
  opt.analytic = get<bool>(cfg, "analytic");
  // Second differences lose about eps/h^2 when derivatives are numerical.
  const double fd_tol = opt.analytic ? tol : std::max(tol, 1e-4);
  Rows rows;

  std::vector<EvalPoint> grid1;
  for (int i = 1; i <= 9; ++i)
    for (int n = 0; n <= nmax; ++n) grid1.push_back({{0.1 * i}, {n}});
  const std::string gp = "x in {0.1..0.9};n<=" + std::to_string(nmax);

  auto wf_row = [&](const ProcessSpec& wf, const GeneratorMatrix& dual, const DualityFamily& D,
                    const std::string& dual_name) {
    const auto rep = check_pointwise_duality(ContinuousSide::from_process(wf),
                                             DiscreteSide::from_generator(dual_name, dual), D,
                                             grid1, opt);
    rows.add("pointwise", wf.describe() + " ~ " + dual_name, "L_x D - Lhat_n D via " + D.describe(),
             gp, rep.max_abs_residual, fd_tol);
  };
  const long bound = nmax + 1;
  const DualityFamily mono = DualityFamily::monomial();
  wf_row(ProcessSpec::wf_neutral(), generator_matrix(ProcessSpec::kingman_block(0, 0, bound)), mono,
         "kingman");
  wf_row(ProcessSpec::wf_mutation(theta),
         generator_matrix(ProcessSpec::kingman_block(theta, 0, bound)), mono,
         "kingman(theta=" + num(theta) + ")");
  wf_row(ProcessSpec::wf_negative_selection(sigma),
         generator_matrix(ProcessSpec::kingman_block(0, sigma, bound)), mono,
         "kingman(sigma=" + num(sigma) + ")");
  wf_row(ProcessSpec::wf_positive_selection(sigma),
         generator_matrix(ProcessSpec::kingman_block(0, sigma, bound)),
         DualityFamily::complement_monomial(), "kingman(sigma=" + num(sigma) + ")");
  {
    const ProcessSpec g = ProcessSpec::wf_general_1d({0.0, 1.5, -2.0, 0.5}, {0.3, -0.8, 0.5});
    wf_row(g, generator_matrix(g, bound + 1), mono, "dual chain");
  }

  // e^{xy}: Brownian motion against multiplication by y^2/2.
  {
    std::vector<EvalPoint> grid;
    for (double x : {-1.0, 0.0, 1.0})
      for (double y : {-1.0, 0.0, 1.0}) grid.push_back({{x, y}, {}});
    const auto bm = ContinuousSide::one_dimensional("1/2 d^2/dx^2", [](double) { return 0.5; }, {});
    const auto mult = ContinuousSide::one_dimensional("y^2/2", {}, {}, [](double y) { return y * y / 2; });
    const auto rep = check_pointwise_duality(bm, mult, DualityFamily::exponential(), grid, opt);
    rows.add("pointwise", "1/2 d^2/dx^2 ~ y^2/2", "L_x D - Lhat_y D via exponential",
             "x,y in {-1,0,1}", rep.max_abs_residual, fd_tol);
  }
  for (double cc2 : {c2, 0.0}) {
    std::vector<EvalPoint> grid;
    for (double x : {0.0, 0.5, 1.0, 1.5})
      for (double y : {0.0, 0.5, 1.0, 1.5}) grid.push_back({{x, y}, {}});
    const auto L = ContinuousSide::one_dimensional(
        "(c1 x^2 + c2 x) d^2 + c3 x d", [=](double x) { return c1 * x * x + cc2 * x; },
        [=](double x) { return c3 * x; });
    const auto Lh = ContinuousSide::one_dimensional(
        "c1 y^2 d^2 + (c2 y^2 + c3 y) d", [=](double y) { return c1 * y * y; },
        [=](double y) { return cc2 * y * y + c3 * y; });
    const auto rep = check_pointwise_duality(L, Lh, DualityFamily::exponential(), grid, opt);
    rows.add("pointwise", cc2 == 0.0 ? "self-dual square-root-free diffusion" : "x-diffusion ~ y-diffusion",
             "L_x D - Lhat_y D via exponential",
             "c1=" + num(c1) + ";c2=" + num(cc2) + ";c3=" + num(c3) + ";x,y in {0..1.5}",
             rep.max_abs_residual, fd_tol);
  }

  // Hermite functions: A = (x + d/dx)/2 -> a and A+ = x - d/dx -> a+.
  {
    const int M = std::max(nmax, 2);
    const OperatorSet disc = build_representation(RepresentationFamily::HeisenbergDiscrete, {}, M);
    const StateIndex idx = enumerate_states(1, M, EnumerationMode::DownClosed);
    const auto A = ContinuousSide::one_dimensional("(x + d/dx)/2", {}, [](double) { return 0.5; },
                                                   [](double x) { return x / 2; });
    const auto Ad = ContinuousSide::one_dimensional("x - d/dx", {}, [](double) { return -1.0; },
                                                    [](double x) { return x; });
    std::vector<EvalPoint> lo, up;
    for (double x : {-1.5, -0.5, 0.0, 0.7, 1.5})
      for (int n = 0; n <= M; ++n) {
        lo.push_back({{x}, {n}});
        if (n < M) up.push_back({{x}, {n}});
      }
    const DualityFamily herm = DualityFamily::hermite_weighted();
    rows.add("pointwise", "(x + d/dx)/2 ~ a", "A_x D - a_n D via hermite-weighted",
             "n<=" + std::to_string(M),
             check_pointwise_duality(A, DiscreteSide{"a", disc.at("A"), idx}, herm, lo, opt)
                 .max_abs_residual,
             fd_tol);
    rows.add("pointwise", "x - d/dx ~ a+", "A+_x D - a+_n D via hermite-weighted",
             "n<=" + std::to_string(M - 1),
             check_pointwise_duality(Ad, DiscreteSide{"a+", disc.at("A+"), idx}, herm, up, opt)
                 .max_abs_residual,
             fd_tol);
  }

  // WF with mutation against Moran, in d types.
  for (int dd : {2, d}) {
    const ProcessSpec wf = ProcessSpec::wf_multitype(dd, theta);
    const GeneratorMatrix moran = generator_matrix(ProcessSpec::moran_multitype(N, dd, theta));
    std::mt19937_64 rng(get<std::uint64_t>(cfg, "seed"));
    std::vector<EvalPoint> grid;
    for (int rep = 0; rep < 8; ++rep) {
      const auto x = random_simplex_point(dd, rng);
      for (const State& k : moran.index.states()) grid.push_back({x, k});
    }
    const DualityFamily D = DualityFamily::product_gamma(theta, dd);
    const auto r = check_pointwise_duality(ContinuousSide::from_process(wf),
                                           DiscreteSide::from_generator("moran", moran), D, grid, opt);
    rows.add("pointwise", wf.describe() + " ~ moran", "L_x D - Lhat_k D via product-gamma",
             "d=" + std::to_string(dd) + ";N=" + std::to_string(N) + ";theta=" + num(theta) +
                 ";points=8",
             r.max_abs_residual, fd_tol);
  }

  // Stepping stone on three sites with an asymmetric kernel.
  {
    Matrix p(3, 3);
    p << 0.1, 0.6, 0.3, 0.2, 0.0, 0.8, 0.5, 0.4, 0.1;
    const int total = std::min(nmax, 4);
    const GeneratorMatrix dual = generator_matrix(ProcessSpec::stepping_stone_dual(p), total);
    std::vector<EvalPoint> grid;
    for (const std::vector<double>& x : std::vector<std::vector<double>>{
             {0.2, 0.5, 0.9}, {0.7, 0.1, 0.4}, {0.5, 0.5, 0.5}, {0.0, 1.0, 0.3}})
      for (const State& n : dual.index.states()) grid.push_back({x, n});
    const auto r = check_pointwise_duality(ContinuousSide::from_process(ProcessSpec::stepping_stone_forward(p)),
                                           DiscreteSide::from_generator("coalescing walks", dual),
                                           mono, grid, opt);
    rows.add("pointwise", "stepping-stone ~ coalescing walks", "L_x D - Lhat_n D via monomial",
             "|S|=3;sum n<=" + std::to_string(total), r.max_abs_residual, fd_tol);
  }
  return rows.take();
}

}  // namespace duality::cli
