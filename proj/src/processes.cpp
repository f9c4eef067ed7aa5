#include "duality/processes.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace duality {

namespace {

constexpr double kCoefTol = 1e-12;

void invalid(const std::string& msg) { throw std::invalid_argument(msg); }

double poly_eval(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

// Coefficients of p(1 - u) in powers of u.
std::vector<double> reflect(const std::vector<double>& c) {
  std::vector<double> out(c.size(), 0.0);
  for (size_t k = 0; k < c.size(); ++k) {
    // (1 - u)^k = sum_j C(k, j) (-u)^j
    double binom = 1.0;
    for (size_t j = 0; j <= k; ++j) {
      out[j] += c[k] * binom * ((j & 1) ? -1.0 : 1.0);
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
  }
  return out;
}

void validate_condcoef(const std::vector<double>& alpha, const std::vector<double>& beta) {
  if (alpha.size() < 3 || beta.size() < 2)
    invalid("wf-general-1d: alpha needs entries up to x^2 and beta up to x^1");
  if (alpha[0] != 0.0) invalid("wf-general-1d: alpha has no constant term");
  double sa = 0.0, sb = 0.0;
  for (size_t k = 0; k < alpha.size(); ++k) {
    if (k == 2) continue;
    if (alpha[k] < 0.0) invalid("wf-general-1d: alpha_k must be >= 0 for k != 2");
    sa += alpha[k];
  }
  for (size_t k = 0; k < beta.size(); ++k) {
    if (k == 1) continue;
    if (beta[k] < 0.0) invalid("wf-general-1d: beta_k must be >= 0 for k != 1");
    sb += beta[k];
  }
  if (std::fabs(alpha[2] + sa) > kCoefTol * std::max(1.0, sa))
    invalid("wf-general-1d: alpha_2 must equal -sum of the other alpha_k");
  if (std::fabs(beta[1] + sb) > kCoefTol * std::max(1.0, sb))
    invalid("wf-general-1d: beta_1 must equal -sum of the other beta_k");
}

void validate_kernel(const Matrix& p) {
  if (p.rows() != p.cols() || p.rows() < 1) invalid("stepping-stone: kernel must be square");
  if (p.rows() > 16) invalid("stepping-stone: at most 16 sites");
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      if (i != j && p(i, j) < 0.0) invalid("stepping-stone: negative kernel entry");
    if (std::fabs(p.row(i).sum() - 1.0) > kCoefTol)
      invalid("stepping-stone: kernel rows must sum to 1");
  }
}

double choose(double n, double k) {
  return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1));
}

void enumerate_rec(int d, int remaining, State& cur, size_t pos, std::vector<State>& out) {
  if (pos + 1 == static_cast<size_t>(d)) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    cur[pos] = k;
    enumerate_rec(d, remaining - k, cur, pos + 1, out);
  }
}

// Accumulates off-diagonal rates and records rate that leaves the index.
class RateBuilder {
 public:
  explicit RateBuilder(const StateIndex& idx)
      : idx_(idx), Q_(Matrix::Zero(idx.size(), idx.size())), dropped_(Vector::Zero(idx.size())) {}

  void add(Eigen::Index from, const State& to, double rate) {
    if (rate == 0.0) return;
    if (rate < 0.0) throw std::logic_error("negative rate for " + to_string_state(to));
    if (!idx_.contains(to)) {
      dropped_(from) += rate;
      return;
    }
    const Eigen::Index j = idx_.index_of(to);
    if (j != from) Q_(from, j) += rate;
  }

  GeneratorMatrix finish(std::string conserved) {
    for (Eigen::Index i = 0; i < Q_.rows(); ++i) {
      Q_(i, i) = 0.0;
      Q_(i, i) = -Q_.row(i).sum();
    }
    return GeneratorMatrix(std::move(Q_), idx_, std::move(conserved), std::move(dropped_));
  }

 private:
  static std::string to_string_state(const State& s) {
    std::ostringstream os;
    for (long v : s) os << v << ' ';
    return os.str();
  }

  const StateIndex& idx_;
  Matrix Q_;
  Vector dropped_;
};

State shifted(const State& s, int plus, int minus) {
  State t = s;
  if (plus >= 0) ++t[plus];
  if (minus >= 0) --t[minus];
  return t;
}

GeneratorMatrix sip_generator(const ProcessSpec& spec, const StateIndex& idx, std::string label) {
  RateBuilder rb(idx);
  const double half_m = spec.m / 2.0;
  for (Eigen::Index s = 0; s < idx.size(); ++s) {
    const State& k = idx.state(s);
    for (int i = 0; i < spec.d; ++i)
      for (int j = i + 1; j < spec.d; ++j) {
        rb.add(s, shifted(k, j, i), 0.5 * k[i] * (k[j] + half_m));
        rb.add(s, shifted(k, i, j), 0.5 * k[j] * (k[i] + half_m));
      }
  }
  return rb.finish(std::move(label));
}

// Written in the reduced coordinates k_1..k_{d-1}, k_d = N - sum, as the
// Moran model is usually stated; mapped onto full vectors for the index.
GeneratorMatrix moran_generator(const ProcessSpec& spec) {
  const int d = spec.d, N = spec.N;
  const StateIndex idx = enumerate_states(d, N, EnumerationMode::Conserved);
  RateBuilder rb(idx);
  const double c = 2.0 * spec.theta / (d - 1);
  const double s = spec.time_scale;
  for (Eigen::Index st = 0; st < idx.size(); ++st) {
    const State& k = idx.state(st);
    long reduced_sum = 0;
    for (int i = 0; i < d - 1; ++i) reduced_sum += k[i];
    const double rest = static_cast<double>(N - reduced_sum);
    const int last = d - 1;
    for (int i = 0; i < d - 1; ++i) {
      for (int j = i + 1; j < d - 1; ++j) {
        rb.add(st, shifted(k, j, i), s * 0.5 * k[i] * (k[j] + c));
        rb.add(st, shifted(k, i, j), s * 0.5 * k[j] * (k[i] + c));
      }
      rb.add(st, shifted(k, i, last), s * 0.5 * rest * (k[i] + c));
      rb.add(st, shifted(k, last, i), s * 0.5 * k[i] * (rest + c));
    }
  }
  return rb.finish("sum k_i = " + std::to_string(N));
}

GeneratorMatrix kingman_generator(const ProcessSpec& spec, long n_max) {
  const StateIndex idx = enumerate_states(1, static_cast<int>(n_max), EnumerationMode::DownClosed);
  RateBuilder rb(idx);
  for (long n = 0; n <= n_max; ++n) {
    const double x = static_cast<double>(n);
    rb.add(n, State{n - 1}, x * (x - 1.0) + spec.theta * x);
    rb.add(n, State{n + 1}, spec.sigma * x);
  }
  return rb.finish("");
}

// n(n-1) sum_k alpha_k (f(n+k-2) - f(n)) + n sum_k beta_k (f(n+k-1) - f(n))
GeneratorMatrix dual_chain_generator(const ProcessSpec& spec, long n_max) {
  std::vector<double> alpha = spec.alpha, beta = spec.beta;
  if (spec.complement_dual) {
    alpha = reflect(alpha);
    beta = reflect(beta);
    for (double& b : beta) b = -b;
  }
  const StateIndex idx = enumerate_states(1, static_cast<int>(n_max), EnumerationMode::DownClosed);
  RateBuilder rb(idx);
  for (long n = 0; n <= n_max; ++n) {
    const double x = static_cast<double>(n);
    for (size_t k = 0; k < alpha.size(); ++k)
      if (k != 2) rb.add(n, State{n + static_cast<long>(k) - 2}, x * (x - 1.0) * alpha[k]);
    for (size_t k = 0; k < beta.size(); ++k)
      if (k != 1) rb.add(n, State{n + static_cast<long>(k) - 1}, x * beta[k]);
  }
  return rb.finish("");
}

GeneratorMatrix stepping_stone_dual_generator(const ProcessSpec& spec, long total) {
  const int S = static_cast<int>(spec.kernel.rows());
  const StateIndex idx = enumerate_states(S, static_cast<int>(total), EnumerationMode::DownClosed);
  RateBuilder rb(idx);
  const Matrix& p = spec.kernel;
  for (Eigen::Index st = 0; st < idx.size(); ++st) {
    const State& n = idx.state(st);
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < S; ++j) {
        if (i == j) continue;
        // n -> n - e_i + e_j. The forward drift only sees p(i,j) + p(j,i).
        rb.add(st, shifted(n, j, i), n[i] * (p(i, j) + p(j, i)));
      }
      rb.add(st, shifted(n, -1, i), static_cast<double>(n[i]) * (n[i] - 1));
    }
  }
  return rb.finish("");
}

void require_psd(const Matrix& a) {
  if (a.rows() == 1) {
    if (a(0, 0) < -1e-12) throw std::domain_error("diffusion coefficient negative at x");
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::domain_error("diffusion matrix not positive semidefinite at x");
}

}  // namespace

std::string to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::WfGeneral1d: return "wf-general-1d";
    case ProcessKind::WfMultitype: return "wf-multitype";
    case ProcessKind::MoranMultitype: return "moran-multitype";
    case ProcessKind::Sip: return "sip";
    case ProcessKind::Bep: return "bep";
    case ProcessKind::KingmanBlock: return "kingman-block";
    case ProcessKind::SteppingStoneForward: return "stepping-stone-forward";
    case ProcessKind::SteppingStoneDual: return "stepping-stone-dual";
  }
  return "?";
}

ProcessSpec ProcessSpec::wf_general_1d(std::vector<double> alpha, std::vector<double> beta) {
  alpha.resize(std::max<size_t>(alpha.size(), 3), 0.0);
  beta.resize(std::max<size_t>(beta.size(), 2), 0.0);
  validate_condcoef(alpha, beta);
  ProcessSpec s;
  s.kind = ProcessKind::WfGeneral1d;
  s.alpha = std::move(alpha);
  s.beta = std::move(beta);
  return s;
}

ProcessSpec ProcessSpec::wf_neutral() { return wf_general_1d({0.0, 1.0, -1.0}, {0.0, 0.0}); }

ProcessSpec ProcessSpec::wf_mutation(double theta) {
  if (theta < 0.0) invalid("wf mutation: theta must be >= 0");
  return wf_general_1d({0.0, 1.0, -1.0}, {theta, -theta});
}

ProcessSpec ProcessSpec::wf_negative_selection(double sigma) {
  if (sigma < 0.0) invalid("wf selection: sigma must be >= 0");
  return wf_general_1d({0.0, 1.0, -1.0}, {0.0, -sigma, sigma});
}

ProcessSpec ProcessSpec::wf_positive_selection(double sigma) {
  if (sigma < 0.0) invalid("wf selection: sigma must be >= 0");
  // x(1-x) d^2/dx^2 + sigma x(1-x) d/dx: in u = 1 - x this is the negative
  // selection generator, so the x^n coefficient rules apply after reflection.
  ProcessSpec s;
  s.kind = ProcessKind::WfGeneral1d;
  s.alpha = {0.0, 1.0, -1.0};
  s.beta = {0.0, sigma, -sigma};
  s.complement_dual = true;
  std::vector<double> rb = reflect(s.beta);
  for (double& b : rb) b = -b;
  validate_condcoef(reflect(s.alpha), rb);
  return s;
}

ProcessSpec ProcessSpec::wf_multitype(int d, double theta) {
  if (d < 2) invalid("wf-multitype: d must be >= 2");
  if (theta < 0.0) invalid("wf-multitype: theta must be >= 0");
  ProcessSpec s;
  s.kind = ProcessKind::WfMultitype;
  s.d = d;
  s.theta = theta;
  return s;
}

ProcessSpec ProcessSpec::moran_multitype(int N, int d, double theta, double time_scale) {
  if (N < 1) invalid("moran-multitype: N must be >= 1");
  if (d < 2) invalid("moran-multitype: d must be >= 2");
  if (theta < 0.0) invalid("moran-multitype: theta must be >= 0");
  if (!(time_scale > 0.0)) invalid("moran-multitype: time scale must be > 0");
  ProcessSpec s;
  s.kind = ProcessKind::MoranMultitype;
  s.N = N;
  s.d = d;
  s.theta = theta;
  s.time_scale = time_scale;
  return s;
}

ProcessSpec ProcessSpec::sip(int d, double m) {
  if (d < 2) invalid("sip: d must be >= 2");
  if (m < 0.0) invalid("sip: m must be >= 0");
  ProcessSpec s;
  s.kind = ProcessKind::Sip;
  s.d = d;
  s.m = m;
  return s;
}

ProcessSpec ProcessSpec::bep(int d, double m) {
  if (d < 2) invalid("bep: d must be >= 2");
  if (m < 0.0) invalid("bep: m must be >= 0");
  ProcessSpec s;
  s.kind = ProcessKind::Bep;
  s.d = d;
  s.m = m;
  return s;
}

ProcessSpec ProcessSpec::kingman_block(double theta, double sigma, long n_max) {
  if (theta < 0.0 || sigma < 0.0) invalid("kingman-block: rates must be >= 0");
  if (n_max < 1) invalid("kingman-block: n_max must be >= 1");
  ProcessSpec s;
  s.kind = ProcessKind::KingmanBlock;
  s.theta = theta;
  s.sigma = sigma;
  s.n_max = n_max;
  return s;
}

ProcessSpec ProcessSpec::stepping_stone_forward(Matrix kernel) {
  validate_kernel(kernel);
  ProcessSpec s;
  s.kind = ProcessKind::SteppingStoneForward;
  s.d = static_cast<int>(kernel.rows());
  s.kernel = std::move(kernel);
  return s;
}

ProcessSpec ProcessSpec::stepping_stone_dual(Matrix kernel) {
  validate_kernel(kernel);
  ProcessSpec s;
  s.kind = ProcessKind::SteppingStoneDual;
  s.d = static_cast<int>(kernel.rows());
  s.kernel = std::move(kernel);
  return s;
}

bool ProcessSpec::is_jump() const {
  return kind == ProcessKind::MoranMultitype || kind == ProcessKind::Sip ||
         kind == ProcessKind::KingmanBlock || kind == ProcessKind::SteppingStoneDual;
}

bool ProcessSpec::is_diffusion() const {
  return kind == ProcessKind::WfGeneral1d || kind == ProcessKind::WfMultitype ||
         kind == ProcessKind::Bep || kind == ProcessKind::SteppingStoneForward;
}

bool ProcessSpec::neutral() const {
  switch (kind) {
    case ProcessKind::WfGeneral1d:
      return std::all_of(beta.begin(), beta.end(), [](double b) { return b == 0.0; });
    case ProcessKind::WfMultitype:
    case ProcessKind::MoranMultitype:
      return theta == 0.0;
    case ProcessKind::Sip:
    case ProcessKind::Bep:
      return m == 0.0;
    default:
      return false;
  }
}

std::string ProcessSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  switch (kind) {
    case ProcessKind::WfGeneral1d: {
      os << "(alpha=[";
      for (size_t i = 0; i < alpha.size(); ++i) os << (i ? "," : "") << alpha[i];
      os << "],beta=[";
      for (size_t i = 0; i < beta.size(); ++i) os << (i ? "," : "") << beta[i];
      os << "]" << (complement_dual ? ",dual=(1-x)^n" : "") << ")";
      break;
    }
    case ProcessKind::WfMultitype: os << "(d=" << d << ",theta=" << theta << ")"; break;
    case ProcessKind::MoranMultitype:
      os << "(N=" << N << ",d=" << d << ",theta=" << theta;
      if (time_scale != 1.0) os << ",time_scale=" << time_scale;
      os << ")";
      break;
    case ProcessKind::Sip:
    case ProcessKind::Bep: os << "(d=" << d << ",m=" << m << ")"; break;
    case ProcessKind::KingmanBlock:
      os << "(theta=" << theta << ",sigma=" << sigma << ",n_max=" << n_max << ")";
      break;
    case ProcessKind::SteppingStoneForward:
    case ProcessKind::SteppingStoneDual: os << "(|S|=" << kernel.rows() << ")"; break;
  }
  return os.str();
}

StateIndex::StateIndex(int d, int N, EnumerationMode mode, std::vector<State> states)
    : d_(d), N_(N), mode_(mode), states_(std::move(states)) {
  for (size_t i = 0; i < states_.size(); ++i)
    lookup_.emplace(states_[i], static_cast<Eigen::Index>(i));
}

Eigen::Index StateIndex::index_of(const State& s) const {
  auto it = lookup_.find(s);
  if (it == lookup_.end()) throw std::out_of_range("state not in index");
  return it->second;
}

StateIndex enumerate_states(int d, int N, EnumerationMode mode) {
  if (d < 1) invalid("enumerate_states: d must be >= 1");
  if (N < 0) invalid("enumerate_states: N must be >= 0");
  const double count = mode == EnumerationMode::Conserved ? choose(N + d - 1, d - 1)
                                                          : choose(N + d, d);
  if (count > 5e6) throw std::length_error("enumerate_states: more than 5e6 states");
  std::vector<State> states;
  states.reserve(static_cast<size_t>(count + 0.5));
  State cur(static_cast<size_t>(d), 0);
  if (mode == EnumerationMode::Conserved) {
    enumerate_rec(d, N, cur, 0, states);
  } else {
    for (int total = 0; total <= N; ++total) enumerate_rec(d, total, cur, 0, states);
  }
  return StateIndex(d, N, mode, std::move(states));
}

GeneratorMatrix::GeneratorMatrix(Matrix rates, StateIndex idx, std::string conserved_label,
                                 Vector dropped_rates)
    : Q(std::move(rates)),
      index(std::move(idx)),
      conserved(std::move(conserved_label)),
      dropped(std::move(dropped_rates)) {
  if (Q.rows() != Q.cols() || Q.rows() != index.size())
    throw std::invalid_argument("GeneratorMatrix: shape does not match the index");
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    double scale = 1.0;
    for (Eigen::Index j = 0; j < Q.cols(); ++j) {
      if (i != j && Q(i, j) < 0.0)
        throw std::invalid_argument("GeneratorMatrix: negative off-diagonal rate");
      scale = std::max(scale, std::fabs(Q(i, j)));
    }
    if (std::fabs(Q.row(i).sum()) > 1e-12 * scale)
      throw std::invalid_argument("GeneratorMatrix: row does not sum to zero");
  }
}

GeneratorMatrix generator_matrix(const ProcessSpec& spec, long bound) {
  switch (spec.kind) {
    case ProcessKind::Sip:
      if (bound < 0) invalid("generator_matrix: sip needs the particle count");
      return sip_generator(spec,
                           enumerate_states(spec.d, static_cast<int>(bound), EnumerationMode::Conserved),
                           "sum k_i = " + std::to_string(bound));
    case ProcessKind::MoranMultitype:
      return moran_generator(spec);
    case ProcessKind::KingmanBlock:
      return kingman_generator(spec, bound < 0 ? spec.n_max : bound);
    case ProcessKind::WfGeneral1d:
      return dual_chain_generator(spec, bound < 0 ? spec.n_max : bound);
    case ProcessKind::SteppingStoneDual:
      if (bound < 0) invalid("generator_matrix: stepping-stone dual needs a total bound");
      return stepping_stone_dual_generator(spec, bound);
    default:
      invalid("generator_matrix: " + to_string(spec.kind) + " is not a jump process");
  }
  throw std::logic_error("unreachable");
}

GeneratorMatrix generator_matrix_down_closed(const ProcessSpec& spec, long max_total) {
  if (spec.kind == ProcessKind::Sip) {
    if (max_total < 0) invalid("generator_matrix_down_closed: negative total");
    return sip_generator(
        spec, enumerate_states(spec.d, static_cast<int>(max_total), EnumerationMode::DownClosed),
        "sum k_i conserved within each block");
  }
  if (spec.kind == ProcessKind::SteppingStoneDual) return generator_matrix(spec, max_total);
  invalid("generator_matrix_down_closed: " + to_string(spec.kind) + " has no down-closed form");
  throw std::logic_error("unreachable");
}

DriftDiffusion drift_diffusion(const ProcessSpec& spec, std::span<const double> x) {
  DriftDiffusion out;
  auto in_unit = [](double v) { return v >= -1e-12 && v <= 1.0 + 1e-12; };
  switch (spec.kind) {
    case ProcessKind::WfGeneral1d: {
      if (x.size() != 1 || !in_unit(x[0])) throw std::domain_error("wf-general-1d: x outside [0,1]");
      out.drift = Vector::Constant(1, poly_eval(spec.beta, x[0]));
      out.diffusion = Matrix::Constant(1, 1, 2.0 * poly_eval(spec.alpha, x[0]));
      break;
    }
    case ProcessKind::WfMultitype: {
      const int d = spec.d;
      if (static_cast<int>(x.size()) != d) throw std::domain_error("wf-multitype: need d coordinates");
      double s = 0.0;
      for (double v : x) {
        if (!in_unit(v)) throw std::domain_error("wf-multitype: coordinate outside [0,1]");
        s += v;
      }
      if (std::fabs(s - 1.0) > 1e-9) throw std::domain_error("wf-multitype: x not on the simplex");
      out.drift.resize(d - 1);
      out.diffusion.resize(d - 1, d - 1);
      for (int i = 0; i < d - 1; ++i) {
        out.drift(i) = spec.theta / (d - 1) * (1.0 - d * x[i]);
        for (int j = 0; j < d - 1; ++j)
          out.diffusion(i, j) = i == j ? x[i] * (1.0 - x[i]) : -x[i] * x[j];
      }
      break;
    }
    case ProcessKind::Bep: {
      const int d = spec.d;
      if (static_cast<int>(x.size()) != d) throw std::domain_error("bep: need d coordinates");
      for (double v : x)
        if (v < -1e-12) throw std::domain_error("bep: negative coordinate");
      out.drift = Vector::Zero(d);
      out.diffusion = Matrix::Zero(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          if (i == j) continue;
          out.diffusion(i, i) += x[i] * x[j];
          out.diffusion(i, j) = -x[i] * x[j];
          out.drift(i) -= spec.m / 4.0 * (x[i] - x[j]);
        }
      break;
    }
    case ProcessKind::SteppingStoneForward: {
      const int S = spec.d;
      if (static_cast<int>(x.size()) != S) throw std::domain_error("stepping-stone: need |S| coordinates");
      for (double v : x)
        if (!in_unit(v)) throw std::domain_error("stepping-stone: coordinate outside [0,1]");
      out.drift = Vector::Zero(S);
      out.diffusion = Matrix::Zero(S, S);
      const Matrix& p = spec.kernel;
      for (int l = 0; l < S; ++l) {
        for (int j = 0; j < S; ++j) out.drift(l) += (p(l, j) + p(j, l)) * (x[j] - x[l]);
        out.diffusion(l, l) = 2.0 * x[l] * (1.0 - x[l]);
      }
      break;
    }
    default:
      invalid("drift_diffusion: " + to_string(spec.kind) + " is not a diffusion");
  }
  require_psd(out.diffusion);
  return out;
}

DriftDiffusion restrict_to_simplex(const DriftDiffusion& full) {
  const Eigen::Index n = full.drift.size() - 1;
  if (n < 1) throw std::invalid_argument("restrict_to_simplex: need at least 2 coordinates");
  return {full.drift.head(n), full.diffusion.topLeftCorner(n, n)};
}

}  // namespace duality
