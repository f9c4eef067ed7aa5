#include "duality/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace duality {

namespace {

// Neumaier's variant of Kahan summation, in the order given.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

bool is_limiting(const DualityFamily& f) {
  return f.kind() == DualityKind::LimitingSip || f.kind() == DualityKind::LimitingSelfDual;
}

int occupied_sites(const State& s) {
  int r = 0;
  for (long v : s) r += v >= 1;
  return r;
}

std::string format_state(const std::vector<double>& c, const State& d) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  bool first = true;
  for (double v : c) os << (first ? "" : ",") << v, first = false;
  for (long v : d) os << (first ? "" : ",") << v, first = false;
  os << ")";
  return os.str();
}

EvalPoint join(const EvalPoint& process, const EvalPoint& frozen, ArgumentPosition pos) {
  const EvalPoint& a = pos == ArgumentPosition::Left ? process : frozen;
  const EvalPoint& b = pos == ArgumentPosition::Left ? frozen : process;
  EvalPoint p = a;
  p.continuous.insert(p.continuous.end(), b.continuous.begin(), b.continuous.end());
  p.discrete.insert(p.discrete.end(), b.discrete.begin(), b.discrete.end());
  return p;
}

// Whether the limiting-duality indicator applies and, if so, the occupied
// site count every surviving endpoint must keep.
int limiting_target(const ProcessSpec& spec, const DualityFamily& family, const State& start,
                    ArgumentPosition position) {
  if (!is_limiting(family) || position != ArgumentPosition::Right) return -1;
  if (spec.kind != ProcessKind::Sip || spec.m != 0.0)
    throw std::invalid_argument(
        "limiting duality: the xi side must be simulated as SIP with m = 0");
  const int r = occupied_sites(start);
  if (r < static_cast<int>(start.size()))
    throw std::invalid_argument(
        "limiting duality: start configuration has an empty site (R(xi) < d); only the "
        "fully occupied case has a finite m -> 0 limit");
  return r;
}

long default_bound(const ProcessSpec& spec, const State& start, long bound) {
  if (bound >= 0) return bound;
  if (spec.kind == ProcessKind::Sip || spec.kind == ProcessKind::SteppingStoneDual) {
    long s = 0;
    for (long v : start) s += v;
    return s;
  }
  if (spec.kind == ProcessKind::KingmanBlock || spec.kind == ProcessKind::WfGeneral1d) {
    long s = 0;
    for (long v : start) s = std::max(s, v);
    // Selection can push the count up; leave headroom and let the sampler
    // report any escape.
    return std::max<long>(s, spec.sigma > 0.0 || spec.kind == ProcessKind::WfGeneral1d
                                 ? std::min<long>(spec.n_max, std::max<long>(4 * s, s + 50))
                                 : s);
  }
  return -1;
}

}  // namespace

void EstimatorConfig::validate() const {
  if (n_paths < 100) throw std::invalid_argument("estimator: n_paths must be >= 100");
  if (!(dt > 0.0)) throw std::invalid_argument("estimator: dt must be > 0");
  if (!(t >= 0.0)) throw std::invalid_argument("estimator: t must be >= 0");
}

std::string to_string(Backend b) { return b == Backend::Serial ? "serial" : "openmp"; }

std::vector<double> run_paths(std::size_t n, const PathKernel& kernel, bool antithetic,
                              Backend backend) {
  return backend == Backend::Serial ? run_paths_serial(n, kernel, antithetic)
                                    : run_paths_omp(n, kernel, antithetic);
}

Estimate summarize(const std::vector<double>& values) {
  Estimate e;
  e.n = values.size();
  if (e.n == 0) return e;
  CompensatedSum s;
  for (double v : values) s.add(v);
  e.mean = s.value() / static_cast<double>(e.n);
  if (e.n < 2) return e;
  CompensatedSum ss;
  for (double v : values) ss.add((v - e.mean) * (v - e.mean));
  const double var = ss.value() / static_cast<double>(e.n - 1);
  e.se = std::sqrt(var / static_cast<double>(e.n));
  return e;
}

Estimate estimate_duality_side(const ProcessSpec& spec, const DualityFamily& family,
                               const EvalPoint& start, const EvalPoint& frozen,
                               ArgumentPosition position, const EstimatorConfig& cfg,
                               Backend backend, long bound) {
  cfg.validate();
  PathKernel kernel;
  bool antithetic = false;

  if (spec.is_diffusion()) {
    const DiffusionSampler sampler(spec);
    antithetic = cfg.antithetic;
    kernel = [&, sampler](std::size_t i, bool negate) {
      Rng rng = make_stream(cfg.seed, i);
      EvalPoint end;
      end.continuous = sampler.sample(start.continuous, cfg.t, cfg.dt, rng, negate);
      try {
        return evaluate(family, join(end, frozen, position));
      } catch (const std::domain_error& e) {
        throw std::domain_error("path " + std::to_string(i) + " ended at " +
                                format_state(end.continuous, {}) + ": " + e.what());
      }
    };
  } else if (spec.is_jump()) {
    const long b = default_bound(spec, start.discrete, bound);
    const GeneratorMatrix g = generator_matrix(spec, b);
    const JumpSampler sampler(g);
    const Eigen::Index from = g.index.index_of(start.discrete);
    const int target = limiting_target(spec, family, start.discrete, position);
    kernel = [&, sampler, from, target](std::size_t i, bool) {
      Rng rng = make_stream(cfg.seed, i);
      EvalPoint end;
      end.discrete = sampler.index().state(sampler.sample(from, cfg.t, rng));
      if (target >= 0 && occupied_sites(end.discrete) != target) return 0.0;
      try {
        return evaluate(family, join(end, frozen, position));
      } catch (const std::domain_error& e) {
        throw std::domain_error("path " + std::to_string(i) + " ended at " +
                                format_state({}, end.discrete) + ": " + e.what());
      }
    };
  } else {
    throw std::invalid_argument("estimate_duality_side: unsupported process");
  }

  const std::size_t n = antithetic ? cfg.n_paths / 2 : cfg.n_paths;
  return summarize(run_paths(n, kernel, antithetic, backend));
}

Estimate exact_duality_side(const ProcessSpec& spec, const DualityFamily& family,
                            const State& start, const EvalPoint& frozen,
                            ArgumentPosition position, double t, long bound) {
  const GeneratorMatrix g = generator_matrix(spec, default_bound(spec, start, bound));
  const int target = limiting_target(spec, family, start, position);
  Vector f(g.index.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const State& s = g.index.state(i);
    if (target >= 0 && occupied_sites(s) != target) {
      f(i) = 0.0;
      continue;
    }
    EvalPoint p;
    p.discrete = s;
    f(i) = evaluate(family, join(p, frozen, position));
  }
  const ExactExpectation ex = exact_expectation(g, f, start, t);
  return Estimate{ex.value, 0.0, 0};
}

ComparisonReport compare(const Estimate& lhs, const Estimate& rhs, double tolerance_multiplier,
                         double bias_budget) {
  ComparisonReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.rhs_exact = rhs.se == 0.0 && rhs.n == 0;
  r.tolerance_multiplier = tolerance_multiplier;
  r.bias_budget = bias_budget;
  r.diff = lhs.mean - rhs.mean;
  r.combined_se = std::sqrt(lhs.se * lhs.se + rhs.se * rhs.se);
  const double ad = std::fabs(r.diff);
  if (r.combined_se > 0.0)
    r.z = ad / r.combined_se;
  else
    r.z = ad == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  r.pass = ad <= tolerance_multiplier * r.combined_se + bias_budget;
  return r;
}

nlohmann::ordered_json to_json(const ComparisonReport& r) {
  nlohmann::ordered_json j;
  j["lhs"] = {{"mean", r.lhs.mean}, {"se", r.lhs.se}, {"n", r.lhs.n}};
  if (r.rhs_exact)
    j["rhs"] = {{"value", r.rhs.mean}};
  else
    j["rhs"] = {{"mean", r.rhs.mean}, {"se", r.rhs.se}, {"n", r.rhs.n}};
  j["diff"] = r.diff;
  j["combined_se"] = r.combined_se;
  j["z"] = std::isfinite(r.z) ? nlohmann::ordered_json(r.z) : nlohmann::ordered_json("inf");
  j["tolerance_multiplier"] = r.tolerance_multiplier;
  j["bias_budget"] = r.bias_budget;
  j["pass"] = r.pass;
  j["metadata"] = r.metadata;
  return j;
}

// ------------------------------------------------------------ experiments

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::WfKingman: return "wf-kingman";
    case ExperimentKind::WfMoran: return "wf-moran";
    case ExperimentKind::Heterozygosity: return "heterozygosity";
    case ExperimentKind::McVsMc: return "mc-vs-mc";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (ExperimentKind k : {ExperimentKind::WfKingman, ExperimentKind::WfMoran,
                           ExperimentKind::Heterozygosity, ExperimentKind::McVsMc})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

ComparisonReport run_experiment(const Experiment& e, Backend backend) {
  e.cfg.validate();
  if (!(e.x0 >= 0.0 && e.x0 <= 1.0)) throw std::invalid_argument("experiment: x0 outside [0,1]");
  const double bias = e.bias_per_dt * e.cfg.dt;
  const EvalPoint x_full{{e.x0, 1.0 - e.x0}, {}};
  const State k{e.k1, e.N - e.k1};
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };

  ComparisonReport r;
  std::map<std::string, std::string> meta{{"experiment", to_string(e.kind)},
                                          {"x0", num(e.x0)},
                                          {"t", num(e.cfg.t)},
                                          {"dt", num(e.cfg.dt)},
                                          {"n_paths", std::to_string(e.cfg.n_paths)},
                                          {"seed", std::to_string(e.cfg.seed)},
                                          {"antithetic", e.cfg.antithetic ? "true" : "false"}};
  switch (e.kind) {
    case ExperimentKind::WfKingman: {
      if (e.N < 0) throw std::invalid_argument("experiment: N must be >= 0");
      const ProcessSpec wf = ProcessSpec::wf_neutral();
      const ProcessSpec kingman = ProcessSpec::kingman_block(0.0, 0.0, std::max(e.N, 1));
      const DualityFamily D = DualityFamily::monomial();
      const Estimate lhs = estimate_duality_side(wf, D, {{e.x0}, {}}, {{}, {e.N}},
                                                 ArgumentPosition::Left, e.cfg, backend);
      const Estimate rhs = exact_duality_side(kingman, D, {e.N}, {{e.x0}, {}},
                                              ArgumentPosition::Right, e.cfg.t);
      r = compare(lhs, rhs, e.tolerance_multiplier, bias);
      meta["lhs_process"] = wf.describe();
      meta["rhs_process"] = kingman.describe();
      meta["duality"] = D.describe();
      meta["n"] = std::to_string(e.N);
      break;
    }
    case ExperimentKind::WfMoran:
    case ExperimentKind::McVsMc: {
      if (e.N < 1 || e.k1 < 0 || e.k1 > e.N)
        throw std::invalid_argument("experiment: need 0 <= k1 <= N, N >= 1");
      const ProcessSpec wf = ProcessSpec::wf_multitype(2, e.theta);
      const ProcessSpec moran = ProcessSpec::moran_multitype(e.N, 2, e.theta);
      const DualityFamily D = DualityFamily::product_gamma(e.theta, 2);
      const Estimate lhs = estimate_duality_side(wf, D, x_full, {{}, k}, ArgumentPosition::Left,
                                                 e.cfg, backend);
      Estimate rhs;
      if (e.kind == ExperimentKind::WfMoran) {
        rhs = exact_duality_side(moran, D, k, x_full, ArgumentPosition::Right, e.cfg.t);
      } else {
        EstimatorConfig c2 = e.cfg;
        c2.seed = e.cfg.seed ^ 0x5bd1e9955bd1e995ULL;
        c2.antithetic = false;
        rhs = estimate_duality_side(moran, D, {{}, k}, x_full, ArgumentPosition::Right, c2,
                                    backend);
      }
      r = compare(lhs, rhs, e.tolerance_multiplier, bias);
      meta["lhs_process"] = wf.describe();
      meta["rhs_process"] = moran.describe();
      meta["duality"] = D.describe();
      meta["k"] = std::to_string(k[0]) + "," + std::to_string(k[1]);
      meta["theta"] = num(e.theta);
      break;
    }
    case ExperimentKind::Heterozygosity: {
      const ProcessSpec wf = ProcessSpec::wf_multitype(2, 0.0);
      const ProcessSpec sip = ProcessSpec::sip(2, 0.0);
      const DualityFamily D = DualityFamily::limiting_sip();
      const Estimate lhs = estimate_duality_side(wf, D, x_full, {{}, {1, 1}},
                                                 ArgumentPosition::Left, e.cfg, backend);
      const Estimate rhs =
          exact_duality_side(sip, D, {1, 1}, x_full, ArgumentPosition::Right, e.cfg.t);
      r = compare(lhs, rhs, e.tolerance_multiplier, bias);
      meta["lhs_process"] = wf.describe();
      meta["rhs_process"] = sip.describe();
      meta["duality"] = D.describe();
      break;
    }
  }
  r.metadata = std::move(meta);
  return r;
}

}  // namespace duality
