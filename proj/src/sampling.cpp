#include "duality/processes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace duality {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr double kSnap = 1e-12;

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t path) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(path + 0x632be59bd9b4e019ULL)));
}

JumpSampler::JumpSampler(const GeneratorMatrix& generator) : index_(generator.index) {
  const Matrix& Q = generator.Q;
  rows_.resize(static_cast<size_t>(Q.rows()));
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    Row& r = rows_[static_cast<size_t>(i)];
    double acc = 0.0;
    for (Eigen::Index j = 0; j < Q.cols(); ++j) {
      if (j == i || Q(i, j) <= 0.0) continue;
      acc += Q(i, j);
      r.targets.push_back(j);
      r.cumulative.push_back(acc);
    }
    r.exit = acc;
    r.dropped = generator.dropped.size() ? generator.dropped(i) : 0.0;
  }
}

Eigen::Index JumpSampler::sample(Eigen::Index from, double t, Rng& rng) const {
  if (t < 0.0) throw std::invalid_argument("JumpSampler: negative horizon");
  if (from < 0 || from >= static_cast<Eigen::Index>(rows_.size()))
    throw std::out_of_range("JumpSampler: start state outside the index");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::Index cur = from;
  double clock = 0.0;
  for (;;) {
    const Row& r = rows_[static_cast<size_t>(cur)];
    const double total = r.exit + r.dropped;
    if (total <= 0.0) return cur;
    clock += -std::log1p(-unif(rng)) / total;
    if (clock > t) return cur;
    const double u = unif(rng) * total;
    if (u >= r.exit) throw std::overflow_error("JumpSampler: path left the truncated state space");
    auto it = std::upper_bound(r.cumulative.begin(), r.cumulative.end(), u);
    if (it == r.cumulative.end()) --it;
    cur = r.targets[static_cast<size_t>(it - r.cumulative.begin())];
  }
}

DiffusionSampler::DiffusionSampler(ProcessSpec spec) : spec_(std::move(spec)) {
  if (!spec_.is_diffusion())
    throw std::invalid_argument("DiffusionSampler: " + to_string(spec_.kind) + " is not a diffusion");
}

void DiffusionSampler::project(std::vector<double>& x, double total) const {
  const bool neutral = spec_.neutral();
  for (double& v : x) {
    if (v < 0.0) v = 0.0;
    if (spec_.kind != ProcessKind::Bep && v > 1.0) v = 1.0;
  }
  if (spec_.kind == ProcessKind::WfMultitype || spec_.kind == ProcessKind::Bep) {
    double s = 0.0;
    for (double v : x) s += v;
    if (s <= 0.0) throw std::runtime_error("DiffusionSampler: mass collapsed to zero");
    for (double& v : x) v *= total / s;
  }
  if (neutral) {
    const double hi = spec_.kind == ProcessKind::Bep ? total : 1.0;
    for (double& v : x) {
      if (v < kSnap) v = 0.0;
      else if (hi - v < kSnap) v = hi;
    }
  }
}

void DiffusionSampler::step(std::vector<double>& x, double h, Rng& rng,
                            std::normal_distribution<double>& normal, double sign,
                            std::vector<double>& dx) const {
  const double sh = std::sqrt(h);
  const size_t n = x.size();
  dx.assign(n, 0.0);
  switch (spec_.kind) {
    case ProcessKind::WfGeneral1d: {
      double a = 0.0, b = 0.0, p = 1.0;
      for (size_t k = 0; k < spec_.alpha.size(); ++k, p *= x[0]) a += spec_.alpha[k] * p;
      p = 1.0;
      for (size_t k = 0; k < spec_.beta.size(); ++k, p *= x[0]) b += spec_.beta[k] * p;
      dx[0] = b * h + std::sqrt(std::max(2.0 * a, 0.0)) * sh * sign * normal(rng);
      break;
    }
    case ProcessKind::WfMultitype:
    case ProcessKind::Bep: {
      // a_ii = x_i sum_{j != i} x_j and a_ij = -x_i x_j split into one
      // independent increment per unordered pair.
      const int d = static_cast<int>(n);
      for (int i = 0; i < d; ++i) {
        double drift = 0.0;
        if (spec_.kind == ProcessKind::WfMultitype) {
          drift = spec_.theta / (d - 1) * (1.0 - d * x[i]);
        } else {
          for (int j = 0; j < d; ++j) drift -= spec_.m / 4.0 * (x[i] - x[j]);
        }
        dx[i] += drift * h;
      }
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          const double w = sign * normal(rng);
          const double amp = std::sqrt(std::max(x[i] * x[j], 0.0)) * sh * w;
          dx[i] += amp;
          dx[j] -= amp;
        }
      break;
    }
    case ProcessKind::SteppingStoneForward: {
      const Matrix& p = spec_.kernel;
      for (size_t l = 0; l < n; ++l) {
        double drift = 0.0;
        for (size_t j = 0; j < n; ++j)
          drift += (p(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) +
                    p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l))) *
                   (x[j] - x[l]);
        const double a = 2.0 * x[l] * (1.0 - x[l]);
        dx[l] = drift * h + std::sqrt(std::max(a, 0.0)) * sh * sign * normal(rng);
      }
      break;
    }
    default:
      throw std::logic_error("DiffusionSampler: unsupported kind");
  }
  for (size_t i = 0; i < n; ++i) {
    x[i] += dx[i];
    if (!std::isfinite(x[i])) throw std::runtime_error("DiffusionSampler: NaN in path");
  }
}

std::vector<double> DiffusionSampler::sample(std::span<const double> x0, double t, double dt,
                                             Rng& rng, bool negate_noise) const {
  std::vector<double> x(x0.begin(), x0.end());
  drift_diffusion(spec_, x0);  // validates the start point
  if (t < 0.0) throw std::invalid_argument("DiffusionSampler: negative horizon");
  if (t == 0.0) return x;
  if (!(dt > 0.0)) throw std::invalid_argument("DiffusionSampler: dt must be > 0");
  if (dt >= t) throw std::invalid_argument("DiffusionSampler: dt must be smaller than t");

  const long steps = static_cast<long>(std::ceil(t / dt - 1e-9));
  const double h = t / static_cast<double>(steps);
  double total = 0.0;
  for (double v : x) total += v;
  const double sign = negate_noise ? -1.0 : 1.0;
  const bool neutral = spec_.neutral();
  const bool simplex = spec_.kind == ProcessKind::WfMultitype || spec_.kind == ProcessKind::WfGeneral1d;

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> scratch;
  project(x, total);
  for (long s = 0; s < steps; ++s) {
    if (neutral && simplex &&
        std::any_of(x.begin(), x.end(), [&](double v) { return v == 0.0 || v == 1.0; }) &&
        (x.size() == 1 || std::any_of(x.begin(), x.end(), [](double v) { return v == 1.0; })))
      break;
    step(x, h, rng, normal, sign, scratch);
    project(x, total);
  }
  return x;
}

State sample_jump(const ProcessSpec& spec, const State& k0, double t, Rng& rng, long bound) {
  if (t == 0.0) return k0;
  if (bound < 0 && (spec.kind == ProcessKind::Sip || spec.kind == ProcessKind::SteppingStoneDual)) {
    long s = 0;
    for (long v : k0) s += v;
    bound = s;
  }
  const GeneratorMatrix g = generator_matrix(spec, bound);
  const JumpSampler sampler(g);
  return g.index.state(sampler.sample(g.index.index_of(k0), t, rng));
}

std::vector<double> sample_diffusion(const ProcessSpec& spec, std::span<const double> x0,
                                     double t, double dt, Rng& rng) {
  return DiffusionSampler(spec).sample(x0, t, dt, rng);
}

}  // namespace duality
