#include "duality/exact.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace duality {

Matrix matrix_exponential(const Matrix& Q, double t) {
  if (Q.rows() != Q.cols()) throw std::invalid_argument("matrix_exponential: Q must be square");
  if (t < 0.0) throw std::invalid_argument("matrix_exponential: t must be >= 0");
  if (t == 0.0 || Q.size() == 0) return Matrix::Identity(Q.rows(), Q.cols());
  const Matrix tQ = t * Q;
  return tQ.exp();
}

Vector matrix_exponential_apply(const Matrix& Q, const Vector& v, double t,
                                ExpDirection direction) {
  if (v.size() != Q.rows())
    throw std::invalid_argument("matrix_exponential_apply: vector length does not match Q");
  if (t == 0.0) return v;
  const Matrix E = matrix_exponential(Q, t);
  return direction == ExpDirection::Observable ? Vector(E * v) : Vector(E.transpose() * v);
}

Vector matrix_exponential_apply(const GeneratorMatrix& Q, const Vector& v, double t,
                                ExpDirection direction) {
  return matrix_exponential_apply(Q.Q, v, t, direction);
}

ExactExpectation exact_expectation(const GeneratorMatrix& Q, const Vector& f, const State& k0,
                                   double t) {
  const Eigen::Index i = Q.index.index_of(k0);
  const Vector Pf = matrix_exponential_apply(Q, f, t);
  ExactExpectation out;
  out.value = Pf(i);
  out.method = "matrix-exponential";
  out.state_space_size = Q.index.size();
  if (!std::isfinite(out.value)) throw std::runtime_error("exact_expectation: non-finite value");
  return out;
}

ResidualReport check_generator_duality(const Matrix& K, const Matrix& Khat, const Matrix& D,
                                       const std::string& left_name,
                                       const std::string& right_name) {
  return check_intertwiner(K, Khat, D, {}, {}, left_name + " ~ " + right_name);
}

ResidualReport check_semigroup_duality(const Matrix& K, const Matrix& Khat, const Matrix& D,
                                       double t) {
  if (K.rows() != D.rows() || Khat.rows() != D.cols())
    throw std::invalid_argument("check_semigroup_duality: dimension mismatch");
  const Matrix R = matrix_exponential(K, t) * D - D * matrix_exponential(Khat, t).transpose();
  ResidualReport rep;
  rep.identity = "e^{tK} D - D e^{tKhat^T}, t=" + std::to_string(t);
  rep.max_abs_residual = R.size() ? R.cwiseAbs().maxCoeff() : 0.0;
  rep.rows = {0, D.rows()};
  rep.cols = {0, D.cols()};
  return rep;
}

Matrix duality_matrix(const DualityFamily& family, const StateIndex& rows,
                      const StateIndex& cols) {
  Matrix D(rows.size(), cols.size());
  EvalPoint p;
  for (Eigen::Index i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < cols.size(); ++j) {
      p.discrete = rows.state(i);
      p.discrete.insert(p.discrete.end(), cols.state(j).begin(), cols.state(j).end());
      D(i, j) = evaluate(family, p);
    }
  }
  return D;
}

double truncation_leak(const GeneratorMatrix& Q, const State& k0, double t) {
  const Eigen::Index n = Q.Q.rows();
  Matrix A = Matrix::Zero(n + 1, n + 1);
  A.topLeftCorner(n, n) = Q.Q;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double out = Q.dropped.size() ? Q.dropped(i) : 0.0;
    A(i, i) -= out;
    A(i, n) = out;
  }
  const Matrix E = matrix_exponential(A, t);
  return E(Q.index.index_of(k0), n);
}

KilledGenerator killed_generator(const GeneratorMatrix& Q,
                                 const std::function<bool(const State&)>& keep) {
  std::vector<Eigen::Index> kept;
  std::vector<State> states;
  for (Eigen::Index i = 0; i < Q.index.size(); ++i)
    if (keep(Q.index.state(i))) {
      kept.push_back(i);
      states.push_back(Q.index.state(i));
    }
  const auto n = static_cast<Eigen::Index>(kept.size());
  KilledGenerator out{Matrix(n, n), StateIndex(Q.index.d(), Q.index.N(), Q.index.mode(), states)};
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) out.Q(a, b) = Q.Q(kept[a], kept[b]);
    if (Q.dropped.size()) out.Q(a, a) -= Q.dropped(kept[a]);
  }
  return out;
}

// ----------------------------------------------------------------- sides

ContinuousSide ContinuousSide::from_process(const ProcessSpec& spec) {
  if (!spec.is_diffusion())
    throw std::invalid_argument("ContinuousSide: " + to_string(spec.kind) + " is not a diffusion");
  ContinuousSide side;
  side.name = spec.describe();
  side.coefficients = [spec](std::span<const double> x) { return drift_diffusion(spec, x); };
  switch (spec.kind) {
    case ProcessKind::WfGeneral1d: side.dim = 1; break;
    case ProcessKind::WfMultitype: {
      side.dim = spec.d;
      side.tangent = Matrix::Zero(spec.d, spec.d - 1);
      side.tangent.topRows(spec.d - 1).setIdentity();
      side.tangent.row(spec.d - 1).setConstant(-1.0);
      break;
    }
    default: side.dim = spec.d; break;
  }
  return side;
}

ContinuousSide ContinuousSide::one_dimensional(std::string name,
                                               std::function<double(double)> alpha,
                                               std::function<double(double)> beta,
                                               std::function<double(double)> potential) {
  ContinuousSide side;
  side.name = std::move(name);
  side.dim = 1;
  side.coefficients = [alpha = std::move(alpha), beta = std::move(beta)](std::span<const double> x) {
    DriftDiffusion dd;
    dd.drift = Vector::Constant(1, beta ? beta(x[0]) : 0.0);
    dd.diffusion = Matrix::Constant(1, 1, alpha ? 2.0 * alpha(x[0]) : 0.0);
    return dd;
  };
  if (potential)
    side.potential = [potential = std::move(potential)](std::span<const double> x) {
      return potential(x[0]);
    };
  return side;
}

DiscreteSide DiscreteSide::from_generator(std::string name, const GeneratorMatrix& g) {
  return DiscreteSide{std::move(name), g.Q, g.index};
}

namespace {

struct Offsets {
  size_t continuous = 0;
  size_t discrete = 0;
};

size_t continuous_width(const DualitySide& s) {
  return std::holds_alternative<ContinuousSide>(s) ? static_cast<size_t>(std::get<ContinuousSide>(s).dim)
                                                   : 0;
}

size_t discrete_width(const DualitySide& s) {
  return std::holds_alternative<DiscreteSide>(s)
             ? static_cast<size_t>(std::get<DiscreteSide>(s).index.d())
             : 0;
}

double apply_continuous(const ContinuousSide& side, const DualityFamily& family,
                        const EvalPoint& p, size_t off, const PointwiseOptions& opt) {
  if (p.continuous.size() < off + static_cast<size_t>(side.dim))
    throw std::invalid_argument("pointwise check: point has too few continuous coordinates");
  const std::span<const double> block(p.continuous.data() + off, static_cast<size_t>(side.dim));
  const DriftDiffusion dd = side.coefficients(block);
  const Eigen::Index nu = dd.drift.size();
  Matrix E = side.tangent;
  if (E.size() == 0) E = Matrix::Identity(side.dim, side.dim);
  if (E.rows() != side.dim || E.cols() != nu)
    throw std::invalid_argument("pointwise check: tangent does not match the coefficients");

  double value = 0.0;
  Vector grad(nu);
  Matrix hess(nu, nu);
  if (opt.analytic && family.differentiable()) {
    const ValueDerivatives vd = continuous_derivatives(family, p);
    value = vd.value;
    const Vector g = vd.gradient.segment(static_cast<Eigen::Index>(off), side.dim);
    const Matrix H = vd.hessian.block(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(off),
                                      side.dim, side.dim);
    grad = E.transpose() * g;
    hess = E.transpose() * H * E;
  } else {
    const double h = opt.h;
    auto at = [&](const Vector& du) {
      EvalPoint q = p;
      const Vector dx = E * du;
      for (Eigen::Index i = 0; i < dx.size(); ++i) q.continuous[off + static_cast<size_t>(i)] += dx(i);
      return evaluate(family, q);
    };
    value = evaluate(family, p);
    for (Eigen::Index i = 0; i < nu; ++i) {
      const Vector ei = Vector::Unit(nu, i) * h;
      const double fp = at(ei), fm = at(-ei);
      grad(i) = (fp - fm) / (2.0 * h);
      hess(i, i) = (fp - 2.0 * value + fm) / (h * h);
      for (Eigen::Index j = 0; j < i; ++j) {
        const Vector ej = Vector::Unit(nu, j) * h;
        const double v = (at(ei + ej) - at(ei - ej) - at(ej - ei) + at(-ei - ej)) / (4.0 * h * h);
        hess(i, j) = hess(j, i) = v;
      }
    }
  }
  double out = 0.5 * (dd.diffusion.cwiseProduct(hess)).sum() + dd.drift.dot(grad);
  if (side.potential) out += side.potential(block) * value;
  return out;
}

double apply_discrete(const DiscreteSide& side, const DualityFamily& family, const EvalPoint& p,
                      size_t off) {
  const size_t w = static_cast<size_t>(side.index.d());
  if (p.discrete.size() < off + w)
    throw std::invalid_argument("pointwise check: point has too few discrete coordinates");
  const State s(p.discrete.begin() + static_cast<std::ptrdiff_t>(off),
                p.discrete.begin() + static_cast<std::ptrdiff_t>(off + w));
  const Eigen::Index i = side.index.index_of(s);
  double out = 0.0;
  EvalPoint q = p;
  for (Eigen::Index j = 0; j < side.K.cols(); ++j) {
    const double k = side.K(i, j);
    if (k == 0.0) continue;
    const State& t = side.index.state(j);
    std::copy(t.begin(), t.end(), q.discrete.begin() + static_cast<std::ptrdiff_t>(off));
    out += k * evaluate(family, q);
  }
  return out;
}

double apply_side(const DualitySide& side, const DualityFamily& family, const EvalPoint& p,
                  Offsets off, const PointwiseOptions& opt) {
  if (const auto* c = std::get_if<ContinuousSide>(&side))
    return apply_continuous(*c, family, p, off.continuous, opt);
  return apply_discrete(std::get<DiscreteSide>(side), family, p, off.discrete);
}

std::string side_name(const DualitySide& s) {
  return std::visit([](const auto& v) { return v.name; }, s);
}

}  // namespace

ResidualReport check_pointwise_duality(const DualitySide& left, const DualitySide& right,
                                       const DualityFamily& family,
                                       const std::vector<EvalPoint>& points,
                                       const PointwiseOptions& options) {
  if (points.empty()) throw std::invalid_argument("pointwise check: empty grid");
  const Offsets right_off{continuous_width(left), discrete_width(left)};
  ResidualReport rep;
  rep.identity = side_name(left) + " ~ " + side_name(right) + " via " + family.describe();
  rep.rows = {0, static_cast<Eigen::Index>(points.size())};
  rep.cols = {0, 1};
  for (const EvalPoint& p : points) {
    const double l = apply_side(left, family, p, {}, options);
    const double r = apply_side(right, family, p, right_off, options);
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::fabs(l - r));
  }
  return rep;
}

}  // namespace duality
