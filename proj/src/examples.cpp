#include "duality/exact.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace duality {

namespace {

// E_{xi0}[ D(x, xi_t) ; no site of the SIP(0) configuration has emptied ],
// with D the limiting duality function. Occupied sites can only empty, so
// the event is the survival of the chain killed on leaving full occupancy.
double killed_sip_oracle(const std::vector<double>& x, const State& xi0, double t,
                         Eigen::Index* size) {
  const int d = static_cast<int>(x.size());
  long total = 0;
  for (long v : xi0) total += v;
  const GeneratorMatrix g = generator_matrix(ProcessSpec::sip(d, 0.0), total);
  const KilledGenerator k = killed_generator(g, [](const State& s) {
    return std::all_of(s.begin(), s.end(), [](long v) { return v >= 1; });
  });
  const DualityFamily D = DualityFamily::limiting_sip();
  Vector f(k.index.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    EvalPoint p{x, k.index.state(i)};
    f(i) = evaluate(D, p);
  }
  if (size) *size = k.index.size();
  const Vector Pf = matrix_exponential_apply(k.Q, f, t);
  return Pf(k.index.index_of(xi0));
}

std::vector<double> start_point(const ExampleParams& p) {
  if (p.d < 2) throw std::invalid_argument("reproduce_example: d must be >= 2");
  if (p.xs.empty()) return std::vector<double>(static_cast<size_t>(p.d), 1.0 / p.d);
  if (static_cast<int>(p.xs.size()) != p.d)
    throw std::invalid_argument("reproduce_example: xs must have d entries");
  return p.xs;
}

}  // namespace

std::string to_string(ExampleId id) {
  switch (id) {
    case ExampleId::Heterozygosity: return "heterozygosity";
    case ExampleId::X2yTwoType: return "x2y-two-type";
    case ExampleId::DTypeProduct: return "d-type-product";
    case ExampleId::X2ProductDType: return "x2-product-d-type";
  }
  return "?";
}

ExampleId example_id_from_string(const std::string& name) {
  for (ExampleId id : {ExampleId::Heterozygosity, ExampleId::X2yTwoType, ExampleId::DTypeProduct,
                       ExampleId::X2ProductDType})
    if (to_string(id) == name) return id;
  throw std::invalid_argument("unknown example id '" + name + "'");
}

ExampleRecord reproduce_example(ExampleId id, const ExampleParams& params) {
  if (params.t < 0.0) throw std::invalid_argument("reproduce_example: t must be >= 0");
  ExampleRecord rec;
  rec.id = id;
  const double t = params.t;
  std::ostringstream desc;
  desc.precision(17);
  switch (id) {
    case ExampleId::Heterozygosity: {
      const double x = params.x, y = params.y;
      rec.formula_value = x * y * std::exp(-t);
      rec.oracle_value = killed_sip_oracle({x, y}, {1, 1}, t, &rec.state_space_size);
      desc << "x=" << x << ";y=" << y << ";t=" << t;
      break;
    }
    case ExampleId::X2yTwoType: {
      const double x = params.x, y = params.y, e = std::exp(-2.0 * t);
      rec.formula_value = e / 2.0 * (x * x * y * (1.0 + e) + x * y * y * (1.0 - e));
      rec.oracle_value = killed_sip_oracle({x, y}, {2, 1}, t, &rec.state_space_size);
      desc << "x=" << x << ";y=" << y << ";t=" << t;
      break;
    }
    case ExampleId::DTypeProduct: {
      const std::vector<double> xs = start_point(params);
      double prod = 1.0;
      for (double v : xs) prod *= v;
      rec.formula_value = prod * std::exp(-(params.d - 1) * t);
      rec.oracle_value = killed_sip_oracle(xs, State(xs.size(), 1), t, &rec.state_space_size);
      desc << "d=" << params.d << ";t=" << t;
      break;
    }
    case ExampleId::X2ProductDType: {
      const std::vector<double> xs = start_point(params);
      const int d = params.d;
      double prod = 1.0;
      for (double v : xs) prod *= v;
      // The printed expression for P(X_t^d = i), taken as written.
      const double e = std::exp(-2.0 * d * t);
      double closed = 0.0;
      for (int i = 0; i < d; ++i) {
        const double delta = i == 0 ? 1.0 : 0.0;
        const double prob = e + (1.0 / d) * (1.0 - e) * delta + (1.0 - delta) * (1.0 / d) * (1.0 - e);
        closed += prod * xs[static_cast<size_t>(i)] * prob;
      }
      rec.formula_value = closed;
      State xi0(static_cast<size_t>(d), 1);
      xi0[0] = 2;
      rec.oracle_value = killed_sip_oracle(xs, xi0, t, &rec.state_space_size);
      desc << "d=" << d << ";t=" << t;
      break;
    }
  }
  if (id == ExampleId::DTypeProduct || id == ExampleId::X2ProductDType) {
    desc << ";x=";
    const std::vector<double> xs = start_point(params);
    for (size_t i = 0; i < xs.size(); ++i) desc << (i ? "," : "") << xs[i];
  }
  rec.parameters = desc.str();
  rec.abs_diff = std::fabs(rec.formula_value - rec.oracle_value);
  return rec;
}

}  // namespace duality
