#pragma once

// Exact engine: matrix exponentials over enumerated state spaces, exact
// expectations, duality checks at generator and semigroup level, and
// pointwise checks of generator dualities involving diffusions.

#include "duality/algebra.hpp"
#include "duality/dualities.hpp"
#include "duality/processes.hpp"
#include "duality/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace duality {

/// Which semigroup to apply. Observable: e^{tQ} v, so entry k is
/// E_k v(X_t). Distribution: e^{tQ^T} v, which evolves a row law.
enum class ExpDirection { Observable, Distribution };

/// e^{tQ} (or e^{tQ^T}) by Pade scaling and squaring.
Matrix matrix_exponential(const Matrix& Q, double t);

Vector matrix_exponential_apply(const Matrix& Q, const Vector& v, double t,
                                ExpDirection direction = ExpDirection::Observable);
Vector matrix_exponential_apply(const GeneratorMatrix& Q, const Vector& v, double t,
                                ExpDirection direction = ExpDirection::Observable);

struct ExactExpectation {
  double value = 0.0;
  std::string method;  // "matrix-exponential" or "closed-form"
  Eigen::Index state_space_size = 0;
};

/// E_{k0} f(X_t) for the chain generated by Q.
ExactExpectation exact_expectation(const GeneratorMatrix& Q, const Vector& f, const State& k0,
                                   double t);

/// K D - D Khat^T for two jump generators, labelled with the process names.
ResidualReport check_generator_duality(const Matrix& K, const Matrix& Khat, const Matrix& D,
                                       const std::string& left_name,
                                       const std::string& right_name);

/// e^{tK} D - D e^{tKhat^T}.
ResidualReport check_semigroup_duality(const Matrix& K, const Matrix& Khat, const Matrix& D,
                                       double t);

/// Matrix [D(row state, column state)] with EvalPoint.discrete = row ++ column.
Matrix duality_matrix(const DualityFamily& family, const StateIndex& rows,
                      const StateIndex& cols);

/// Probability that the chain started at k0 has taken a transition that
/// was dropped by truncation before time t.
double truncation_leak(const GeneratorMatrix& Q, const State& k0, double t);

/// Sub-generator of Q restricted to the states satisfying `keep`. Rate
/// leaving the kept set is killing, so rows sum to minus the killing rate.
struct KilledGenerator {
  Matrix Q;
  StateIndex index;
};

KilledGenerator killed_generator(const GeneratorMatrix& Q,
                                 const std::function<bool(const State&)>& keep);

// ----------------------------------------------------------- pointwise checks

/// A second-order operator 1/2 sum a_ij d_i d_j + sum b_i d_i + V acting on
/// the continuous coordinates of one argument of a duality function.
///
/// `coefficients` receives that argument (the duality function's own
/// coordinates) and returns b and a in the generator's coordinates u.
/// `tangent` maps u-directions to argument directions (x = x0 + E u), so
/// derivatives in u are E^T grad and E^T H E. An empty tangent is the
/// identity.
struct ContinuousSide {
  std::string name;
  int dim = 1;  // number of duality-function coordinates this side owns
  std::function<DriftDiffusion(std::span<const double>)> coefficients;
  std::function<double(std::span<const double>)> potential;
  Matrix tangent;

  /// Generator of a diffusion spec. WfMultitype uses the reduced
  /// coordinates and the simplex tangent.
  static ContinuousSide from_process(const ProcessSpec& spec);

  /// alpha(x) d^2/dx^2 + beta(x) d/dx + V(x) in one variable.
  static ContinuousSide one_dimensional(std::string name, std::function<double(double)> alpha,
                                        std::function<double(double)> beta,
                                        std::function<double(double)> potential = {});
};

/// A matrix acting on a discrete argument: (K f)(s) = sum_s' K(s, s') f(s').
struct DiscreteSide {
  std::string name;
  Matrix K;
  StateIndex index;

  static DiscreteSide from_generator(std::string name, const GeneratorMatrix& g);
};

using DualitySide = std::variant<ContinuousSide, DiscreteSide>;

struct PointwiseOptions {
  double h = 1e-4;       // finite-difference step
  bool analytic = true;  // use the catalog's analytic derivatives if available
};

/// Max over `points` of |(K_l D)(p) - (Khat_r D)(p)|, where `left` acts on
/// the left argument of D and `right` on the right argument. Continuous
/// coordinates of each point are the left side's block followed by the
/// right side's; the same holds for discrete coordinates.
ResidualReport check_pointwise_duality(const DualitySide& left, const DualitySide& right,
                                       const DualityFamily& family,
                                       const std::vector<EvalPoint>& points,
                                       const PointwiseOptions& options = {});

// ---------------------------------------------------------- worked examples

enum class ExampleId { Heterozygosity, X2yTwoType, DTypeProduct, X2ProductDType };

std::string to_string(ExampleId id);
ExampleId example_id_from_string(const std::string& name);

struct ExampleParams {
  double x = 0.3;
  double y = 0.7;
  double t = 0.5;
  int d = 3;
  std::vector<double> xs;  // d-type start point; empty means uniform 1/d
};

struct ExampleRecord {
  ExampleId id = ExampleId::Heterozygosity;
  double formula_value = 0.0;
  double oracle_value = 0.0;
  double abs_diff = 0.0;
  Eigen::Index state_space_size = 0;
  std::string parameters;
};

/// Closed-form value printed for the example next to the value obtained
/// from the killed SIP(0) chain by matrix exponential.
ExampleRecord reproduce_example(ExampleId id, const ExampleParams& params = {});

// ------------------------------------------------------- exact arithmetic

/// Moran (two types, no mutation, time scale 2) against Kingman block
/// counting with D_N, computed in exact rationals. Returns true iff
/// K D - D Khat^T is identically zero. `max_abs_residual` receives the
/// largest entry converted to double.
bool moran_kingman_exact(int N, double* max_abs_residual = nullptr);

}  // namespace duality
